//! Sparse multivariate Laurent polynomials with exact integer coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so every polynomial
//! has one canonical representation: terms in ascending lexicographic order
//! of exponents, no zero coefficients stored. The text rendering walks that
//! order, which makes it injective — equal strings mean equal polynomials —
//! and the parser accepts exactly what the renderer produces (plus arbitrary
//! whitespace). Division is exact or it is an error: there is no remainder.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector of a single Laurent monomial; entries may be negative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<i64>);

impl Monomial {
    pub fn unit(rank: usize) -> Self {
        Monomial(vec![0; rank])
    }

    pub fn new(exponents: Vec<i64>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Product of monomials = componentwise sum of exponents.
    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Quotient of monomials = componentwise difference (always defined).
    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// A Laurent polynomial in `rank` variables over the integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(rank: usize, value: impl Into<BigInt>) -> Self {
        let mut p = LaurentPoly::zero(rank);
        p.add_term(Monomial::unit(rank), value.into());
        p
    }

    pub fn one(rank: usize) -> Self {
        LaurentPoly::constant(rank, 1)
    }

    /// The generator `x_{i+1}` (0-based `i`).
    pub fn generator(rank: usize, i: usize) -> Self {
        assert!(i < rank, "generator index out of range");
        let mut exps = vec![0i64; rank];
        exps[i] = 1;
        let mut p = LaurentPoly::zero(rank);
        p.add_term(Monomial(exps), BigInt::one());
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_unit() && c.is_one())
                .unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (ascending lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Adds `coeff · m` in place, dropping the term if it cancels to zero.
    fn add_term(&mut self, m: Monomial, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        debug_assert_eq!(m.rank(), self.rank);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_rank(&self, other: &LaurentPoly) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_rank(other)?;
        let mut out = LaurentPoly::zero(self.rank);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Non-negative power by repeated squaring; `p^0 = 1`.
    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut base = self.clone();
        let mut out = LaurentPoly::one(self.rank);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base).expect("equal ranks");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("equal ranks");
            }
        }
        out
    }

    /// Leading term in the canonical order (largest exponent vector).
    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Exact division: returns `q` with `q * divisor == self`, or
    /// `Error::InexactDivision` when no integer-coefficient Laurent quotient
    /// exists. Division by zero is its own error.
    ///
    /// The quotient is extracted leading-term first. Because minimal and
    /// maximal exponents are additive under multiplication, every exponent of
    /// a true quotient is confined to a finite box computed from `self` and
    /// `divisor`; a candidate term escaping that box proves inexactness, which
    /// also bounds the number of iterations.
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_rank(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(self.rank));
        }
        // Per-variable exponent box for the quotient.
        let bounds = |p: &LaurentPoly| -> (Vec<i64>, Vec<i64>) {
            let mut lo = vec![i64::MAX; p.rank];
            let mut hi = vec![i64::MIN; p.rank];
            for m in p.terms.keys() {
                for (i, &e) in m.exponents().iter().enumerate() {
                    lo[i] = lo[i].min(e);
                    hi[i] = hi[i].max(e);
                }
            }
            (lo, hi)
        };
        let (p_lo, p_hi) = bounds(self);
        let (d_lo, d_hi) = bounds(divisor);
        let q_lo: Vec<i64> = p_lo.iter().zip(&d_lo).map(|(a, b)| a - b).collect();
        let q_hi: Vec<i64> = p_hi.iter().zip(&d_hi).map(|(a, b)| a - b).collect();
        if q_lo.iter().zip(&q_hi).any(|(l, h)| l > h) {
            return Err(Error::InexactDivision);
        }

        let (dm, dc) = divisor.leading().expect("divisor is nonzero");
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero(self.rank);
        while let Some((rm, rc)) = rem.leading() {
            let tm = rm.div(&dm);
            let in_box = tm
                .exponents()
                .iter()
                .zip(q_lo.iter().zip(&q_hi))
                .all(|(&e, (&l, &h))| l <= e && e <= h);
            if !in_box {
                return Err(Error::InexactDivision);
            }
            let (tc, tr) = num_integer::Integer::div_rem(rc, &dc);
            if !tr.is_zero() {
                return Err(Error::InexactDivision);
            }
            // rem -= t * divisor; the leading term cancels by construction.
            for (m, c) in &divisor.terms {
                rem.add_term(tm.mul(m), -(&tc * c));
            }
            quot.add_term(tm, tc);
        }
        Ok(quot)
    }

    /// Exact evaluation at a point with all coordinates nonzero.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.rank {
            return Err(Error::RankMismatch(self.rank, point.len()));
        }
        if let Some(i) = point.iter().position(|v| v.is_zero()) {
            return Err(Error::ZeroCoordinate(i));
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = BigRational::from(c.clone());
            for (v, &e) in point.iter().zip(m.exponents()) {
                if e == 0 {
                    continue;
                }
                let p = v.pow(e.unsigned_abs().try_into().expect("tiny exponent"));
                term *= if e > 0 { p } else { p.recip() };
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Canonical text form with generators `sym1, sym2, …`.
    ///
    /// Terms appear in ascending lexicographic exponent order joined by
    /// ` + ` / ` - `; unit coefficients are omitted next to variables and
    /// unit exponents are omitted entirely, e.g. `x1^-1 + x1^-1*x2`.
    pub fn render(&self, sym: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("{sym}{}", i + 1)
                    } else {
                        format!("{sym}{}^{e}", i + 1)
                    }
                })
                .collect();
            if factors.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }

    /// The canonical encoding used as a dedup and sort key.
    pub fn canonical_key(&self) -> String {
        self.render("x")
    }

    /// Parses the canonical text form (with generator prefix `sym`).
    pub fn parse(text: &str, rank: usize, sym: &str) -> Result<LaurentPoly> {
        Parser {
            chars: text.char_indices().peekable(),
            text,
            rank,
            sym,
        }
        .parse()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    rank: usize,
    sym: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::PolyParse {
            text: self.text.to_string(),
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn parse(mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero(self.rank);
        self.skip_ws();
        if self.chars.peek().is_none() {
            return Err(self.err("empty string"));
        }
        let mut negate = false;
        if matches!(self.chars.peek(), Some((_, '-'))) {
            self.chars.next();
            negate = true;
        }
        loop {
            let term = self.term()?;
            acc = acc.add(&if negate { term.neg() } else { term })?;
            self.skip_ws();
            match self.chars.next() {
                None => return Ok(acc),
                Some((_, '+')) => negate = false,
                Some((_, '-')) => negate = true,
                Some((_, c)) => return Err(self.err(format!("unexpected character {c:?}"))),
            }
            self.skip_ws();
        }
    }

    /// One term: factors separated by `*`, each an integer or a variable
    /// with optional (possibly negative) exponent.
    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::one(self.rank);
        loop {
            self.skip_ws();
            let factor = match self.chars.peek() {
                Some(&(_, c)) if c.is_ascii_digit() => {
                    LaurentPoly::constant(self.rank, self.integer()?)
                }
                Some(&(_, c)) if c.is_ascii_alphabetic() => self.variable()?,
                _ => return Err(self.err("expected a factor")),
            };
            acc = acc.mul(&factor)?;
            self.skip_ws();
            if matches!(self.chars.peek(), Some((_, '*'))) {
                self.chars.next();
            } else {
                return Ok(acc);
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let mut digits = String::new();
        while matches!(self.chars.peek(), Some((_, c)) if c.is_ascii_digit()) {
            digits.push(self.chars.next().unwrap().1);
        }
        digits
            .parse::<BigInt>()
            .map_err(|e| self.err(format!("bad integer: {e}")))
    }

    fn variable(&mut self) -> Result<LaurentPoly> {
        let mut name = String::new();
        while matches!(self.chars.peek(), Some((_, c)) if c.is_ascii_alphabetic()) {
            name.push(self.chars.next().unwrap().1);
        }
        if name != self.sym {
            return Err(self.err(format!(
                "unknown generator prefix {name:?} (expected {:?})",
                self.sym
            )));
        }
        let idx = self.integer()?;
        let idx: usize = idx
            .try_into()
            .map_err(|_| self.err("variable index out of range"))?;
        if idx == 0 || idx > self.rank {
            return Err(self.err(format!(
                "variable index {idx} out of range 1..={}",
                self.rank
            )));
        }
        let mut exp: i64 = 1;
        if matches!(self.chars.peek(), Some((_, '^'))) {
            self.chars.next();
            let mut neg = false;
            if matches!(self.chars.peek(), Some((_, '-'))) {
                self.chars.next();
                neg = true;
            }
            let mag: i64 = self
                .integer()?
                .try_into()
                .map_err(|_| self.err("exponent out of range"))?;
            exp = if neg { -mag } else { mag };
        }
        let mut exps = vec![0i64; self.rank];
        exps[idx - 1] = exp;
        let mut p = LaurentPoly::zero(self.rank);
        p.add_term(Monomial(exps), BigInt::one());
        Ok(p)
    }
}
