//! Skew-symmetrizable exchange matrices, their symmetrizers and diagrams.
//!
//! An exchange matrix has zero diagonal and opposite signs across the
//! diagonal (`b_ij > 0` iff `b_ji < 0`), and admits a positive integer
//! diagonal matrix `D` with `BD` skew-symmetric. Matrix mutation, the
//! simultaneous permutation action, diagram extraction, and detection of
//! mutation-finiteness all live here.
//!
//! Connectivity of the underlying diagram is *not* required to build a
//! matrix (mutation-finiteness of disconnected diagrams is meaningful and
//! used when classifying small diagrams), but the operations for which it
//! matters — unique minimal symmetrizers, class enumeration — insist on it.

use crate::error::{Error, Result};
use crate::perm::Permutation;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;

/// Square integer matrix with zero diagonal and the sign condition
/// (`b_ij > 0` iff `b_ji < 0`), checked at construction.
///
/// Skew-symmetrizability — existence of the positive diagonal `D` — is *not*
/// part of construction: the pure relabeling action makes sense without it.
/// Every seed-level entry point checks [`ExchangeMatrix::is_symmetrizable`]
/// before doing algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExchangeMatrix {
    n: usize,
    entries: Vec<i64>, // row-major
}

impl ExchangeMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::NotSymmetrizable(format!(
                    "expected {n} columns, found a row with {}",
                    row.len()
                )));
            }
        }
        let entries: Vec<i64> = rows.into_iter().flatten().collect();
        let m = ExchangeMatrix { n, entries };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0 {
                return Err(Error::NonzeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = self.get(i, j);
                let b = self.get(j, i);
                let consistent = (a == 0 && b == 0) || (a > 0 && b < 0) || (a < 0 && b > 0);
                if !consistent {
                    return Err(Error::SignCondition(i, j));
                }
            }
        }
        Ok(())
    }

    /// Whether a positive diagonal symmetrizer exists (componentwise ratio
    /// propagation stays consistent around every cycle).
    pub fn is_symmetrizable(&self) -> bool {
        self.symmetrizer_ratios().is_ok()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == -self.get(j, i)))
    }

    /// Matrix mutation at position `k` (an involution).
    ///
    /// Entries in row or column `k` flip sign; every other entry picks up
    /// `(|b_ik| b_kj + b_ik |b_kj|) / 2`, which is always an even sum.
    /// Arithmetic runs in 128 bits; entries that leave the `i64` range are a
    /// documented panic (unreachable at the scales this crate targets).
    pub fn mutated(&self, k: usize) -> ExchangeMatrix {
        assert!(k < self.n, "mutation index {k} out of range {}", self.n);
        let n = self.n;
        let mut out = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                if i == k || j == k {
                    out[idx] = -self.entries[idx];
                } else {
                    let bik = self.get(i, k) as i128;
                    let bkj = self.get(k, j) as i128;
                    let adj = bik.abs() * bkj + bik * bkj.abs();
                    debug_assert!(adj % 2 == 0);
                    let val = self.entries[idx] as i128 + adj / 2;
                    out[idx] = val.to_i64().expect("exchange matrix entry overflow");
                }
            }
        }
        ExchangeMatrix { n, entries: out }
    }

    /// Simultaneous row/column permutation: entry `(i, j)` of the result is
    /// the entry at the preimages of `i` and `j`.
    pub fn permuted(&self, sigma: &Permutation) -> ExchangeMatrix {
        assert_eq!(sigma.n(), self.n, "permutation size mismatch");
        let n = self.n;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                out[sigma.apply(i) * n + sigma.apply(j)] = self.get(i, j);
            }
        }
        ExchangeMatrix { n, entries: out }
    }

    /// Reindexes by an arbitrary position map: entry `(i, j)` of the result
    /// is `b_{pos[i], pos[j]}`.
    pub fn reindexed(&self, pos: &[usize]) -> ExchangeMatrix {
        assert_eq!(pos.len(), self.n);
        let n = self.n;
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(pos[i], pos[j]))
            .collect();
        ExchangeMatrix { n, entries }
    }

    /// The opposite matrix `-B` (always a valid exchange matrix).
    pub fn opposite(&self) -> ExchangeMatrix {
        ExchangeMatrix {
            n: self.n,
            entries: self.entries.iter().map(|&v| -v).collect(),
        }
    }

    /// Vertex sets of the connected components of the underlying diagram,
    /// each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for u in 0..n {
                    if !seen[u] && (self.get(v, u) != 0 || self.get(u, v) != 0) {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The principal submatrix on `verts` (which must be sorted).
    pub fn submatrix(&self, verts: &[usize]) -> ExchangeMatrix {
        let entries = verts
            .iter()
            .flat_map(|&i| verts.iter().map(move |&j| self.get(i, j)))
            .collect();
        ExchangeMatrix {
            n: verts.len(),
            entries,
        }
    }

    /// Consistent per-vertex symmetrizer ratios (existence check), computed
    /// per component with the component's least vertex normalized to 1.
    fn symmetrizer_ratios(&self) -> Result<Vec<BigRational>> {
        let n = self.n;
        let mut ratio: Vec<Option<BigRational>> = vec![None; n];
        for comp in self.components() {
            let root = comp[0];
            ratio[root] = Some(BigRational::one());
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                let di = ratio[i].clone().expect("assigned before queueing");
                for j in 0..n {
                    let bij = self.get(i, j);
                    if bij == 0 {
                        continue;
                    }
                    // b_ij d_j = -b_ji d_i  =>  d_j = d_i * (-b_ji) / b_ij
                    let dj = &di
                        * BigRational::new(BigInt::from(-self.get(j, i)), BigInt::from(bij));
                    match &ratio[j] {
                        None => {
                            ratio[j] = Some(dj);
                            queue.push_back(j);
                        }
                        Some(existing) => {
                            if *existing != dj {
                                return Err(Error::NotSymmetrizable(format!(
                                    "inconsistent symmetrizer ratio on the cycle through \
                                     vertices {} and {}",
                                    i + 1,
                                    j + 1
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(ratio.into_iter().map(|r| r.unwrap()).collect())
    }

    /// The minimal positive integer symmetrizer. Requires a connected
    /// diagram, where minimality makes the symmetrizer unique.
    pub fn symmetrizer(&self) -> Result<Symmetrizer> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let ratios = self.symmetrizer_ratios()?;
        let lcm = ratios
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = ratios.iter().map(|r| (r * &lcm).to_integer()).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let d: Vec<i64> = ints
            .iter()
            .map(|v| {
                (v / &gcd)
                    .to_i64()
                    .ok_or_else(|| Error::BadSymmetrizer("entry overflows i64".into()))
            })
            .collect::<Result<_>>()?;
        let sym = Symmetrizer { d };
        debug_assert!(sym.symmetrizes(self));
        Ok(sym)
    }

    /// The minimal positive symmetrizer of each connected component,
    /// assembled entrywise; defined for any symmetrizable matrix.
    pub fn componentwise_symmetrizer(&self) -> Result<Symmetrizer> {
        let mut d = vec![1i64; self.n];
        for component in self.components() {
            let sub = self.submatrix(&component).symmetrizer()?;
            for (slot, &v) in component.iter().enumerate() {
                d[v] = sub.get(slot);
            }
        }
        Symmetrizer::validated(self, d)
    }

    /// The weighted diagram: one arc `i -> j` of weight `-b_ij * b_ji` for
    /// each pair with `b_ij > 0`.
    pub fn to_diagram(&self) -> Diagram {
        let mut arcs = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let b = self.get(i, j);
                if b > 0 {
                    arcs.push(Arc {
                        from: i,
                        to: j,
                        weight: b * (-self.get(j, i)),
                    });
                }
            }
        }
        arcs.sort_unstable();
        Diagram { n: self.n, arcs }
    }

    /// Canonical representative of the simultaneous-permutation orbit: the
    /// entry vector is minimized over vertex relabelings. Exhaustive up to
    /// rank 8; beyond that only permutations preserving a vertex invariant
    /// (sorted multiset of incident `(weight, out, in)` data) are tried.
    pub fn canonical_form(&self) -> ExchangeMatrix {
        let n = self.n;
        if n <= 1 {
            return self.clone();
        }
        let mut best: Option<Vec<i64>> = None;
        let consider = |best: &mut Option<Vec<i64>>, cand: ExchangeMatrix| {
            if best.as_ref().map_or(true, |b| cand.entries < *b) {
                *best = Some(cand.entries);
            }
        };
        if n <= 8 {
            for sigma in Permutation::all(n) {
                consider(&mut best, self.permuted(&sigma));
            }
        } else {
            let invariant = |v: usize| -> Vec<(i64, i64, i64)> {
                let mut inc: Vec<(i64, i64, i64)> = (0..n)
                    .filter(|&u| u != v)
                    .map(|u| {
                        let out = self.get(v, u);
                        let inn = self.get(u, v);
                        (out * -inn, out, inn)
                    })
                    .collect();
                inc.sort_unstable();
                inc
            };
            let invs: Vec<_> = (0..n).map(invariant).collect();
            for sigma in Permutation::all(n)
                .filter(|s| (0..n).all(|v| invs[v] == invs[s.apply(v)]))
            {
                consider(&mut best, self.permuted(&sigma));
            }
        }
        ExchangeMatrix {
            n,
            entries: best.expect("at least the identity permutation applies"),
        }
    }
}

impl fmt::Display for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Minimal positive integer diagonal symmetrizer of an exchange matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Symmetrizer {
    d: Vec<i64>,
}

impl Symmetrizer {
    /// Validates a user-supplied symmetrizer: positive entries with gcd 1
    /// satisfying `b_ij d_j = -b_ji d_i`. On a connected matrix this pins
    /// down the same vector `symmetrizer()` computes.
    pub fn validated(matrix: &ExchangeMatrix, d: Vec<i64>) -> Result<Self> {
        if d.len() != matrix.n() {
            return Err(Error::BadSymmetrizer(format!(
                "length {} does not match rank {}",
                d.len(),
                matrix.n()
            )));
        }
        if d.iter().any(|&v| v <= 0) {
            return Err(Error::BadSymmetrizer("entries must be positive".into()));
        }
        let gcd = d.iter().fold(0i64, |acc, &v| acc.gcd(&v));
        if gcd != 1 {
            return Err(Error::BadSymmetrizer(format!(
                "entries share a common factor {gcd}; the minimal symmetrizer is required"
            )));
        }
        let sym = Symmetrizer { d };
        if !sym.symmetrizes(matrix) {
            return Err(Error::BadSymmetrizer(
                "BD is not skew-symmetric for the supplied D".into(),
            ));
        }
        Ok(sym)
    }

    pub fn entries(&self) -> &[i64] {
        &self.d
    }

    pub fn get(&self, i: usize) -> i64 {
        self.d[i]
    }

    /// Whether `B · diag(d)` is skew-symmetric.
    pub fn symmetrizes(&self, matrix: &ExchangeMatrix) -> bool {
        let n = matrix.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let lhs = (matrix.get(i, j) as i128) * (self.d[j] as i128);
                let rhs = -(matrix.get(j, i) as i128) * (self.d[i] as i128);
                lhs == rhs
            })
        })
    }

    /// Symmetrizers transport along the permutation action entrywise.
    pub fn permuted(&self, sigma: &Permutation) -> Symmetrizer {
        let mut d = vec![0; self.d.len()];
        for (i, &v) in self.d.iter().enumerate() {
            d[sigma.apply(i)] = v;
        }
        Symmetrizer { d }
    }
}

/// One weighted arc of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
}

/// Weighted directed diagram of a skew-symmetrizable matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagram {
    n: usize,
    arcs: Vec<Arc>, // sorted
}

impl Diagram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Weight of the arc between `i` and `j` in either direction (0 if none).
    pub fn weight_between(&self, i: usize, j: usize) -> i64 {
        self.arcs
            .iter()
            .find(|a| (a.from == i && a.to == j) || (a.from == j && a.to == i))
            .map(|a| a.weight)
            .unwrap_or(0)
    }

    pub fn max_weight(&self) -> i64 {
        self.arcs.iter().map(|a| a.weight).max().unwrap_or(0)
    }

    pub fn permuted(&self, sigma: &Permutation) -> Diagram {
        let mut arcs: Vec<Arc> = self
            .arcs
            .iter()
            .map(|a| Arc {
                from: sigma.apply(a.from),
                to: sigma.apply(a.to),
                weight: a.weight,
            })
            .collect();
        arcs.sort_unstable();
        Diagram { n: self.n, arcs }
    }

    /// The diagram with every arc reversed.
    pub fn reversed(&self) -> Diagram {
        let mut arcs: Vec<Arc> = self
            .arcs
            .iter()
            .map(|a| Arc {
                from: a.to,
                to: a.from,
                weight: a.weight,
            })
            .collect();
        arcs.sort_unstable();
        Diagram { n: self.n, arcs }
    }

    /// Least representative of the vertex-relabeling orbit (exhaustive; meant
    /// for small diagrams).
    pub fn canonical(&self) -> Diagram {
        Permutation::all(self.n)
            .map(|s| self.permuted(&s))
            .min()
            .expect("orbit is nonempty")
    }

    /// Whether two diagrams agree up to relabeling and possibly reversing
    /// every arc.
    pub fn same_up_to_reversal(&self, other: &Diagram) -> bool {
        let c = other.canonical();
        self.canonical() == c || self.reversed().canonical() == c
    }

    /// Graphviz rendering: vertices `v1..vn`, arcs labelled by weight.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph diagram {\n");
        for i in 0..self.n {
            out.push_str(&format!("  v{};\n", i + 1));
        }
        for a in &self.arcs {
            out.push_str(&format!(
                "  v{} -> v{} [label=\"{}\"];\n",
                a.from + 1,
                a.to + 1,
                a.weight
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Outcome of mutation-finiteness detection. `Inconclusive` is a first-class
/// answer (the exploration cap was hit), distinct from a definite no.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationFiniteness {
    Finite,
    Infinite,
    Inconclusive,
}

/// Decides whether the mutation class of `matrix` is finite.
///
/// Components of rank at most 2 are always finite. A connected diagram on
/// three or more vertices whose class is finite never shows an edge weight
/// above 4, so meeting one aborts with `Infinite`; conversely bounded weights
/// bound the entries, so the per-component breadth-first closure terminates.
pub fn is_mutation_finite(matrix: &ExchangeMatrix, cap: usize) -> MutationFiniteness {
    let mut explored = 0usize;
    for comp in matrix.components() {
        if comp.len() <= 2 {
            continue;
        }
        let sub = matrix.submatrix(&comp);
        match explore_class(&sub, cap.saturating_sub(explored), true) {
            ClassExploration::Closed(set) => explored += set.len(),
            ClassExploration::WeightAbort => return MutationFiniteness::Infinite,
            ClassExploration::CapHit => return MutationFiniteness::Inconclusive,
        }
    }
    MutationFiniteness::Finite
}

/// The full mutation class of `matrix` up to simultaneous permutations, as
/// canonical forms in breadth-first discovery order.
pub fn mutation_class(matrix: &ExchangeMatrix, cap: usize) -> Result<Vec<ExchangeMatrix>> {
    match explore_class(matrix, cap, false) {
        ClassExploration::Closed(list) => Ok(list),
        ClassExploration::CapHit => Err(Error::CapExceeded {
            cap,
            explored: cap,
        }),
        ClassExploration::WeightAbort => unreachable!("abort disabled"),
    }
}

enum ClassExploration {
    Closed(Vec<ExchangeMatrix>),
    WeightAbort,
    CapHit,
}

fn explore_class(matrix: &ExchangeMatrix, cap: usize, abort_weight: bool) -> ClassExploration {
    let high_weight =
        |m: &ExchangeMatrix| m.n() >= 3 && m.to_diagram().max_weight() > 4;
    let start = matrix.canonical_form();
    if abort_weight && high_weight(&start) {
        return ClassExploration::WeightAbort;
    }
    let mut order = vec![start.clone()];
    let mut seen: HashSet<ExchangeMatrix> = HashSet::from([start]);
    let mut head = 0;
    while head < order.len() {
        let current = order[head].clone();
        head += 1;
        for k in 0..current.n() {
            let next = current.mutated(k).canonical_form();
            if seen.contains(&next) {
                continue;
            }
            if abort_weight && high_weight(&next) {
                return ClassExploration::WeightAbort;
            }
            if order.len() >= cap {
                return ClassExploration::CapHit;
            }
            seen.insert(next.clone());
            order.push(next);
        }
    }
    ClassExploration::Closed(order)
}

/// JSON form of an exchange matrix file: `{"n": 2, "B": [[0, 1], [-2, 0]]}`
/// with an optional `"D"` override for the symmetrizer.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<i64>>,
}

impl MatrixJson {
    pub fn into_matrix(self) -> Result<(ExchangeMatrix, Option<Symmetrizer>)> {
        if self.b.len() != self.n {
            return Err(Error::NotSymmetrizable(format!(
                "declared n = {} but B has {} rows",
                self.n,
                self.b.len()
            )));
        }
        let matrix = ExchangeMatrix::from_rows(self.b)?;
        let sym = match self.d {
            Some(d) => Some(Symmetrizer::validated(&matrix, d)?),
            None => None,
        };
        Ok((matrix, sym))
    }

    pub fn of(matrix: &ExchangeMatrix) -> Self {
        MatrixJson {
            n: matrix.n(),
            b: matrix.rows(),
            d: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExchangeMatrix {
        ExchangeMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn construction_validates_shape() {
        assert!(matches!(
            ExchangeMatrix::from_rows(vec![vec![1]]),
            Err(Error::NonzeroDiagonal(0))
        ));
        assert!(matches!(
            ExchangeMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]),
            Err(Error::SignCondition(0, 1))
        ));
        // Zero opposite a nonzero entry breaks the sign condition.
        assert!(matches!(
            ExchangeMatrix::from_rows(vec![vec![0, 1], vec![0, 0]]),
            Err(Error::SignCondition(0, 1))
        ));
    }

    #[test]
    fn symmetrizer_of_rank2_type_b() {
        let b2 = m(&[&[0, 1], &[-2, 0]]);
        let d = b2.symmetrizer().unwrap();
        assert_eq!(d.entries(), &[1, 2]);
    }

    #[test]
    fn symmetrizer_of_rank3_type_b() {
        let b3 = m(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]);
        assert_eq!(b3.symmetrizer().unwrap().entries(), &[2, 1, 1]);
    }

    #[test]
    fn symmetrizer_requires_connectivity() {
        let zero = m(&[&[0, 0], &[0, 0]]);
        assert!(matches!(zero.symmetrizer(), Err(Error::Disconnected)));
    }

    #[test]
    fn componentwise_symmetrizer_handles_disconnection() {
        let zero = m(&[&[0, 0], &[0, 0]]);
        assert_eq!(zero.componentwise_symmetrizer().unwrap().entries(), &[1, 1]);
        // A doubled arrow next to an isolated vertex.
        let mixed = m(&[&[0, 1, 0], &[-2, 0, 0], &[0, 0, 0]]);
        assert_eq!(
            mixed.componentwise_symmetrizer().unwrap().entries(),
            &[1, 2, 1]
        );
        // On connected input it agrees with the plain symmetrizer.
        let b2 = m(&[&[0, 1], &[-2, 0]]);
        assert_eq!(
            b2.componentwise_symmetrizer().unwrap().entries(),
            b2.symmetrizer().unwrap().entries()
        );
    }

    #[test]
    fn non_symmetrizable_cycle_is_detected() {
        // Ratio propagation around this 3-cycle is inconsistent.
        let b = m(&[&[0, 1, -2], &[-1, 0, 1], &[1, -1, 0]]);
        assert!(!b.is_symmetrizable());
        assert!(matches!(b.symmetrizer(), Err(Error::NotSymmetrizable(_))));
        assert!(m(&[&[0, 1], &[-2, 0]]).is_symmetrizable());
    }

    #[test]
    fn symmetrizer_override_is_checked() {
        let b2 = m(&[&[0, 1], &[-2, 0]]);
        assert!(Symmetrizer::validated(&b2, vec![1, 2]).is_ok());
        assert!(Symmetrizer::validated(&b2, vec![2, 4]).is_err()); // not minimal
        assert!(Symmetrizer::validated(&b2, vec![2, 1]).is_err()); // wrong ratio
        let zero = m(&[&[0, 0], &[0, 0]]);
        assert!(Symmetrizer::validated(&zero, vec![1, 1]).is_ok());
    }

    #[test]
    fn mutation_is_an_involution() {
        let b3 = m(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]);
        for k in 0..3 {
            assert_eq!(b3.mutated(k).mutated(k), b3, "mutation at {k}");
        }
    }

    #[test]
    fn mutation_preserves_the_symmetrizer() {
        let b3 = m(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]);
        let d = b3.symmetrizer().unwrap();
        let mut cur = b3;
        for k in [0, 1, 2, 1, 0] {
            cur = cur.mutated(k);
            assert!(d.symmetrizes(&cur));
            assert_eq!(cur.symmetrizer().unwrap(), d);
        }
    }

    #[test]
    fn permutation_action_matches_componentwise_relabeling() {
        // sigma = (1 3 2) sends 1 -> 3, 3 -> 2, 2 -> 1.
        let b = m(&[&[0, -1, -3], &[1, 0, 2], &[1, -1, 0]]);
        let sigma = Permutation::parse("(1 3 2)", 3).unwrap();
        let expect = m(&[&[0, 2, 1], &[-1, 0, 1], &[-1, -3, 0]]);
        assert_eq!(b.permuted(&sigma), expect);
    }

    #[test]
    fn permutation_commutes_with_mutation() {
        let b = m(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]);
        for sigma in Permutation::all(3) {
            for k in 0..3 {
                assert_eq!(
                    b.mutated(k).permuted(&sigma),
                    b.permuted(&sigma).mutated(sigma.apply(k))
                );
            }
        }
    }

    #[test]
    fn symmetrizer_transports_along_permutations() {
        let b3 = m(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]);
        let d = b3.symmetrizer().unwrap();
        for sigma in Permutation::all(3) {
            assert_eq!(b3.permuted(&sigma).symmetrizer().unwrap(), d.permuted(&sigma));
        }
    }

    #[test]
    fn diagram_weights() {
        let b = m(&[&[0, 1], &[-2, 0]]);
        let d = b.to_diagram();
        assert_eq!(d.arcs(), &[Arc { from: 0, to: 1, weight: 2 }]);
        let zero = m(&[&[0, 0], &[0, 0]]);
        assert!(zero.to_diagram().arcs().is_empty());
    }

    #[test]
    fn diagram_reversal_equivalence() {
        let b = m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]);
        let d = b.to_diagram();
        assert!(d.same_up_to_reversal(&d.reversed()));
        let other = m(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]).to_diagram();
        assert!(!d.same_up_to_reversal(&other));
    }

    #[test]
    fn finiteness_of_small_classes() {
        assert_eq!(
            is_mutation_finite(&m(&[&[0, 5], &[-5, 0]]), 10_000),
            MutationFiniteness::Finite
        );
        let a3 = m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]);
        assert_eq!(is_mutation_finite(&a3, 10_000), MutationFiniteness::Finite);
        let infinite = m(&[&[0, 2, 0], &[-2, 0, 1], &[0, -1, 0]]);
        assert_eq!(
            is_mutation_finite(&infinite, 10_000),
            MutationFiniteness::Infinite
        );
    }

    #[test]
    fn finiteness_of_disconnected_inputs_is_componentwise() {
        // A weight-6 arc beside an isolated vertex: the arc is a rank-2
        // component, so the whole diagram is still mutation-finite.
        let rows = vec![vec![0, 2, 0], vec![-3, 0, 0], vec![0, 0, 0]];
        let b = ExchangeMatrix::from_rows(rows).unwrap();
        assert_eq!(is_mutation_finite(&b, 10_000), MutationFiniteness::Finite);
    }

    #[test]
    fn mutation_class_is_closed_and_canonical() {
        let a2 = m(&[&[0, 1], &[-1, 0]]);
        let class = mutation_class(&a2, 10_000).unwrap();
        // Rank-2 mutation only flips signs; the sign flip is a relabeling.
        assert_eq!(class.len(), 1);
        let b2 = m(&[&[0, 1], &[-2, 0]]);
        let class = mutation_class(&b2, 10_000).unwrap();
        assert!(class.contains(&b2.opposite().canonical_form()));
    }

    #[test]
    fn canonical_form_is_orbit_invariant() {
        let b = m(&[&[0, 2, 0], &[-1, 0, 1], &[0, -1, 0]]);
        for sigma in Permutation::all(3) {
            assert_eq!(b.permuted(&sigma).canonical_form(), b.canonical_form());
        }
    }

    #[test]
    fn matrix_json_roundtrip() {
        let text = r#"{"n": 2, "B": [[0, 1], [-2, 0]], "D": [1, 2]}"#;
        let parsed: MatrixJson = serde_json::from_str(text).unwrap();
        let (matrix, sym) = parsed.into_matrix().unwrap();
        assert_eq!(matrix, m(&[&[0, 1], &[-2, 0]]));
        assert_eq!(sym.unwrap().entries(), &[1, 2]);
    }
}
