//! Permutations of `{0, …, n-1}` with cycle-notation parsing and display.
//!
//! Everything downstream acts on the **right**: applying `a` then `b` to an
//! object is applying `a.then(&b)`. Indices are 0-based internally; cycle
//! notation in text is 1-based, e.g. `(1 2)(3 4)` and `()` for the identity.

use crate::error::{Error, Result};
use itertools::Itertools;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    /// `images[i]` is the image of `i`.
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from its image vector, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::BadPermutation(format!(
                    "image vector {images:?} is not a bijection"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds the transposition swapping `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// The image of `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// The preimage of `i`.
    pub fn apply_inverse(&self, i: usize) -> usize {
        self.images.iter().position(|&v| v == i).unwrap()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    /// Right-action composition: applying `self.then(other)` is applying
    /// `self` first, then `other`. As functions this is `other ∘ self`.
    pub fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.n(), other.n(), "permutation size mismatch");
        Permutation {
            images: self.images.iter().map(|&v| other.images[v]).collect(),
        }
    }

    /// Multiplicative order.
    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.then(self);
            k += 1;
        }
        k
    }

    /// All permutations of `{0, …, n-1}` in lexicographic order of their
    /// image vectors (the identity comes first).
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (0..n).permutations(n).map(|images| Permutation { images })
    }

    /// Decomposes into disjoint cycles, fixed points omitted, each cycle
    /// rotated to start at its least element, cycles sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.images[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.images[cur];
            }
            out.push(cycle);
        }
        out
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4)`; `()` is the
    /// identity. Cycles listed left to right compose as a right action.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            what: "permutation",
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut perm = Permutation::identity(n);
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(bad("empty string"));
        }
        let mut rest = trimmed;
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| bad("expected '('"))?;
            if !rest[..open].trim().is_empty() {
                return Err(bad("unexpected text outside cycles"));
            }
            let close = rest.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let inner = &rest[open + 1..close];
            rest = &rest[close + 1..];
            let entries: Vec<usize> = inner
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| bad("cycle entries must be integers"))
                })
                .collect::<Result<_>>()?;
            if entries.is_empty() {
                continue; // "()" — identity factor
            }
            if entries.iter().any(|&v| v == 0 || v > n) {
                return Err(bad(&format!("cycle entry out of range 1..={n}")));
            }
            let zero_based: Vec<usize> = entries.iter().map(|&v| v - 1).collect();
            let mut sorted = zero_based.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != zero_based.len() {
                return Err(bad("repeated entry inside a cycle"));
            }
            let mut images: Vec<usize> = (0..n).collect();
            for w in zero_based.windows(2) {
                images[w[0]] = w[1];
            }
            images[*zero_based.last().unwrap()] = zero_based[0];
            perm = perm.then(&Permutation { images });
        }
        let rest_trimmed = rest.trim();
        if !rest_trimmed.is_empty() {
            return Err(bad("trailing text after cycles"));
        }
        Ok(perm)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "({})", cycle.iter().map(|v| v + 1).join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_is_right_action() {
        // apply (1 2) then (2 3): 1 -> 2 -> 3, 2 -> 1, 3 -> 2 (1-based).
        let a = Permutation::parse("(1 2)", 3).unwrap();
        let b = Permutation::parse("(2 3)", 3).unwrap();
        let c = a.then(&b);
        assert_eq!(c.apply(0), 2);
        assert_eq!(c.apply(1), 0);
        assert_eq!(c.apply(2), 1);
    }

    #[test]
    fn inverse_roundtrip() {
        let p = Permutation::parse("(1 3 2)", 4).unwrap();
        assert!(p.then(&p.inverse()).is_identity());
        assert!(p.inverse().then(&p).is_identity());
    }

    #[test]
    fn display_parse_roundtrip() {
        for p in Permutation::all(4) {
            let text = p.to_string();
            let back = Permutation::parse(&text, 4).unwrap();
            assert_eq!(p, back, "{text}");
        }
    }

    #[test]
    fn lexicographic_enumeration() {
        let all: Vec<_> = Permutation::all(3).collect();
        assert_eq!(all.len(), 6);
        assert!(all[0].is_identity());
        assert_eq!(all[1].images(), &[0, 2, 1]);
        assert_eq!(all[5].images(), &[2, 1, 0]);
    }

    #[test]
    fn order_of_three_cycle() {
        let p = Permutation::parse("(1 2 3)", 3).unwrap();
        assert_eq!(p.order(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::parse("(0 1)", 2).is_err());
        assert!(Permutation::parse("(1 1)", 2).is_err());
        assert!(Permutation::parse("(1 4)", 3).is_err());
    }
}
