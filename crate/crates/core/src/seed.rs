//! Labelled seeds, seed mutation, mutation words and class enumeration.
//!
//! A labelled seed pairs an ordered cluster of Laurent polynomials with an
//! exchange matrix. Mutation at position `k` replaces the `k`-th variable by
//! the exchange binomial divided (exactly) by the old variable and mutates
//! the matrix; permutations relabel positions. Together these generate the
//! global mutation group, whose orbit of an initial seed is the labelled
//! mutation class; forgetting the labelling (sorting the cluster) gives the
//! unlabelled class.

use crate::error::{internal, Error, Result};
use crate::laurent::LaurentPoly;
use crate::matrix::ExchangeMatrix;
use crate::perm::Permutation;
use rayon::prelude::*;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// An ordered cluster together with its exchange matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelledSeed {
    cluster: Vec<LaurentPoly>,
    matrix: ExchangeMatrix,
}

impl LabelledSeed {
    /// Builds a seed, checking sizes, ranks, nonzero variables and that the
    /// matrix is skew-symmetrizable. Clusters are otherwise accepted as
    /// given — no check that they arise from any initial seed.
    pub fn new(cluster: Vec<LaurentPoly>, matrix: ExchangeMatrix) -> Result<Self> {
        let n = matrix.n();
        if cluster.len() != n {
            return Err(Error::ClusterSizeMismatch(cluster.len(), n));
        }
        for beta in &cluster {
            if beta.rank() != n {
                return Err(Error::RankMismatch(beta.rank(), n));
            }
            if beta.is_zero() {
                return Err(Error::DivisionByZero);
            }
        }
        if !matrix.is_symmetrizable() {
            return Err(Error::NotSymmetrizable(
                "seed matrices must admit a symmetrizer".into(),
            ));
        }
        Ok(LabelledSeed { cluster, matrix })
    }

    pub fn rank(&self) -> usize {
        self.matrix.n()
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.cluster
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    /// Seed mutation at position `k`.
    ///
    /// The new `k`-th variable is `(prod_+ + prod_-) / beta_k`, where the
    /// products run over the positive and negated negative entries of the
    /// matrix's `k`-th *column* as exponents of the other cluster variables;
    /// empty products are 1. The division must be exact.
    pub fn mutated(&self, k: usize) -> Result<LabelledSeed> {
        let n = self.rank();
        if k >= n {
            return Err(Error::IndexOutOfRange(k, n));
        }
        let mut pos = LaurentPoly::one(n);
        let mut neg = LaurentPoly::one(n);
        for j in 0..n {
            let b = self.matrix.get(j, k);
            if b > 0 {
                pos = pos.mul(&self.cluster[j].pow(b as u32))?;
            } else if b < 0 {
                neg = neg.mul(&self.cluster[j].pow((-b) as u32))?;
            }
        }
        let numerator = pos.add(&neg)?;
        let beta = numerator.exact_div(&self.cluster[k])?;
        let mut cluster = self.cluster.clone();
        cluster[k] = beta;
        Ok(LabelledSeed {
            cluster,
            matrix: self.matrix.mutated(k),
        })
    }

    /// The right action of a permutation: the variable at position `i` moves
    /// to position `sigma(i)`, and the matrix is relabelled the same way.
    pub fn permuted(&self, sigma: &Permutation) -> LabelledSeed {
        assert_eq!(sigma.n(), self.rank(), "permutation size mismatch");
        let mut cluster = vec![LaurentPoly::zero(self.rank()); self.rank()];
        for (i, beta) in self.cluster.iter().enumerate() {
            cluster[sigma.apply(i)] = beta.clone();
        }
        LabelledSeed {
            cluster,
            matrix: self.matrix.permuted(sigma),
        }
    }

    /// Applies a mutation word left to right.
    pub fn apply_word(&self, word: &MutationWord) -> Result<LabelledSeed> {
        if word.n() != self.rank() {
            return Err(Error::RankMismatch(word.n(), self.rank()));
        }
        let mut seed = self.clone();
        for &k in &word.mutations {
            seed = seed.mutated(k)?;
        }
        Ok(seed.permuted(&word.trailing))
    }

    /// Forgets the labelling: cluster sorted by canonical encoding, matrix
    /// reindexed to match.
    pub fn unlabelled(&self) -> Seed {
        let n = self.rank();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_cached_key(|&i| self.cluster[i].canonical_key());
        let cluster = order.iter().map(|&i| self.cluster[i].clone()).collect();
        Seed {
            cluster,
            matrix: self.matrix.reindexed(&order),
        }
    }

    /// Cluster rendered in canonical text with generator prefix `sym`.
    pub fn render_cluster(&self, sym: &str) -> Vec<String> {
        self.cluster.iter().map(|b| b.render(sym)).collect()
    }
}

/// A seed up to relabeling: the cluster is stored sorted by canonical
/// encoding with the matrix reindexed accordingly. Identity for enumeration
/// purposes is the cluster alone (the matrix is carried along; see
/// [`enumerate_class`]'s strict mode for the cross-check).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Seed {
    cluster: Vec<LaurentPoly>,
    matrix: ExchangeMatrix,
}

impl Seed {
    pub fn rank(&self) -> usize {
        self.matrix.n()
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.cluster
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    /// The canonical labelled representative (cluster in sorted order).
    pub fn representative(&self) -> LabelledSeed {
        LabelledSeed {
            cluster: self.cluster.clone(),
            matrix: self.matrix.clone(),
        }
    }

    /// A labelled lift with `cluster[i] = self.cluster()[order[i]]` and the
    /// matrix reindexed to match.
    pub fn lift_with_order(&self, order: &[usize]) -> LabelledSeed {
        assert_eq!(order.len(), self.rank());
        LabelledSeed {
            cluster: order.iter().map(|&i| self.cluster[i].clone()).collect(),
            matrix: self.matrix.reindexed(order),
        }
    }

    pub fn render_cluster(&self, sym: &str) -> Vec<String> {
        self.cluster.iter().map(|b| b.render(sym)).collect()
    }
}

/// The initial seed `(x_1, …, x_n)` on `matrix`.
pub fn initial_seed(matrix: &ExchangeMatrix) -> Result<LabelledSeed> {
    let n = matrix.n();
    let cluster = (0..n).map(|i| LaurentPoly::generator(n, i)).collect();
    LabelledSeed::new(cluster, matrix.clone())
}

/// A word in the global mutation group, kept in normal form: mutations
/// first, one trailing permutation. The defining relation
/// `mu_i . sigma = sigma . mu_{sigma(i)}` commutes permutation letters to
/// the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationWord {
    mutations: Vec<usize>, // 0-based positions, applied left to right
    trailing: Permutation,
}

/// One letter of an unnormalized word.
#[derive(Debug, Clone)]
pub enum WordLetter {
    Mutation(usize),
    Perm(Permutation),
}

impl MutationWord {
    pub fn identity(n: usize) -> Self {
        MutationWord {
            mutations: Vec::new(),
            trailing: Permutation::identity(n),
        }
    }

    pub fn new(mutations: Vec<usize>, trailing: Permutation) -> Result<Self> {
        let n = trailing.n();
        if let Some(&k) = mutations.iter().find(|&&k| k >= n) {
            return Err(Error::IndexOutOfRange(k, n));
        }
        Ok(MutationWord {
            mutations,
            trailing,
        })
    }

    /// Folds an arbitrary letter sequence into normal form. Appending a
    /// mutation `mu_j` behind an accumulated permutation `rho` rewrites it
    /// as `mu_{rho^{-1}(j)}` in front of `rho`.
    pub fn from_letters(n: usize, letters: &[WordLetter]) -> Result<Self> {
        let mut word = MutationWord::identity(n);
        for letter in letters {
            match letter {
                WordLetter::Mutation(k) => {
                    if *k >= n {
                        return Err(Error::IndexOutOfRange(*k, n));
                    }
                    word.mutations.push(word.trailing.apply_inverse(*k));
                }
                WordLetter::Perm(sigma) => {
                    if sigma.n() != n {
                        return Err(Error::BadPermutation(format!(
                            "permutation on {} symbols in a rank-{n} word",
                            sigma.n()
                        )));
                    }
                    word.trailing = word.trailing.then(sigma);
                }
            }
        }
        Ok(word)
    }

    pub fn n(&self) -> usize {
        self.trailing.n()
    }

    pub fn mutations(&self) -> &[usize] {
        &self.mutations
    }

    pub fn trailing(&self) -> &Permutation {
        &self.trailing
    }

    pub fn is_identity(&self) -> bool {
        self.mutations.is_empty() && self.trailing.is_identity()
    }

    /// Parses words like `"m1 m2 m1 (1 2)"`: `m<k>` letters (1-based) and
    /// cycle-notation permutations, in any order; the result is normalized.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let bad = |reason: String| Error::Parse {
            what: "mutation word",
            text: text.to_string(),
            reason,
        };
        let mut letters = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            if let Some(tail) = rest.strip_prefix('m') {
                let digits: String = tail.chars().take_while(|c| c.is_ascii_digit()).collect();
                if digits.is_empty() {
                    return Err(bad("expected an index after 'm'".into()));
                }
                let k: usize = digits
                    .parse()
                    .map_err(|_| bad("mutation index out of range".into()))?;
                if k == 0 || k > n {
                    return Err(bad(format!("mutation index {k} out of range 1..={n}")));
                }
                letters.push(WordLetter::Mutation(k - 1));
                rest = tail[digits.len()..].trim_start();
            } else if rest.starts_with('(') {
                let close = rest
                    .find(')')
                    .ok_or_else(|| bad("unclosed permutation cycle".into()))?;
                let sigma = Permutation::parse(&rest[..=close], n)?;
                letters.push(WordLetter::Perm(sigma));
                rest = rest[close + 1..].trim_start();
            } else {
                return Err(bad(format!("unexpected token near {rest:?}")));
            }
        }
        MutationWord::from_letters(n, &letters)
    }
}

impl fmt::Display for MutationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut first = true;
        for &k in &self.mutations {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "m{}", k + 1)?;
            first = false;
        }
        if !self.trailing.is_identity() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", self.trailing)?;
        }
        Ok(())
    }
}

/// The labelled mutation class of a seed: the orbit under all mutations and
/// permutations, with one vertex per labelled seed and the labelled mutation
/// edges.
#[derive(Debug, Clone)]
pub struct LabelledClass {
    pub seeds: Vec<LabelledSeed>,
    /// `(u, v, k)` with `u < v`: mutation at position `k` exchanges the two.
    pub edges: Vec<(usize, usize, usize)>,
    index: HashMap<LabelledSeed, usize>,
}

impl LabelledClass {
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn index_of(&self, seed: &LabelledSeed) -> Option<usize> {
        self.index.get(seed).copied()
    }
}

/// The unlabelled mutation class: canonical seeds with one edge per local
/// mutation. `discoveries` records every `(endpoint, position)` from which
/// an edge was found, which downstream marking uses as a cross-check.
#[derive(Debug, Clone)]
pub struct SeedClass {
    pub seeds: Vec<Seed>,
    pub edges: Vec<(usize, usize)>,
    /// Parallel to `edges`: each discovery as `(endpoint index, mutated
    /// position in that endpoint's canonical representative)`.
    pub discoveries: Vec<Vec<(usize, usize)>>,
    index: HashMap<Vec<LaurentPoly>, usize>,
}

impl SeedClass {
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn index_of(&self, seed: &Seed) -> Option<usize> {
        self.index.get(seed.cluster()).copied()
    }
}

fn check_enumerable(seed: &LabelledSeed) -> Result<()> {
    if !seed.matrix().is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Expands a frontier of seeds into per-seed candidate lists, in parallel
/// when more than one worker is configured. Candidates keep frontier order,
/// so the merge (and hence vertex numbering) is identical either way.
fn expand_frontier<T, F>(frontier: &[T], expand: F) -> Vec<Vec<LabelledSeed>>
where
    T: Sync,
    F: Fn(&T) -> Vec<LabelledSeed> + Sync,
{
    if crate::configured_threads() > 1 && frontier.len() > 1 {
        frontier.par_iter().map(&expand).collect()
    } else {
        frontier.iter().map(&expand).collect()
    }
}

/// Enumerates the labelled mutation class by breadth-first search.
///
/// Vertices are numbered in discovery order under a fixed expansion rule:
/// from each seed, mutations at positions `1..n` in order, then the
/// non-identity permutations in lexicographic order. Exceeding `cap` seeds
/// is an error, not a truncation.
pub fn enumerate_labelled_class(seed: &LabelledSeed, cap: usize) -> Result<LabelledClass> {
    check_enumerable(seed)?;
    let n = seed.rank();
    let perms: Vec<Permutation> = Permutation::all(n).filter(|s| !s.is_identity()).collect();

    let mut seeds = vec![seed.clone()];
    let mut index = HashMap::from([(seed.clone(), 0usize)]);
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut frontier = vec![0usize];

    while !frontier.is_empty() {
        let expansions = expand_frontier(&frontier, |&iu: &usize| {
            let u = &seeds[iu];
            let mut out = Vec::with_capacity(n + perms.len());
            for k in 0..n {
                out.push(u.mutated(k).expect("class seeds stay mutable"));
            }
            for sigma in &perms {
                out.push(u.permuted(sigma));
            }
            out
        });
        let mut next = Vec::new();
        for (&iu, candidates) in frontier.iter().zip(expansions) {
            for (slot, v) in candidates.into_iter().enumerate() {
                let iv = match index.get(&v) {
                    Some(&iv) => iv,
                    None => {
                        if seeds.len() >= cap {
                            return Err(Error::CapExceeded {
                                cap,
                                explored: seeds.len(),
                            });
                        }
                        let iv = seeds.len();
                        seeds.push(v.clone());
                        index.insert(v, iv);
                        next.push(iv);
                        iv
                    }
                };
                if slot < n {
                    // A mutation edge; slot is the mutated position.
                    if iu == iv {
                        return Err(internal("mutation produced a fixed labelled seed"));
                    }
                    let key = (iu.min(iv), iu.max(iv));
                    match edges.entry(key) {
                        Entry::Vacant(e) => {
                            e.insert(slot);
                        }
                        Entry::Occupied(e) => {
                            if *e.get() != slot {
                                return Err(internal(
                                    "one labelled edge reached by two different mutations",
                                ));
                            }
                        }
                    }
                }
            }
        }
        frontier = next;
    }

    let edges = edges.into_iter().map(|((u, v), k)| (u, v, k)).collect();
    Ok(LabelledClass {
        seeds,
        edges,
        index,
    })
}

/// Enumerates the unlabelled mutation class by breadth-first search over
/// canonical seeds, mutating each canonical representative at positions
/// `1..n`. Seed identity is the sorted cluster; with `strict` set, a cluster
/// met twice with different reindexed matrices is a hard error instead of
/// being coalesced silently.
pub fn enumerate_class(seed: &LabelledSeed, cap: usize, strict: bool) -> Result<SeedClass> {
    check_enumerable(seed)?;
    let n = seed.rank();
    let start = seed.unlabelled();
    let mut seeds = vec![start.clone()];
    let mut index: HashMap<Vec<LaurentPoly>, usize> =
        HashMap::from([(start.cluster.clone(), 0usize)]);
    let mut edges: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    let mut frontier = vec![0usize];

    while !frontier.is_empty() {
        let expansions = expand_frontier(&frontier, |&iu: &usize| {
            let u = seeds[iu].representative();
            (0..n)
                .map(|k| u.mutated(k).expect("class seeds stay mutable"))
                .collect()
        });
        let mut next = Vec::new();
        for (&iu, candidates) in frontier.iter().zip(expansions) {
            for (k, v) in candidates.into_iter().enumerate() {
                let v = v.unlabelled();
                let iv = match index.get(&v.cluster) {
                    Some(&iv) => {
                        if strict && seeds[iv].matrix != v.matrix {
                            return Err(Error::MatrixMismatchOnCluster);
                        }
                        iv
                    }
                    None => {
                        if seeds.len() >= cap {
                            return Err(Error::CapExceeded {
                                cap,
                                explored: seeds.len(),
                            });
                        }
                        let iv = seeds.len();
                        index.insert(v.cluster.clone(), iv);
                        seeds.push(v);
                        next.push(iv);
                        iv
                    }
                };
                if iu == iv {
                    return Err(internal("mutation produced a fixed seed"));
                }
                edges
                    .entry((iu.min(iv), iu.max(iv)))
                    .or_default()
                    .push((iu, k));
            }
        }
        frontier = next;
    }

    let (edges, discoveries): (Vec<_>, Vec<_>) = edges.into_iter().unzip();
    Ok(SeedClass {
        seeds,
        edges,
        discoveries,
        index,
    })
}

/// Breadth-first ball of the labelled exchange graph: every labelled seed
/// within `radius` mutations of `seed`, with every mutation edge between
/// ball members. The flag reports whether some edge leads out of the ball,
/// i.e. the class continues beyond it.
pub fn enumerate_labelled_ball(
    seed: &LabelledSeed,
    radius: usize,
    cap: usize,
) -> Result<(LabelledClass, bool)> {
    check_enumerable(seed)?;
    let n = seed.rank();
    let mut seeds = vec![seed.clone()];
    let mut index = HashMap::from([(seed.clone(), 0usize)]);
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut frontier = vec![0usize];
    let mut truncated = false;

    for depth in 0..=radius {
        let at_boundary = depth == radius;
        let mut next = Vec::new();
        for &iu in &frontier {
            let u = seeds[iu].clone();
            for k in 0..n {
                let v = u.mutated(k).expect("class seeds stay mutable");
                let iv = match index.get(&v) {
                    Some(&iv) => iv,
                    None if at_boundary => {
                        truncated = true;
                        continue;
                    }
                    None => {
                        if seeds.len() >= cap {
                            return Err(Error::CapExceeded {
                                cap,
                                explored: seeds.len(),
                            });
                        }
                        let iv = seeds.len();
                        seeds.push(v.clone());
                        index.insert(v, iv);
                        next.push(iv);
                        iv
                    }
                };
                if iu == iv {
                    return Err(internal("mutation produced a fixed labelled seed"));
                }
                match edges.entry((iu.min(iv), iu.max(iv))) {
                    Entry::Vacant(e) => {
                        e.insert(k);
                    }
                    Entry::Occupied(e) => {
                        if *e.get() != k {
                            return Err(internal(
                                "one labelled edge reached by two different mutations",
                            ));
                        }
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let edges = edges.into_iter().map(|((u, v), k)| (u, v, k)).collect();
    Ok((
        LabelledClass {
            seeds,
            edges,
            index,
        },
        truncated,
    ))
}

/// Breadth-first ball of the exchange graph: every canonical seed within
/// `radius` mutations of `seed`, with every edge between ball members and
/// a flag for edges leading out.
pub fn enumerate_ball(
    seed: &LabelledSeed,
    radius: usize,
    cap: usize,
    strict: bool,
) -> Result<(SeedClass, bool)> {
    check_enumerable(seed)?;
    let n = seed.rank();
    let start = seed.unlabelled();
    let mut seeds = vec![start.clone()];
    let mut index: HashMap<Vec<LaurentPoly>, usize> =
        HashMap::from([(start.cluster.clone(), 0usize)]);
    let mut edges: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    let mut frontier = vec![0usize];
    let mut truncated = false;

    for depth in 0..=radius {
        let at_boundary = depth == radius;
        let mut next = Vec::new();
        for &iu in &frontier {
            let u = seeds[iu].representative();
            for k in 0..n {
                let v = u.mutated(k).expect("class seeds stay mutable").unlabelled();
                let iv = match index.get(&v.cluster) {
                    Some(&iv) => {
                        if strict && seeds[iv].matrix != v.matrix {
                            return Err(Error::MatrixMismatchOnCluster);
                        }
                        iv
                    }
                    None if at_boundary => {
                        truncated = true;
                        continue;
                    }
                    None => {
                        if seeds.len() >= cap {
                            return Err(Error::CapExceeded {
                                cap,
                                explored: seeds.len(),
                            });
                        }
                        let iv = seeds.len();
                        index.insert(v.cluster.clone(), iv);
                        seeds.push(v);
                        next.push(iv);
                        iv
                    }
                };
                if iu == iv {
                    return Err(internal("mutation produced a fixed seed"));
                }
                edges
                    .entry((iu.min(iv), iu.max(iv)))
                    .or_default()
                    .push((iu, k));
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let (edges, discoveries): (Vec<_>, Vec<_>) = edges.into_iter().unzip();
    Ok((
        SeedClass {
            seeds,
            edges,
            discoveries,
            index,
        },
        truncated,
    ))
}
