//! Framed quivers and maximal green sequences: mutate a skew-symmetric
//! matrix extended by frozen frame vertices, only ever at green vertices,
//! until every mutable vertex is red; align the end state with the
//! coframed quiver and read off the induced seed map.

use crate::aut::Direction;
use crate::error::{internal, Error, Result};
use crate::laurent::LaurentPoly;
use crate::matrix::ExchangeMatrix;
use crate::perm::Permutation;
use crate::seed::{initial_seed, MutationWord};
use serde::Serialize;
use std::collections::HashMap;

/// State of a mutable vertex relative to the frozen frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexColor {
    /// No arrow from a frozen vertex in.
    Green,
    /// No arrow out to a frozen vertex.
    Red,
}

/// A rank-`2n` exchange matrix whose last `n` vertices are frozen: the
/// mutable principal part plus one frame vertex per mutable vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedQuiver {
    matrix: ExchangeMatrix,
    n: usize,
}

impl FramedQuiver {
    fn with_frame(q: &ExchangeMatrix, sign: i64) -> Result<Self> {
        if !q.is_skew_symmetric() {
            return Err(Error::NotSkewSymmetric);
        }
        let n = q.n();
        let mut rows = vec![vec![0i64; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                rows[i][j] = q.get(i, j);
            }
            rows[i][n + i] = sign;
            rows[n + i][i] = -sign;
        }
        Ok(FramedQuiver {
            matrix: ExchangeMatrix::from_rows(rows)?,
            n,
        })
    }

    /// Extends a quiver by one arrow `i -> i-hat` per vertex.
    pub fn frame(q: &ExchangeMatrix) -> Result<Self> {
        Self::with_frame(q, 1)
    }

    /// Extends a quiver by one arrow `i-hat -> i` per vertex.
    pub fn coframe(q: &ExchangeMatrix) -> Result<Self> {
        Self::with_frame(q, -1)
    }

    /// Number of mutable vertices.
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    /// Mutates at a mutable vertex; frozen indices are out of range.
    pub fn mutated(&self, k: usize) -> Result<Self> {
        if k >= self.n {
            return Err(Error::IndexOutOfRange(k, self.n));
        }
        Ok(FramedQuiver {
            matrix: self.matrix.mutated(k),
            n: self.n,
        })
    }

    /// Colors a mutable vertex, insisting it is exactly one of green/red.
    pub fn vertex_color(&self, i: usize) -> Result<VertexColor> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange(i, self.n));
        }
        let green = (0..self.n).all(|k| self.matrix.get(self.n + k, i) <= 0);
        let red = (0..self.n).all(|k| self.matrix.get(i, self.n + k) <= 0);
        match (green, red) {
            (true, false) => Ok(VertexColor::Green),
            (false, true) => Ok(VertexColor::Red),
            (true, true) => Err(internal("vertex with no frame arrows at all")),
            (false, false) => Err(internal("vertex neither green nor red")),
        }
    }

    /// The green vertices, ascending.
    pub fn green_vertices(&self) -> Result<Vec<usize>> {
        let mut greens = Vec::new();
        for i in 0..self.n {
            if self.vertex_color(i)? == VertexColor::Green {
                greens.push(i);
            }
        }
        Ok(greens)
    }
}

/// Heuristic search depth: twice the arrow count plus rank.
pub fn default_max_len(q: &ExchangeMatrix) -> usize {
    let n = q.n();
    let arrows: i64 = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| q.get(i, j).abs()))
        .sum();
    2 * (arrows as usize + n)
}

/// A maximal green sequence with its terminal alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenSequence {
    /// Mutated vertices, in order; each was green when mutated.
    pub mutations: Vec<usize>,
    /// Lexicographically least permutation carrying the end state onto the
    /// coframed quiver (frozen vertices fixed pointwise).
    pub sigma: Permutation,
    /// Every aligning permutation, ascending.
    pub alignments: Vec<Permutation>,
}

impl GreenSequence {
    /// The sequence followed by its alignment, as one mutation word.
    pub fn word(&self) -> Result<MutationWord> {
        MutationWord::new(self.mutations.clone(), self.sigma.clone())
    }
}

/// Everything a green-sequence search found.
#[derive(Debug, Clone)]
pub struct GreenSearch {
    /// Complete sequences of length at most the requested bound, in
    /// lexicographic order.
    pub sequences: Vec<GreenSequence>,
    /// Distinct (state, budget) pairs expanded.
    pub explored: usize,
    /// Whether some branch still had green moves when the length bound cut
    /// it off — longer sequences may exist.
    pub length_truncated: bool,
}

#[derive(Clone)]
struct MemoEntry {
    suffixes: Vec<Vec<usize>>,
    truncated: bool,
}

fn explore(
    state: &FramedQuiver,
    budget: usize,
    cap: usize,
    memo: &mut HashMap<(ExchangeMatrix, usize), MemoEntry>,
    explored: &mut usize,
) -> Result<MemoEntry> {
    let key = (state.matrix().clone(), budget);
    if let Some(entry) = memo.get(&key) {
        return Ok(entry.clone());
    }
    *explored += 1;
    if *explored > cap {
        return Err(Error::GreenTruncated {
            cap,
            explored: *explored,
        });
    }
    let greens = state.green_vertices()?;
    let entry = if greens.is_empty() {
        MemoEntry {
            suffixes: vec![Vec::new()],
            truncated: false,
        }
    } else if budget == 0 {
        MemoEntry {
            suffixes: Vec::new(),
            truncated: true,
        }
    } else {
        let mut suffixes = Vec::new();
        let mut truncated = false;
        for i in greens {
            let child = explore(&state.mutated(i)?, budget - 1, cap, memo, explored)?;
            truncated |= child.truncated;
            for suffix in child.suffixes {
                let mut seq = Vec::with_capacity(suffix.len() + 1);
                seq.push(i);
                seq.extend(suffix);
                suffixes.push(seq);
            }
        }
        MemoEntry {
            suffixes,
            truncated,
        }
    };
    memo.insert(key, entry.clone());
    Ok(entry)
}

/// Replays a sequence from the framed quiver, re-checking greenness and
/// maximality, and finds every alignment of the end state with the
/// coframed quiver.
fn align_sequence(
    root: &FramedQuiver,
    coframe: &FramedQuiver,
    mutations: &[usize],
) -> Result<GreenSequence> {
    let n = root.rank();
    let mut state = root.clone();
    for &k in mutations {
        if state.vertex_color(k)? != VertexColor::Green {
            return Err(internal("memoized search mutated a red vertex"));
        }
        state = state.mutated(k)?;
    }
    if !state.green_vertices()?.is_empty() {
        return Err(internal("memoized search returned a non-maximal sequence"));
    }
    let mut alignments = Vec::new();
    for sigma in Permutation::all(n) {
        let images: Vec<usize> = (0..n)
            .map(|i| sigma.apply(i))
            .chain(n..2 * n)
            .collect();
        let extended = Permutation::from_images(images)?;
        if state.matrix().permuted(&extended) == *coframe.matrix() {
            alignments.push(sigma);
        }
    }
    let sigma = alignments
        .first()
        .cloned()
        .ok_or(Error::NoAlignment)?;
    Ok(GreenSequence {
        mutations: mutations.to_vec(),
        sigma,
        alignments,
    })
}

/// Finds every maximal green sequence of length at most `max_len` by
/// depth-first search over green-only mutations, memoizing exact framed
/// states per remaining budget; `cap` bounds the distinct expansions.
pub fn find_maximal_green_sequences(
    q: &ExchangeMatrix,
    max_len: usize,
    cap: usize,
) -> Result<GreenSearch> {
    let root = FramedQuiver::frame(q)?;
    let coframe = FramedQuiver::coframe(q)?;
    let mut memo = HashMap::new();
    let mut explored = 0;
    let entry = explore(&root, max_len, cap, &mut memo, &mut explored)?;
    let mut sequences = entry
        .suffixes
        .iter()
        .map(|mutations| align_sequence(&root, &coframe, mutations))
        .collect::<Result<Vec<_>>>()?;
    sequences.sort_by(|a, b| a.mutations.cmp(&b.mutations));
    Ok(GreenSearch {
        sequences,
        explored,
        length_truncated: entry.truncated,
    })
}

/// The seed map a maximal green sequence induces: its word fixes the
/// quiver, so applying it to the initial seed realizes a direct
/// automorphism.
#[derive(Debug, Clone)]
pub struct InducedAutomorphism {
    pub word: MutationWord,
    /// Variable images at the initial seed.
    pub realization: Vec<LaurentPoly>,
    pub image_matrix: ExchangeMatrix,
    pub direction: Direction,
}

/// Applies a maximal green sequence (mutations, then alignment) to the
/// plain initial seed of the quiver and checks it lands back on the same
/// matrix.
pub fn induced_automorphism(
    q: &ExchangeMatrix,
    sequence: &GreenSequence,
) -> Result<InducedAutomorphism> {
    let word = sequence.word()?;
    let image = initial_seed(q)?.apply_word(&word)?;
    if image.matrix() != q {
        return Err(internal("aligned green sequence moved the quiver"));
    }
    Ok(InducedAutomorphism {
        word,
        realization: image.cluster().to_vec(),
        image_matrix: image.matrix().clone(),
        direction: Direction::Direct,
    })
}
