//! Unfoldings: blockwise lifts of a skew-symmetrizable matrix to a
//! skew-symmetric one, validated over the whole mutation class, plus the
//! embedding of the base class's marked automorphisms into the unfolded
//! exchange graph.
//!
//! A block partition groups the unfolded indices so that block `j` has as
//! many indices as the symmetrizer entry `d_j`. Mutating the base at `k`
//! corresponds to the composite mutation over block `k` — a product of
//! pairwise commuting single mutations — and a base permutation lifts to
//! the blockwise order-preserving permutation. Validation closes over all
//! simultaneously mutated pairs; the embedding lifts a word realization of
//! an automorphism and extends it equivariantly.

use crate::aut::{classify, propagate_labelled_automorphism, ClusterAutomorphism, Direction};
use crate::error::{internal, Error, Result};
use crate::graph::MutationClassGraphs;
use crate::laurent::LaurentPoly;
use crate::matrix::{ExchangeMatrix, Symmetrizer};
use crate::perm::Permutation;
use crate::seed::{initial_seed, LabelledSeed, MutationWord};
use crate::aut::word_realization;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::collections::VecDeque;

/// A base matrix, a consecutive block partition sized by its symmetrizer,
/// and a candidate skew-symmetric unfolded matrix. Construction checks the
/// shapes only; whether the unfolding really holds is [`validate_unfolding`]'s
/// job.
#[derive(Debug, Clone)]
pub struct UnfoldingSpec {
    base: ExchangeMatrix,
    symmetrizer: Symmetrizer,
    blocks: Vec<Vec<usize>>,
    unfolded: ExchangeMatrix,
}

impl UnfoldingSpec {
    pub fn new(
        base: ExchangeMatrix,
        blocks: Vec<Vec<usize>>,
        unfolded: ExchangeMatrix,
    ) -> Result<Self> {
        if !base.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = base.n();
        if blocks.len() != n {
            return Err(Error::BadUnfolding(format!(
                "{} blocks for a rank-{n} base",
                blocks.len()
            )));
        }
        let flat: Vec<usize> = blocks.iter().flatten().copied().collect();
        let m = flat.len();
        if flat != (0..m).collect::<Vec<_>>() {
            return Err(Error::BadUnfolding(
                "blocks must partition the unfolded indices consecutively in order".into(),
            ));
        }
        let sizes: Vec<i64> = blocks.iter().map(|b| b.len() as i64).collect();
        let symmetrizer = Symmetrizer::validated(&base, sizes)
            .map_err(|e| Error::BadUnfolding(format!("block sizes must form a symmetrizer: {e}")))?;
        if unfolded.n() != m {
            return Err(Error::BadUnfolding(format!(
                "unfolded rank {} but blocks cover {m} indices",
                unfolded.n()
            )));
        }
        if !unfolded.is_skew_symmetric() {
            return Err(Error::NotSkewSymmetric);
        }
        Ok(UnfoldingSpec {
            base,
            symmetrizer,
            blocks,
            unfolded,
        })
    }

    pub fn base(&self) -> &ExchangeMatrix {
        &self.base
    }

    pub fn symmetrizer(&self) -> &Symmetrizer {
        &self.symmetrizer
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn unfolded(&self) -> &ExchangeMatrix {
        &self.unfolded
    }

    pub fn base_rank(&self) -> usize {
        self.base.n()
    }

    pub fn unfolded_rank(&self) -> usize {
        self.unfolded.n()
    }

    /// The composite mutation over block `i`.
    pub fn composite(&self, i: usize) -> CompositeMutation {
        CompositeMutation {
            base: i,
            constituents: self.blocks[i].clone(),
        }
    }
}

/// A base mutation index together with its block of constituent indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeMutation {
    pub base: usize,
    /// Ascending constituent indices; their single mutations commute.
    pub constituents: Vec<usize>,
}

/// A base permutation with its blockwise order-preserving lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositePermutation {
    pub base: Permutation,
    pub induced: Permutation,
}

/// Lifts a base permutation to the unfolded indices, sending block `i` onto
/// block `sigma(i)` order-preservingly; blocks that would land on a block
/// of another size make the lift impossible.
pub fn composite_permutation(spec: &UnfoldingSpec, sigma: &Permutation) -> Result<CompositePermutation> {
    let n = spec.base_rank();
    assert_eq!(sigma.n(), n, "permutation size mismatch");
    let mut images = vec![usize::MAX; spec.unfolded_rank()];
    for i in 0..n {
        let from = &spec.blocks[i];
        let to = &spec.blocks[sigma.apply(i)];
        if from.len() != to.len() {
            return Err(Error::BlockSizeMismatch(i));
        }
        for (&p, &q) in from.iter().zip(to) {
            images[p] = q;
        }
    }
    Ok(CompositePermutation {
        base: sigma.clone(),
        induced: Permutation::from_images(images)?,
    })
}

/// Applies the constituent mutations of a block to a matrix, in ascending
/// order; requires the block's diagonal sub-block to vanish so that they
/// commute.
fn composite_mutated_matrix(c: &ExchangeMatrix, cm: &CompositeMutation) -> Result<ExchangeMatrix> {
    for &p in &cm.constituents {
        for &q in &cm.constituents {
            if c.get(p, q) != 0 {
                return Err(Error::BlockNotFree(cm.base));
            }
        }
    }
    let mut out = c.clone();
    for &p in &cm.constituents {
        out = out.mutated(p);
    }
    Ok(out)
}

/// Applies a composite mutation to a seed of the unfolded rank. The
/// constituents must commute on the seed's matrix (zero block), and then
/// the result is order-independent.
pub fn composite_mutate(v: &LabelledSeed, cm: &CompositeMutation) -> Result<LabelledSeed> {
    for &p in &cm.constituents {
        for &q in &cm.constituents {
            if v.matrix().get(p, q) != 0 {
                return Err(Error::BlockNotFree(cm.base));
            }
        }
    }
    let mut out = v.clone();
    for &p in &cm.constituents {
        out = out.mutated(p)?;
    }
    Ok(out)
}

/// Outcome of checking an unfolding over the mutation class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum UnfoldingValidation {
    /// Closure reached with the block conditions holding at every pair.
    Valid { pairs_checked: usize },
    /// A reachable pair violates a block condition.
    Invalid { diagnostic: String },
    /// The pair class outgrew the cap before closing.
    Inconclusive { cap: usize, explored: usize },
}

/// Checks the three block conditions of one matrix pair; `None` means pass.
fn pair_diagnostic(b: &ExchangeMatrix, c: &ExchangeMatrix, blocks: &[Vec<usize>]) -> Option<String> {
    let n = b.n();
    for i in 0..n {
        for &p in &blocks[i] {
            for &q in &blocks[i] {
                if c.get(p, q) != 0 {
                    return Some(format!(
                        "block E{0}xE{0} has a nonzero entry at ({1}, {2})",
                        i + 1,
                        p + 1,
                        q + 1
                    ));
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for &q in &blocks[j] {
                let sum: i64 = blocks[i].iter().map(|&p| c.get(p, q)).sum();
                if sum != b.get(i, j) {
                    return Some(format!(
                        "column {} of block E{}xE{} sums to {sum}, expected {}",
                        q + 1,
                        i + 1,
                        j + 1,
                        b.get(i, j)
                    ));
                }
            }
            if b.get(i, j) > 0
                && blocks[i]
                    .iter()
                    .any(|&p| blocks[j].iter().any(|&q| c.get(p, q) < 0))
            {
                return Some(format!(
                    "block E{}xE{} mixes signs against a positive base entry",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    None
}

/// Closes the set of matrix pairs under simultaneous base and composite
/// mutations, re-checking the block conditions at every pair. For a
/// mutation-finite base the closure is finite; hitting `cap` first is
/// reported as inconclusive rather than as a verdict.
pub fn validate_unfolding(spec: &UnfoldingSpec, cap: usize) -> Result<UnfoldingValidation> {
    let n = spec.base_rank();
    let root = (spec.base.clone(), spec.unfolded.clone());
    if let Some(diagnostic) = pair_diagnostic(&root.0, &root.1, &spec.blocks) {
        return Ok(UnfoldingValidation::Invalid { diagnostic });
    }
    let mut seen = HashSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    while let Some((b, c)) = queue.pop_front() {
        for k in 0..n {
            let nb = b.mutated(k);
            let nc = match composite_mutated_matrix(&c, &spec.composite(k)) {
                Ok(nc) => nc,
                Err(Error::BlockNotFree(i)) => {
                    return Ok(UnfoldingValidation::Invalid {
                        diagnostic: format!(
                            "composite mutation at block E{} stops commuting in the class",
                            i + 1
                        ),
                    })
                }
                Err(e) => return Err(e),
            };
            if let Some(diagnostic) = pair_diagnostic(&nb, &nc, &spec.blocks) {
                return Ok(UnfoldingValidation::Invalid { diagnostic });
            }
            let pair = (nb, nc);
            if !seen.contains(&pair) {
                if seen.len() >= cap {
                    return Ok(UnfoldingValidation::Inconclusive {
                        cap,
                        explored: seen.len(),
                    });
                }
                seen.insert(pair.clone());
                queue.push_back(pair);
            }
        }
    }
    Ok(UnfoldingValidation::Valid {
        pairs_checked: seen.len(),
    })
}

/// Lifts the base initial seed to the unfolded initial seed: each base
/// variable corresponds to the block of fresh generators with its indices.
pub fn unfold_seed(u: &LabelledSeed, spec: &UnfoldingSpec) -> Result<LabelledSeed> {
    if u.matrix() != spec.base() {
        return Err(Error::BadUnfolding(
            "seed matrix does not match the unfolding base".into(),
        ));
    }
    let n = spec.base_rank();
    let expected: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::generator(n, i)).collect();
    if u.cluster() != expected {
        return Err(Error::BadUnfolding(
            "only the initial seed unfolds directly; replay words for other seeds".into(),
        ));
    }
    initial_seed(spec.unfolded())
}

/// Both mutation classes of an unfolding, ready to embed automorphisms.
#[derive(Debug)]
pub struct UnfoldingEmbedding {
    pub spec: UnfoldingSpec,
    pub validation: UnfoldingValidation,
    /// Graphs of the base class (anchored at its initial seed).
    pub base_graphs: MutationClassGraphs,
    /// Graphs of the unfolded class (anchored at its initial seed).
    pub unfolded_graphs: MutationClassGraphs,
}

/// A marked automorphism of the base class carried into the unfolded class.
#[derive(Debug, Clone)]
pub struct EmbeddedAutomorphism {
    /// Classification of the source automorphism on the base class.
    pub source: ClusterAutomorphism,
    /// A word realizing the source at the base anchor.
    pub word: MutationWord,
    /// Its blockwise lift.
    pub lifted_word: MutationWord,
    /// The induced vertex permutation of the unfolded exchange graph.
    pub image: Permutation,
    /// Variable images at the unfolded anchor.
    pub realization: Vec<LaurentPoly>,
    pub direction: Direction,
}

/// Validates the unfolding and enumerates both mutation classes. An invalid
/// or inconclusive validation is an error here — embedding only makes sense
/// over a confirmed unfolding.
pub fn embedding_context(spec: UnfoldingSpec, cap: usize) -> Result<UnfoldingEmbedding> {
    let validation = validate_unfolding(&spec, cap)?;
    match &validation {
        UnfoldingValidation::Valid { .. } => {}
        UnfoldingValidation::Invalid { diagnostic } => {
            return Err(Error::UnfoldingInvalid(diagnostic.clone()))
        }
        UnfoldingValidation::Inconclusive { cap, explored } => {
            return Err(Error::CapExceeded {
                cap: *cap,
                explored: *explored,
            })
        }
    }
    let base_graphs = MutationClassGraphs::build(&initial_seed(&spec.base)?, cap)?;
    let unfolded_graphs = MutationClassGraphs::build(&initial_seed(&spec.unfolded)?, cap)?;
    Ok(UnfoldingEmbedding {
        spec,
        validation,
        base_graphs,
        unfolded_graphs,
    })
}

/// Carries one marked automorphism of the base class into the unfolded
/// exchange graph: realize it as a word at the base anchor, lift the word
/// blockwise, apply it to the unfolded anchor, and extend equivariantly.
pub fn embed_automorphism(
    context: &UnfoldingEmbedding,
    phi: &Permutation,
) -> Result<EmbeddedAutomorphism> {
    let source = classify(phi, &context.base_graphs)?;
    let word = word_realization(phi, &context.base_graphs)?;
    let sigma_lift = composite_permutation(&context.spec, word.trailing())?;
    let mut lifted_mutations = Vec::new();
    for &k in word.mutations() {
        lifted_mutations.extend_from_slice(&context.spec.blocks()[k]);
    }
    let lifted_word = MutationWord::new(lifted_mutations, sigma_lift.induced.clone())?;

    let unfolded = &context.unfolded_graphs;
    let anchor = &unfolded.labelled.seeds()[0];
    let image_seed = anchor.apply_word(&lifted_word)?;
    let c = context.spec.unfolded();
    let direction = if image_seed.matrix() == c {
        Direction::Direct
    } else if *image_seed.matrix() == c.opposite() {
        Direction::Inverse
    } else {
        return Err(internal("lifted word moved the unfolded matrix off ±C"));
    };
    if direction != source.direction {
        return Err(internal("embedding changed an automorphism's direction"));
    }

    let image_idx = unfolded
        .labelled
        .index_of(&image_seed)
        .ok_or_else(|| internal("lifted image is not in the unfolded class"))?;
    let lift = propagate_labelled_automorphism(&unfolded.labelled, 0, image_idx)?;

    // Descend to the unfolded exchange graph.
    let quotient_len = unfolded.exchange().len();
    let mut images = vec![usize::MAX; quotient_len];
    for v in 0..unfolded.labelled.len() {
        let (from, to) = (unfolded.projection[v], unfolded.projection[lift.apply(v)]);
        if images[from] == usize::MAX {
            images[from] = to;
        } else if images[from] != to {
            return Err(internal("embedded map does not descend to the quotient"));
        }
    }
    let image = Permutation::from_images(images)?;
    for &(a, b) in unfolded.exchange().edges() {
        let (ia, ib) = (image.apply(a), image.apply(b));
        if !unfolded.exchange().neighbors(ia).contains(&ib) {
            return Err(internal("embedded map is not a graph automorphism"));
        }
    }

    Ok(EmbeddedAutomorphism {
        source,
        word,
        lifted_word,
        image,
        realization: image_seed.cluster().to_vec(),
        direction,
    })
}

/// On-disk unfolding description with 1-based block indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnfoldingJson {
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    pub blocks: Vec<Vec<usize>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i64>>,
}

impl UnfoldingJson {
    pub fn into_spec(self) -> Result<UnfoldingSpec> {
        let base = ExchangeMatrix::from_rows(self.b)?;
        let unfolded = ExchangeMatrix::from_rows(self.c)?;
        let blocks = self
            .blocks
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(|&i| {
                        i.checked_sub(1).ok_or_else(|| {
                            Error::BadUnfolding("block indices are 1-based".into())
                        })
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        UnfoldingSpec::new(base, blocks, unfolded)
    }

    pub fn of(spec: &UnfoldingSpec) -> Self {
        UnfoldingJson {
            b: spec.base().rows(),
            blocks: spec
                .blocks()
                .iter()
                .map(|block| block.iter().map(|&i| i + 1).collect())
                .collect(),
            c: spec.unfolded().rows(),
        }
    }
}
