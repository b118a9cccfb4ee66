//! Exact computational toolkit for cluster algebras of geometric type.
//!
//! The crate works with skew-symmetrizable exchange matrices and seeds whose
//! cluster variables are multivariate Laurent polynomials over the integers.
//! On top of exact seed mutation it provides:
//!
//! * enumeration of labelled and unlabelled mutation classes,
//! * labelled, unlabelled and marked exchange graphs,
//! * exchange-graph automorphism groups, their pullbacks to the labelled
//!   graph, and the direct/inverse/non-cluster trichotomy,
//! * unfoldings of skew-symmetrizable matrices into skew-symmetric ones,
//!   with validation and automorphism embedding,
//! * maximal green sequence search on framed quivers.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals);
//! every search is deterministic, so repeated runs produce identical output.

pub mod aut;
pub mod error;
pub mod graph;
pub mod green;
pub mod laurent;
pub mod matrix;
pub mod perm;
pub mod seed;
pub mod unfold;

pub use error::{Error, Result, Severity};
pub use laurent::{LaurentPoly, Monomial};
pub use matrix::{
    is_mutation_finite, mutation_class, Diagram, ExchangeMatrix, MutationFiniteness, Symmetrizer,
};
pub use aut::{
    classify, cluster_automorphism_group, graph_automorphisms, marked_graph_automorphisms,
    pullback, word_realization, AutGroup, ClusterAutGroups, ClusterAutomorphism, Direction,
    GroupTag, AUT_SEARCH_CAP,
};
pub use graph::{
    geodesic_loop, n_invariants, EdgeJson, ExchangeGraph, GeodesicLoop, GraphJson,
    LabelledExchangeGraph, LoopLength, MarkedExchangeGraph, MutationClassGraphs, NInvariants,
    LOOP_CUTOFF,
};
pub use green::{
    default_max_len, find_maximal_green_sequences, induced_automorphism, FramedQuiver,
    GreenSearch, GreenSequence, InducedAutomorphism, VertexColor,
};
pub use perm::Permutation;
pub use unfold::{
    composite_mutate, composite_permutation, embed_automorphism, embedding_context, unfold_seed,
    validate_unfolding, CompositeMutation, CompositePermutation, EmbeddedAutomorphism,
    UnfoldingEmbedding, UnfoldingJson, UnfoldingSpec, UnfoldingValidation,
};
pub use seed::{
    enumerate_ball, enumerate_class, enumerate_labelled_ball, enumerate_labelled_class,
    initial_seed, LabelledClass, LabelledSeed, MutationWord, Seed, SeedClass, WordLetter,
};

/// Default cap on explored states for class enumerations and closure checks.
pub const DEFAULT_CAP: usize = 1_000_000;

/// Reads the worker-count cap from `CLUSTER_KIT_THREADS` (defaults to 1).
///
/// Values above 1 let frontier expansion inside class enumerations run on a
/// rayon pool; results are merged in frontier order, so output is identical
/// whatever the setting.
pub fn configured_threads() -> usize {
    std::env::var("CLUSTER_KIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .unwrap_or(1)
}
