//! Automorphism groups of exchange graphs, their pullback to the labelled
//! exchange graph, and classification into direct, inverse and non-cluster
//! maps.
//!
//! A graph automorphism is a vertex permutation preserving adjacency (and
//! edge marks, in the marked case). Each one lifts uniquely to a
//! label-preserving permutation of the labelled exchange graph once the
//! image of the anchor seed is pinned by watching which variable each local
//! mutation exchanges. The lifted image of the anchor seed reads off a field
//! automorphism candidate `f(x_i)`; its exchange matrix equals `B`, `-B`, or
//! neither, splitting automorphisms into direct, inverse, and non-cluster.

use crate::error::{internal, Error, Result};
use crate::graph::{n_invariants, ExchangeGraph, MarkedExchangeGraph, MutationClassGraphs};
use crate::laurent::LaurentPoly;
use crate::matrix::{mutation_class, ExchangeMatrix};
use crate::perm::Permutation;
use crate::seed::{LabelledSeed, MutationWord};
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};

/// Cap on backtracking assignments during automorphism search.
pub const AUT_SEARCH_CAP: usize = 5_000_000;

/// Coarse isomorphism type of a small group, determined from its order and
/// element orders; groups of order above 16 stay untagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    Cyclic,
    Dihedral,
    Other,
    Untagged,
}

/// A finite permutation group: all elements, a greedy generating set, and a
/// small-group tag. Built only through [`AutGroup::from_elements`], which
/// re-derives the group from the generators and insists on closure.
#[derive(Debug, Clone)]
pub struct AutGroup {
    pub elements: Vec<Permutation>,
    pub generators: Vec<Permutation>,
    pub order: usize,
    pub tag: GroupTag,
}

impl AutGroup {
    /// Wraps a set of permutations as a group: sorts and dedupes, picks
    /// greedy generators, and verifies the generated closure is exactly the
    /// given set.
    pub fn from_elements(mut elements: Vec<Permutation>) -> Result<Self> {
        if elements.is_empty() {
            return Err(internal("automorphism set lost the identity"));
        }
        elements.sort();
        elements.dedup();
        if !elements[0].is_identity() {
            return Err(internal("automorphism set lost the identity"));
        }
        let all: HashSet<&Permutation> = elements.iter().collect();
        let mut generators: Vec<Permutation> = Vec::new();
        let mut known: HashSet<Permutation> = HashSet::from([elements[0].clone()]);
        for e in &elements {
            if !known.contains(e) {
                generators.push(e.clone());
                // Re-close under the enlarged generating set.
                let mut frontier: Vec<Permutation> = known.iter().cloned().collect();
                while let Some(p) = frontier.pop() {
                    for g in &generators {
                        let q = p.then(g);
                        if !all.contains(&q) {
                            return Err(internal("automorphism set is not closed"));
                        }
                        if known.insert(q.clone()) {
                            frontier.push(q);
                        }
                    }
                }
            }
        }
        if known.len() != elements.len() {
            return Err(internal("generator closure disagrees with element count"));
        }
        let order = elements.len();
        let tag = tag_of(&elements);
        Ok(AutGroup {
            elements,
            generators,
            order,
            tag,
        })
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }
}

fn tag_of(elements: &[Permutation]) -> GroupTag {
    let g = elements.len();
    if g > 16 {
        return GroupTag::Untagged;
    }
    if elements.iter().any(|e| e.order() == g) {
        return GroupTag::Cyclic;
    }
    if g % 2 == 0 && g >= 4 {
        let m = g / 2;
        for r in elements.iter().filter(|r| r.order() == m) {
            let mut rotations = HashSet::new();
            let mut p = Permutation::identity(r.n());
            for _ in 0..m {
                rotations.insert(p.clone());
                p = p.then(r);
            }
            if elements.iter().any(|s| {
                !rotations.contains(s) && s.order() == 2 && s.then(r).then(s) == r.inverse()
            }) {
                return GroupTag::Dihedral;
            }
        }
    }
    GroupTag::Other
}

/// Backtracking search for all color- and adjacency-preserving vertex
/// permutations. `colors` prunes candidate images; `edge_mark` (same value
/// required on an edge and its image) handles the marked case.
fn search_automorphisms(
    adjacency: &[Vec<usize>],
    colors: &[String],
    edge_mark: impl Fn(usize, usize) -> i64,
) -> Result<Vec<Permutation>> {
    let v = adjacency.len();
    let mut image = vec![usize::MAX; v];
    let mut used = vec![false; v];
    let mut found = Vec::new();
    let mut nodes = 0usize;

    // Depth-first over vertices in index order; candidate images ascend, so
    // the results come out sorted by image vector. A frame `(vertex, cand)`
    // means: retract any earlier choice for `vertex` and try candidates
    // from `cand` upward.
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some((vertex, cand)) = stack.pop() {
        if vertex == v {
            found.push(Permutation::from_images(image.clone())?);
            continue;
        }
        if cand > 0 {
            debug_assert_eq!(image[vertex], cand - 1);
            used[cand - 1] = false;
            image[vertex] = usize::MAX;
        }
        for t in cand..v {
            if used[t] || colors[t] != colors[vertex] {
                continue;
            }
            nodes += 1;
            if nodes > AUT_SEARCH_CAP {
                return Err(Error::CapExceeded {
                    cap: AUT_SEARCH_CAP,
                    explored: nodes,
                });
            }
            let consistent = adjacency[vertex].iter().all(|&w| {
                image[w] == usize::MAX
                    || (adjacency[t].contains(&image[w])
                        && edge_mark(vertex, w) == edge_mark(t, image[w]))
            });
            if consistent {
                image[vertex] = t;
                used[t] = true;
                stack.push((vertex, t + 1));
                stack.push((vertex + 1, 0));
                break;
            }
        }
    }
    Ok(found)
}

/// Per-vertex refinement color: the loop-length multiset of the seed, plus
/// the incident-mark multiset when marks are given. Both are preserved by
/// the automorphisms being searched for, so pruning with them is safe.
fn vertex_colors(graph: &ExchangeGraph, marks: Option<&MarkedExchangeGraph>) -> Result<Vec<String>> {
    let mut colors = Vec::with_capacity(graph.len());
    for (v, seed) in graph.seeds().iter().enumerate() {
        let loops = if graph.rank() >= 2 {
            let inv = n_invariants(&seed.representative())?;
            format!("{:?}", inv.at_seed)
        } else {
            String::new()
        };
        let incident = match marks {
            Some(m) => format!("{:?}", m.incident_marks(v)),
            None => String::new(),
        };
        colors.push(format!("{loops}|{incident}"));
    }
    Ok(colors)
}

/// All adjacency-preserving vertex permutations of an exchange graph.
pub fn graph_automorphisms(graph: &ExchangeGraph) -> Result<AutGroup> {
    let colors = vertex_colors(graph, None)?;
    let adjacency: Vec<Vec<usize>> = (0..graph.len())
        .map(|v| graph.neighbors(v).to_vec())
        .collect();
    AutGroup::from_elements(search_automorphisms(&adjacency, &colors, |_, _| 0)?)
}

/// All adjacency- and mark-preserving vertex permutations of a marked
/// exchange graph.
pub fn marked_graph_automorphisms(marked: &MarkedExchangeGraph) -> Result<AutGroup> {
    let graph = marked.graph();
    let colors = vertex_colors(graph, Some(marked))?;
    let adjacency: Vec<Vec<usize>> = (0..graph.len())
        .map(|v| graph.neighbors(v).to_vec())
        .collect();
    let elements = search_automorphisms(&adjacency, &colors, |u, v| {
        marked.mark_between(u, v).expect("adjacent vertices")
    })?;
    AutGroup::from_elements(elements)
}

/// Lifts a quotient-graph automorphism to the labelled exchange graph.
///
/// The image of the anchor (labelled vertex 0) is ordered so that position
/// `i` holds the one variable that the quotient image of `μ_i` exchanges;
/// the rest propagates along mutation edges and permutation moves. The lift
/// preserves edge labels and commutes with the projection — both are
/// verified, and any inconsistency (meaning `phi` was not an automorphism)
/// is surfaced as an internal error.
pub fn pullback(phi: &Permutation, graphs: &MutationClassGraphs) -> Result<Permutation> {
    let labelled = &graphs.labelled;
    let quotient = graphs.exchange();
    if phi.n() != quotient.len() {
        return Err(Error::NotAnAutomorphism(format!(
            "vertex map on {} vertices against a graph with {}",
            phi.n(),
            quotient.len()
        )));
    }
    let n = labelled.rank();

    // Order the anchor's image cluster: position i takes the variable that
    // disappears when the image seed is mutated "at i" (i.e. toward the
    // image of the anchor's i-th neighbor).
    let t0 = phi.apply(graphs.projection[0]);
    let image_cluster = quotient.seeds()[t0].cluster();
    let mut order = Vec::with_capacity(n);
    for i in 0..n {
        let ti = phi.apply(graphs.projection[labelled.neighbor(0, i)]);
        let kept: HashSet<&LaurentPoly> = quotient.seeds()[ti].cluster().iter().collect();
        let dropped: Vec<usize> = (0..n)
            .filter(|&j| !kept.contains(&image_cluster[j]))
            .collect();
        match dropped[..] {
            [j] => order.push(j),
            _ => {
                return Err(internal(
                    "anchor image ordering is not determined by one variable",
                ))
            }
        }
    }
    {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(internal("anchor image ordering is not a bijection"));
        }
    }
    let anchor_image = quotient.seeds()[t0].lift_with_order(&order);
    let anchor_image_idx = labelled
        .index_of(&anchor_image)
        .ok_or_else(|| internal("anchor image is not a labelled seed of the class"))?;

    let lift = propagate_labelled_automorphism(labelled, 0, anchor_image_idx)?;

    // The lift must commute with the projection.
    for v in 0..labelled.len() {
        if graphs.projection[lift.apply(v)] != phi.apply(graphs.projection[v]) {
            return Err(internal("pullback does not cover the quotient map"));
        }
    }
    Ok(lift)
}

/// Extends `anchor ↦ anchor_image` to the whole labelled exchange graph by
/// equivariance: along mutation edges (`v·μ_k ↦ image·μ_k`) and permutation
/// moves (`v·σ ↦ image·σ`). Errors if the extension is inconsistent, not
/// injective, partial, or breaks an edge label — any of which means the
/// anchor image did not come from a genuine automorphism.
pub(crate) fn propagate_labelled_automorphism(
    labelled: &crate::graph::LabelledExchangeGraph,
    anchor: usize,
    anchor_image: usize,
) -> Result<Permutation> {
    let n = labelled.rank();
    let mut image = vec![usize::MAX; labelled.len()];
    let mut taken = vec![false; labelled.len()];
    let assign = |v: usize, w: usize, image: &mut Vec<usize>, taken: &mut Vec<bool>| {
        if image[v] != usize::MAX {
            if image[v] != w {
                return Err(internal("equivariant propagation is inconsistent"));
            }
            return Ok(false);
        }
        if taken[w] {
            return Err(internal("equivariant propagation is not injective"));
        }
        image[v] = w;
        taken[w] = true;
        Ok(true)
    };
    assign(anchor, anchor_image, &mut image, &mut taken)?;
    let perms: Vec<Permutation> = Permutation::all(n).filter(|s| !s.is_identity()).collect();
    let mut queue = VecDeque::from([anchor]);
    while let Some(v) = queue.pop_front() {
        let w = image[v];
        for k in 0..n {
            if assign(
                labelled.neighbor(v, k),
                labelled.neighbor(w, k),
                &mut image,
                &mut taken,
            )? {
                queue.push_back(labelled.neighbor(v, k));
            }
        }
        for sigma in &perms {
            let vs = labelled
                .index_of(&labelled.seeds()[v].permuted(sigma))
                .ok_or_else(|| internal("labelled class is not permutation-closed"))?;
            let ws = labelled
                .index_of(&labelled.seeds()[w].permuted(sigma))
                .ok_or_else(|| internal("labelled class is not permutation-closed"))?;
            if assign(vs, ws, &mut image, &mut taken)? {
                queue.push_back(vs);
            }
        }
    }
    if image.iter().any(|&w| w == usize::MAX) {
        return Err(internal("equivariant propagation did not cover the graph"));
    }
    let lift = Permutation::from_images(image)?;
    for &(a, b, k) in labelled.edges() {
        if labelled.neighbor(lift.apply(a), k) != lift.apply(b) {
            return Err(internal("equivariant propagation broke an edge label"));
        }
    }
    Ok(lift)
}

/// Whether an automorphism fixes the exchange matrix, negates it, or moves
/// it off the `±B` axis entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Direct,
    Inverse,
    NonCluster,
}

/// A classified exchange-graph automorphism: its lift, the induced variable
/// images at the anchor seed, the image exchange matrix and its direction.
#[derive(Debug, Clone)]
pub struct ClusterAutomorphism {
    /// The quotient-graph vertex permutation this classification is of.
    pub vertex_map: Permutation,
    /// Its lift to the labelled exchange graph.
    pub labelled_map: Permutation,
    /// `f(x_i)`: the cluster of the lifted image of the anchor seed.
    pub realization: Vec<LaurentPoly>,
    pub image_matrix: ExchangeMatrix,
    pub direction: Direction,
}

/// Classifies a quotient-graph automorphism against the anchor seed's
/// matrix: direct if the lifted image seed carries `B` itself, inverse for
/// `-B`, non-cluster otherwise.
pub fn classify(phi: &Permutation, graphs: &MutationClassGraphs) -> Result<ClusterAutomorphism> {
    let labelled_map = pullback(phi, graphs)?;
    let image_seed = &graphs.labelled.seeds()[labelled_map.apply(0)];
    let b = graphs.labelled.seeds()[0].matrix();
    let image_matrix = image_seed.matrix().clone();
    let direction = if image_matrix == *b {
        Direction::Direct
    } else if image_matrix == b.opposite() {
        Direction::Inverse
    } else {
        Direction::NonCluster
    };
    Ok(ClusterAutomorphism {
        vertex_map: phi.clone(),
        labelled_map,
        realization: image_seed.cluster().to_vec(),
        image_matrix,
        direction,
    })
}

/// The full automorphism analysis of one mutation class.
#[derive(Debug, Clone)]
pub struct ClusterAutGroups {
    pub graphs: MutationClassGraphs,
    /// Automorphisms of the marked exchange graph.
    pub aut: AutGroup,
    /// The direct subgroup.
    pub aut_plus: AutGroup,
    /// Classification of each `aut` element, in element order.
    pub classified: Vec<ClusterAutomorphism>,
    /// Whether `-B` lies in the matrix mutation class of `B`.
    pub minus_b_in_class: bool,
}

/// Builds the exchange graphs of `u`, computes the mark-preserving
/// automorphism group and its direct subgroup, and cross-checks the index
/// against whether `-B` is mutation-reachable. Mark-preservation forbids
/// the non-cluster outcome; hitting it is reported as an internal error.
pub fn cluster_automorphism_group(u: &LabelledSeed, cap: usize) -> Result<ClusterAutGroups> {
    let graphs = MutationClassGraphs::build(u, cap)?;
    let aut = marked_graph_automorphisms(&graphs.marked)?;
    let classified: Vec<ClusterAutomorphism> = aut
        .elements
        .iter()
        .map(|phi| classify(phi, &graphs))
        .collect::<Result<_>>()?;
    if classified
        .iter()
        .any(|c| c.direction == Direction::NonCluster)
    {
        return Err(internal(
            "mark-preserving automorphism classified as non-cluster",
        ));
    }
    let aut_plus = AutGroup::from_elements(
        classified
            .iter()
            .filter(|c| c.direction == Direction::Direct)
            .map(|c| c.vertex_map.clone())
            .collect(),
    )?;
    if aut.order % aut_plus.order != 0 {
        return Err(internal("direct subgroup order does not divide group order"));
    }
    let index = aut.order / aut_plus.order;
    if index > 2 {
        return Err(internal("direct subgroup index exceeds 2"));
    }
    let b = u.matrix();
    let minus_b_in_class = mutation_class(b, cap)?.contains(&b.opposite().canonical_form());
    if (index == 2) != minus_b_in_class {
        return Err(internal(
            "direct-subgroup index disagrees with -B reachability",
        ));
    }
    Ok(ClusterAutGroups {
        graphs,
        aut,
        aut_plus,
        classified,
        minus_b_in_class,
    })
}

/// Expresses an automorphism as a mutation word at the anchor: a breadth-
/// first mutation path from labelled vertex 0 to a relabeling of its lifted
/// image, plus the unique aligning permutation.
pub fn word_realization(phi: &Permutation, graphs: &MutationClassGraphs) -> Result<MutationWord> {
    let labelled = &graphs.labelled;
    let n = labelled.rank();
    let target_idx = pullback(phi, graphs)?.apply(0);
    let target = &labelled.seeds()[target_idx];
    let wanted = graphs.projection[target_idx];

    // Shortest mutation path from the anchor to any labelled seed over the
    // same quotient vertex as the target.
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; labelled.len()];
    let mut seen = vec![false; labelled.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut hit = None;
    'bfs: while let Some(v) = queue.pop_front() {
        if graphs.projection[v] == wanted {
            hit = Some(v);
            break 'bfs;
        }
        for k in 0..n {
            let w = labelled.neighbor(v, k);
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, k));
                queue.push_back(w);
            }
        }
    }
    let hit = hit.ok_or(Error::NoRealization)?;
    let mut mutations = Vec::new();
    let mut v = hit;
    while let Some((p, k)) = parent[v] {
        mutations.push(k);
        v = p;
    }
    mutations.reverse();

    // The aligning permutation sends the reached seed's positions to the
    // target's: position i's variable sits at position sigma(i) afterwards.
    let reached = &labelled.seeds()[hit];
    let slot: HashMap<&LaurentPoly, usize> = target
        .cluster()
        .iter()
        .enumerate()
        .map(|(j, b)| (b, j))
        .collect();
    let images: Vec<usize> = reached
        .cluster()
        .iter()
        .map(|b| {
            slot.get(b)
                .copied()
                .ok_or_else(|| internal("reached seed does not relabel onto the target"))
        })
        .collect::<Result<_>>()?;
    let word = MutationWord::new(mutations, Permutation::from_images(images)?)?;
    if labelled.seeds()[0].apply_word(&word)? != *target {
        return Err(internal("realized word misses the lifted image"));
    }
    Ok(word)
}
