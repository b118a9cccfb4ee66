//! Exchange graphs in three flavours, geodesic loops and loop-length
//! invariants.
//!
//! The labelled exchange graph has one vertex per labelled seed and one edge
//! per mutation, labelled by its position; the exchange graph is its
//! quotient by relabeling; the marked exchange graph decorates each quotient
//! edge with the symmetrizer entry of the mutated position. Alternating two
//! mutations traces a geodesic loop whose length encodes the arrow weight
//! between the two positions, and the multisets of loop lengths at a seed
//! and its neighbors are relabeling-invariant.

use crate::error::{internal, Error, Result};
use crate::matrix::Symmetrizer;
use crate::seed::{
    enumerate_class, enumerate_labelled_class, LabelledClass, LabelledSeed, Seed, SeedClass,
};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;

/// Walk limit for geodesic loops: the longest finite loop has 8 edges, so a
/// loop open after 9 steps is infinite.
pub const LOOP_CUTOFF: usize = 9;

/// A geodesic loop length: 4, 5, 6, 8 or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoopLength {
    Finite(usize),
    Infinite,
}

impl fmt::Display for LoopLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopLength::Finite(k) => write!(f, "{k}"),
            LoopLength::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for LoopLength {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LoopLength::Finite(k) => ser.serialize_u64(*k as u64),
            LoopLength::Infinite => ser.serialize_str("inf"),
        }
    }
}

/// The loop traced by alternating mutations at two positions.
#[derive(Debug, Clone)]
pub struct GeodesicLoop {
    pub base: LabelledSeed,
    pub a: usize,
    pub b: usize,
    pub length: LoopLength,
}

/// Alternately mutates at positions `a` and `b` (starting with `a`) until
/// the starting seed recurs up to relabeling, and reports the number of
/// edges traversed; no return within [`LOOP_CUTOFF`] steps means infinity.
pub fn geodesic_loop(u: &LabelledSeed, a: usize, b: usize) -> Result<GeodesicLoop> {
    let n = u.rank();
    assert!(a < n && b < n, "geodesic positions out of range");
    assert_ne!(a, b, "geodesic loop needs two distinct positions");
    let start = u.unlabelled();
    let mut cur = u.clone();
    let mut length = LoopLength::Infinite;
    for step in 1..=LOOP_CUTOFF {
        cur = cur.mutated(if step % 2 == 1 { a } else { b })?;
        if cur.unlabelled() == start {
            length = LoopLength::Finite(step);
            break;
        }
    }
    Ok(GeodesicLoop {
        base: u.clone(),
        a,
        b,
        length,
    })
}

/// The loop-length multisets at a seed and at its neighbors, each sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NInvariants {
    /// C(n,2) lengths: one per position pair at the seed itself.
    pub at_seed: Vec<LoopLength>,
    /// n·C(n-1,2) lengths: for each neighbor `u·μ_k`, the pairs avoiding k.
    pub at_neighbors: Vec<LoopLength>,
}

/// Computes the loop-length multisets; needs rank at least 2 (the neighbor
/// multiset is empty below rank 3).
pub fn n_invariants(u: &LabelledSeed) -> Result<NInvariants> {
    let n = u.rank();
    if n < 2 {
        return Err(Error::RankTooSmall(n));
    }
    let mut at_seed = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            at_seed.push(geodesic_loop(u, a, b)?.length);
        }
    }
    at_seed.sort_unstable();
    let mut at_neighbors = Vec::new();
    for k in 0..n {
        let v = u.mutated(k)?;
        for a in (0..n).filter(|&a| a != k) {
            for b in (a + 1..n).filter(|&b| b != k) {
                at_neighbors.push(geodesic_loop(&v, a, b)?.length);
            }
        }
    }
    at_neighbors.sort_unstable();
    Ok(NInvariants {
        at_seed,
        at_neighbors,
    })
}

fn count_components(len: usize, neighbors: impl Fn(usize) -> Vec<usize>) -> usize {
    let mut seen = vec![false; len];
    let mut components = 0;
    for start in 0..len {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for w in neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// The labelled exchange graph: labelled seeds joined by position-labelled
/// mutation edges (permutations relate vertices but contribute no edges).
#[derive(Debug, Clone)]
pub struct LabelledExchangeGraph {
    class: LabelledClass,
    /// `adjacency[v][k]` is the seed reached from `v` by mutating at `k`.
    adjacency: Vec<Vec<usize>>,
}

impl LabelledExchangeGraph {
    pub fn build(u: &LabelledSeed, cap: usize) -> Result<Self> {
        let class = enumerate_labelled_class(u, cap)?;
        let n = u.rank();
        let mut adjacency = vec![vec![usize::MAX; n]; class.len()];
        for &(a, b, k) in &class.edges {
            for (x, y) in [(a, b), (b, a)] {
                if adjacency[x][k] != usize::MAX {
                    return Err(internal("two labelled edges share a direction"));
                }
                adjacency[x][k] = y;
            }
        }
        if adjacency.iter().flatten().any(|&v| v == usize::MAX) {
            return Err(internal("labelled exchange graph is not mutation-regular"));
        }
        Ok(LabelledExchangeGraph { class, adjacency })
    }

    pub fn rank(&self) -> usize {
        self.adjacency.first().map_or(0, |row| row.len())
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn seeds(&self) -> &[LabelledSeed] {
        &self.class.seeds
    }

    /// Edges `(u, v, k)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.class.edges
    }

    /// The seed reached from `v` by mutating at position `k`.
    pub fn neighbor(&self, v: usize, k: usize) -> usize {
        self.adjacency[v][k]
    }

    pub fn index_of(&self, seed: &LabelledSeed) -> Option<usize> {
        self.class.index_of(seed)
    }

    /// Number of connected components under mutation edges alone.
    pub fn components(&self) -> usize {
        count_components(self.len(), |v| self.adjacency[v].clone())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.seeds().iter().map(|s| s.render_cluster("x")).collect(),
            edges: self
                .edges()
                .iter()
                .map(|&(u, v, k)| EdgeJson {
                    u,
                    v,
                    label: Some(k + 1),
                    mark: None,
                })
                .collect(),
        }
    }

    pub fn to_dot(&self, cluster_labels: bool) -> String {
        let mut out = String::from("graph labelled_exchange {\n");
        for (i, seed) in self.seeds().iter().enumerate() {
            out.push_str(&dot_vertex(i, cluster_labels.then(|| seed.render_cluster("x"))));
        }
        for &(u, v, k) in self.edges() {
            out.push_str(&format!("  s{} -- s{} [label=\"{}\"];\n", u + 1, v + 1, k + 1));
        }
        out.push_str("}\n");
        out
    }
}

/// The exchange graph: seeds up to relabeling, one edge per local mutation.
#[derive(Debug, Clone)]
pub struct ExchangeGraph {
    class: SeedClass,
    adjacency: Vec<Vec<usize>>,
}

impl ExchangeGraph {
    pub fn build(u: &LabelledSeed, cap: usize) -> Result<Self> {
        Self::build_checked(u, cap, false)
    }

    /// Like [`ExchangeGraph::build`], but `strict` turns a cluster met with
    /// two different matrices into a hard error.
    pub fn build_checked(u: &LabelledSeed, cap: usize, strict: bool) -> Result<Self> {
        Self::from_class(enumerate_class(u, cap, strict)?, u.rank())
    }

    fn from_class(class: SeedClass, n: usize) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); class.len()];
        for &(a, b) in &class.edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for row in &mut adjacency {
            row.sort_unstable();
            if row.len() != n {
                return Err(internal("exchange graph is not mutation-regular"));
            }
        }
        Ok(ExchangeGraph { class, adjacency })
    }

    pub fn rank(&self) -> usize {
        self.adjacency.first().map_or(0, |row| row.len())
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.class.seeds
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.class.edges
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn index_of(&self, seed: &Seed) -> Option<usize> {
        self.class.index_of(seed)
    }

    pub fn components(&self) -> usize {
        count_components(self.len(), |v| self.adjacency[v].clone())
    }

    /// Every `(endpoint, mutated position)` from which an edge was found.
    pub fn edge_discoveries(&self, e: usize) -> &[(usize, usize)] {
        &self.class.discoveries[e]
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.seeds().iter().map(|s| s.render_cluster("x")).collect(),
            edges: self
                .edges()
                .iter()
                .map(|&(u, v)| EdgeJson {
                    u,
                    v,
                    label: None,
                    mark: None,
                })
                .collect(),
        }
    }

    pub fn to_dot(&self, cluster_labels: bool) -> String {
        let mut out = String::from("graph exchange {\n");
        for (i, seed) in self.seeds().iter().enumerate() {
            out.push_str(&dot_vertex(i, cluster_labels.then(|| seed.render_cluster("x"))));
        }
        for &(u, v) in self.edges() {
            out.push_str(&format!("  s{} -- s{};\n", u + 1, v + 1));
        }
        out.push_str("}\n");
        out
    }
}

/// An exchange graph with each edge marked by the symmetrizer entry of the
/// mutated position, computed from the endpoints' canonical lifts with a
/// consistency check across every discovery of the edge.
#[derive(Debug, Clone)]
pub struct MarkedExchangeGraph {
    graph: ExchangeGraph,
    /// Parallel to `graph.edges()`.
    marks: Vec<i64>,
}

impl MarkedExchangeGraph {
    pub fn build(u: &LabelledSeed, cap: usize) -> Result<Self> {
        Self::build_checked(u, cap, false)
    }

    /// Like [`MarkedExchangeGraph::build`], with strict cluster identity.
    pub fn build_checked(u: &LabelledSeed, cap: usize, strict: bool) -> Result<Self> {
        Self::from_graph(ExchangeGraph::build_checked(u, cap, strict)?)
    }

    fn from_graph(graph: ExchangeGraph) -> Result<Self> {
        let symmetrizers: Vec<Symmetrizer> = graph
            .seeds()
            .iter()
            .map(|s| s.matrix().symmetrizer())
            .collect::<Result<_>>()?;
        let mut marks = Vec::with_capacity(graph.edges().len());
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            let discoveries = graph.edge_discoveries(e);
            let (mut from_a, mut from_b) = (false, false);
            let mut mark = None;
            for &(endpoint, pos) in discoveries {
                from_a |= endpoint == a;
                from_b |= endpoint == b;
                let value = symmetrizers[endpoint].get(pos);
                if *mark.get_or_insert(value) != value {
                    return Err(internal("edge marking differs between lifts"));
                }
            }
            if !(from_a && from_b) {
                return Err(internal("edge not discovered from both endpoints"));
            }
            marks.push(mark.expect("every edge has a discovery"));
        }
        Ok(MarkedExchangeGraph { graph, marks })
    }

    pub fn graph(&self) -> &ExchangeGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Marks parallel to `graph().edges()`.
    pub fn marks(&self) -> &[i64] {
        &self.marks
    }

    pub fn mark_between(&self, u: usize, v: usize) -> Option<i64> {
        let key = (u.min(v), u.max(v));
        self.graph
            .edges()
            .binary_search(&key)
            .ok()
            .map(|e| self.marks[e])
    }

    /// Sorted multiset of marks on the edges at `v`.
    pub fn incident_marks(&self, v: usize) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .graph
            .edges()
            .iter()
            .zip(&self.marks)
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &m)| m)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .graph
                .seeds()
                .iter()
                .map(|s| s.render_cluster("x"))
                .collect(),
            edges: self
                .graph
                .edges()
                .iter()
                .zip(&self.marks)
                .map(|(&(u, v), &m)| EdgeJson {
                    u,
                    v,
                    label: None,
                    mark: Some(m),
                })
                .collect(),
        }
    }

    pub fn to_dot(&self, cluster_labels: bool) -> String {
        let mut out = String::from("graph marked_exchange {\n");
        for (i, seed) in self.graph.seeds().iter().enumerate() {
            out.push_str(&dot_vertex(i, cluster_labels.then(|| seed.render_cluster("x"))));
        }
        for (&(u, v), &m) in self.graph.edges().iter().zip(&self.marks) {
            out.push_str(&format!(
                "  s{} -- s{} [label=\"{m}\", class=\"mark{m}\"];\n",
                u + 1,
                v + 1
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Labelled and marked exchange graphs of one mutation class, with the
/// projection from labelled to unlabelled vertices. Building the bundle
/// recomputes every edge mark from every labelled lift and cross-checks.
#[derive(Debug, Clone)]
pub struct MutationClassGraphs {
    pub labelled: LabelledExchangeGraph,
    pub marked: MarkedExchangeGraph,
    /// `projection[i]` is the exchange-graph vertex under labelled seed `i`.
    pub projection: Vec<usize>,
}

impl MutationClassGraphs {
    pub fn build(u: &LabelledSeed, cap: usize) -> Result<Self> {
        let labelled = LabelledExchangeGraph::build(u, cap)?;
        let marked = MarkedExchangeGraph::build(u, cap)?;
        let projection: Vec<usize> = labelled
            .seeds()
            .iter()
            .map(|s| {
                marked
                    .graph()
                    .index_of(&s.unlabelled())
                    .ok_or_else(|| internal("labelled seed missing from the quotient"))
            })
            .collect::<Result<_>>()?;
        // Recompute each edge's mark from every labelled lift.
        for &(a, b, k) in labelled.edges() {
            let (pa, pb) = (projection[a], projection[b]);
            if pa == pb {
                return Err(internal("mutation edge collapsed in the quotient"));
            }
            let quotient_mark = marked
                .mark_between(pa, pb)
                .ok_or_else(|| internal("labelled edge has no quotient edge"))?;
            for endpoint in [a, b] {
                let d = labelled.seeds()[endpoint].matrix().symmetrizer()?;
                if d.get(k) != quotient_mark {
                    return Err(internal("edge marking differs between lifts"));
                }
            }
        }
        Ok(MutationClassGraphs {
            labelled,
            marked,
            projection,
        })
    }

    pub fn exchange(&self) -> &ExchangeGraph {
        self.marked.graph()
    }
}

fn dot_vertex(i: usize, cluster: Option<Vec<String>>) -> String {
    match cluster {
        Some(vars) => format!("  s{} [label=\"{}\"];\n", i + 1, vars.join(", ")),
        None => format!("  s{};\n", i + 1),
    }
}

/// Serializable graph form: rendered clusters plus edge records.
#[derive(Debug, Clone, Serialize)]
pub struct GraphJson {
    pub vertices: Vec<Vec<String>>,
    pub edges: Vec<EdgeJson>,
}

/// One edge record; `label` is a 1-based mutation position (labelled graphs
/// only), `mark` a symmetrizer entry (marked graphs only).
#[derive(Debug, Clone)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    pub label: Option<usize>,
    pub mark: Option<i64>,
}

impl Serialize for EdgeJson {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let extras = self.label.is_some() as usize + self.mark.is_some() as usize;
        let mut s = ser.serialize_struct("EdgeJson", 2 + extras)?;
        s.serialize_field("u", &self.u)?;
        s.serialize_field("v", &self.v)?;
        if let Some(label) = self.label {
            s.serialize_field("label", &label)?;
        }
        if let Some(mark) = self.mark {
            s.serialize_field("mark", &mark)?;
        }
        s.end()
    }
}
