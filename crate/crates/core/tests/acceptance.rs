//! End-to-end acceptance checks: one test per headline behavior, each
//! printing a single `ACCEPTANCE n: PASS` line (run with `--nocapture` to
//! see them all). The tests serialize through a mutex so the per-criterion
//! time budgets are measured without contention.

use cluster_kit::{
    classify, cluster_automorphism_group, default_max_len, embed_automorphism, embedding_context,
    enumerate_class, enumerate_labelled_class, find_maximal_green_sequences, geodesic_loop,
    graph_automorphisms, initial_seed, induced_automorphism, is_mutation_finite,
    marked_graph_automorphisms, n_invariants, unfold_seed, validate_unfolding, Direction,
    ExchangeGraph, ExchangeMatrix, FramedQuiver, GroupTag, LabelledExchangeGraph, LaurentPoly,
    LoopLength, MutationClassGraphs, MutationFiniteness, Permutation, UnfoldingSpec,
    UnfoldingValidation, DEFAULT_CAP,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Mutex, PoisonError};
use std::time::Instant;

static GATE: Mutex<()> = Mutex::new(());

fn pass(criterion: usize, start: Instant, budget_ms: u128, message: &str) {
    let ms = start.elapsed().as_millis();
    assert!(
        ms < budget_ms,
        "criterion {criterion} took {ms} ms, over its {budget_ms} ms budget"
    );
    println!("ACCEPTANCE {criterion}: PASS — {message} [{ms} ms]");
}

fn matrix(rows: Vec<Vec<i64>>) -> ExchangeMatrix {
    ExchangeMatrix::from_rows(rows).unwrap()
}

fn a2() -> ExchangeMatrix {
    matrix(vec![vec![0, 1], vec![-1, 0]])
}

fn a3() -> ExchangeMatrix {
    matrix(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]])
}

fn b2() -> ExchangeMatrix {
    matrix(vec![vec![0, 1], vec![-2, 0]])
}

fn b3() -> ExchangeMatrix {
    matrix(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -2, 0]])
}

fn poly(text: &str, rank: usize, sym: &str) -> LaurentPoly {
    LaurentPoly::parse(text, rank, sym).unwrap()
}

/// Connected-component id of every labelled-graph vertex.
fn labelled_components(graph: &LabelledExchangeGraph) -> Vec<usize> {
    let mut id = vec![usize::MAX; graph.len()];
    let mut next = 0;
    for start in 0..graph.len() {
        if id[start] != usize::MAX {
            continue;
        }
        id[start] = next;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for k in 0..graph.rank() {
                let w = graph.neighbor(v, k);
                if id[w] == usize::MAX {
                    id[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    id
}

#[test]
fn criterion_01_pentagon_and_its_labelled_cover() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();
    let u = initial_seed(&a2()).unwrap();

    let exchange = ExchangeGraph::build(&u, DEFAULT_CAP).unwrap();
    assert_eq!(exchange.len(), 5);
    assert_eq!(exchange.edges().len(), 5);
    assert_eq!(exchange.components(), 1);
    for v in 0..exchange.len() {
        assert_eq!(exchange.neighbors(v).len(), 2);
    }

    let labelled = LabelledExchangeGraph::build(&u, DEFAULT_CAP).unwrap();
    assert_eq!(labelled.len(), 10);
    assert_eq!(labelled.edges().len(), 10);
    assert_eq!(labelled.components(), 1);

    pass(
        1,
        start,
        1000,
        "the single-arrow rank-2 exchange graph is a pentagon and its labelled cover one 10-cycle",
    );
}

#[test]
fn criterion_02_hexagon_labelled_pair_and_marks() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();
    let u = initial_seed(&b2()).unwrap();

    let exchange = ExchangeGraph::build(&u, DEFAULT_CAP).unwrap();
    assert_eq!(exchange.len(), 6);
    assert_eq!(exchange.edges().len(), 6);
    assert_eq!(exchange.components(), 1);
    for v in 0..exchange.len() {
        assert_eq!(exchange.neighbors(v).len(), 2);
    }

    let labelled = LabelledExchangeGraph::build(&u, DEFAULT_CAP).unwrap();
    assert_eq!(labelled.len(), 12);
    assert_eq!(labelled.edges().len(), 12);
    assert_eq!(labelled.components(), 2);
    let ids = labelled_components(&labelled);
    for comp in 0..2 {
        assert_eq!(ids.iter().filter(|&&c| c == comp).count(), 6);
    }

    let marked = cluster_kit::MarkedExchangeGraph::build(&u, DEFAULT_CAP).unwrap();
    assert_eq!(marked.len(), 6);
    for v in 0..marked.len() {
        assert_eq!(marked.incident_marks(v), vec![1, 2]);
    }

    pass(
        2,
        start,
        1000,
        "the weight-2 rank-2 class is a hexagon, its labelled cover two disjoint hexagons, and its marks alternate 1/2",
    );
}

#[test]
fn criterion_03_automorphism_split_of_the_hexagon() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();
    let u = initial_seed(&b2()).unwrap();

    let groups = cluster_automorphism_group(&u, DEFAULT_CAP).unwrap();
    let unmarked = graph_automorphisms(groups.graphs.exchange()).unwrap();
    assert_eq!(unmarked.order, 12);
    assert_eq!(groups.aut.order, 6);
    assert_eq!(groups.aut_plus.order, 3);

    // The two order-6 rotations of the hexagon drop the marks, so they move
    // the matrix off the ±B axis; one lands exactly on [[0,2],[-1,0]].
    let rotations: Vec<&Permutation> = unmarked
        .elements
        .iter()
        .filter(|p| p.order() == 6)
        .collect();
    assert_eq!(rotations.len(), 2);
    let target = matrix(vec![vec![0, 2], vec![-1, 0]]);
    let mut exact_image = false;
    for phi in rotations {
        let aut = classify(phi, &groups.graphs).unwrap();
        assert_eq!(aut.direction, Direction::NonCluster);
        if aut.image_matrix == target {
            exact_image = true;
        }
    }
    assert!(exact_image, "no sixth-turn rotation hit [[0,2],[-1,0]]");

    pass(
        3,
        start,
        1000,
        "the hexagon has 12 unmarked automorphisms, 6 marked ones with a direct half of 3, and its sixth-turn is non-cluster with image [[0,2],[-1,0]]",
    );
}

#[test]
fn criterion_04_rotations_pull_back_to_variable_maps() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();

    // Weight-2 hexagon: some sixth-turn realizes (x, y) -> (y, (1+y^2)/x)
    // and swaps the two labelled components.
    let u = initial_seed(&b2()).unwrap();
    let graphs = MutationClassGraphs::build(&u, DEFAULT_CAP).unwrap();
    let unmarked = graph_automorphisms(graphs.exchange()).unwrap();
    let expected = vec![
        poly("x2", 2, "x"),
        poly("x1^-1 + x1^-1*x2^2", 2, "x"),
    ];
    let ids = labelled_components(&graphs.labelled);
    let mut found = false;
    for phi in unmarked.elements.iter().filter(|p| p.order() == 6) {
        let aut = classify(phi, &graphs).unwrap();
        if aut.realization != expected {
            continue;
        }
        found = true;
        assert_eq!(aut.image_matrix, matrix(vec![vec![0, 2], vec![-1, 0]]));
        for v in 0..graphs.labelled.len() {
            assert_ne!(
                ids[aut.labelled_map.apply(v)],
                ids[v],
                "the sixth-turn pullback kept a labelled seed in its component"
            );
        }
    }
    assert!(found, "no sixth-turn realizes (y, (1+y^2)/x)");

    // Pentagon: some fifth-turn realizes (x, y) -> (y, (1+y)/x) through an
    // order-5 labelled automorphism.
    let u = initial_seed(&a2()).unwrap();
    let graphs = MutationClassGraphs::build(&u, DEFAULT_CAP).unwrap();
    let unmarked = graph_automorphisms(graphs.exchange()).unwrap();
    let expected = vec![poly("x2", 2, "x"), poly("x1^-1 + x1^-1*x2", 2, "x")];
    let mut found = false;
    for phi in unmarked.elements.iter().filter(|p| p.order() == 5) {
        let aut = classify(phi, &graphs).unwrap();
        if aut.realization != expected {
            continue;
        }
        found = true;
        assert_eq!(aut.labelled_map.order(), 5);
        assert_eq!(aut.direction, Direction::Direct);
    }
    assert!(found, "no fifth-turn realizes (y, (1+y)/x)");

    pass(
        4,
        start,
        1000,
        "the hexagon sixth-turn pulls back to (y, (1+y^2)/x) swapping the labelled hexagons; the pentagon fifth-turn to the order-5 (y, (1+y)/x)",
    );
}

#[test]
fn criterion_05_twenty_seed_class_headline() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();
    let u = initial_seed(&b3()).unwrap();

    let groups = cluster_automorphism_group(&u, DEFAULT_CAP).unwrap();
    assert_eq!(groups.graphs.exchange().len(), 20);
    assert_eq!(groups.aut.order, 8);
    assert_eq!(groups.aut.tag, GroupTag::Dihedral);
    assert_eq!(groups.aut_plus.order, 4);
    assert_eq!(groups.aut_plus.tag, GroupTag::Cyclic);
    for v in 0..groups.graphs.marked.len() {
        assert_eq!(groups.graphs.marked.incident_marks(v), vec![1, 1, 2]);
    }

    pass(
        5,
        start,
        5000,
        "the rank-3 weight-(1,2) class has 20 seeds, dihedral marked group of order 8 with cyclic direct half of 4, and marks (1,1,2) at every vertex",
    );
}

#[test]
fn criterion_06_marked_groups_behave_on_all_four_desk_classes() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();

    for q in [a2(), a3(), b2(), b3()] {
        let u = initial_seed(&q).unwrap();
        let groups = cluster_automorphism_group(&u, DEFAULT_CAP).unwrap();
        let labelled = &groups.graphs.labelled;
        let n = q.n();

        for aut in &groups.classified {
            // (i) mark-preserving automorphisms never leave the ±B axis.
            assert_ne!(aut.direction, Direction::NonCluster);

            // (ii) the pullback commutes with every mutation and every
            // transposition, at every labelled seed.
            let phi = &aut.labelled_map;
            for v in 0..labelled.len() {
                for k in 0..n {
                    assert_eq!(
                        labelled.neighbor(phi.apply(v), k),
                        phi.apply(labelled.neighbor(v, k))
                    );
                }
                for a in 0..n {
                    for b in a + 1..n {
                        let sigma = Permutation::transposition(n, a, b);
                        let moved = labelled
                            .index_of(&labelled.seeds()[v].permuted(&sigma))
                            .unwrap();
                        let moved_image = labelled
                            .index_of(&labelled.seeds()[phi.apply(v)].permuted(&sigma))
                            .unwrap();
                        assert_eq!(phi.apply(moved), moved_image);
                    }
                }
            }
        }

        // (iii) the direct half has index 2 exactly when -B is reachable.
        assert_eq!(groups.aut.order % groups.aut_plus.order, 0);
        let index = groups.aut.order / groups.aut_plus.order;
        assert_eq!(index == 2, groups.minus_b_in_class);
    }

    pass(
        6,
        start,
        10000,
        "on all four desk classes every marked automorphism is direct or inverse, every pullback commutes with all mutation-group generators, and the direct index is 2 exactly when -B is reachable",
    );
}

/// Fomin–Zelevinsky matrix mutation on a bare 3×3 array; an implementation
/// independent of the library, used as the finiteness oracle.
fn mutate3(m: &[[i64; 3]; 3], k: usize) -> [[i64; 3]; 3] {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = if i == k || j == k {
                -m[i][j]
            } else {
                m[i][j] + (m[i][k].abs() * m[k][j] + m[i][k] * m[k][j].abs()) / 2
            };
        }
    }
    out
}

fn weights_bounded(m: &[[i64; 3]; 3]) -> bool {
    (0..3).all(|i| (i + 1..3).all(|j| (m[i][j] * m[j][i]).abs() <= 4))
}

/// Exact-matrix closure with a weight abort: a weight above 4 anywhere in
/// the class means the class is infinite, and weights at most 4 bound the
/// entries, so the walk always terminates.
fn naive_is_finite(start: [[i64; 3]; 3]) -> bool {
    if !weights_bounded(&start) {
        return false;
    }
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(m) = stack.pop() {
        for k in 0..3 {
            let next = mutate3(&m, k);
            if !weights_bounded(&next) {
                return false;
            }
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    true
}

#[test]
fn criterion_07_rank3_survey_loops_and_invariants() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();

    // Every off-diagonal pair (b_ij, b_ji) with weight |b_ij·b_ji| ≤ 4.
    const PAIRS: [(i64, i64); 17] = [
        (0, 0),
        (1, -1),
        (-1, 1),
        (1, -2),
        (-1, 2),
        (2, -1),
        (-2, 1),
        (1, -3),
        (-1, 3),
        (3, -1),
        (-3, 1),
        (1, -4),
        (-1, 4),
        (4, -1),
        (-4, 1),
        (2, -2),
        (-2, 2),
    ];
    let expected_length = |weight: i64| match weight {
        0 => LoopLength::Finite(4),
        1 => LoopLength::Finite(5),
        2 => LoopLength::Finite(6),
        3 => LoopLength::Finite(8),
        4 => LoopLength::Infinite,
        _ => unreachable!("candidate weights stop at 4"),
    };

    let mut symmetrizable = 0usize;
    let mut finite = 0usize;
    type Invariants = (Vec<LoopLength>, Vec<LoopLength>);
    let mut classes: BTreeMap<cluster_kit::Diagram, Vec<Invariants>> = BTreeMap::new();
    for p01 in PAIRS {
        for p02 in PAIRS {
            for p12 in PAIRS {
                let raw = [[0, p01.0, p02.0], [p01.1, 0, p12.0], [p02.1, p12.1, 0]];
                let q = matrix(raw.iter().map(|r| r.to_vec()).collect());
                if !q.is_symmetrizable() {
                    continue;
                }
                symmetrizable += 1;

                // The library's verdict must match the independent oracle.
                let oracle = naive_is_finite(raw);
                assert_eq!(
                    is_mutation_finite(&q, DEFAULT_CAP) == MutationFiniteness::Finite,
                    oracle,
                    "finiteness disagreement on {q:?}"
                );
                if !oracle {
                    continue;
                }
                finite += 1;

                // Loop lengths follow the weight dictionary 0,1,2,3,4 ->
                // 4,5,6,8,inf at every position pair.
                let u = initial_seed(&q).unwrap();
                let mut at_seed = Vec::with_capacity(3);
                for a in 0..3 {
                    for b in a + 1..3 {
                        let length = geodesic_loop(&u, a, b).unwrap().length;
                        let weight = (q.get(a, b) * q.get(b, a)).abs();
                        assert_eq!(
                            length,
                            expected_length(weight),
                            "loop length off the dictionary on {q:?} at ({a},{b})"
                        );
                        at_seed.push(length);
                    }
                }
                at_seed.sort_unstable();
                let mut at_neighbors = Vec::with_capacity(3);
                for k in 0..3 {
                    let v = u.mutated(k).unwrap();
                    let (a, b) = match k {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    at_neighbors.push(geodesic_loop(&v, a, b).unwrap().length);
                }
                at_neighbors.sort_unstable();

                let diagram = q.to_diagram();
                let key = diagram.canonical().min(diagram.reversed().canonical());
                let members = classes.entry(key).or_default();
                if members.is_empty() {
                    // On one representative per class, the library's own
                    // invariant computation must assemble the same pair.
                    let inv = n_invariants(&u).unwrap();
                    assert_eq!((inv.at_seed, inv.at_neighbors), (at_seed.clone(), at_neighbors.clone()));
                }
                members.push((at_seed, at_neighbors));
            }
        }
    }
    assert!(symmetrizable > 800, "candidate filter lost too much");
    assert!(finite > 100 && classes.len() > 10, "survey came up empty");

    // The invariants agree within a reversal class and separate the classes.
    let mut by_class: Vec<(&cluster_kit::Diagram, &Invariants)> = Vec::new();
    for (diagram, all) in &classes {
        for inv in all {
            assert_eq!(inv, &all[0], "invariants split inside a reversal class");
        }
        by_class.push((diagram, &all[0]));
    }
    for i in 0..by_class.len() {
        for j in i + 1..by_class.len() {
            assert_ne!(
                by_class[i].1, by_class[j].1,
                "two reversal classes share invariants: {:?} vs {:?}",
                by_class[i].0, by_class[j].0
            );
        }
    }

    // Exactly five of the classes are disconnected: no edge, or one edge of
    // weight 1, 2, 3 or 4 beside an isolated vertex.
    let disconnected: Vec<&cluster_kit::Diagram> = classes
        .keys()
        .filter(|d| d.arcs().len() <= 1)
        .collect();
    assert_eq!(disconnected.len(), 5);

    // The one with loop multiset {4,4,inf} is the weight-4 edge. Heavier
    // edges never occur next to larger mutation-finite diagrams, and they
    // produce the very same invariants — the weight-5 edge below shows the
    // collision — so {4,4,inf} is read as weight 4 by convention.
    let heavy = by_class
        .iter()
        .find(|(_, inv)| {
            inv.0
                == vec![
                    LoopLength::Finite(4),
                    LoopLength::Finite(4),
                    LoopLength::Infinite,
                ]
        })
        .expect("no class with loop multiset {4,4,inf}");
    assert_eq!(heavy.0.arcs().len(), 1);
    assert_eq!(heavy.0.arcs()[0].weight, 4);
    let five = matrix(vec![vec![0, 1, 0], vec![-5, 0, 0], vec![0, 0, 0]]);
    let inv5 = n_invariants(&initial_seed(&five).unwrap()).unwrap();
    assert_eq!(&(inv5.at_seed, inv5.at_neighbors), heavy.1);
    assert!(!five.to_diagram().same_up_to_reversal(heavy.0));

    pass(
        7,
        start,
        10000,
        "the rank-3 survey matches the independent finiteness oracle, the loop-length dictionary 0,1,2,3,4 -> 4,5,6,8,inf holds throughout, and the loop multisets pin every diagram down up to reversal",
    );
}

#[test]
fn criterion_08_unfolding_the_hexagon_into_fourteen_seeds() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();

    let base = b2();
    let unfolded = matrix(vec![vec![0, 1, 1], vec![-1, 0, 0], vec![-1, 0, 0]]);
    let spec = UnfoldingSpec::new(base.clone(), vec![vec![0], vec![1, 2]], unfolded.clone())
        .unwrap();

    match validate_unfolding(&spec, DEFAULT_CAP).unwrap() {
        UnfoldingValidation::Valid { pairs_checked } => assert_eq!(pairs_checked, 2),
        other => panic!("validation rejected the unfolding: {other:?}"),
    }

    // The initial base seed lifts to the initial unfolded seed: position 0
    // spreads over block {0}, position 1 over block {1, 2}.
    let lifted = unfold_seed(&initial_seed(&base).unwrap(), &spec).unwrap();
    assert_eq!(lifted, initial_seed(&unfolded).unwrap());
    assert_eq!(spec.blocks(), &[vec![0], vec![1, 2]]);

    let context = embedding_context(spec, DEFAULT_CAP).unwrap();
    let marked = marked_graph_automorphisms(&context.base_graphs.marked).unwrap();
    assert_eq!(marked.order, 6);

    let expected = vec![
        poly("y1^-1 + y1^-1*y2*y3", 3, "y"),
        poly("y1^-1*y2^-1 + y2^-1 + y1^-1*y3", 3, "y"),
        poly("y1^-1*y3^-1 + y3^-1 + y1^-1*y2", 3, "y"),
    ];
    let mut images = HashSet::new();
    let mut third_turn_found = false;
    for phi in &marked.elements {
        let embedded = embed_automorphism(&context, phi).unwrap();
        assert_eq!(embedded.direction, embedded.source.direction);
        images.insert(embedded.image.clone());
        if phi.order() == 3 && embedded.realization == expected {
            third_turn_found = true;
        }
    }
    assert_eq!(images.len(), 6, "embedding is not injective");
    assert!(
        third_turn_found,
        "no third-turn embeds to ((1+bc)/a, (1+a+bc)/(ab), (1+a+bc)/(ac))"
    );

    pass(
        8,
        start,
        5000,
        "the rank-2 weight-2 matrix unfolds onto the rank-3 star, the validation closes after 2 pairs, and all 6 marked automorphisms embed injectively, the third-turn landing on ((1+bc)/a, (1+a+bc)/(ab), (1+a+bc)/(ac))",
    );
}

/// Unmemoized reference search: walk every green-only path up to `max_len`
/// and keep the ones that end with no green vertices.
fn naive_green_sequences(q: &ExchangeMatrix, max_len: usize) -> Vec<Vec<usize>> {
    fn go(
        state: &FramedQuiver,
        budget: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let greens = state.green_vertices().unwrap();
        if greens.is_empty() {
            out.push(prefix.clone());
            return;
        }
        if budget == 0 {
            return;
        }
        for i in greens {
            prefix.push(i);
            go(&state.mutated(i).unwrap(), budget - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(
        &FramedQuiver::frame(q).unwrap(),
        max_len,
        &mut Vec::new(),
        &mut out,
    );
    out.sort();
    out
}

#[test]
fn criterion_09_green_sequences_of_the_arrow() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();

    let q = a2();
    let search = find_maximal_green_sequences(&q, default_max_len(&q), DEFAULT_CAP).unwrap();
    assert!(!search.length_truncated);
    let found: Vec<Vec<usize>> = search.sequences.iter().map(|s| s.mutations.clone()).collect();
    assert_eq!(found, vec![vec![0, 1], vec![1, 0, 1]]);

    // Both sequences induce one and the same direct automorphism.
    let fx = poly("x1^-1 + x1^-1*x2", 2, "x");
    let fy = poly("x1^-1*x2^-1 + x1^-1 + x2^-1", 2, "x");
    for sequence in &search.sequences {
        let induced = induced_automorphism(&q, sequence).unwrap();
        assert_eq!(induced.direction, Direction::Direct);
        assert_eq!(induced.realization, vec![fx.clone(), fy.clone()]);
        assert_eq!(induced.image_matrix, q);
    }

    for q in [a2(), a3()] {
        let memoized = find_maximal_green_sequences(&q, 12, DEFAULT_CAP).unwrap();
        let found: Vec<Vec<usize>> =
            memoized.sequences.iter().map(|s| s.mutations.clone()).collect();
        assert_eq!(found, naive_green_sequences(&q, 12));
    }

    pass(
        9,
        start,
        5000,
        "the single arrow has exactly the green sequences (1 2) and (2 1 2), both inducing ((1+y)/x, (1+x+y)/(xy)); the memoized search matches the naive one up to length 12",
    );
}

fn random_poly(rng: &mut StdRng, rank: usize) -> LaurentPoly {
    let mut acc = LaurentPoly::zero(rank);
    for _ in 0..rng.gen_range(0..=3) {
        let c: i64 = rng.gen_range(-5..=5);
        if c == 0 {
            continue;
        }
        let mut text = c.to_string();
        for i in 0..rank {
            let e: i64 = rng.gen_range(-3..=3);
            if e != 0 {
                text.push_str(&format!("*x{}^{e}", i + 1));
            }
        }
        acc = acc.add(&LaurentPoly::parse(&text, rank, "x").unwrap()).unwrap();
    }
    acc
}

fn random_nonzero_poly(rng: &mut StdRng, rank: usize) -> LaurentPoly {
    loop {
        let p = random_poly(rng, rank);
        if !p.is_zero() {
            return p;
        }
    }
}

#[test]
fn criterion_10_algebraic_core_soundness() {
    let _gate = GATE.lock().unwrap_or_else(PoisonError::into_inner);
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x1bd5_90a7);

    // Multiplying and dividing back returns the original factor exactly.
    for _ in 0..10_000 {
        let rank = rng.gen_range(1..=3);
        let f = random_poly(&mut rng, rank);
        let g = random_nonzero_poly(&mut rng, rank);
        let product = f.mul(&g).unwrap();
        assert_eq!(product.exact_div(&g).unwrap(), f);
    }

    // The canonical encoding separates values: equal keys only on equal
    // polynomials, and equality always reproduces the key.
    let mut by_key: HashMap<String, LaurentPoly> = HashMap::new();
    for _ in 0..2_000 {
        let p = random_poly(&mut rng, 2);
        match by_key.entry(p.canonical_key()) {
            std::collections::hash_map::Entry::Occupied(seen) => assert_eq!(seen.get(), &p),
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(p);
            }
        }
    }
    for _ in 0..1_000 {
        let f = random_poly(&mut rng, 2);
        let g = random_poly(&mut rng, 2);
        assert_eq!(f == g, f.canonical_key() == g.canonical_key());
    }

    // Evaluation at nonzero rational points is a ring homomorphism.
    for _ in 0..300 {
        let f = random_poly(&mut rng, 2);
        let g = random_poly(&mut rng, 2);
        let point: Vec<BigRational> = (0..2)
            .map(|_| {
                let numer = if rng.gen::<bool>() {
                    rng.gen_range(1..=6)
                } else {
                    rng.gen_range(-6..=-1)
                };
                BigRational::new(BigInt::from(numer), BigInt::from(rng.gen_range(1..=6)))
            })
            .collect();
        assert_eq!(
            f.add(&g).unwrap().evaluate(&point).unwrap(),
            f.evaluate(&point).unwrap() + g.evaluate(&point).unwrap()
        );
        assert_eq!(
            f.mul(&g).unwrap().evaluate(&point).unwrap(),
            f.evaluate(&point).unwrap() * g.evaluate(&point).unwrap()
        );
    }

    // Full enumeration of the four desk classes never divides inexactly —
    // any slip would surface as an error here.
    for q in [a2(), a3(), b2(), b3()] {
        let u = initial_seed(&q).unwrap();
        enumerate_labelled_class(&u, DEFAULT_CAP).unwrap();
        enumerate_class(&u, DEFAULT_CAP, true).unwrap();
    }

    pass(
        10,
        start,
        10000,
        "10^4 multiply/divide round-trips, the canonical-key separation sample, the evaluation homomorphism checks and all four desk-class enumerations pass",
    );
}
