mod common;

use std::collections::BTreeSet;

use gitcurves::{
    census, classify_curve, classify_multidegree, decide, elliptic_tails, enumerate_multidegrees, regime,
    BalanceFlavor, CensusKind, CurveDocument, CurveGraph, EdgeKind, GitStatus, Multidegree, PolarizedCurve, Regime,
    Subcurve, Vertex,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{oracle, random};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small() -> random::Shape {
    random::Shape {
        max_base: 3,
        max_total: 4,
        ..Default::default()
    }
}

fn named_edges(graph: &CurveGraph) -> Vec<(String, String, EdgeKind)> {
    graph
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = e.ends();
            (graph.vertex(a).id.clone(), graph.vertex(b).id.clone(), e.kind())
        })
        .collect()
}

/// The same curve with fresh ids in a shuffled order and shuffled edges.
/// Returns the copy and where each old vertex index went.
fn relabel(graph: &CurveGraph, rng: &mut impl Rng) -> (CurveGraph, Vec<usize>) {
    let n = graph.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let fresh = |v: usize| format!("r{:02}", order[v]);
    let vertices = (0..n)
        .map(|v| Vertex {
            id: fresh(v),
            ..graph.vertex(v).clone()
        })
        .collect();
    let mut edges: Vec<(String, String, EdgeKind)> = graph
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = e.ends();
            if rng.gen_bool(0.5) {
                (fresh(a), fresh(b), e.kind())
            } else {
                (fresh(b), fresh(a), e.kind())
            }
        })
        .collect();
    edges.shuffle(rng);
    let copy = CurveGraph::from_parts(vertices, edges).unwrap();
    let map = (0..n).map(|v| copy.vertex_index(&fresh(v)).unwrap()).collect();
    (copy, map)
}

/// Vertex permutations preserving decorations and the edge multiset.
fn automorphisms(graph: &CurveGraph) -> Vec<Vec<usize>> {
    let n = graph.vertex_count();
    let key = |g: &CurveGraph, p: &[usize]| {
        let mut e: Vec<(usize, usize, EdgeKind)> = g
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = e.ends();
                (p[a].min(p[b]), p[a].max(p[b]), e.kind())
            })
            .collect();
        e.sort();
        e
    };
    let identity: Vec<usize> = (0..n).collect();
    let reference = key(graph, &identity);
    let mut out = Vec::new();
    let mut perm = identity.clone();
    permutations(&mut perm, 0, &mut |p| {
        let same_decorations = (0..n).all(|v| {
            let (x, y) = (graph.vertex(v), graph.vertex(p[v]));
            (x.genus, x.cusps, x.exceptional) == (y.genus, y.cusps, y.exceptional)
        });
        if same_decorations && key(graph, p) == reference {
            out.push(p.to_vec());
        }
    });
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn rank(status: &GitStatus) -> u8 {
    match status {
        GitStatus::Unstable => 0,
        GitStatus::StrictlySemistable => 1,
        GitStatus::StrictlyPolystable => 2,
        GitStatus::Stable => 3,
        GitStatus::Unknown { .. } => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn genus_and_omega_identities(seed in any::<u64>()) {
        let graph = random::graph(&mut rng(seed), &random::Shape::default());
        let g = graph.arithmetic_genus();
        prop_assert_eq!(g, oracle::arithmetic_genus(&graph));
        let full = graph.full().mask();
        for mask in 1..full {
            let z = Subcurve::from_mask(mask);
            let zc = graph.complement(z);
            prop_assert_eq!(graph.intersection_length(z).unwrap(), graph.intersection_length(zc).unwrap());
            prop_assert_eq!(graph.omega_degree(z).unwrap() + graph.omega_degree(zc).unwrap(), 2 * g - 2);
            let by_vertex: i64 = z.indices().map(|v| graph.vertex_omega_degree(v)).sum();
            prop_assert_eq!(graph.omega_degree(z).unwrap(), by_vertex);
        }
    }

    #[test]
    fn each_node_or_cusp_adds_one_to_the_genus(seed in any::<u64>()) {
        let mut r = rng(seed);
        let graph = random::graph(&mut r, &random::Shape::default());
        let g = graph.arithmetic_genus();
        let n = graph.vertex_count();
        let (a, b) = (graph.vertex(r.gen_range(0..n)).id.clone(), graph.vertex(r.gen_range(0..n)).id.clone());
        let mut edges = named_edges(&graph);
        edges.push((a, b, EdgeKind::Node));
        let more = CurveGraph::from_parts(graph.vertices().to_vec(), edges).unwrap();
        prop_assert_eq!(more.arithmetic_genus(), g + 1);
        let mut vertices = graph.vertices().to_vec();
        vertices[r.gen_range(0..n)].cusps += 1;
        let cuspidal = CurveGraph::from_parts(vertices, named_edges(&graph)).unwrap();
        prop_assert_eq!(cuspidal.arithmetic_genus(), g + 1);
    }

    #[test]
    fn relabeling_preserves_everything(seed in any::<u64>()) {
        let mut r = rng(seed);
        let graph = random::graph_with_genus(&mut r, &random::Shape::default(), 2, 6);
        let (copy, map) = relabel(&graph, &mut r);
        prop_assert!(graph.is_isomorphic_to(&copy));
        prop_assert_eq!(graph.canonical_form(), copy.canonical_form());
        let (x, y) = (classify_curve(&graph), classify_curve(&copy));
        prop_assert_eq!(
            (x.is_stable, x.is_p_stable, x.is_quasi_stable, x.is_quasi_p_stable, x.elliptic_tails.len()),
            (y.is_stable, y.is_p_stable, y.is_quasi_stable, y.is_quasi_p_stable, y.elliptic_tails.len())
        );
        let d = r.gen_range(-30..=30);
        let degrees = random::near_balanced(&mut r, &graph, d);
        let mut moved = vec![0; degrees.len()];
        for (v, &x) in degrees.iter().enumerate() {
            moved[map[v]] = x;
        }
        let a = classify_multidegree(&PolarizedCurve::new(graph, Multidegree::new(degrees)).unwrap()).unwrap();
        let b = classify_multidegree(&PolarizedCurve::new(copy, Multidegree::new(moved)).unwrap()).unwrap();
        prop_assert_eq!(a.flavor, b.flavor);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let graph = random::graph_with_genus(&mut r, &random::Shape::default(), 2, 6);
        let d = r.gen_range(-30..=30);
        let degrees = random::near_balanced(&mut r, &graph, d);
        let pc = PolarizedCurve::new(graph, Multidegree::new(degrees)).unwrap();
        let text = serde_json::to_string(&CurveDocument::from_polarized(&pc)).unwrap();
        let back = CurveDocument::parse(&text, false).unwrap().to_polarized().unwrap().unwrap();
        prop_assert_eq!(back, pc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn enumeration_matches_brute_force(seed in any::<u64>(), flavor in 1usize..5, positive in any::<bool>()) {
        let mut r = rng(seed);
        let graph = random::graph_with_genus(&mut r, &small(), 2, 4);
        let d = r.gen_range(-8..=20);
        let flavor = BalanceFlavor::ALL[flavor];
        let got: Vec<Vec<i64>> = enumerate_multidegrees(&graph, d, flavor, positive)
            .unwrap()
            .iter()
            .map(|m| m.degrees().to_vec())
            .collect();
        let mut sorted = got.clone();
        sorted.sort();
        prop_assert_eq!(&got, &sorted, "output is not lexicographic");
        prop_assert_eq!(got, oracle::box_filter(&graph, d, flavor, positive));
    }

    #[test]
    fn enumerated_multidegrees_reach_the_requested_flavor(seed in any::<u64>(), flavor in 1usize..5) {
        let mut r = rng(seed);
        let graph = random::graph_with_genus(&mut r, &random::Shape::default(), 2, 5);
        let d = r.gen_range(-20..=40);
        let flavor = BalanceFlavor::ALL[flavor];
        for m in enumerate_multidegrees(&graph, d, flavor, false).unwrap() {
            prop_assert_eq!(m.total(), d);
            let pc = PolarizedCurve::new(graph.clone(), m).unwrap();
            prop_assert!(classify_multidegree(&pc).unwrap().flavor >= flavor);
        }
    }

    #[test]
    fn positive_balanced_is_proper(seed in any::<u64>()) {
        let mut r = rng(seed);
        let graph = random::graph_with_genus(&mut r, &random::Shape::default(), 2, 5);
        let d = r.gen_range(1..=40);
        let balanced = enumerate_multidegrees(&graph, d, BalanceFlavor::Balanced, true).unwrap();
        let proper = enumerate_multidegrees(&graph, d, BalanceFlavor::ProperlyBalanced, true).unwrap();
        prop_assert_eq!(balanced, proper);
    }

    #[test]
    fn enumeration_is_closed_under_automorphisms(seed in any::<u64>(), flavor in 1usize..5) {
        let mut r = rng(seed);
        let graph = random::graph_with_genus(&mut r, &random::Shape::default(), 2, 5);
        let d = r.gen_range(-20..=40);
        let found: BTreeSet<Vec<i64>> = enumerate_multidegrees(&graph, d, BalanceFlavor::ALL[flavor], false)
            .unwrap()
            .iter()
            .map(|m| m.degrees().to_vec())
            .collect();
        for p in automorphisms(&graph) {
            for m in &found {
                let mut image = vec![0; m.len()];
                for (v, &x) in m.iter().enumerate() {
                    image[p[v]] = x;
                }
                prop_assert!(found.contains(&image));
            }
        }
    }

    #[test]
    fn decision_is_monotone_in_flavor(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = random::Shape { disconnected: 0.0, ..Default::default() };
        let graph = random::graph_with_genus(&mut r, &shape, 2, 4);
        let g = graph.arithmetic_genus();
        let d = r.gen_range(4 * (2 * g - 2) + 1..=7 * (2 * g - 2));
        prop_assert_eq!(regime(d, g).unwrap(), Regime::TheoremA);
        let mut seen: Vec<(BalanceFlavor, u8)> = Vec::new();
        for _ in 0..16 {
            let degrees = random::near_balanced(&mut r, &graph, d);
            if degrees.iter().any(|&x| x <= 0) {
                continue;
            }
            let pc = PolarizedCurve::new(graph.clone(), Multidegree::new(degrees)).unwrap();
            let decision = decide(&pc).unwrap();
            seen.push((decision.balance.flavor, rank(&decision.status)));
        }
        seen.sort();
        prop_assert!(seen.windows(2).all(|w| w[0].1 <= w[1].1), "{:?}", seen);
    }
}

#[test]
fn stable_implies_quasi_stable() {
    let mut r = rng(7);
    let mut graphs: Vec<CurveGraph> = (0..2000).map(|_| random::graph(&mut r, &random::Shape::default())).collect();
    for g in 2..=4 {
        graphs.extend(census(g, CensusKind::Stable, (2 * g - 2) as usize).unwrap());
        graphs.extend(census(g, CensusKind::PStable, (2 * g - 2) as usize).unwrap());
    }
    for graph in &graphs {
        let class = classify_curve(graph);
        assert!(!class.is_stable || class.is_quasi_stable, "{graph:?}");
        assert!(!class.is_p_stable || class.is_quasi_p_stable, "{graph:?}");
    }
}

/// Elliptic tails by brute force: connected subcurves of genus one meeting
/// the rest in exactly one point.
fn tails_by_search(graph: &CurveGraph) -> Vec<Subcurve> {
    (1..graph.full().mask())
        .map(Subcurve::from_mask)
        .filter(|&z| {
            graph.is_subcurve_connected(z)
                && graph.subcurve_genus(z).unwrap() == 1
                && graph.intersection_length(z).unwrap() == 1
        })
        .collect()
}

#[test]
fn elliptic_tails_decide_p_stability() {
    let mut r = rng(11);
    let shape = random::Shape {
        max_base: 5,
        max_total: 5,
        disconnected: 0.0,
        ..Default::default()
    };
    let mut graphs: Vec<CurveGraph> = (0..3000).map(|_| random::graph(&mut r, &shape)).collect();
    for g in 2..=4 {
        graphs.extend(census(g, CensusKind::Stable, (2 * g - 2) as usize).unwrap());
    }
    let mut stable_with_tails = 0;
    for graph in graphs.iter().filter(|x| x.edges().iter().all(|e| e.kind() == EdgeKind::Node)) {
        let tails = elliptic_tails(graph).unwrap();
        assert_eq!(tails, tails_by_search(graph), "{graph:?}");
        let class = classify_curve(graph);
        if class.is_stable {
            assert_eq!(class.is_p_stable, tails.is_empty(), "{graph:?}");
            stable_with_tails += usize::from(!tails.is_empty());
        }
    }
    assert!(stable_with_tails > 0);
}
