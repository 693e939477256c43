//! Random valid curve graphs: a random decorated multigraph, then random
//! blow-ups of some of its nodes and cusps.

use gitcurves::{CurveGraph, EdgeKind, Vertex};
use rand::Rng;

pub struct Shape {
    pub max_base: usize,
    pub max_total: usize,
    pub max_genus: u32,
    pub max_extra_edges: usize,
    /// Probability of skipping the spanning tree.
    pub disconnected: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_base: 4,
            max_total: 6,
            max_genus: 2,
            max_extra_edges: 3,
            disconnected: 0.1,
        }
    }
}

pub fn graph(rng: &mut impl Rng, shape: &Shape) -> CurveGraph {
    let base = rng.gen_range(1..=shape.max_base);
    let mut vertices: Vec<Vertex> = (0..base)
        .map(|i| {
            let cusps = if rng.gen_bool(0.25) { rng.gen_range(1..=2) } else { 0 };
            Vertex::new(format!("b{i}"), rng.gen_range(0..=shape.max_genus)).with_cusps(cusps)
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    if !rng.gen_bool(shape.disconnected) {
        for i in 1..base {
            edges.push((rng.gen_range(0..i), i));
        }
    }
    for _ in 0..rng.gen_range(0..=shape.max_extra_edges) {
        edges.push((rng.gen_range(0..base), rng.gen_range(0..base)));
    }
    let mut named: Vec<(String, String, EdgeKind)> = Vec::new();
    let mut fresh = 0;
    for (a, b) in edges {
        let (ida, idb) = (vertices[a].id.clone(), vertices[b].id.clone());
        if vertices.len() < shape.max_total && rng.gen_bool(0.3) {
            let x = format!("x{fresh}");
            fresh += 1;
            vertices.push(Vertex::exceptional(x.clone()));
            named.push((ida, x.clone(), EdgeKind::Node));
            named.push((x, idb, EdgeKind::Node));
        } else {
            named.push((ida, idb, EdgeKind::Node));
        }
    }
    for v in 0..base {
        let cusps = vertices[v].cusps;
        for _ in 0..cusps {
            if vertices.len() < shape.max_total && rng.gen_bool(0.4) {
                let x = format!("x{fresh}");
                fresh += 1;
                vertices[v].cusps -= 1;
                named.push((vertices[v].id.clone(), x.clone(), EdgeKind::Tacnode));
                vertices.push(Vertex::exceptional(x));
            }
        }
    }
    let g = CurveGraph::from_parts(vertices, named).expect("generated ids are consistent");
    assert!(g.validate().is_valid(), "generator produced {g:?}");
    g
}

/// A graph with genus in `lo..=hi`, by rejection.
pub fn graph_with_genus(rng: &mut impl Rng, shape: &Shape, lo: i64, hi: i64) -> CurveGraph {
    loop {
        let g = graph(rng, shape);
        if (lo..=hi).contains(&g.arithmetic_genus()) {
            return g;
        }
    }
}

/// A multidegree of total `d` near the canonical proportion, so that all
/// flavors occur with reasonable frequency.
pub fn near_balanced(rng: &mut impl Rng, graph: &CurveGraph, d: i64) -> Vec<i64> {
    let n = graph.vertex_count();
    let mut degrees: Vec<i64> = (0..n)
        .map(|v| {
            let centre = super::oracle::expected_vertex_degree(graph, d, v);
            if graph.vertex(v).exceptional && rng.gen_bool(0.5) {
                1
            } else {
                centre + rng.gen_range(-1..=1)
            }
        })
        .collect();
    let fix = rng.gen_range(0..n);
    let sum: i64 = degrees.iter().sum();
    degrees[fix] += d - sum;
    degrees
}
