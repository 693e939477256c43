//! Brute-force reference for the balance classification.
//!
//! Works directly from the raw graph data with rational arithmetic: every
//! subset of components is rebuilt from scratch, its genus and crossing
//! length recounted, and the basic inequality compared as fractions.

use gitcurves::{BalanceFlavor, CurveGraph};
use num_rational::Ratio;

struct Raw {
    genus: Vec<i64>,
    exceptional: Vec<bool>,
    edges: Vec<(usize, usize, i64)>,
}

fn raw(graph: &CurveGraph) -> Raw {
    Raw {
        genus: graph
            .vertices()
            .iter()
            .map(|v| i64::from(v.genus) + i64::from(v.cusps))
            .collect(),
        exceptional: graph.vertices().iter().map(|v| v.exceptional).collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = e.ends();
                (a, b, e.length())
            })
            .collect(),
    }
}

fn members(n: usize, mask: u64) -> Vec<bool> {
    (0..n).map(|i| mask & (1 << i) != 0).collect()
}

fn genus_of(raw: &Raw, z: &[bool]) -> i64 {
    let size = z.iter().filter(|&&x| x).count() as i64;
    let decorations: i64 = (0..z.len()).filter(|&i| z[i]).map(|i| raw.genus[i]).sum();
    let internal: i64 = raw.edges.iter().filter(|e| z[e.0] && z[e.1]).map(|e| e.2).sum();
    decorations + internal - size + 1
}

fn crossing_of(raw: &Raw, z: &[bool]) -> i64 {
    raw.edges.iter().filter(|e| z[e.0] != z[e.1]).map(|e| e.2).sum()
}

pub fn arithmetic_genus(graph: &CurveGraph) -> i64 {
    let r = raw(graph);
    genus_of(&r, &vec![true; graph.vertex_count()])
}

/// Reference flavor of a multidegree (vertices in graph order).
pub fn flavor(graph: &CurveGraph, degrees: &[i64]) -> BalanceFlavor {
    let r = raw(graph);
    let n = graph.vertex_count();
    let all = vec![true; n];
    let g = genus_of(&r, &all);
    assert!(g >= 2);
    let d: i64 = degrees.iter().sum();
    let mut balanced = true;
    let mut strict = true;
    let mut stable = true;
    for mask in 1..(1u64 << n) - 1 {
        let z = members(n, mask);
        let zc: Vec<bool> = z.iter().map(|x| !x).collect();
        let k = crossing_of(&r, &z);
        let omega = 2 * genus_of(&r, &z) - 2 + k;
        let deg: i64 = (0..n).filter(|&i| z[i]).map(|i| degrees[i]).sum();
        let signed = Ratio::from_integer(deg) - Ratio::new(d * omega, 2 * g - 2);
        let gap = if signed < Ratio::from_integer(0) { -signed } else { signed };
        let half = Ratio::new(k, 2);
        if gap > half {
            balanced = false;
        }
        if gap == half {
            let crossing_on_exc = r
                .edges
                .iter()
                .filter(|e| z[e.0] != z[e.1])
                .all(|e| r.exceptional[e.0] || r.exceptional[e.1]);
            let inside = |s: &[bool]| (0..n).filter(|&i| s[i]).all(|i| r.exceptional[i]);
            if !crossing_on_exc {
                strict = false;
            }
            if !(inside(&z) || inside(&zc)) {
                stable = false;
            }
        }
    }
    let proper = (0..n).all(|i| !r.exceptional[i] || degrees[i] == 1);
    if !balanced {
        BalanceFlavor::NotBalanced
    } else if !proper {
        BalanceFlavor::Balanced
    } else if !strict {
        BalanceFlavor::ProperlyBalanced
    } else if !stable {
        BalanceFlavor::StrictlyBalanced
    } else {
        BalanceFlavor::StablyBalanced
    }
}

/// `d · deg_v ω / (2g − 2)` rounded down, recomputed from scratch.
pub fn expected_vertex_degree(graph: &CurveGraph, d: i64, v: usize) -> i64 {
    let r = raw(graph);
    let n = graph.vertex_count();
    let g = genus_of(&r, &vec![true; n]);
    let z = members(n, 1 << v);
    let omega = 2 * genus_of(&r, &z) - 2 + crossing_of(&r, &z);
    (d * omega).div_euclid(2 * g - 2)
}

/// Naive filter over a box with `Σ = d`. Each coordinate ranges over the
/// integers allowed by the inequality for that single vertex, which every
/// balanced multidegree satisfies; nothing else is pruned.
pub fn box_filter(graph: &CurveGraph, d: i64, flavor_at_least: BalanceFlavor, positive: bool) -> Vec<Vec<i64>> {
    assert!(flavor_at_least >= BalanceFlavor::Balanced);
    let r = raw(graph);
    let n = graph.vertex_count();
    let g = genus_of(&r, &vec![true; n]);
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|v| {
            let z = members(n, 1 << v);
            let k = crossing_of(&r, &z);
            let omega = 2 * genus_of(&r, &z) - 2 + k;
            let centre = Ratio::new(d * omega, 2 * g - 2);
            let half = Ratio::new(k, 2);
            let lo = (centre - half).ceil().to_integer();
            let hi = (centre + half).floor().to_integer();
            (if positive { lo.max(1) } else { lo }, hi)
        })
        .collect();
    let mut out = Vec::new();
    let mut current = vec![0i64; n];
    fn rec(
        graph: &CurveGraph,
        v: usize,
        ranges: &[(i64, i64)],
        d: i64,
        want: BalanceFlavor,
        current: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if v == current.len() {
            if current.iter().sum::<i64>() == d && flavor(graph, current) >= want {
                out.push(current.clone());
            }
            return;
        }
        for x in ranges[v].0..=ranges[v].1 {
            current[v] = x;
            rec(graph, v + 1, ranges, d, want, current, out);
        }
    }
    rec(graph, 0, &ranges, d, flavor_at_least, &mut current, &mut out);
    out
}
