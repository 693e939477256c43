//! Exhaustive enumerations: balanced multidegrees, blow-up models, fiber
//! strata of the compactified Jacobian, and small-genus censuses of stable
//! and p-stable dual graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::balance::{BalanceClassifier, BalanceError, BalanceFlavor, Multidegree};
use crate::canonical::CanonicalForm;
use crate::class::{blow_up, is_p_stable, is_stable, BlowUpSelection, SurgeryError};
use crate::graph::{CurveGraph, Edge, EdgeKind, Vertex};

/// Largest genus the census generator accepts.
pub const CENSUS_MAX_GENUS: i64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error("blow-up models are enumerated for stable or p-stable curves only")]
    NotBlowUpBase,
    #[error("fiber strata are enumerated over p-stable curves only")]
    NotPStable,
    #[error("census supports 2 <= g <= {CENSUS_MAX_GENUS} and 1 <= max_vertices <= 2g - 2; got g = {genus}, max_vertices = {max_vertices}")]
    CensusRange { genus: i64, max_vertices: usize },
}

/// All multidegrees of total `d` whose flavor is at least `flavor`, in
/// lexicographic order of the degree vectors (vertices sorted by id). Only
/// vectors inside the single-vertex [`degree_bounds`](crate::degree_bounds)
/// are considered; with `positive`, every degree is at least 1.
pub fn enumerate_multidegrees(
    graph: &CurveGraph,
    d: i64,
    flavor: BalanceFlavor,
    positive: bool,
) -> Result<Vec<Multidegree>, EnumerationError> {
    let mut classifier = BalanceClassifier::new(graph)?;
    let n = graph.vertex_count();
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|v| {
            let (mut lo, mut hi) = classifier.table().vertex_bounds(d, v);
            if positive {
                lo = lo.max(1);
            }
            if flavor >= BalanceFlavor::ProperlyBalanced && graph.vertex(v).exceptional {
                lo = lo.max(1);
                hi = hi.min(1);
            }
            (lo, hi)
        })
        .collect();
    // suffix sums for feasibility of the remaining total
    let mut min_rest = vec![0i64; n + 1];
    let mut max_rest = vec![0i64; n + 1];
    for v in (0..n).rev() {
        min_rest[v] = min_rest[v + 1] + ranges[v].0;
        max_rest[v] = max_rest[v + 1] + ranges[v].1;
    }
    let mut out = Vec::new();
    let mut current = vec![0i64; n];
    fill(0, d, &ranges, &min_rest, &max_rest, &mut current, &mut |degrees| {
        if classifier.classify(degrees).flavor >= flavor {
            out.push(Multidegree::new(degrees.to_vec()));
        }
    });
    Ok(out)
}

fn fill(
    v: usize,
    remaining: i64,
    ranges: &[(i64, i64)],
    min_rest: &[i64],
    max_rest: &[i64],
    current: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    if v == ranges.len() {
        if remaining == 0 {
            visit(current);
        }
        return;
    }
    let lo = ranges[v].0.max(remaining - max_rest[v + 1]);
    let hi = ranges[v].1.min(remaining - min_rest[v + 1]);
    for x in lo..=hi {
        current[v] = x;
        fill(v + 1, remaining - x, ranges, min_rest, max_rest, current, visit);
    }
}

/// One representative per isomorphism class of blow-ups of `base` at sets of
/// nodes (and cusps, when `base` is p-stable). The empty blow-up comes first.
pub fn enumerate_blowups(base: &CurveGraph) -> Result<Vec<CurveGraph>, EnumerationError> {
    let p_stable = is_p_stable(base);
    if !p_stable && !is_stable(base) {
        return Err(EnumerationError::NotBlowUpBase);
    }
    let edges = base.edges().len();
    let cusp_sites: Vec<(String, u32)> = if p_stable {
        base.vertices()
            .iter()
            .filter(|v| v.cusps > 0)
            .map(|v| (v.id.clone(), v.cusps))
            .collect()
    } else {
        Vec::new()
    };
    let mut seen = BTreeSet::new();
    let mut models = Vec::new();
    let mut counts = vec![0u32; cusp_sites.len()];
    loop {
        for mask in 0u64..(1u64 << edges) {
            let mut selection = BlowUpSelection::new();
            selection.nodes = (0..edges).filter(|&j| mask >> j & 1 == 1).collect();
            for ((id, _), &c) in cusp_sites.iter().zip(&counts) {
                if c > 0 {
                    selection = selection.cusps(id, c);
                }
            }
            let model = blow_up(base, &selection)?;
            if seen.insert(model.canonical_form()) {
                models.push(model);
            }
        }
        // odometer over cusp counts
        let mut i = 0;
        loop {
            if i == counts.len() {
                return Ok(models);
            }
            if counts[i] < cusp_sites[i].1 {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

/// A stratum of the fiber over a p-stable curve: a blow-up model with a
/// strictly balanced positive multidegree on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumRecord {
    pub base: CurveGraph,
    pub model: CurveGraph,
    pub multidegree: Multidegree,
}

pub fn fiber_strata(base: &CurveGraph, d: i64) -> Result<Vec<StratumRecord>, EnumerationError> {
    if !is_p_stable(base) {
        return Err(EnumerationError::NotPStable);
    }
    let mut strata = Vec::new();
    for model in enumerate_blowups(base)? {
        for multidegree in enumerate_multidegrees(&model, d, BalanceFlavor::StrictlyBalanced, true)? {
            strata.push(StratumRecord {
                base: base.clone(),
                model: model.clone(),
                multidegree,
            });
        }
    }
    Ok(strata)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CensusKind {
    Stable,
    PStable,
}

impl fmt::Display for CensusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CensusKind::Stable => "stable",
            CensusKind::PStable => "p-stable",
        })
    }
}

impl FromStr for CensusKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "stable" => Ok(CensusKind::Stable),
            "pstable" | "pseudostable" => Ok(CensusKind::PStable),
            _ => Err(format!("unknown census type `{s}` (expected stable or p-stable)")),
        }
    }
}

/// Isomorphism classes of connected stable (or p-stable) dual graphs of
/// arithmetic genus `g` with at most `max_vertices` components. Components
/// of each returned graph are labelled `v0, v1, …` in canonical order; the
/// list is sorted by component count, edge count, then canonical form.
pub fn census(g: i64, kind: CensusKind, max_vertices: usize) -> Result<Vec<CurveGraph>, EnumerationError> {
    if !(2..=CENSUS_MAX_GENUS).contains(&g) || max_vertices < 1 || max_vertices as i64 > 2 * g - 2 {
        return Err(EnumerationError::CensusRange {
            genus: g,
            max_vertices,
        });
    }
    let mut found: BTreeMap<(usize, usize, CanonicalForm), CurveGraph> = BTreeMap::new();
    for n in 1..=max_vertices {
        for decorations in decoration_lists(g, n, kind) {
            let sum: i64 = decorations.iter().map(|&(a, c)| i64::from(a + c)).sum();
            let edges = (g - 1 + n as i64 - sum) as usize;
            let mut search = MatrixSearch::new(&decorations, edges);
            search.run(&mut |graph| {
                let keep = match kind {
                    CensusKind::Stable => is_stable(graph),
                    CensusKind::PStable => is_p_stable(graph),
                };
                if keep {
                    let form = graph.canonical_form();
                    found
                        .entry((n, edges, form.clone()))
                        .or_insert_with(|| graph_from_form(&form));
                }
            });
        }
    }
    Ok(found.into_values().collect())
}

fn graph_from_form(form: &CanonicalForm) -> CurveGraph {
    let vertices: Vec<Vertex> = form
        .labels
        .iter()
        .enumerate()
        .map(|(i, &(genus, cusps, exceptional))| Vertex {
            id: format!("v{i}"),
            genus,
            cusps,
            exceptional,
        })
        .collect();
    let edges = form.edges.iter().map(|&(a, b, k)| Edge::new(a, b, k)).collect();
    CurveGraph::from_indexed(vertices, edges).expect("canonical forms index their own vertices")
}

/// Non-increasing lists of `(genus, cusps)` with `Σ (genus + cusps) <= g`.
fn decoration_lists(g: i64, n: usize, kind: CensusKind) -> Vec<Vec<(u32, u32)>> {
    let g = g as u32;
    let mut options: Vec<(u32, u32)> = Vec::new();
    for genus in 0..=g {
        let max_cusps = if kind == CensusKind::PStable { g - genus } else { 0 };
        for cusps in 0..=max_cusps {
            options.push((genus, cusps));
        }
    }
    options.sort_by(|a, b| b.cmp(a));
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        options: &[(u32, u32)],
        start: usize,
        n: usize,
        budget: u32,
        current: &mut Vec<(u32, u32)>,
        out: &mut Vec<Vec<(u32, u32)>>,
    ) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for (i, &(a, c)) in options.iter().enumerate().skip(start) {
            if a + c <= budget {
                current.push((a, c));
                rec(options, i, n, budget - a - c, current, out);
                current.pop();
            }
        }
    }
    rec(&options, 0, n, g, &mut current, &mut out);
    out
}

/// Minimum special points a component needs on its normalization, beyond
/// its cusps.
fn required_ends(genus: u32, cusps: u32) -> i64 {
    let need = match genus {
        0 => 3,
        1 => 1,
        _ => 0,
    };
    (need - i64::from(cusps)).max(0)
}

/// Depth-first fill of loop counts and edge multiplicities with a fixed edge
/// total, pruned by per-vertex valence requirements. Components with equal
/// decorations are kept sorted by (loops, valence), non-increasing.
struct MatrixSearch<'a> {
    decorations: &'a [(u32, u32)],
    required: Vec<i64>,
    loops: Vec<usize>,
    multiplicity: Vec<Vec<usize>>,
    valence: Vec<i64>,
    edges: usize,
}

impl<'a> MatrixSearch<'a> {
    fn new(decorations: &'a [(u32, u32)], edges: usize) -> Self {
        let n = decorations.len();
        let mut required: Vec<i64> = decorations.iter().map(|&(a, c)| required_ends(a, c)).collect();
        if n > 1 {
            for r in &mut required {
                *r = (*r).max(1);
            }
        }
        MatrixSearch {
            decorations,
            required,
            loops: vec![0; n],
            multiplicity: vec![vec![0; n]; n],
            valence: vec![0; n],
            edges,
        }
    }

    fn run(&mut self, visit: &mut dyn FnMut(&CurveGraph)) {
        if 2 * self.edges as i64 >= self.required.iter().sum::<i64>() {
            self.step(0, 0, self.edges, visit);
        }
    }

    fn deficit_from(&self, v: usize) -> i64 {
        (v..self.decorations.len())
            .map(|u| (self.required[u] - self.valence[u]).max(0))
            .sum()
    }

    fn same_decoration(&self, v: usize) -> bool {
        v > 0 && self.decorations[v] == self.decorations[v - 1]
    }

    /// `w == v` picks loops at `v`, `v < w < n` picks the multiplicity of
    /// `v–w`, `w == n` closes row `v`.
    fn step(&mut self, v: usize, w: usize, remaining: usize, visit: &mut dyn FnMut(&CurveGraph)) {
        let n = self.decorations.len();
        if self.deficit_from(v) > 2 * remaining as i64 {
            return;
        }
        if w == n {
            if self.valence[v] < self.required[v] {
                return;
            }
            if self.same_decoration(v)
                && self.loops[v] == self.loops[v - 1]
                && self.valence[v] > self.valence[v - 1]
            {
                return;
            }
            if v + 1 == n {
                if remaining == 0 {
                    visit(&self.build());
                }
            } else {
                self.step(v + 1, v + 1, remaining, visit);
            }
            return;
        }
        let max = if w == v && self.same_decoration(v) {
            remaining.min(self.loops[v - 1])
        } else {
            remaining
        };
        for m in 0..=max {
            if w == v {
                self.loops[v] = m;
                self.valence[v] += 2 * m as i64;
            } else {
                self.multiplicity[v][w] = m;
                self.valence[v] += m as i64;
                self.valence[w] += m as i64;
            }
            self.step(v, w + 1, remaining - m, visit);
            if w == v {
                self.valence[v] -= 2 * m as i64;
                self.loops[v] = 0;
            } else {
                self.valence[v] -= m as i64;
                self.valence[w] -= m as i64;
                self.multiplicity[v][w] = 0;
            }
        }
    }

    fn build(&self) -> CurveGraph {
        let n = self.decorations.len();
        let vertices = self
            .decorations
            .iter()
            .enumerate()
            .map(|(i, &(genus, cusps))| Vertex::new(format!("v{i}"), genus).with_cusps(cusps))
            .collect();
        let mut edges = Vec::with_capacity(self.edges);
        for v in 0..n {
            edges.extend((0..self.loops[v]).map(|_| Edge::new(v, v, EdgeKind::Node)));
            for w in v + 1..n {
                edges.extend((0..self.multiplicity[v][w]).map(|_| Edge::new(v, w, EdgeKind::Node)));
            }
        }
        CurveGraph::from_indexed(vertices, edges).expect("census vertices have distinct ids")
    }
}
