//! Canonical labeling of decorated multigraphs.
//!
//! Colour refinement on (genus, cusps, exceptional, loops) followed by
//! individualization and backtracking; the lexicographically least encoding
//! over all leaves of the search tree is the canonical form. No automorphism
//! pruning, which is fine for the graph sizes this crate deals with.

use crate::graph::{CurveGraph, EdgeKind};

/// Label-independent encoding of a graph; equal forms iff isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    /// `(genus, cusps, exceptional)` in canonical vertex order.
    pub labels: Vec<(u32, u32, bool)>,
    /// Sorted `(i, j, kind)` with `i <= j` in canonical positions.
    pub edges: Vec<(usize, usize, EdgeKind)>,
}

type Adjacency = Vec<Vec<(usize, EdgeKind)>>;

impl CurveGraph {
    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical_labeling().0
    }

    /// The canonical form together with the position assigned to each vertex.
    pub fn canonical_labeling(&self) -> (CanonicalForm, Vec<usize>) {
        let adj = self.adjacency();
        let n = self.vertex_count();
        let initial: Vec<(u32, u32, bool, usize, usize)> = (0..n)
            .map(|v| {
                let x = self.vertex(v);
                let loops = |k| adj[v].iter().filter(|&&(u, kind)| u == v && kind == k).count();
                (x.genus, x.cusps, x.exceptional, loops(EdgeKind::Node), loops(EdgeKind::Tacnode))
            })
            .collect();
        let mut colors = rank(&initial);
        refine(&adj, &mut colors);
        let mut best: Option<(CanonicalForm, Vec<usize>)> = None;
        search(self, &adj, colors, &mut best);
        best.expect("search visits at least one leaf")
    }

    /// True iff a bijection of components preserves all decorations and the
    /// edge multiset with kinds.
    pub fn is_isomorphic_to(&self, other: &CurveGraph) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.edges().len() == other.edges().len()
            && self.canonical_form() == other.canonical_form()
    }
}

/// Free-function form of [`CurveGraph::is_isomorphic_to`].
pub fn are_isomorphic(a: &CurveGraph, b: &CurveGraph) -> bool {
    a.is_isomorphic_to(b)
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

fn class_count(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

fn refine(adj: &Adjacency, colors: &mut Vec<usize>) {
    loop {
        let before = class_count(colors);
        let signatures: Vec<(usize, Vec<(usize, EdgeKind)>)> = adj
            .iter()
            .enumerate()
            .map(|(v, list)| {
                let mut around: Vec<(usize, EdgeKind)> = list
                    .iter()
                    .filter(|&&(u, _)| u != v)
                    .map(|&(u, k)| (colors[u], k))
                    .collect();
                around.sort();
                (colors[v], around)
            })
            .collect();
        *colors = rank(&signatures);
        if class_count(colors) == before {
            return;
        }
    }
}

fn search(
    graph: &CurveGraph,
    adj: &Adjacency,
    colors: Vec<usize>,
    best: &mut Option<(CanonicalForm, Vec<usize>)>,
) {
    let n = colors.len();
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c] += 1;
    }
    let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
        let form = encode(graph, &colors);
        if best.as_ref().is_none_or(|(b, _)| form < *b) {
            *best = Some((form, colors));
        }
        return;
    };
    for v in (0..n).filter(|&v| colors[v] == target) {
        let keys: Vec<(usize, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
        let mut next = rank(&keys);
        refine(adj, &mut next);
        search(graph, adj, next, best);
    }
}

fn encode(graph: &CurveGraph, position: &[usize]) -> CanonicalForm {
    let n = position.len();
    let mut labels = vec![(0, 0, false); n];
    for (v, &p) in position.iter().enumerate() {
        let x = graph.vertex(v);
        labels[p] = (x.genus, x.cusps, x.exceptional);
    }
    let mut edges: Vec<(usize, usize, EdgeKind)> = graph
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = e.ends();
            let (p, q) = (position[a], position[b]);
            (p.min(q), p.max(q), e.kind())
        })
        .collect();
    edges.sort();
    CanonicalForm { labels, edges }
}
