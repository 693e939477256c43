//! Stable, p-stable, quasi-stable and quasi-p-stable curves, and the
//! blow-up / contraction surgeries relating them.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{id_set, CurveGraph, Edge, EdgeKind, GraphError, Subcurve, ValidationReport, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not valid: {0}")]
    Invalid(ValidationReport),
    #[error("edge #{0} does not exist")]
    EdgeOutOfRange(usize),
    #[error("edge #{0} is a tacnode; only nodes can be blown up")]
    NotANode(usize),
    #[error("`{vertex}` has {available} cusp(s), cannot blow up {requested}")]
    CuspsOutOfRange {
        vertex: String,
        requested: u32,
        available: u32,
    },
    #[error("blow-ups are taken of stable or p-stable curves only")]
    NotStableOrPStable,
    #[error("cusps can only be blown up on a p-stable curve")]
    CuspBlowUpNeedsPStable,
    #[error("elliptic tails are defined on curves without tacnodes")]
    TacnodesPresent,
}

/// Number of special points on the normalization of component `v`: one per
/// non-loop edge end (tacnodes included), two per loop, one per cusp.
pub fn special_point_count(graph: &CurveGraph, v: usize) -> u32 {
    let ends: u32 = graph
        .edges()
        .iter()
        .filter(|e| e.touches(v))
        .map(|e| if e.is_loop() { 2 } else { 1 })
        .sum();
    ends + graph.vertex(v).cusps
}

fn only_nodes(graph: &CurveGraph) -> bool {
    graph.edges().iter().all(|e| e.kind() == EdgeKind::Node)
}

fn finite_automorphisms(graph: &CurveGraph) -> bool {
    (0..graph.vertex_count()).all(|v| match graph.vertex(v).genus {
        0 => special_point_count(graph, v) >= 3,
        1 => special_point_count(graph, v) >= 1,
        _ => true,
    })
}

fn no_exceptional(graph: &CurveGraph) -> bool {
    graph.vertices().iter().all(|v| !v.exceptional)
}

pub fn is_stable(graph: &CurveGraph) -> bool {
    graph.is_connected()
        && only_nodes(graph)
        && no_exceptional(graph)
        && graph.vertices().iter().all(|v| v.cusps == 0)
        && finite_automorphisms(graph)
        && graph.arithmetic_genus() >= 2
}

pub fn is_p_stable(graph: &CurveGraph) -> bool {
    graph.is_connected()
        && only_nodes(graph)
        && no_exceptional(graph)
        && finite_automorphisms(graph)
        && graph.arithmetic_genus() >= 2
        && elliptic_tails(graph).is_ok_and(|t| t.is_empty())
}

/// Connected subcurves of arithmetic genus 1 meeting the rest of the curve in
/// a single node. Such a node is a bridge, so only the two sides of each
/// bridge are examined.
pub fn elliptic_tails(graph: &CurveGraph) -> Result<Vec<Subcurve>, SurgeryError> {
    if !only_nodes(graph) {
        return Err(SurgeryError::TacnodesPresent);
    }
    let n = graph.vertex_count();
    let full = graph.full().mask();
    let mut tails = BTreeSet::new();
    for (j, e) in graph.edges().iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        // neighbours without edge j
        let mut nb = vec![0u64; n];
        for (i, f) in graph.edges().iter().enumerate() {
            let (a, b) = f.ends();
            if i != j && a != b {
                nb[a] |= 1 << b;
                nb[b] |= 1 << a;
            }
        }
        let (a, b) = e.ends();
        let side = reach(&nb, a, full);
        if side >> b & 1 == 1 {
            continue;
        }
        for z in [side, reach(&nb, b, full)] {
            if graph.genus_of_mask(z) == 1 && graph.crossing_of_mask(z) == 1 {
                tails.insert(Subcurve::from_mask(z));
            }
        }
    }
    Ok(tails.into_iter().collect())
}

fn reach(nb: &[u64], start: usize, within: u64) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = nb[v] & within & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen
}

/// Which nodes (by edge index) and how many cusps (by vertex id) to blow up.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlowUpSelection {
    pub nodes: BTreeSet<usize>,
    pub cusps: BTreeMap<String, u32>,
}

impl BlowUpSelection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, edge: usize) -> Self {
        self.nodes.insert(edge);
        self
    }

    pub fn cusps(mut self, vertex: &str, count: u32) -> Self {
        self.cusps.insert(vertex.to_string(), count);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.cusps.values().all(|&c| c == 0)
    }
}

struct FreshIds {
    taken: BTreeSet<String>,
    next: usize,
}

impl FreshIds {
    fn new(vertices: &[Vertex]) -> Self {
        FreshIds {
            taken: id_set(vertices),
            next: 0,
        }
    }

    fn take(&mut self) -> String {
        loop {
            let id = format!("E{}", self.next);
            self.next += 1;
            if self.taken.insert(id.clone()) {
                return id;
            }
        }
    }
}

/// Inserts an exceptional rational component at each selected node, and a
/// tangent exceptional component (tacnode) at each selected cusp.
pub fn blow_up(graph: &CurveGraph, selection: &BlowUpSelection) -> Result<CurveGraph, SurgeryError> {
    let wants_cusps = selection.cusps.values().any(|&c| c > 0);
    if wants_cusps {
        if !is_p_stable(graph) {
            return Err(SurgeryError::CuspBlowUpNeedsPStable);
        }
    } else if !is_stable(graph) && !is_p_stable(graph) {
        return Err(SurgeryError::NotStableOrPStable);
    }
    for &j in &selection.nodes {
        match graph.edges().get(j) {
            None => return Err(SurgeryError::EdgeOutOfRange(j)),
            Some(e) if e.kind() != EdgeKind::Node => return Err(SurgeryError::NotANode(j)),
            Some(_) => {}
        }
    }
    let mut vertices = graph.vertices().to_vec();
    for (id, &count) in &selection.cusps {
        let v = graph
            .vertex_index(id)
            .ok_or_else(|| GraphError::UnknownVertex(id.clone()))?;
        if count > vertices[v].cusps {
            return Err(SurgeryError::CuspsOutOfRange {
                vertex: id.clone(),
                requested: count,
                available: vertices[v].cusps,
            });
        }
    }

    let mut fresh = FreshIds::new(&vertices);
    let mut edges = Vec::with_capacity(graph.edges().len() + selection.nodes.len());
    for (j, e) in graph.edges().iter().enumerate() {
        if !selection.nodes.contains(&j) {
            edges.push(*e);
            continue;
        }
        let (a, b) = e.ends();
        let x = vertices.len();
        vertices.push(Vertex::exceptional(fresh.take()));
        edges.push(Edge::new(a, x, EdgeKind::Node));
        edges.push(Edge::new(x, b, EdgeKind::Node));
    }
    for (id, &count) in &selection.cusps {
        let v = graph.vertex_index(id).expect("checked above");
        vertices[v].cusps -= count;
        for _ in 0..count {
            let x = vertices.len();
            vertices.push(Vertex::exceptional(fresh.take()));
            edges.push(Edge::new(v, x, EdgeKind::Tacnode));
        }
    }
    Ok(CurveGraph::from_indexed(vertices, edges)?)
}

/// Inverse of [`blow_up`]: each exceptional component joined by two nodes is
/// replaced by a single node between its neighbours, each one joined by a
/// tacnode becomes a cusp on its host.
pub fn contract_exceptional(graph: &CurveGraph) -> Result<CurveGraph, SurgeryError> {
    let report = graph.validate();
    if !report.is_valid() {
        return Err(SurgeryError::Invalid(report));
    }
    let mut vertices = graph.vertices().to_vec();
    let mut edges: Vec<Edge> = graph
        .edges()
        .iter()
        .filter(|e| {
            let (a, b) = e.ends();
            !vertices[a].exceptional && !vertices[b].exceptional
        })
        .copied()
        .collect();
    for x in 0..graph.vertex_count() {
        if !graph.vertex(x).exceptional {
            continue;
        }
        let incident: Vec<&Edge> = graph.edges().iter().filter(|e| e.touches(x)).collect();
        match incident.as_slice() {
            [e] if e.kind() == EdgeKind::Tacnode => vertices[e.other(x)].cusps += 1,
            [e, f] => edges.push(Edge::new(e.other(x), f.other(x), EdgeKind::Node)),
            // validate() guarantees one of the two shapes above
            _ => unreachable!("malformed exceptional component"),
        }
    }
    let keep: Vec<usize> = (0..vertices.len()).filter(|&i| !vertices[i].exceptional).collect();
    let mut position = vec![usize::MAX; vertices.len()];
    for (p, &i) in keep.iter().enumerate() {
        position[i] = p;
    }
    let edges = edges
        .into_iter()
        .map(|e| {
            let (a, b) = e.ends();
            Edge::new(position[a], position[b], e.kind())
        })
        .collect();
    let vertices = keep.into_iter().map(|i| vertices[i].clone()).collect();
    Ok(CurveGraph::from_indexed(vertices, edges)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveClass {
    pub is_stable: bool,
    pub is_p_stable: bool,
    pub is_quasi_stable: bool,
    pub is_quasi_p_stable: bool,
    /// Elliptic tails of the contracted model, as component ids.
    pub elliptic_tails: Vec<Vec<String>>,
}

pub fn classify_curve(graph: &CurveGraph) -> CurveClass {
    let is_stable = is_stable(graph);
    let is_p_stable = is_p_stable(graph);
    let Ok(contracted) = contract_exceptional(graph) else {
        return CurveClass {
            is_stable,
            is_p_stable,
            is_quasi_stable: false,
            is_quasi_p_stable: false,
            elliptic_tails: Vec::new(),
        };
    };
    let elliptic_tails = elliptic_tails(&contracted)
        .unwrap_or_default()
        .into_iter()
        .map(|z| contracted.subcurve_ids(z).into_iter().map(String::from).collect())
        .collect();
    CurveClass {
        is_stable,
        is_p_stable,
        is_quasi_stable: only_nodes(graph) && crate::class::is_stable(&contracted),
        is_quasi_p_stable: crate::class::is_p_stable(&contracted),
        elliptic_tails,
    }
}
