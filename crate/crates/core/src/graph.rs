//! Decorated dual graphs.
//!
//! A [`CurveGraph`] is the combinatorial shadow of a reduced projective curve:
//! one vertex per irreducible component, decorated with the geometric genus of
//! its normalization, the number of ordinary cusps it carries and whether it
//! is an exceptional component of a blow-up; one edge per node or tacnode.
//!
//! Vertices are kept sorted by id. Vertex indices (and therefore [`Subcurve`]
//! bitmasks) refer to that sorted order. Edges keep the order in which they
//! were supplied.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest graph a [`CurveGraph`] can hold; subcurves are `u64` bitmasks.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a curve needs at least one component")]
    Empty,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge endpoint `{0}` names no vertex")]
    UnknownVertex(String),
    #[error("{0} vertices exceed the supported maximum")]
    TooManyVertices(usize),
    #[error("subcurve is empty")]
    EmptySubcurve,
    #[error("subcurve must be a nonempty proper subset of the components")]
    NotProper,
    #[error("subcurve mentions vertex index {0}, outside the graph")]
    SubcurveOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Node,
    Tacnode,
}

impl EdgeKind {
    /// Length of the intersection at the singular point: 1 for a node, 2 for
    /// a tacnode.
    pub fn length(self) -> i64 {
        match self {
            EdgeKind::Node => 1,
            EdgeKind::Tacnode => 2,
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Node => f.write_str("node"),
            EdgeKind::Tacnode => f.write_str("tacnode"),
        }
    }
}

/// An irreducible component.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: String,
    /// Genus of the normalization.
    pub genus: u32,
    /// Ordinary cusps supported on the component.
    pub cusps: u32,
    /// Declared membership in the exceptional locus.
    pub exceptional: bool,
}

impl Vertex {
    pub fn new(id: impl Into<String>, genus: u32) -> Self {
        Vertex {
            id: id.into(),
            genus,
            cusps: 0,
            exceptional: false,
        }
    }

    pub fn with_cusps(mut self, cusps: u32) -> Self {
        self.cusps = cusps;
        self
    }

    /// A rational exceptional component.
    pub fn exceptional(id: impl Into<String>) -> Self {
        Vertex {
            id: id.into(),
            genus: 0,
            cusps: 0,
            exceptional: true,
        }
    }
}

/// A node or tacnode joining two (possibly equal) components, stored by
/// vertex index with `a <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    a: usize,
    b: usize,
    kind: EdgeKind,
}

impl Edge {
    pub(crate) fn new(x: usize, y: usize, kind: EdgeKind) -> Self {
        Edge {
            a: x.min(y),
            b: x.max(y),
            kind,
        }
    }

    pub fn ends(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    pub fn length(&self) -> i64 {
        self.kind.length()
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn touches(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint opposite to `v`. Returns `v` for a loop.
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// A union of irreducible components, as a bitmask over vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subcurve(u64);

impl Subcurve {
    pub fn from_mask(mask: u64) -> Self {
        Subcurve(mask)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Subcurve(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn single(index: usize) -> Self {
        Subcurve(1u64 << index)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 >> index & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.0 >> i & 1 == 1)
    }
}

/// Bitmask with the low `n` bits set.
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: BTreeMap<String, usize>,
}

impl CurveGraph {
    pub fn builder() -> CurveGraphBuilder {
        CurveGraphBuilder::default()
    }

    /// Builds a graph from vertices and edges given by endpoint ids.
    pub fn from_parts<S: AsRef<str>>(
        vertices: Vec<Vertex>,
        edges: impl IntoIterator<Item = (S, S, EdgeKind)>,
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        if vertices.len() > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(vertices.len()));
        }
        let mut vertices = vertices;
        vertices.sort_by(|x, y| x.id.cmp(&y.id));
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.id.clone()));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
        };
        let edges = edges
            .into_iter()
            .map(|(x, y, kind)| Ok(Edge::new(lookup(x.as_ref())?, lookup(y.as_ref())?, kind)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Ok(CurveGraph {
            vertices,
            edges,
            index,
        })
    }

    /// Builds a graph from index-based edges; vertex order may be arbitrary
    /// and is re-sorted by id.
    pub(crate) fn from_indexed(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let named: Vec<(String, String, EdgeKind)> = edges
            .iter()
            .map(|e| (vertices[e.a].id.clone(), vertices[e.b].id.clone(), e.kind))
            .collect();
        CurveGraph::from_parts(vertices, named)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn vertex(&self, index: usize) -> &Vertex {
        &self.vertices[index]
    }

    pub fn full(&self) -> Subcurve {
        Subcurve(full_mask(self.vertices.len()))
    }

    pub fn complement(&self, z: Subcurve) -> Subcurve {
        Subcurve(!z.0 & full_mask(self.vertices.len()))
    }

    pub fn exceptional_locus(&self) -> Subcurve {
        Subcurve::from_indices(
            self.vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| v.exceptional)
                .map(|(i, _)| i),
        )
    }

    /// Subcurve spanned by the given ids.
    pub fn subcurve<S: AsRef<str>>(&self, ids: &[S]) -> Result<Subcurve, GraphError> {
        let mut mask = 0u64;
        for id in ids {
            let i = self
                .vertex_index(id.as_ref())
                .ok_or_else(|| GraphError::UnknownVertex(id.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        Ok(Subcurve(mask))
    }

    pub fn subcurve_ids(&self, z: Subcurve) -> Vec<&str> {
        z.indices()
            .take_while(|&i| i < self.vertices.len())
            .map(|i| self.vertices[i].id.as_str())
            .collect()
    }

    fn check_subcurve(&self, z: Subcurve) -> Result<(), GraphError> {
        if z.is_empty() {
            return Err(GraphError::EmptySubcurve);
        }
        if z.0 & !full_mask(self.vertices.len()) != 0 {
            return Err(GraphError::SubcurveOutOfRange(63 - z.0.leading_zeros() as usize));
        }
        Ok(())
    }

    fn check_proper(&self, z: Subcurve) -> Result<(), GraphError> {
        self.check_subcurve(z)?;
        if z == self.full() {
            return Err(GraphError::NotProper);
        }
        Ok(())
    }

    /// Arithmetic genus `Σ (g_v + c_v) + Σ length(e) − |V| + 1`.
    pub fn arithmetic_genus(&self) -> i64 {
        self.genus_of_mask(self.full().0)
    }

    /// Arithmetic genus of the subcurve spanned by `z`, counting only edges
    /// internal to `z`. Disconnected subcurves get `1 − χ`.
    pub fn subcurve_genus(&self, z: Subcurve) -> Result<i64, GraphError> {
        self.check_subcurve(z)?;
        Ok(self.genus_of_mask(z.0))
    }

    pub(crate) fn genus_of_mask(&self, mask: u64) -> i64 {
        let z = Subcurve(mask);
        let decorations: i64 = z
            .indices()
            .map(|i| i64::from(self.vertices[i].genus) + i64::from(self.vertices[i].cusps))
            .sum();
        let internal: i64 = self
            .edges
            .iter()
            .filter(|e| z.contains(e.a) && z.contains(e.b))
            .map(Edge::length)
            .sum();
        decorations + internal - z.len() as i64 + 1
    }

    /// `k_Z`: total length of the edges with exactly one endpoint in `z`.
    pub fn intersection_length(&self, z: Subcurve) -> Result<i64, GraphError> {
        self.check_proper(z)?;
        Ok(self.crossing_of_mask(z.0))
    }

    pub(crate) fn crossing_of_mask(&self, mask: u64) -> i64 {
        let z = Subcurve(mask);
        self.edges
            .iter()
            .filter(|e| z.contains(e.a) != z.contains(e.b))
            .map(Edge::length)
            .sum()
    }

    /// Degree of the dualizing sheaf on `z`, by adjunction
    /// `2 p_a(Z) − 2 + k_Z`. For `z` the whole curve this is `2g − 2`.
    pub fn omega_degree(&self, z: Subcurve) -> Result<i64, GraphError> {
        self.check_subcurve(z)?;
        Ok(2 * self.genus_of_mask(z.0) - 2 + self.crossing_of_mask(z.0))
    }

    /// `deg ω` on a single component.
    pub fn vertex_omega_degree(&self, v: usize) -> i64 {
        2 * self.genus_of_mask(1 << v) - 2 + self.crossing_of_mask(1 << v)
    }

    /// Per-vertex adjacency lists; loops appear once in their vertex's list.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, EdgeKind)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.kind));
            if !e.is_loop() {
                adj[e.b].push((e.a, e.kind));
            }
        }
        adj
    }

    /// Neighbour bitmasks, ignoring loops.
    pub(crate) fn neighbour_masks(&self) -> Vec<u64> {
        let mut nb = vec![0u64; self.vertices.len()];
        for e in &self.edges {
            if !e.is_loop() {
                nb[e.a] |= 1 << e.b;
                nb[e.b] |= 1 << e.a;
            }
        }
        nb
    }

    pub fn is_connected(&self) -> bool {
        mask_is_connected(&self.neighbour_masks(), self.full().0)
    }

    /// Whether the subgraph induced on `z` is connected.
    pub fn is_subcurve_connected(&self, z: Subcurve) -> bool {
        !z.is_empty() && mask_is_connected(&self.neighbour_masks(), z.0)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.exceptional {
                continue;
            }
            if v.genus != 0 || v.cusps != 0 {
                violations.push(Violation::ExceptionalNotRational { vertex: v.id.clone() });
            }
            let (mut nodes, mut tacnodes) = (0, 0);
            for (j, e) in self.edges.iter().enumerate() {
                if !e.touches(i) {
                    continue;
                }
                if e.is_loop() {
                    violations.push(Violation::ExceptionalLoop {
                        vertex: v.id.clone(),
                        edge: j,
                    });
                    continue;
                }
                match e.kind {
                    EdgeKind::Node => nodes += 1,
                    EdgeKind::Tacnode => tacnodes += 1,
                }
            }
            if !matches!((nodes, tacnodes), (2, 0) | (0, 1)) {
                violations.push(Violation::ExceptionalAttachment {
                    vertex: v.id.clone(),
                    nodes,
                    tacnodes,
                });
            }
        }
        for (j, e) in self.edges.iter().enumerate() {
            let (a, b) = (&self.vertices[e.a], &self.vertices[e.b]);
            if !e.is_loop() && a.exceptional && b.exceptional {
                violations.push(Violation::AdjacentExceptional {
                    edge: j,
                    ends: (a.id.clone(), b.id.clone()),
                });
            }
            if e.kind == EdgeKind::Tacnode {
                if e.is_loop() {
                    violations.push(Violation::TacnodeLoop {
                        edge: j,
                        vertex: a.id.clone(),
                    });
                } else if !a.exceptional && !b.exceptional {
                    violations.push(Violation::TacnodeEndpointNotExceptional {
                        edge: j,
                        ends: (a.id.clone(), b.id.clone()),
                    });
                }
            }
        }
        ValidationReport { violations }
    }
}

pub(crate) fn mask_is_connected(neighbours: &[u64], mask: u64) -> bool {
    if mask == 0 {
        return false;
    }
    let start = mask & mask.wrapping_neg();
    let mut seen = start;
    let mut frontier = start;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = neighbours[v] & mask & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == mask
}

/// Incremental construction by id.
#[derive(Debug, Default, Clone)]
pub struct CurveGraphBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<(String, String, EdgeKind)>,
}

impl CurveGraphBuilder {
    pub fn vertex(self, id: &str, genus: u32) -> Self {
        self.push(Vertex::new(id, genus))
    }

    pub fn cuspidal(self, id: &str, genus: u32, cusps: u32) -> Self {
        self.push(Vertex::new(id, genus).with_cusps(cusps))
    }

    pub fn exceptional(self, id: &str) -> Self {
        self.push(Vertex::exceptional(id))
    }

    pub fn push(mut self, v: Vertex) -> Self {
        self.vertices.push(v);
        self
    }

    pub fn node(self, a: &str, b: &str) -> Self {
        self.edge(a, b, EdgeKind::Node)
    }

    pub fn tacnode(self, a: &str, b: &str) -> Self {
        self.edge(a, b, EdgeKind::Tacnode)
    }

    pub fn edge(mut self, a: &str, b: &str, kind: EdgeKind) -> Self {
        self.edges.push((a.to_string(), b.to_string(), kind));
        self
    }

    pub fn build(self) -> Result<CurveGraph, GraphError> {
        CurveGraph::from_parts(self.vertices, self.edges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ExceptionalNotRational { vertex: String },
    ExceptionalLoop { vertex: String, edge: usize },
    ExceptionalAttachment { vertex: String, nodes: usize, tacnodes: usize },
    AdjacentExceptional { edge: usize, ends: (String, String) },
    TacnodeLoop { edge: usize, vertex: String },
    TacnodeEndpointNotExceptional { edge: usize, ends: (String, String) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ExceptionalNotRational { vertex } => write!(
                f,
                "exceptional component must be rational and smooth: `{vertex}`"
            ),
            Violation::ExceptionalLoop { vertex, edge } => {
                write!(f, "exceptional component carries a loop: `{vertex}`, edge #{edge}")
            }
            Violation::ExceptionalAttachment {
                vertex,
                nodes,
                tacnodes,
            } => write!(
                f,
                "exceptional attachment count: `{vertex}` has {nodes} node(s) and {tacnodes} tacnode(s); \
                 expected two nodes or one tacnode"
            ),
            Violation::AdjacentExceptional { edge, ends } => write!(
                f,
                "exceptional components adjacent: edge #{edge} joins `{}` and `{}`",
                ends.0, ends.1
            ),
            Violation::TacnodeLoop { edge, vertex } => {
                write!(f, "tacnode cannot be a loop: edge #{edge} at `{vertex}`")
            }
            Violation::TacnodeEndpointNotExceptional { edge, ends } => write!(
                f,
                "tacnode endpoint must be exceptional: edge #{edge} joins `{}` and `{}`",
                ends.0, ends.1
            ),
        }
    }
}

/// Every violated structural invariant of a graph. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&lines.join("; "))
    }
}

/// Ids in use, for picking fresh labels.
pub(crate) fn id_set(vertices: &[Vertex]) -> BTreeSet<String> {
    vertices.iter().map(|v| v.id.clone()).collect()
}
