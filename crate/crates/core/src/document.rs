//! The JSON curve file format.
//!
//! ```json
//! {
//!   "vertices": [{"id": "v1", "genus": 1}, {"id": "v2", "genus": 1, "cusps": 0, "exceptional": false}],
//!   "edges": [{"ends": ["v1", "v2"], "kind": "node"}],
//!   "degree": 9,
//!   "multidegree": {"v1": 4, "v2": 5}
//! }
//! ```
//!
//! `cusps`, `exceptional`, `kind`, `edges`, `degree` and `multidegree` may be
//! omitted. Unknown keys are an error unless parsing leniently.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::balance::{BalanceError, Multidegree, PolarizedCurve};
use crate::graph::{CurveGraph, EdgeKind, GraphError, ValidationReport, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("malformed curve document: {0}")]
    Syntax(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not valid: {0}")]
    Invalid(ValidationReport),
    #[error("declared degree {declared} differs from the multidegree sum {sum}")]
    DegreeMismatch { declared: i64, sum: i64 },
    #[error(transparent)]
    Balance(#[from] BalanceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub genus: u32,
    #[serde(default)]
    pub cusps: u32,
    #[serde(default)]
    pub exceptional: bool,
}

fn node() -> EdgeKind {
    EdgeKind::Node
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub ends: [String; 2],
    #[serde(default = "node")]
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multidegree: Option<BTreeMap<String, i64>>,
}

const DOCUMENT_KEYS: &[&str] = &["vertices", "edges", "degree", "multidegree"];
const VERTEX_KEYS: &[&str] = &["id", "genus", "cusps", "exceptional"];
const EDGE_KEYS: &[&str] = &["ends", "kind"];

fn retain_keys(value: &mut Value, keys: &[&str]) {
    if let Value::Object(map) = value {
        map.retain(|k, _| keys.contains(&k.as_str()));
    }
}

fn strip_unknown(value: &mut Value) {
    retain_keys(value, DOCUMENT_KEYS);
    for (key, allowed) in [("vertices", VERTEX_KEYS), ("edges", EDGE_KEYS)] {
        if let Some(Value::Array(items)) = value.get_mut(key) {
            items.iter_mut().for_each(|item| retain_keys(item, allowed));
        }
    }
}

impl CurveDocument {
    /// Parses a document. With `lenient`, unknown keys are dropped instead of
    /// rejected.
    pub fn parse(text: &str, lenient: bool) -> Result<Self, DocumentError> {
        let syntax = |e: serde_json::Error| DocumentError::Syntax(e.to_string());
        if lenient {
            let mut value: Value = serde_json::from_str(text).map_err(syntax)?;
            strip_unknown(&mut value);
            serde_json::from_value(value).map_err(syntax)
        } else {
            serde_json::from_str(text).map_err(syntax)
        }
    }

    pub fn from_graph(graph: &CurveGraph) -> Self {
        CurveDocument {
            vertices: graph
                .vertices()
                .iter()
                .map(|v| VertexEntry {
                    id: v.id.clone(),
                    genus: v.genus,
                    cusps: v.cusps,
                    exceptional: v.exceptional,
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| {
                    let (a, b) = e.ends();
                    EdgeEntry {
                        ends: [graph.vertex(a).id.clone(), graph.vertex(b).id.clone()],
                        kind: e.kind(),
                    }
                })
                .collect(),
            degree: None,
            multidegree: None,
        }
    }

    pub fn from_polarized(pc: &PolarizedCurve) -> Self {
        let mut doc = CurveDocument::from_graph(pc.graph());
        doc.degree = Some(pc.total_degree());
        doc.multidegree = Some(pc.multidegree().to_map(pc.graph()));
        doc
    }

    /// The graph, checked against every structural invariant.
    pub fn to_graph(&self) -> Result<CurveGraph, DocumentError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex {
                id: v.id.clone(),
                genus: v.genus,
                cusps: v.cusps,
                exceptional: v.exceptional,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| (e.ends[0].as_str(), e.ends[1].as_str(), e.kind));
        let graph = CurveGraph::from_parts(vertices, edges)?;
        let report = graph.validate();
        if !report.is_valid() {
            return Err(DocumentError::Invalid(report));
        }
        if let (Some(declared), Some(md)) = (self.degree, &self.multidegree) {
            let sum = md.values().sum();
            if declared != sum {
                return Err(DocumentError::DegreeMismatch { declared, sum });
            }
        }
        Ok(graph)
    }

    /// Declared degree, or the multidegree sum.
    pub fn total_degree(&self) -> Option<i64> {
        self.degree
            .or_else(|| self.multidegree.as_ref().map(|m| m.values().sum()))
    }

    /// The polarized curve, when a multidegree is present.
    pub fn to_polarized(&self) -> Result<Option<PolarizedCurve>, DocumentError> {
        let graph = self.to_graph()?;
        let Some(map) = &self.multidegree else {
            return Ok(None);
        };
        let md = Multidegree::from_map(&graph, map)?;
        Ok(Some(PolarizedCurve::new(graph, md)?))
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("documents serialize")
    }
}
