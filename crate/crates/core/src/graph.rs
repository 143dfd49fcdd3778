//! Weighted undirected simple graphs and the edge-list text format.
//!
//! Vertex ids are dense `0..n` and follow the order in which labels first
//! appear in the input. Every downstream tie-break is defined relative to
//! that order, so two runs on the same file are reproducible.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Header written by [`write_edge_list`] and honoured by [`parse_edge_list`]
/// when it precedes every edge line. It pins the vertex order (and keeps
/// isolated vertices) across a write/read cycle.
pub const VERTEX_DECLARATION: &str = "# vertices:";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {0}: malformed edge line")]
    MalformedLine(usize),
    #[error("line {0}: edge weight must be strictly positive")]
    NonPositiveWeight(usize),
    #[error("line {0}: self-loop")]
    SelfLoop(usize),
    #[error("line {0}: duplicate edge")]
    DuplicateEdge(usize),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("invalid edge ({u}, {v}, {w}): {reason}")]
    InvalidEdge {
        u: usize,
        v: usize,
        w: f64,
        reason: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFormat {
    #[default]
    Whitespace,
    Csv,
}

/// An undirected edge stored canonically with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(a: usize, b: usize, w: f64) -> Self {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Edge { u, v, w }
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected simple graph with strictly positive finite edge weights.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Builds a graph from labels and edges, checking every invariant.
    pub fn new(labels: Vec<String>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut seen_labels = HashMap::with_capacity(n);
        for label in &labels {
            if seen_labels.insert(label.as_str(), ()).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }
        let mut pairs = HashMap::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());
        for e in edges {
            let e = Edge::new(e.u, e.v, e.w);
            let invalid = |reason| GraphError::InvalidEdge {
                u: e.u,
                v: e.v,
                w: e.w,
                reason,
            };
            if e.v >= n {
                return Err(invalid("vertex id out of range"));
            }
            if e.u == e.v {
                return Err(invalid("self-loop"));
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(invalid("weight must be finite and > 0"));
            }
            if pairs.insert((e.u, e.v), ()).is_some() {
                return Err(invalid("parallel edge"));
            }
            canonical.push(e);
        }
        Ok(Self::from_canonical(labels, canonical))
    }

    /// Assembles a graph from edges already known to satisfy the invariants.
    pub(crate) fn from_canonical(labels: Vec<String>, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.u, e.v));
        let mut adjacency = vec![Vec::new(); labels.len()];
        for e in &edges {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        WeightedGraph {
            labels,
            edges,
            adjacency,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn vertex_id(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Edges sorted by `(u, v)`, each with `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, id: usize) -> &[(usize, f64)] {
        &self.adjacency[id]
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency[a]
            .iter()
            .find(|&&(x, _)| x == b)
            .map(|&(_, w)| w)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    /// Copy of the graph with every weight multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self, GraphError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.u, e.v, e.w * alpha))
            .collect();
        Self::new(self.labels.clone(), edges)
    }

    pub fn stats(&self) -> GraphStats {
        graph_stats(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub total_weight: f64,
    pub degree_sequence: Vec<usize>,
    pub strength_sequence: Vec<f64>,
}

pub fn graph_stats(g: &WeightedGraph) -> GraphStats {
    let n = g.n_vertices();
    let mut degree_sequence = vec![0; n];
    let mut strength_sequence = vec![0.0; n];
    let mut total_weight = 0.0;
    for e in g.edges() {
        degree_sequence[e.u] += 1;
        degree_sequence[e.v] += 1;
        strength_sequence[e.u] += e.w;
        strength_sequence[e.v] += e.w;
        total_weight += e.w;
    }
    GraphStats {
        n_vertices: n,
        n_edges: g.n_edges(),
        total_weight,
        degree_sequence,
        strength_sequence,
    }
}

/// Parses `label_u label_v [weight]` lines. Blank and `#` lines are skipped;
/// a missing weight means 1.0.
pub fn parse_edge_list(text: &str, format: EdgeFormat) -> Result<WeightedGraph, GraphError> {
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut pairs: HashMap<(usize, usize), ()> = HashMap::new();
    let mut edges = Vec::new();

    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = labels.len();
        labels.push(label.to_string());
        ids.insert(label.to_string(), id);
        id
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(decl) = line.strip_prefix(VERTEX_DECLARATION) {
            if edges.is_empty() {
                for label in split_fields(decl, format) {
                    if label.is_empty() {
                        return Err(GraphError::MalformedLine(line_no));
                    }
                    intern(label, &mut labels);
                }
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }

        let fields: Vec<&str> = split_fields(line, format).collect();
        if !(fields.len() == 2 || fields.len() == 3) || fields.iter().any(|f| f.is_empty()) {
            return Err(GraphError::MalformedLine(line_no));
        }
        let w = match fields.get(2) {
            None => 1.0,
            Some(tok) => tok
                .parse::<f64>()
                .map_err(|_| GraphError::MalformedLine(line_no))?,
        };
        if w.is_nan() || w == f64::INFINITY {
            return Err(GraphError::MalformedLine(line_no));
        }
        if w <= 0.0 {
            return Err(GraphError::NonPositiveWeight(line_no));
        }
        if fields[0] == fields[1] {
            return Err(GraphError::SelfLoop(line_no));
        }
        let a = intern(fields[0], &mut labels);
        let b = intern(fields[1], &mut labels);
        let e = Edge::new(a, b, w);
        if pairs.insert((e.u, e.v), ()).is_some() {
            return Err(GraphError::DuplicateEdge(line_no));
        }
        edges.push(e);
    }

    Ok(WeightedGraph::from_canonical(labels, edges))
}

fn split_fields(line: &str, format: EdgeFormat) -> Box<dyn Iterator<Item = &str> + '_> {
    match format {
        EdgeFormat::Whitespace => Box::new(line.split_whitespace()),
        EdgeFormat::Csv => Box::new(line.split(',').map(str::trim)),
    }
}

/// Canonical text form: a vertex declaration, then one edge per line sorted
/// by `(u, v)`, weights printed with round-trip precision.
pub fn write_edge_list(g: &WeightedGraph, format: EdgeFormat) -> String {
    let sep = match format {
        EdgeFormat::Whitespace => " ",
        EdgeFormat::Csv => ",",
    };
    let mut out = String::new();
    out.push_str(VERTEX_DECLARATION);
    out.push(' ');
    out.push_str(&g.labels().join(sep));
    out.push('\n');
    for e in g.edges() {
        let _ = writeln!(out, "{}{sep}{}{sep}{:?}", g.label(e.u), g.label(e.v), e.w);
    }
    out
}
