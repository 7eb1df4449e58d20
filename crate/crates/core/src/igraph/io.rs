//! DOT and JSON serialization.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{InverseWordGraph, RawGraph, Vertex};
use crate::words::Letter;

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex ids must be exactly 0..{0}")]
    VertexIds(usize),
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("invalid label {0:?}")]
    Label(String),
    #[error("graph is not deterministic or not codeterministic")]
    NotFolded,
    #[error("graph is not connected")]
    Disconnected,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    root: Vertex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terminal: Option<Vertex>,
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, String, Vertex)>,
}

/// Graphviz rendering. The root is drawn as a double circle and the
/// terminal, if different, with a bold outline.
pub fn export_dot(g: &InverseWordGraph) -> String {
    let mut out = String::from("digraph G {\n  node [shape=circle];\n");
    for v in g.vertices() {
        let mut attrs = Vec::new();
        if v == g.root() {
            attrs.push("shape=doublecircle");
        }
        if g.terminal() == Some(v) && v != g.root() {
            attrs.push("style=bold");
        }
        if attrs.is_empty() {
            writeln!(out, "  {v};").unwrap();
        } else {
            writeln!(out, "  {v} [{}];", attrs.join(", ")).unwrap();
        }
    }
    for e in g.edges() {
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            e.source, e.target, e.letter
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn export_json(g: &InverseWordGraph) -> String {
    let doc = GraphJson {
        root: g.root(),
        terminal: g.terminal(),
        vertices: g.vertices().collect(),
        edges: g
            .edges()
            .into_iter()
            .map(|e| (e.source, e.letter.name().to_string(), e.target))
            .collect(),
    };
    serde_json::to_string(&doc).expect("graph JSON serializes")
}

/// Parses and validates a graph: ids `0..n`, folded, connected.
pub fn import_json(text: &str) -> Result<InverseWordGraph, GraphIoError> {
    let doc: GraphJson = serde_json::from_str(text)?;
    let n = doc.vertices.len();
    if doc.vertices.iter().enumerate().any(|(i, v)| i != *v) {
        return Err(GraphIoError::VertexIds(n));
    }
    let in_range = |v: Vertex| {
        if v < n {
            Ok(v)
        } else {
            Err(GraphIoError::OutOfRange(v))
        }
    };
    let mut raw = RawGraph::new(n);
    for (s, label, t) in &doc.edges {
        let letter = Letter::new(label).map_err(|_| GraphIoError::Label(label.clone()))?;
        raw.add_edge(in_range(*s)?, letter, in_range(*t)?);
    }
    raw.set_root(in_range(doc.root)?);
    raw.set_terminal(doc.terminal.map(in_range).transpose()?);
    let edges = raw.edge_count();
    let folded = raw.fold();
    if !folded.is_identity() || folded.graph.edge_count() != edges {
        return Err(GraphIoError::NotFolded);
    }
    if !folded.graph.is_connected() {
        return Err(GraphIoError::Disconnected);
    }
    Ok(folded.graph)
}
