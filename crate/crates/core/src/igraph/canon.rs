use std::fmt::Write;

use super::{InverseWordGraph, Vertex};
use crate::words::Sign;

/// Breadth-first canonical encoding of `g` seen from `base`.
///
/// Vertices are renumbered in discovery order, expanding each vertex's
/// signed letters in label order. Because the graph is deterministic and
/// codeterministic the renumbering is forced, so two connected graphs get
/// equal encodings exactly when an isomorphism maps base to base, root to
/// root and terminal to terminal.
pub fn canonical_form(g: &InverseWordGraph, base: Vertex) -> Vec<u8> {
    let order = g.bfs_order(base);
    let mut index = vec![usize::MAX; g.vertex_count()];
    for (i, v) in order.iter().enumerate() {
        index[*v] = i;
    }
    let idx = |v: Vertex| {
        if index[v] == usize::MAX {
            "-".to_string()
        } else {
            index[v].to_string()
        }
    };
    let mut out = String::new();
    write!(out, "v{};r{};t", order.len(), idx(g.root())).unwrap();
    match g.terminal() {
        Some(t) => write!(out, "{}", idx(t)).unwrap(),
        None => out.push('-'),
    }
    for v in &order {
        out.push('|');
        for (s, u) in g.symbols_at(*v) {
            let sign = match s.sign {
                Sign::Positive => '+',
                Sign::Inverse => '-',
            };
            let name = s.letter.name();
            write!(out, "{}#{}{}{};", name.len(), name, sign, index[u]).unwrap();
        }
    }
    out.into_bytes()
}
