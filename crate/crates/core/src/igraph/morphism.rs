//! Label-preserving morphisms between folded graphs.
//!
//! A morphism out of a connected deterministic graph is determined by the
//! image of a single vertex, so every search here is a single breadth-first
//! extension from an anchor.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::{InverseWordGraph, Vertex};
use crate::words::Symbol;

/// Why an anchored extension failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FailureWitness {
    /// `symbol` is readable at `source` but not at its image.
    MissingEdge {
        source: Vertex,
        image: Vertex,
        symbol: String,
    },
    /// Two paths force different images for `vertex`.
    Inconsistent {
        vertex: Vertex,
        first: Vertex,
        second: Vertex,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("anchor vertex {vertex} is not in the {side} graph")]
    AnchorOutOfRange { side: &'static str, vertex: Vertex },
    #[error("no morphism extends the anchor: {0:?}")]
    Obstructed(FailureWitness),
    #[error("source graph is not connected: vertex {0} is unreachable from the anchor")]
    Disconnected(Vertex),
}

/// A vertex map that carries every edge to an edge with the same label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphMorphism {
    pub map: Vec<Vertex>,
}

impl GraphMorphism {
    pub fn apply(&self, v: Vertex) -> Vertex {
        self.map[v]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.map.len());
        self.map.iter().all(|v| seen.insert(*v))
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, v)| i == *v)
    }

    pub fn fixed_points(&self) -> usize {
        self.map.iter().enumerate().filter(|(i, v)| i == *v).count()
    }

    pub fn compose(&self, then: &GraphMorphism) -> GraphMorphism {
        GraphMorphism {
            map: self.map.iter().map(|v| then.map[*v]).collect(),
        }
    }
}

/// The unique morphism `src -> dst` sending `anchor.0` to `anchor.1`.
pub fn find_morphism(
    src: &InverseWordGraph,
    dst: &InverseWordGraph,
    anchor: (Vertex, Vertex),
) -> Result<GraphMorphism, MorphismError> {
    let (a, b) = anchor;
    if !src.contains(a) {
        return Err(MorphismError::AnchorOutOfRange {
            side: "source",
            vertex: a,
        });
    }
    if !dst.contains(b) {
        return Err(MorphismError::AnchorOutOfRange {
            side: "target",
            vertex: b,
        });
    }
    let mut map = vec![usize::MAX; src.vertex_count()];
    map[a] = b;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        let image = map[v];
        for (s, u) in src.symbols_at(v) {
            let Some(target) = dst.step(image, &s) else {
                return Err(MorphismError::Obstructed(FailureWitness::MissingEdge {
                    source: v,
                    image,
                    symbol: s.to_string(),
                }));
            };
            if map[u] == usize::MAX {
                map[u] = target;
                queue.push_back(u);
            } else if map[u] != target {
                return Err(MorphismError::Obstructed(FailureWitness::Inconsistent {
                    vertex: u,
                    first: map[u],
                    second: target,
                }));
            }
        }
    }
    if let Some(v) = map.iter().position(|m| *m == usize::MAX) {
        return Err(MorphismError::Disconnected(v));
    }
    Ok(GraphMorphism { map })
}

/// Sorted letters readable at `v`; automorphisms preserve it.
fn signature(g: &InverseWordGraph, v: Vertex) -> Vec<Symbol> {
    g.symbols_at(v).into_iter().map(|(s, _)| s).collect()
}

/// All label-preserving automorphisms of a finite connected graph, sorted
/// lexicographically by vertex map (the identity first). The root need not
/// be fixed.
pub fn automorphisms(g: &InverseWordGraph) -> Vec<GraphMorphism> {
    let n = g.vertex_count();
    let mut classes: BTreeMap<Vec<Symbol>, Vec<Vertex>> = BTreeMap::new();
    for v in 0..n {
        classes.entry(signature(g, v)).or_default().push(v);
    }
    // Base: a vertex whose signature class is smallest, lowest id on ties.
    let candidates = classes
        .values()
        .min_by_key(|vs| (vs.len(), vs[0]))
        .expect("graphs have at least one vertex");
    let base = candidates[0];
    let mut out: Vec<GraphMorphism> = candidates
        .iter()
        .filter_map(|c| find_morphism(g, g, (base, *c)).ok())
        .filter(GraphMorphism::is_injective)
        .collect();
    out.sort();
    for m in out.iter().skip(1) {
        assert_eq!(
            m.fixed_points(),
            0,
            "non-identity automorphism with a fixed point"
        );
    }
    out
}

/// A symmetry of a truncated graph witnessed with one budget of slack.
///
/// `forward` maps the inner graph into the outer one sending the base
/// vertex to the image of `image_of_base`; `backward` maps it sending
/// `image_of_base` to the image of the base. `partial` is the induced
/// partial permutation of inner vertices: `partial[v] = Some(u)` when
/// `forward(v)` is the image of `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetAutomorphism {
    pub image_of_base: Vertex,
    pub forward: GraphMorphism,
    pub backward: GraphMorphism,
    pub partial: Vec<Option<Vertex>>,
}

impl BudgetAutomorphism {
    pub fn is_identity(&self) -> bool {
        self.partial
            .iter()
            .enumerate()
            .all(|(i, p)| p.is_none_or(|u| u == i))
    }
}

/// Symmetries of a truncated approximation `inner`, checked against a
/// larger approximation `outer` that receives it via `embed`.
///
/// A truncation of an infinite graph is usually lopsided: the symmetric
/// partner of a vertex near the cut sees less of the graph. A candidate
/// image `c` of the root is accepted when both `root -> embed(c)` and
/// `c -> embed(root)` extend to injective morphisms `inner -> outer` that
/// agree with each other wherever both are defined on `embed(inner)`.
pub fn budget_automorphisms(
    inner: &InverseWordGraph,
    outer: &InverseWordGraph,
    embed: &GraphMorphism,
) -> Vec<BudgetAutomorphism> {
    let base = inner.root();
    let mut preimage: Vec<Option<Vertex>> = vec![None; outer.vertex_count()];
    for (v, img) in embed.map.iter().enumerate() {
        preimage[*img] = Some(v);
    }
    let base_signature = signature(inner, base);
    let mut out = Vec::new();
    for c in inner.vertices() {
        // The image of the base must at least show the base's letters in
        // the outer graph.
        let outer_sig = signature(outer, embed.apply(c));
        if !base_signature.iter().all(|s| outer_sig.contains(s)) {
            continue;
        }
        let Ok(forward) = find_morphism(inner, outer, (base, embed.apply(c))) else {
            continue;
        };
        let Ok(backward) = find_morphism(inner, outer, (c, embed.apply(base))) else {
            continue;
        };
        if !forward.is_injective() || !backward.is_injective() {
            continue;
        }
        let partial: Vec<Option<Vertex>> = forward.map.iter().map(|img| preimage[*img]).collect();
        let consistent = partial
            .iter()
            .enumerate()
            .all(|(v, p)| p.is_none_or(|u| backward.apply(u) == embed.apply(v)));
        if consistent {
            out.push(BudgetAutomorphism {
                image_of_base: c,
                forward,
                backward,
                partial,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::igraph::RawGraph;
    use crate::words::{Letter, Word};

    fn l(s: &str) -> Letter {
        Letter::new(s).unwrap()
    }

    fn cycle(n: usize, label: &str) -> InverseWordGraph {
        let mut raw = RawGraph::new(n);
        for i in 0..n {
            raw.add_edge(i, l(label), (i + 1) % n);
        }
        raw.fold().graph
    }

    #[test]
    fn identity_morphism() {
        let g = InverseWordGraph::munn_tree(&Word::parse("a b a'").unwrap());
        let m = find_morphism(&g, &g, (0, 0)).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn munn_tree_maps_into_graph_with_edge() {
        let src = InverseWordGraph::munn_tree(&Word::parse("a a'").unwrap());
        let dst = cycle(3, "a");
        assert!(find_morphism(&src, &dst, (0, 0)).is_ok());
        let bad = InverseWordGraph::munn_tree(&Word::parse("b").unwrap());
        assert!(matches!(
            find_morphism(&bad, &dst, (0, 0)),
            Err(MorphismError::Obstructed(
                FailureWitness::MissingEdge { .. }
            ))
        ));
        assert!(matches!(
            find_morphism(&src, &dst, (0, 7)),
            Err(MorphismError::AnchorOutOfRange { .. })
        ));
    }

    #[test]
    fn inconsistency_is_reported() {
        // a path of length 2 cannot wrap a 3-cycle onto a 2-cycle root pair
        let src = cycle(3, "a");
        let dst = cycle(2, "a");
        assert!(matches!(
            find_morphism(&src, &dst, (0, 0)),
            Err(MorphismError::Obstructed(
                FailureWitness::Inconsistent { .. }
            ))
        ));
    }

    #[test]
    fn cycle_automorphisms() {
        let auts = automorphisms(&cycle(5, "a"));
        assert_eq!(auts.len(), 5);
        assert!(auts[0].is_identity());
        let path = InverseWordGraph::munn_tree(&Word::parse("a a").unwrap());
        assert_eq!(automorphisms(&path).len(), 1);
    }

    #[test]
    fn budget_automorphisms_of_finite_graph_match_plain_ones() {
        let g = cycle(4, "a");
        let id = find_morphism(&g, &g, (0, 0)).unwrap();
        assert_eq!(budget_automorphisms(&g, &g, &id).len(), 4);
    }
}
