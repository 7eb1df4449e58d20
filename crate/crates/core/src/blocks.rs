//! Block covers of Schützenberger graph approximations.
//!
//! The cover is built constructively: take the Munn tree of `w`, glue a
//! copy of the `SΓ(1)` approximation at every Munn vertex, fold, and track
//! where each copy lands. Copies that land injectively are preblocks;
//! maximal ones are blocks. All data is relative to the round budget.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::igraph::{
    budget_automorphisms, find_morphism, Edge, InverseWordGraph, MorphismError, Vertex,
};
use crate::stephen::{approximate_with, ExpansionLimits, StephenError};
use crate::words::{Presentation, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error(transparent)]
    Stephen(#[from] StephenError),
    #[error("approximations at consecutive budgets are not related by a morphism: {0}")]
    NotMonotone(MorphismError),
}

/// The image of one glued copy of the `SΓ(1)` approximation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preblock {
    /// Images of the copy roots; more than one after deduplication.
    pub roots: Vec<Vertex>,
    /// For each root, the shortest prefix of `w` reading to it.
    pub prefixes: Vec<String>,
    pub vertices: BTreeSet<Vertex>,
    #[serde(serialize_with = "serialize_edges")]
    pub edges: BTreeSet<Edge>,
}

fn serialize_edges<S: serde::Serializer>(edges: &BTreeSet<Edge>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(edges.iter().map(|e| (e.source, e.letter.name(), e.target)))
}

fn edge_tuples(edges: &[Edge]) -> Vec<(Vertex, String, Vertex)> {
    edges
        .iter()
        .map(|e| (e.source, e.letter.name().to_string(), e.target))
        .collect()
}

/// A copy whose image is not injective, so not a preblock.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapsedCopy {
    pub root: Vertex,
    pub prefix: String,
    pub copy_size: usize,
    pub image_size: usize,
}

#[derive(Debug, Clone)]
pub struct BlockCover {
    pub presentation: Presentation,
    pub word: Word,
    pub rounds: usize,
    /// The folded glued graph, an approximation of `SΓ(word)`.
    pub graph: InverseWordGraph,
    /// Size of the glued `SΓ(1)` approximation.
    pub copy_size: usize,
    /// Injective copy images, deduplicated.
    pub preblocks: Vec<Preblock>,
    /// Maximal preblocks, merged when mutually contained. Block 0 holds the
    /// root.
    pub blocks: Vec<Preblock>,
    pub collapsed: Vec<CollapsedCopy>,
    /// Edges lying in no preblock.
    pub uncovered: Vec<Edge>,
}

pub fn lambda_cover(p: &Presentation, w: &Word, rounds: usize) -> Result<BlockCover, BlockError> {
    lambda_cover_with(p, w, rounds, ExpansionLimits::default())
}

pub fn lambda_cover_with(
    p: &Presentation,
    w: &Word,
    rounds: usize,
    limits: ExpansionLimits,
) -> Result<BlockCover, BlockError> {
    p.check_word(w).map_err(StephenError::from)?;
    let unit = approximate_with(p, &Word::empty(), rounds, limits)?.graph;
    let munn = InverseWordGraph::munn_tree(w);
    let trace = munn.trace(munn.root(), w);
    let mut first_prefix = vec![usize::MAX; munn.vertex_count()];
    for (len, v) in trace.iter().enumerate() {
        if first_prefix[*v] == usize::MAX {
            first_prefix[*v] = len;
        }
    }

    let mut raw = munn.to_raw();
    let mut offsets = Vec::with_capacity(munn.vertex_count());
    for v in munn.vertices() {
        let offset = unit.append_to(&mut raw);
        raw.identify(offset + unit.root(), v);
        offsets.push(offset);
    }
    if raw.vertex_count() > limits.vertex_cap {
        return Err(StephenError::VertexCap {
            cap: limits.vertex_cap,
            round: rounds,
            vertices: raw.vertex_count(),
        }
        .into());
    }
    let folded = raw.fold();
    let q = &folded.quotient;
    let graph = folded.graph;
    let unit_edges = unit.edges();

    let mut preblocks: Vec<Preblock> = Vec::new();
    let mut collapsed = Vec::new();
    for (v, offset) in offsets.iter().enumerate() {
        let root = q[*offset + unit.root()];
        let prefix = w.prefix(first_prefix[v]).to_string();
        let vertices: BTreeSet<Vertex> = unit.vertices().map(|u| q[offset + u]).collect();
        if vertices.len() != unit.vertex_count() {
            collapsed.push(CollapsedCopy {
                root,
                prefix,
                copy_size: unit.vertex_count(),
                image_size: vertices.len(),
            });
            continue;
        }
        let edges: BTreeSet<Edge> = unit_edges
            .iter()
            .map(|e| Edge::new(q[offset + e.source], e.letter.clone(), q[offset + e.target]))
            .collect();
        match preblocks
            .iter_mut()
            .find(|b| b.vertices == vertices && b.edges == edges)
        {
            Some(b) => {
                if !b.roots.contains(&root) {
                    b.roots.push(root);
                    b.prefixes.push(prefix);
                }
            }
            None => preblocks.push(Preblock {
                roots: vec![root],
                prefixes: vec![prefix],
                vertices,
                edges,
            }),
        }
    }

    let blocks = maximal_blocks(&preblocks);
    let mut covered: BTreeSet<&Edge> = BTreeSet::new();
    for b in &preblocks {
        covered.extend(b.edges.iter());
    }
    let uncovered = graph
        .edges()
        .into_iter()
        .filter(|e| !covered.contains(e))
        .collect();
    Ok(BlockCover {
        presentation: p.clone(),
        word: w.clone(),
        rounds,
        copy_size: unit.vertex_count(),
        graph,
        preblocks,
        blocks,
        collapsed,
        uncovered,
    })
}

/// Breadth-first distances from `from` inside a preblock's own edges.
fn inner_distances(b: &Preblock, from: Vertex) -> std::collections::BTreeMap<Vertex, usize> {
    let mut adj: std::collections::BTreeMap<Vertex, Vec<Vertex>> =
        std::collections::BTreeMap::new();
    for e in &b.edges {
        adj.entry(e.source).or_default().push(e.target);
        adj.entry(e.target).or_default().push(e.source);
    }
    let mut dist = std::collections::BTreeMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for u in adj.get(&v).into_iter().flatten() {
            if !dist.contains_key(u) {
                dist.insert(*u, d + 1);
                queue.push_back(*u);
            }
        }
    }
    dist
}

/// Containment of `small` in `big`, matched to the truncation of `big`.
///
/// Both are images of the same finite truncation, so a copy rooted deep
/// inside `big` reaches past `big`'s horizon. Only the part of `small`
/// within `ρ = ecc(big) − dist(big root, small root)` of its root is
/// required to lie in `big`, where both quantities are measured inside
/// `big`.
fn contains(big: &Preblock, small: &Preblock) -> bool {
    let r = small.roots[0];
    if !big.vertices.contains(&r) {
        return false;
    }
    let from_big_root = inner_distances(big, big.roots[0]);
    let ecc = from_big_root.values().copied().max().unwrap_or(0);
    let Some(&d) = from_big_root.get(&r) else {
        return false;
    };
    let rho = ecc.saturating_sub(d);
    let near = inner_distances(small, r);
    let inside = |v: &Vertex| near.get(v).is_some_and(|d| *d <= rho);
    let interior = |v: &Vertex| near.get(v).is_some_and(|d| *d < rho);
    near.iter()
        .filter(|(_, d)| **d <= rho)
        .all(|(v, _)| big.vertices.contains(v))
        && small
            .edges
            .iter()
            .filter(|e| {
                inside(&e.source)
                    && inside(&e.target)
                    && (interior(&e.source) || interior(&e.target))
            })
            .all(|e| big.edges.contains(e))
}

fn maximal_blocks(preblocks: &[Preblock]) -> Vec<Preblock> {
    let n = preblocks.len();
    let within: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i == j || contains(&preblocks[j], &preblocks[i]))
                .collect()
        })
        .collect();
    let maximal: Vec<usize> = (0..n)
        .filter(|&i| (0..n).all(|j| !within[i][j] || within[j][i]))
        .collect();
    let mut merged: Vec<Preblock> = Vec::new();
    let mut assigned = vec![false; n];
    for &i in &maximal {
        if assigned[i] {
            continue;
        }
        let mut block = preblocks[i].clone();
        assigned[i] = true;
        for &j in &maximal {
            if !assigned[j] && within[i][j] && within[j][i] {
                assigned[j] = true;
                let other = &preblocks[j];
                for (r, p) in other.roots.iter().zip(&other.prefixes) {
                    if !block.roots.contains(r) {
                        block.roots.push(*r);
                        block.prefixes.push(p.clone());
                    }
                }
                block.vertices.extend(other.vertices.iter().copied());
                block.edges.extend(other.edges.iter().cloned());
            }
        }
        merged.push(block);
    }
    merged
}

impl BlockCover {
    pub fn block_of_root(&self, v: Vertex) -> Option<usize> {
        self.blocks.iter().position(|b| b.roots.contains(&v))
    }

    /// JSON: `{blocks:[{roots, prefixes, vertices, edges}], uncovered:[edges]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "blocks": self.blocks,
            "uncovered": edge_tuples(&self.uncovered),
        })
    }

    /// DOT rendering with each vertex coloured by its first block.
    pub fn to_dot(&self) -> String {
        const COLOURS: &[&str] = &[
            "lightblue",
            "palegreen",
            "lightsalmon",
            "plum",
            "khaki",
            "lightpink",
            "aquamarine",
            "wheat",
        ];
        let mut out =
            String::from("digraph G {\n  node [shape=circle, style=filled, fillcolor=white];\n");
        for v in self.graph.vertices() {
            let mut attrs = Vec::new();
            if v == self.graph.root() {
                attrs.push("shape=doublecircle".to_string());
            }
            if let Some(b) = self.blocks.iter().position(|b| b.vertices.contains(&v)) {
                attrs.push(format!("fillcolor={}", COLOURS[b % COLOURS.len()]));
            }
            if attrs.is_empty() {
                writeln!(out, "  {v};").unwrap();
            } else {
                writeln!(out, "  {v} [{}];", attrs.join(", ")).unwrap();
            }
        }
        for e in self.graph.edges() {
            let style = if self.uncovered.contains(&e) {
                ", style=dashed"
            } else {
                ""
            };
            writeln!(
                out,
                "  {} -> {} [label=\"{}\"{style}];",
                e.source, e.target, e.letter
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Violations of the cover laws on the finite approximation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverLawReport {
    /// Vertices in no preblock.
    pub uncovered_vertices: Vec<Vertex>,
    /// Copies whose image is not injective.
    pub collapsed_copies: Vec<CollapsedCopy>,
    /// Uncovered edges that are not cut edges.
    pub uncovered_not_cut: Vec<(Vertex, String, Vertex)>,
    /// Uncovered edges not traversed by the path of `w` from the root.
    pub uncovered_off_path: Vec<(Vertex, String, Vertex)>,
    /// Blocks none of whose recorded prefixes reads to a recorded root.
    pub unrooted_blocks: Vec<usize>,
    pub block_count: usize,
    pub block_bound: usize,
}

impl CoverLawReport {
    pub fn holds(&self) -> bool {
        self.uncovered_vertices.is_empty()
            && self.collapsed_copies.is_empty()
            && self.uncovered_not_cut.is_empty()
            && self.uncovered_off_path.is_empty()
            && self.unrooted_blocks.is_empty()
            && self.block_count <= self.block_bound
    }
}

pub fn verify_cover_laws(c: &BlockCover) -> CoverLawReport {
    let g = &c.graph;
    let mut covered = vec![false; g.vertex_count()];
    for b in &c.preblocks {
        for v in &b.vertices {
            covered[*v] = true;
        }
    }
    let cut: BTreeSet<Edge> = g.cut_edges().into_iter().collect();
    let trace = g.trace(g.root(), &c.word);
    let mut on_path: BTreeSet<Edge> = BTreeSet::new();
    for (i, s) in c.word.iter().enumerate() {
        let (a, b) = (trace[i], trace[i + 1]);
        on_path.insert(match s.sign {
            crate::words::Sign::Positive => Edge::new(a, s.letter.clone(), b),
            crate::words::Sign::Inverse => Edge::new(b, s.letter.clone(), a),
        });
    }
    let unrooted_blocks =
        c.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| {
                !b.roots.iter().zip(&b.prefixes).any(|(r, p)| {
                    Word::parse(p).ok().and_then(|p| g.read(g.root(), &p)) == Some(*r)
                })
            })
            .map(|(i, _)| i)
            .collect();
    CoverLawReport {
        uncovered_vertices: (0..g.vertex_count()).filter(|v| !covered[*v]).collect(),
        collapsed_copies: c.collapsed.clone(),
        uncovered_not_cut: edge_tuples(
            &c.uncovered
                .iter()
                .filter(|e| !cut.contains(e))
                .cloned()
                .collect::<Vec<_>>(),
        ),
        uncovered_off_path: edge_tuples(
            &c.uncovered
                .iter()
                .filter(|e| !on_path.contains(e))
                .cloned()
                .collect::<Vec<_>>(),
        ),
        unrooted_blocks,
        block_count: c.blocks.len(),
        block_bound: c.word.len() + 1,
    }
}

/// How the symmetries of the approximation permute its blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockAction {
    pub rounds: usize,
    /// Number of symmetries found (with one round of slack).
    pub order: usize,
    /// For each symmetry, the image of the root.
    pub root_images: Vec<Vertex>,
    /// For each symmetry, `permutation[b]` is the image of block `b`, or
    /// `None` if the budget is too small to see it.
    pub permutations: Vec<Vec<Option<usize>>>,
    /// Symmetries fixing block 0.
    pub stabilizer: Vec<usize>,
    pub stabilizer_index: usize,
    pub index_divides_order: bool,
    /// Each stabilizer element maps block 0 into itself.
    pub stabilizer_preserves_block0: bool,
    /// Symmetries that fail to permute the blocks at this budget.
    pub unresolved: Vec<usize>,
}

/// Computes the cover at `rounds` and `rounds + 1`, the symmetries of the
/// smaller one that extend into the larger one, and their action on blocks.
pub fn block_action(
    p: &Presentation,
    w: &Word,
    rounds: usize,
) -> Result<(BlockCover, BlockAction), BlockError> {
    block_action_with(p, w, rounds, ExpansionLimits::default())
}

pub fn block_action_with(
    p: &Presentation,
    w: &Word,
    rounds: usize,
    limits: ExpansionLimits,
) -> Result<(BlockCover, BlockAction), BlockError> {
    let inner = lambda_cover_with(p, w, rounds, limits)?;
    let outer = lambda_cover_with(p, w, rounds + 1, limits)?;
    let embed = find_morphism(
        &inner.graph,
        &outer.graph,
        (inner.graph.root(), outer.graph.root()),
    )
    .map_err(BlockError::NotMonotone)?;
    let syms = budget_automorphisms(&inner.graph, &outer.graph, &embed);
    let mut permutations = Vec::new();
    let mut unresolved = Vec::new();
    for (i, s) in syms.iter().enumerate() {
        let perm: Vec<Option<usize>> = inner
            .blocks
            .iter()
            .map(|b| s.partial[b.roots[0]].and_then(|r| inner.block_of_root(r)))
            .collect();
        let mut images: Vec<usize> = perm.iter().flatten().copied().collect();
        images.sort();
        images.dedup();
        if perm.iter().any(Option::is_none) || images.len() != perm.len() {
            unresolved.push(i);
        }
        permutations.push(perm);
    }
    let stabilizer: Vec<usize> = permutations
        .iter()
        .enumerate()
        .filter(|(_, perm)| perm.first().copied().flatten() == Some(0))
        .map(|(i, _)| i)
        .collect();
    let order = syms.len();
    let stabilizer_index = if stabilizer.is_empty() {
        0
    } else {
        order / stabilizer.len()
    };
    let block0 = inner.blocks.first();
    let stabilizer_preserves_block0 = stabilizer.iter().all(|&i| {
        let s = &syms[i];
        block0.is_none_or(|b| {
            b.vertices
                .iter()
                .all(|v| s.partial[*v].is_none_or(|u| b.vertices.contains(&u)))
        })
    });
    let action = BlockAction {
        rounds,
        order,
        root_images: syms.iter().map(|s| s.image_of_base).collect(),
        permutations,
        index_divides_order: !stabilizer.is_empty() && order.is_multiple_of(stabilizer.len()),
        stabilizer,
        stabilizer_index,
        stabilizer_preserves_block0,
        unresolved,
    };
    Ok((inner, action))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjointnessReport {
    pub pairwise_disjoint: bool,
    /// Pairs of block indices sharing a vertex.
    pub overlapping: Vec<(usize, usize)>,
    pub uncovered_edges: usize,
    pub automorphism_order: usize,
    /// `uncovered_edges!` when uncovered edges exist; the symmetries act
    /// faithfully on them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_bound: Option<u128>,
    pub within_bound: bool,
}

pub fn disjointness_report(c: &BlockCover, automorphism_order: usize) -> DisjointnessReport {
    let mut overlapping = Vec::new();
    for i in 0..c.blocks.len() {
        for j in i + 1..c.blocks.len() {
            if !c.blocks[i].vertices.is_disjoint(&c.blocks[j].vertices) {
                overlapping.push((i, j));
            }
        }
    }
    let k = c.uncovered.len();
    let order_bound = (k > 0).then(|| {
        (1..=k as u128)
            .try_fold(1u128, |acc, x| acc.checked_mul(x))
            .unwrap_or(u128::MAX)
    });
    DisjointnessReport {
        pairwise_disjoint: overlapping.is_empty(),
        overlapping,
        uncovered_edges: k,
        automorphism_order,
        within_bound: order_bound.is_none_or(|b| automorphism_order as u128 <= b),
        order_bound,
    }
}
