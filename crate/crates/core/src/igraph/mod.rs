//! Rooted deterministic inverse word graphs.
//!
//! An [`InverseWordGraph`] is always folded: no two edges share a source and
//! label, and no two edges share a target and label. Graphs under
//! construction live in a [`RawGraph`], which may violate both conditions
//! until [`RawGraph::fold`] is called.

mod canon;
mod fold;
mod io;
mod morphism;

use std::collections::VecDeque;

pub use canon::canonical_form;
pub use fold::{Folded, RawGraph};
pub use io::{export_dot, export_json, import_json, GraphIoError};
pub use morphism::{
    automorphisms, budget_automorphisms, find_morphism, BudgetAutomorphism, FailureWitness,
    GraphMorphism, MorphismError,
};

use crate::words::{Letter, Sign, Symbol, Word};

pub type Vertex = usize;

/// A labelled edge `source --letter--> target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: Vertex,
    pub letter: Letter,
    pub target: Vertex,
}

impl Edge {
    pub fn new(source: Vertex, letter: Letter, target: Vertex) -> Self {
        Edge {
            source,
            letter,
            target,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A folded, connected, rooted inverse word graph with vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct InverseWordGraph {
    /// Outgoing edges per vertex, sorted by letter.
    out: Vec<Vec<(Letter, Vertex)>>,
    /// Incoming edges per vertex, sorted by letter.
    inc: Vec<Vec<(Letter, Vertex)>>,
    root: Vertex,
    terminal: Option<Vertex>,
}

impl std::fmt::Debug for InverseWordGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InverseWordGraph")
            .field("vertices", &self.vertex_count())
            .field("root", &self.root)
            .field("terminal", &self.terminal)
            .field("edges", &self.edges())
            .finish()
    }
}

impl InverseWordGraph {
    /// The one-vertex graph with no edges.
    pub fn trivial() -> Self {
        InverseWordGraph {
            out: vec![Vec::new()],
            inc: vec![Vec::new()],
            root: 0,
            terminal: Some(0),
        }
    }

    /// The Munn tree of `w`: the folded path labelled `w`.
    pub fn munn_tree(w: &Word) -> Self {
        let mut raw = RawGraph::new(1);
        let end = raw.add_path(0, w, None);
        raw.set_root(0);
        raw.set_terminal(Some(end));
        raw.fold().graph
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.vertex_count()
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn terminal(&self) -> Option<Vertex> {
        self.terminal
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.vertex_count()
    }

    /// Same graph with a different root and terminal.
    pub fn rerooted(&self, root: Vertex, terminal: Option<Vertex>) -> Self {
        assert!(self.contains(root), "root out of range");
        InverseWordGraph {
            root,
            terminal,
            ..self.clone()
        }
    }

    /// All edges sorted by (source, letter, target).
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges: Vec<Edge> = self
            .out
            .iter()
            .enumerate()
            .flat_map(|(s, list)| list.iter().map(move |(l, t)| Edge::new(s, l.clone(), *t)))
            .collect();
        edges.sort();
        edges
    }

    pub fn out_edges(&self, v: Vertex) -> &[(Letter, Vertex)] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: Vertex) -> &[(Letter, Vertex)] {
        &self.inc[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.out[v].len() + self.inc[v].len()
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.target(e.source, &e.letter) == Some(e.target)
    }

    fn target(&self, v: Vertex, l: &Letter) -> Option<Vertex> {
        let list = &self.out[v];
        list.binary_search_by(|(x, _)| x.cmp(l))
            .ok()
            .map(|i| list[i].1)
    }

    fn source(&self, v: Vertex, l: &Letter) -> Option<Vertex> {
        let list = &self.inc[v];
        list.binary_search_by(|(x, _)| x.cmp(l))
            .ok()
            .map(|i| list[i].1)
    }

    /// Follows one signed letter: forward along an edge for a positive
    /// letter, backward for an inverse one.
    pub fn step(&self, v: Vertex, s: &Symbol) -> Option<Vertex> {
        match s.sign {
            Sign::Positive => self.target(v, &s.letter),
            Sign::Inverse => self.source(v, &s.letter),
        }
    }

    /// Endpoint of the unique path labelled `w` from `from`, if it exists.
    pub fn read(&self, from: Vertex, w: &Word) -> Option<Vertex> {
        w.iter().try_fold(from, |v, s| self.step(v, s))
    }

    /// The vertices visited while reading `w`, including the start. Stops
    /// at the first missing edge.
    pub fn trace(&self, from: Vertex, w: &Word) -> Vec<Vertex> {
        let mut path = vec![from];
        let mut v = from;
        for s in w {
            match self.step(v, s) {
                Some(u) => {
                    path.push(u);
                    v = u;
                }
                None => break,
            }
        }
        path
    }

    /// Signed letters readable at `v` with their endpoints, in label order
    /// (by name, inverse before positive).
    pub fn symbols_at(&self, v: Vertex) -> Vec<(Symbol, Vertex)> {
        let mut out: Vec<(Symbol, Vertex)> = self.out[v]
            .iter()
            .map(|(l, t)| (l.positive(), *t))
            .chain(self.inc[v].iter().map(|(l, s)| (l.inverse(), *s)))
            .collect();
        out.sort();
        out
    }

    /// Undirected breadth-first distances from `from`; `None` if unreachable.
    pub fn distances(&self, from: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices have distances");
            for (_, u) in self.out[v].iter().chain(&self.inc[v]) {
                if dist[*u].is_none() {
                    dist[*u] = Some(d + 1);
                    queue.push_back(*u);
                }
            }
        }
        dist
    }

    /// Shortest access words from the root, ties broken by label order.
    pub fn access_words(&self) -> Vec<Option<Word>> {
        self.access_words_from(self.root)
    }

    pub fn access_words_from(&self, from: Vertex) -> Vec<Option<Word>> {
        let mut words: Vec<Option<Word>> = vec![None; self.vertex_count()];
        words[from] = Some(Word::empty());
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for (s, u) in self.symbols_at(v) {
                if words[u].is_none() {
                    let mut w = words[v].clone().expect("queued vertices have words");
                    w.push(s);
                    words[u] = Some(w);
                    queue.push_back(u);
                }
            }
        }
        words
    }

    /// Breadth-first discovery order from `from`, following label order.
    pub fn bfs_order(&self, from: Vertex) -> Vec<Vertex> {
        let mut seen = vec![false; self.vertex_count()];
        seen[from] = true;
        let mut order = vec![from];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for (_, u) in self.symbols_at(v) {
                if !seen[u] {
                    seen[u] = true;
                    order.push(u);
                }
            }
        }
        order
    }

    pub fn is_connected(&self) -> bool {
        self.distances(self.root).iter().all(Option::is_some)
    }

    /// The subgraph within undirected distance `radius` of `center`, rooted
    /// at `center`. Keeps edges with an endpoint strictly inside the ball.
    /// Returns the ball and the embedding of its vertices into `self`.
    pub fn ball(&self, center: Vertex, radius: usize) -> (InverseWordGraph, Vec<Vertex>) {
        let dist = self.distances(center);
        let inside = |v: Vertex| dist[v].is_some_and(|d| d <= radius);
        let interior = |v: Vertex| dist[v].is_some_and(|d| d < radius);
        let order = self.bfs_order(center);
        let kept: Vec<Vertex> = order.into_iter().filter(|v| inside(*v)).collect();
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, v) in kept.iter().enumerate() {
            index[*v] = i;
        }
        let mut raw = RawGraph::new(kept.len());
        for e in self.edges() {
            if inside(e.source) && inside(e.target) && (interior(e.source) || interior(e.target)) {
                raw.add_edge(index[e.source], e.letter, index[e.target]);
            }
        }
        raw.set_root(0);
        let terminal = self.terminal.filter(|t| inside(*t)).map(|t| index[t]);
        raw.set_terminal(terminal);
        let folded = raw.fold();
        debug_assert!(
            folded.is_identity(),
            "a subgraph of a folded graph is folded"
        );
        (folded.graph, kept)
    }

    /// Edges whose removal disconnects the underlying undirected graph.
    pub fn cut_edges(&self) -> Vec<Edge> {
        let edges = self.edges();
        let n = self.vertex_count();
        let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            adj[e.source].push((e.target, i));
            adj[e.target].push((e.source, i));
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut bridge = vec![false; edges.len()];
        let mut timer = 0;
        for start in 0..n {
            if disc[start] != usize::MAX {
                continue;
            }
            disc[start] = timer;
            low[start] = timer;
            timer += 1;
            // (vertex, edge used to enter it, next adjacency index)
            let mut stack: Vec<(Vertex, usize, usize)> = vec![(start, usize::MAX, 0)];
            while let Some(&mut (v, via, ref mut next)) = stack.last_mut() {
                if *next < adj[v].len() {
                    let (u, id) = adj[v][*next];
                    *next += 1;
                    if id == via {
                        continue;
                    }
                    if disc[u] == usize::MAX {
                        disc[u] = timer;
                        low[u] = timer;
                        timer += 1;
                        stack.push((u, id, 0));
                    } else {
                        low[v] = low[v].min(disc[u]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            bridge[via] = true;
                        }
                    }
                }
            }
        }
        edges
            .into_iter()
            .zip(bridge)
            .filter_map(|(e, b)| b.then_some(e))
            .collect()
    }

    /// Copies the graph into a mutable raw graph with the same ids.
    pub fn to_raw(&self) -> RawGraph {
        let mut raw = RawGraph::new(self.vertex_count());
        for e in self.edges() {
            raw.add_edge(e.source, e.letter, e.target);
        }
        raw.set_root(self.root);
        raw.set_terminal(self.terminal);
        raw
    }

    /// Appends a disjoint copy of `self` to `raw`; returns the id offset.
    pub fn append_to(&self, raw: &mut RawGraph) -> Vertex {
        let offset = raw.vertex_count();
        raw.add_vertices(self.vertex_count());
        for (s, list) in self.out.iter().enumerate() {
            for (l, t) in list {
                raw.add_edge(offset + s, l.clone(), offset + t);
            }
        }
        offset
    }

    pub(crate) fn from_parts(
        out: Vec<Vec<(Letter, Vertex)>>,
        inc: Vec<Vec<(Letter, Vertex)>>,
        root: Vertex,
        terminal: Option<Vertex>,
    ) -> Self {
        InverseWordGraph {
            out,
            inc,
            root,
            terminal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn l(s: &str) -> Letter {
        Letter::new(s).unwrap()
    }

    #[test]
    fn munn_tree_of_a_a_inverse_is_one_edge() {
        let g = InverseWordGraph::munn_tree(&w("a a'"));
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.terminal(), Some(g.root()));
    }

    #[test]
    fn munn_tree_of_x_y_is_a_path() {
        let g = InverseWordGraph::munn_tree(&w("x y"));
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.distances(g.root())[g.terminal().unwrap()], Some(2));
    }

    #[test]
    fn munn_tree_of_q_q_x_y_q_q() {
        let g = InverseWordGraph::munn_tree(&w("q q' x y q q'"));
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 4);
        let t = g.terminal().unwrap();
        assert_eq!(Some(t), g.read(g.root(), &w("x y")));
        assert!(g.step(g.root(), &l("q").positive()).is_some());
        assert!(g.step(t, &l("q").positive()).is_some());
    }

    #[test]
    fn read_is_reversible() {
        let g = InverseWordGraph::munn_tree(&w("a b a' c"));
        let v = g.read(0, &w("a b a'")).unwrap();
        assert_eq!(g.read(v, &w("a b a'").invert()), Some(0));
        assert_eq!(g.read(3, &Word::empty()), Some(3));
        assert_eq!(g.read(0, &w("c")), None);
    }

    #[test]
    fn ball_keeps_boundary_vertices_without_their_outer_edges() {
        let g = InverseWordGraph::munn_tree(&w("a a a a"));
        let (b, emb) = g.ball(0, 2);
        assert_eq!(b.vertex_count(), 3);
        assert_eq!(b.edge_count(), 2);
        assert_eq!(emb[0], 0);
        let (b0, _) = g.ball(2, 0);
        assert_eq!(b0.vertex_count(), 1);
        assert_eq!(b0.edge_count(), 0);
    }

    #[test]
    fn cut_edges_of_tree_and_cycle() {
        let g = InverseWordGraph::munn_tree(&w("a b c"));
        assert_eq!(g.cut_edges().len(), 3);
        let mut raw = RawGraph::new(3);
        raw.add_edge(0, l("a"), 1);
        raw.add_edge(1, l("a"), 2);
        raw.add_edge(2, l("a"), 0);
        raw.add_edge(0, l("b"), 0);
        let cyc = raw.fold().graph;
        assert!(cyc.cut_edges().is_empty());
        // two parallel edges with different labels are not bridges
        let mut raw = RawGraph::new(3);
        raw.add_edge(0, l("c"), 1);
        raw.add_edge(0, l("d"), 1);
        raw.add_edge(1, l("a"), 2);
        let g = raw.fold().graph;
        assert_eq!(g.cut_edges(), vec![Edge::new(1, l("a"), 2)]);
    }

    #[test]
    fn access_words_follow_label_order() {
        let mut raw = RawGraph::new(3);
        raw.add_edge(0, l("c"), 1);
        raw.add_edge(0, l("d"), 2);
        raw.add_edge(2, l("b"), 1);
        let g = raw.fold().graph;
        let words = g.access_words();
        assert_eq!(words[1], Some(w("c")));
        assert_eq!(words[2], Some(w("d")));
    }
}
