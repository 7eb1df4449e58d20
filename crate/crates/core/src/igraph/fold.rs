//! Folding engine: union-find with a worklist of label clashes.

use std::collections::BTreeMap;

use super::{InverseWordGraph, Vertex};
use crate::words::{Letter, Sign, Word};

/// A possibly non-deterministic graph under construction.
#[derive(Debug, Clone, Default)]
pub struct RawGraph {
    vertices: usize,
    edges: Vec<(Vertex, Letter, Vertex)>,
    identify: Vec<(Vertex, Vertex)>,
    root: Vertex,
    terminal: Option<Vertex>,
}

/// Result of folding: the folded graph and the quotient map from raw ids.
#[derive(Debug, Clone)]
pub struct Folded {
    pub graph: InverseWordGraph,
    pub quotient: Vec<Vertex>,
}

impl Folded {
    /// True when folding merged nothing.
    pub fn is_identity(&self) -> bool {
        self.quotient.iter().enumerate().all(|(i, q)| i == *q)
    }
}

impl RawGraph {
    pub fn new(vertices: usize) -> Self {
        RawGraph {
            vertices,
            ..Default::default()
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.vertices += 1;
        self.vertices - 1
    }

    pub fn add_vertices(&mut self, n: usize) {
        self.vertices += n;
    }

    pub fn add_edge(&mut self, source: Vertex, letter: Letter, target: Vertex) {
        assert!(
            source < self.vertices && target < self.vertices,
            "edge endpoint out of range"
        );
        self.edges.push((source, letter, target));
    }

    /// Requests that two vertices be merged on the next fold.
    pub fn identify(&mut self, a: Vertex, b: Vertex) {
        assert!(
            a < self.vertices && b < self.vertices,
            "vertex out of range"
        );
        if a != b {
            self.identify.push((a, b));
        }
    }

    pub fn set_root(&mut self, root: Vertex) {
        self.root = root;
    }

    pub fn set_terminal(&mut self, terminal: Option<Vertex>) {
        self.terminal = terminal;
    }

    /// Adds a path labelled `w` starting at `from`. Interior vertices are
    /// fresh; the last vertex is `to` when given, otherwise fresh. Returns
    /// the endpoint.
    pub fn add_path(&mut self, from: Vertex, w: &Word, to: Option<Vertex>) -> Vertex {
        if w.is_empty() {
            if let Some(t) = to {
                self.identify(from, t);
            }
            return from;
        }
        let mut v = from;
        for (i, s) in w.iter().enumerate() {
            let u = match to {
                Some(t) if i + 1 == w.len() => t,
                _ => self.add_vertex(),
            };
            match s.sign {
                Sign::Positive => self.add_edge(v, s.letter.clone(), u),
                Sign::Inverse => self.add_edge(u, s.letter.clone(), v),
            }
            v = u;
        }
        v
    }

    /// Folds with edges processed in insertion order.
    pub fn fold(self) -> Folded {
        let order: Vec<usize> = (0..self.edges.len()).collect();
        self.fold_in_order(&order)
    }

    /// Folds, inserting edges in the given order (a permutation of edge
    /// indices). The result does not depend on the order.
    pub fn fold_in_order(self, order: &[usize]) -> Folded {
        assert_eq!(order.len(), self.edges.len(), "order must cover every edge");
        let mut f = Folder::new(self.vertices);
        for &(a, b) in &self.identify {
            f.queue.push((a, b));
        }
        f.drain();
        for &i in order {
            let (s, l, t) = &self.edges[i];
            f.insert(*s, l.clone(), *t);
            f.drain();
        }
        f.finish(self.root, self.terminal)
    }
}

struct Folder {
    parent: Vec<Vertex>,
    size: Vec<usize>,
    out: Vec<BTreeMap<Letter, Vertex>>,
    inc: Vec<BTreeMap<Letter, Vertex>>,
    queue: Vec<(Vertex, Vertex)>,
}

impl Folder {
    fn new(n: usize) -> Self {
        Folder {
            parent: (0..n).collect(),
            size: vec![1; n],
            out: vec![BTreeMap::new(); n],
            inc: vec![BTreeMap::new(); n],
            queue: Vec::new(),
        }
    }

    fn find(&mut self, mut v: Vertex) -> Vertex {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    fn insert(&mut self, s: Vertex, l: Letter, t: Vertex) {
        let (s, t) = (self.find(s), self.find(t));
        match self.out[s].get(&l) {
            Some(&t2) => self.queue.push((t, t2)),
            None => {
                self.out[s].insert(l.clone(), t);
            }
        }
        match self.inc[t].get(&l) {
            Some(&s2) => self.queue.push((s, s2)),
            None => {
                self.inc[t].insert(l, s);
            }
        }
    }

    fn drain(&mut self) {
        while let Some((a, b)) = self.queue.pop() {
            self.union(a, b);
        }
    }

    fn union(&mut self, a: Vertex, b: Vertex) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        let out = std::mem::take(&mut self.out[b]);
        for (l, t) in out {
            match self.out[a].get(&l) {
                Some(&t2) => self.queue.push((t, t2)),
                None => {
                    self.out[a].insert(l, t);
                }
            }
        }
        let inc = std::mem::take(&mut self.inc[b]);
        for (l, s) in inc {
            match self.inc[a].get(&l) {
                Some(&s2) => self.queue.push((s, s2)),
                None => {
                    self.inc[a].insert(l, s);
                }
            }
        }
    }

    /// Numbers classes by their least original id and builds the graph.
    fn finish(mut self, root: Vertex, terminal: Option<Vertex>) -> Folded {
        let n = self.parent.len();
        let mut class_id = vec![usize::MAX; n];
        let mut quotient = vec![0; n];
        let mut next = 0;
        for (v, q) in quotient.iter_mut().enumerate() {
            let r = self.find(v);
            if class_id[r] == usize::MAX {
                class_id[r] = next;
                next += 1;
            }
            *q = class_id[r];
        }
        let mut out = vec![Vec::new(); next];
        let mut inc = vec![Vec::new(); next];
        for v in 0..n {
            if self.parent[v] != v {
                continue;
            }
            let map = std::mem::take(&mut self.out[v]);
            for (l, t) in map {
                let (s, t) = (quotient[v], quotient[t]);
                out[s].push((l.clone(), t));
                inc[t].push((l, s));
            }
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort();
            debug_assert!(
                list.windows(2).all(|w| w[0].0 != w[1].0),
                "fold left a clash"
            );
        }
        let root = if n == 0 { 0 } else { quotient[root] };
        let terminal = terminal.map(|t| quotient[t]);
        Folded {
            graph: InverseWordGraph::from_parts(out, inc, root, terminal),
            quotient,
        }
    }
}
