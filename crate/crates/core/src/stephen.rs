//! Stephen's procedure: monotone finite approximations of Schützenberger
//! graphs, and certificates read off them.
//!
//! Round `k + 1` attaches, at every vertex present after round `k`, a cycle
//! labelled by each relator that does not already close there, then folds.
//! Rounds are the only budget unit, so `refine` and `approximate` agree.

use serde::Serialize;
use thiserror::Error;

use crate::igraph::{InverseWordGraph, Vertex};
use crate::words::{Presentation, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StephenError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("vertex cap of {cap} exceeded in round {round} ({vertices} vertices)")]
    VertexCap {
        cap: usize,
        round: usize,
        vertices: usize,
    },
}

/// Resource guard for expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionLimits {
    pub vertex_cap: usize,
}

impl Default for ExpansionLimits {
    fn default() -> Self {
        ExpansionLimits {
            vertex_cap: 5_000_000,
        }
    }
}

/// A snapshot of the procedure for `SΓ(word)` after `rounds` rounds. The
/// graph's root is the vertex of `word·word'`; its terminal is the vertex of
/// `word`.
#[derive(Debug, Clone)]
pub struct Approximation {
    pub presentation: Presentation,
    pub word: Word,
    pub graph: InverseWordGraph,
    pub rounds: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    Unknown,
}

/// Evidence attached to a `Yes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// The endpoint of a successful read.
    Endpoint(Vertex),
    /// A factorization `w = u v` given by the length of `u`.
    Split(usize),
    /// A start vertex whose `w`-path passes the root after `at` letters.
    ThroughRoot { start: Vertex, at: usize },
}

/// A tri-state answer: `Yes` is final, `Unknown` claims nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Certificate {
    pub fn yes(rounds: usize, witness: Option<Witness>) -> Self {
        Certificate {
            verdict: Verdict::Yes,
            rounds,
            witness,
        }
    }

    pub fn unknown(rounds: usize) -> Self {
        Certificate {
            verdict: Verdict::Unknown,
            rounds,
            witness: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.verdict == Verdict::Yes
    }
}

pub fn approximate(
    p: &Presentation,
    w: &Word,
    rounds: usize,
) -> Result<Approximation, StephenError> {
    approximate_with(p, w, rounds, ExpansionLimits::default())
}

pub fn approximate_with(
    p: &Presentation,
    w: &Word,
    rounds: usize,
    limits: ExpansionLimits,
) -> Result<Approximation, StephenError> {
    p.check_word(w)?;
    let start = Approximation {
        presentation: p.clone(),
        word: w.clone(),
        graph: InverseWordGraph::munn_tree(w),
        rounds: 0,
    };
    refine_with(start, rounds, limits)
}

/// Runs `extra` further rounds.
pub fn refine(a: Approximation, extra: usize) -> Result<Approximation, StephenError> {
    refine_with(a, extra, ExpansionLimits::default())
}

pub fn refine_with(
    mut a: Approximation,
    extra: usize,
    limits: ExpansionLimits,
) -> Result<Approximation, StephenError> {
    for _ in 0..extra {
        let round = a.rounds + 1;
        a.graph = expand_round(&a.graph, &a.presentation, |vertices| {
            if vertices > limits.vertex_cap {
                Err(StephenError::VertexCap {
                    cap: limits.vertex_cap,
                    round,
                    vertices,
                })
            } else {
                Ok(())
            }
        })?;
        a.rounds = round;
    }
    Ok(a)
}

/// One full round over the vertices of `g` in id order.
///
/// For each (vertex, relator) the relator is read forward from the vertex
/// as far as possible and its inverse backward as far as possible; only the
/// unread middle is added. Adding the whole cycle and folding would give
/// the same graph.
fn expand_round(
    g: &InverseWordGraph,
    p: &Presentation,
    guard: impl Fn(usize) -> Result<(), StephenError>,
) -> Result<InverseWordGraph, StephenError> {
    let mut raw = g.to_raw();
    for v in g.vertices() {
        for r in p.relators() {
            let symbols = r.symbols();
            let n = symbols.len();
            let mut head = v;
            let mut i = 0;
            while i < n {
                match g.step(head, &symbols[i]) {
                    Some(u) => {
                        head = u;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == n {
                if head != v {
                    raw.identify(head, v);
                }
                continue;
            }
            let mut tail = v;
            let mut j = 0;
            while i + j < n {
                match g.step(tail, &symbols[n - 1 - j].inverse()) {
                    Some(u) => {
                        tail = u;
                        j += 1;
                    }
                    None => break,
                }
            }
            let middle = Word::from_symbols(symbols[i..n - j].to_vec());
            raw.add_path(head, &middle, Some(tail));
            guard(raw.vertex_count())?;
        }
    }
    let folded = raw.fold().graph;
    guard(folded.vertex_count())?;
    Ok(folded)
}

/// `Yes(endpoint)` when `w` labels a path from the root.
pub fn reads_from_root(a: &Approximation, w: &Word) -> Certificate {
    match a.graph.read(a.graph.root(), w) {
        Some(end) => Certificate::yes(a.rounds, Some(Witness::Endpoint(end))),
        None => Certificate::unknown(a.rounds),
    }
}

fn reads_root_to_terminal(a: &Approximation, w: &Word) -> bool {
    a.graph.read(a.graph.root(), w).is_some()
        && a.graph.read(a.graph.root(), w) == a.graph.terminal()
}

/// `Yes` when `u` reads root to terminal in the approximation of `SΓ(v)`
/// and `v` does so in that of `SΓ(u)`.
pub fn equals_in_monoid(
    p: &Presentation,
    u: &Word,
    v: &Word,
    rounds: usize,
) -> Result<Certificate, StephenError> {
    let av = approximate(p, v, rounds)?;
    if !reads_root_to_terminal(&av, u) {
        return Ok(Certificate::unknown(rounds));
    }
    let au = approximate(p, u, rounds)?;
    Ok(equal_in_approximations(&au, &av))
}

/// The equality test on prepared approximations of `SΓ(u)` and `SΓ(v)`.
pub fn equal_in_approximations(au: &Approximation, av: &Approximation) -> Certificate {
    let rounds = au.rounds.min(av.rounds);
    if reads_root_to_terminal(av, &au.word) && reads_root_to_terminal(au, &av.word) {
        Certificate::yes(rounds, None)
    } else {
        Certificate::unknown(rounds)
    }
}

/// `Yes` when reading `w` from the root of the approximation of `SΓ(w)`
/// returns to the root, i.e. `w = w w'`.
pub fn is_idempotent(
    p: &Presentation,
    w: &Word,
    rounds: usize,
) -> Result<Certificate, StephenError> {
    Ok(idempotent_in(&approximate(p, w, rounds)?))
}

pub fn idempotent_in(a: &Approximation) -> Certificate {
    let root = a.graph.root();
    match a.graph.read(root, &a.word) {
        Some(end) if end == root => Certificate::yes(a.rounds, Some(Witness::Endpoint(end))),
        _ => Certificate::unknown(a.rounds),
    }
}

/// True when every relator closes at every vertex in `vertices`.
pub fn relators_close_at(
    g: &InverseWordGraph,
    p: &Presentation,
    vertices: impl IntoIterator<Item = Vertex>,
) -> bool {
    vertices
        .into_iter()
        .all(|v| p.relators().iter().all(|r| g.read(v, r) == Some(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::igraph::{canonical_form, find_morphism};
    use crate::words::Letter;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn pres(s: &str) -> Presentation {
        Presentation::parse(s).unwrap()
    }

    fn x_ray() -> Presentation {
        pres("gens: x y ; rels: x y x'")
    }

    #[test]
    fn rounds_zero_is_munn_tree() {
        let a = approximate(&x_ray(), &w("x y x"), 0).unwrap();
        let m = InverseWordGraph::munn_tree(&w("x y x"));
        assert_eq!(
            canonical_form(&a.graph, a.graph.root()),
            canonical_form(&m, m.root())
        );
    }

    #[test]
    fn xyx_right_units_form_an_x_ray_with_y_loops_away_from_root() {
        let a = approximate(&x_ray(), &Word::empty(), 3).unwrap();
        let g = &a.graph;
        let root = g.root();
        let y = Letter::new("y").unwrap();
        assert_eq!(g.step(root, &y.positive()), None);
        assert_eq!(g.step(root, &y.inverse()), None);
        let x1 = g.read(root, &w("x")).unwrap();
        assert_eq!(g.read(root, &w("x y")), Some(x1));
        let x3 = g.read(root, &w("x x x")).unwrap();
        assert_eq!(g.step(x3, &y.positive()), Some(x3));
        // no x-edge into the root
        assert_eq!(g.read(root, &w("x'")), None);
        assert_eq!(g.vertex_count(), 4);
    }

    #[test]
    fn collision_building_block_has_doubled_c_d_edges() {
        let p = pres("gens: a b c d ; rels: a c b, a d b, c c', d d'");
        let a = approximate(&p, &Word::empty(), 2).unwrap();
        let g = &a.graph;
        let root = g.root();
        let va = g.read(root, &w("a")).unwrap();
        let vac = g.read(va, &w("c")).unwrap();
        let vad = g.read(va, &w("d")).unwrap();
        assert_eq!(vac, vad);
        assert_eq!(g.read(vac, &w("b")), Some(root));
        // c and d from the root go to distinct vertices
        assert_ne!(g.read(root, &w("c")), g.read(root, &w("d")));
    }

    #[test]
    fn relators_close_at_all_old_vertices() {
        let p = pres("gens: a b c d ; rels: a c b, a d b, c c', d d'");
        let prev = approximate(&p, &w("c d'"), 1).unwrap();
        let next = refine(prev.clone(), 1).unwrap();
        let m = find_morphism(
            &prev.graph,
            &next.graph,
            (prev.graph.root(), next.graph.root()),
        )
        .unwrap();
        assert!(relators_close_at(
            &next.graph,
            &p,
            prev.graph.vertices().map(|v| m.apply(v))
        ));
    }

    #[test]
    fn refine_matches_approximate() {
        let p = x_ray();
        let a = approximate(&p, &w("y x"), 1).unwrap();
        let b = refine(a.clone(), 2).unwrap();
        let c = approximate(&p, &w("y x"), 3).unwrap();
        assert_eq!(
            canonical_form(&b.graph, b.graph.root()),
            canonical_form(&c.graph, c.graph.root())
        );
        let same = refine(a.clone(), 0).unwrap();
        assert_eq!(canonical_form(&same.graph, 0), canonical_form(&a.graph, 0));
    }

    #[test]
    fn equality_examples() {
        let p = pres("gens: a b c d ; rels: a c b, a d b");
        assert!(equals_in_monoid(&p, &w("a c"), &w("a d"), 2)
            .unwrap()
            .is_yes());
        assert!(equals_in_monoid(&p, &w("c b"), &w("c b"), 0)
            .unwrap()
            .is_yes());
        let collision = pres("gens: a b c d ; rels: a c b, a d b, c c', d d'");
        for k in 0..4 {
            assert!(!equals_in_monoid(&collision, &w("c"), &w("d"), k)
                .unwrap()
                .is_yes());
        }
    }

    #[test]
    fn idempotent_examples() {
        let p = x_ray();
        assert!(is_idempotent(&p, &w("x x'"), 0).unwrap().is_yes());
        for k in 0..5 {
            assert_eq!(
                is_idempotent(&p, &w("y"), k).unwrap().verdict,
                Verdict::Unknown
            );
        }
        let collision = pres("gens: a b c d ; rels: a c b, a d b, c c', d d'");
        assert!(is_idempotent(&collision, &w("c c'"), 1).unwrap().is_yes());
    }

    #[test]
    fn reads_from_root_examples() {
        let a = approximate(&x_ray(), &Word::empty(), 3).unwrap();
        assert!(reads_from_root(&a, &w("x x x")).is_yes());
        assert!(!reads_from_root(&a, &w("y")).is_yes());
        assert_eq!(
            reads_from_root(&a, &Word::empty()).witness,
            Some(Witness::Endpoint(a.graph.root()))
        );
    }

    #[test]
    fn vertex_cap_aborts() {
        let err = approximate_with(
            &x_ray(),
            &Word::empty(),
            10,
            ExpansionLimits { vertex_cap: 3 },
        )
        .unwrap_err();
        assert!(matches!(err, StephenError::VertexCap { cap: 3, .. }));
    }

    #[test]
    fn undeclared_word_is_rejected() {
        assert!(approximate(&x_ray(), &w("z"), 1).is_err());
    }
}
