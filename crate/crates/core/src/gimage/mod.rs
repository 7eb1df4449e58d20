//! The maximal group image and R₁-injectivity.
//!
//! The group image is supplied as a homomorphism into a [`GroupOracle`].
//! Vertices of an approximation of `SΓ(1)` are labelled by the image of an
//! access word; a repeated label is a candidate failure of injectivity on
//! the right units. Distinctness in the monoid is only ever certified by a
//! finite admissible model graph.

mod oracle;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use oracle::{
    free_letter, DynElem, DynOracle, FiniteGroupOracle, FiniteGroupTable, FreeGroupOracle,
    FreeProductOracle, GroupOracle, OracleSpec, Syllable,
};

use crate::igraph::{Edge, InverseWordGraph, RawGraph, Vertex};
use crate::stephen::{approximate, StephenError};
use crate::words::{Letter, Presentation, Sign, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GimageError {
    #[error("letter {0:?} has no image")]
    Unmapped(String),
    #[error("bad group expression {expr:?}: {message}")]
    Expression { expr: String, message: String },
    #[error("bad group table: {0}")]
    BadTable(String),
    #[error("relator {index} ({relator}) does not map to the identity")]
    Inadmissible { index: usize, relator: String },
    #[error("model is not admissible: relator {relator} does not close at vertex {vertex}")]
    ModelRelator { vertex: Vertex, relator: String },
    #[error("model is not admissible: base word {0} is not readable from the root")]
    ModelBase(String),
    #[error(transparent)]
    Stephen(#[from] StephenError),
}

/// A letter-to-element map into an oracle.
#[derive(Debug, Clone)]
pub struct GroupHom<O: GroupOracle> {
    pub oracle: O,
    map: BTreeMap<Letter, O::Elem>,
}

impl<O: GroupOracle> GroupHom<O> {
    pub fn new(oracle: O, map: BTreeMap<Letter, O::Elem>) -> Self {
        GroupHom { oracle, map }
    }

    /// Builds the map from expressions in the oracle's syntax.
    pub fn from_expressions<'a>(
        oracle: O,
        exprs: impl IntoIterator<Item = (&'a Letter, &'a str)>,
    ) -> Result<Self, GimageError> {
        let mut map = BTreeMap::new();
        for (l, e) in exprs {
            map.insert(l.clone(), oracle.parse_element(e)?);
        }
        Ok(GroupHom { oracle, map })
    }

    pub fn image(&self, l: &Letter) -> Option<&O::Elem> {
        self.map.get(l)
    }

    pub fn letters(&self) -> impl Iterator<Item = &Letter> {
        self.map.keys()
    }

    /// The image of a word.
    pub fn sigma(&self, w: &Word) -> Result<O::Elem, GimageError> {
        let mut acc = self.oracle.identity();
        for s in w {
            let e = self
                .map
                .get(&s.letter)
                .ok_or_else(|| GimageError::Unmapped(s.letter.name().to_string()))?;
            let e = match s.sign {
                Sign::Positive => e.clone(),
                Sign::Inverse => self.oracle.invert(e),
            };
            acc = self.oracle.multiply(&acc, &e);
        }
        Ok(acc)
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool, GimageError> {
        Ok(self.oracle.is_identity(&self.sigma(w)?))
    }
}

pub fn sigma<O: GroupOracle>(h: &GroupHom<O>, w: &Word) -> Result<O::Elem, GimageError> {
    h.sigma(w)
}

/// Checks that every generator is mapped and every relator maps to the
/// identity; the error names the first failing relator.
pub fn validate_hom<O: GroupOracle>(p: &Presentation, h: &GroupHom<O>) -> Result<(), GimageError> {
    if let Some(g) = p.generators().iter().find(|g| h.image(g).is_none()) {
        return Err(GimageError::Unmapped(g.name().to_string()));
    }
    for (index, r) in p.relators().iter().enumerate() {
        if !h.is_trivial(r)? {
            return Err(GimageError::Inadmissible {
                index,
                relator: r.to_string(),
            });
        }
    }
    Ok(())
}

/// Hom file contents: an oracle and a letter map of expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomSpec {
    pub oracle: OracleSpec,
    pub map: BTreeMap<String, String>,
}

impl HomSpec {
    pub fn build(&self) -> Result<GroupHom<DynOracle>, GimageError> {
        let oracle = DynOracle::from_spec(&self.oracle)?;
        let mut map = BTreeMap::new();
        for (name, expr) in &self.map {
            let l = Letter::new(name).map_err(|e| GimageError::Expression {
                expr: name.clone(),
                message: e.to_string(),
            })?;
            map.insert(l, oracle.parse_element(expr)?);
        }
        Ok(GroupHom::new(oracle, map))
    }

    pub fn from_hom(h: &GroupHom<DynOracle>) -> Self {
        HomSpec {
            oracle: h.oracle.to_spec(),
            map: h
                .map
                .iter()
                .map(|(l, e)| (l.name().to_string(), h.oracle.render(e)))
                .collect(),
        }
    }
}

/// Outcome of the injectivity scan on an approximation of `SΓ(1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RoiReport {
    /// All vertices carry distinct images at this budget.
    InjectiveUpTo { rounds: usize },
    /// Two distinct vertices with equal images. Not a certified failure:
    /// the vertices may merge at a larger budget.
    CandidateWitness { u: String, v: String, rounds: usize },
}

impl RoiReport {
    pub fn is_injective(&self) -> bool {
        matches!(self, RoiReport::InjectiveUpTo { .. })
    }
}

/// Labels each vertex of the approximation of `SΓ(1)` by the image of its
/// breadth-first access word and reports the first collision.
pub fn roi_check<O: GroupOracle>(
    p: &Presentation,
    h: &GroupHom<O>,
    rounds: usize,
) -> Result<RoiReport, GimageError> {
    validate_hom(p, h)?;
    let a = approximate(p, &Word::empty(), rounds)?;
    roi_scan(&a.graph, h, rounds)
}

/// The injectivity scan on an already built graph of `SΓ(1)`.
pub fn roi_scan<O: GroupOracle>(
    g: &InverseWordGraph,
    h: &GroupHom<O>,
    rounds: usize,
) -> Result<RoiReport, GimageError> {
    let words = g.access_words();
    let mut seen: HashMap<Vec<u8>, Vertex> = HashMap::new();
    for v in g.bfs_order(g.root()) {
        let w = words[v].as_ref().expect("connected graph");
        let key = h.oracle.canonical(&h.sigma(w)?);
        if let Some(&first) = seen.get(&key) {
            return Ok(RoiReport::CandidateWitness {
                u: words[first].as_ref().expect("connected graph").to_string(),
                v: w.to_string(),
                rounds,
            });
        }
        seen.insert(key, v);
    }
    Ok(RoiReport::InjectiveUpTo { rounds })
}

/// A non-loop edge whose letter maps to the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlaggedEdge {
    pub source: Vertex,
    pub letter: String,
    pub target: Vertex,
    /// Access word of the source vertex.
    pub at: String,
}

/// Edges whose letter has trivial image but which are not loops. In an
/// injective image every such edge would be a loop.
pub fn flag_trivial_nonloop_edges<O: GroupOracle>(
    p: &Presentation,
    h: &GroupHom<O>,
    g: &InverseWordGraph,
) -> Result<Vec<FlaggedEdge>, GimageError> {
    validate_hom(p, h)?;
    let words = g.access_words();
    let mut out = Vec::new();
    for Edge {
        source,
        letter,
        target,
    } in g.edges()
    {
        if source != target && h.is_trivial(&free_letter(&letter))? {
            out.push(FlaggedEdge {
                source,
                letter: letter.name().to_string(),
                target,
                at: words[source]
                    .as_ref()
                    .map(Word::to_string)
                    .unwrap_or_default(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Separation {
    /// `u` and `v` act differently on the model root, so they differ in the
    /// monoid.
    CertifiedDistinct {
        u_end: Option<Vertex>,
        v_end: Option<Vertex>,
    },
    Inconclusive,
}

/// Tries to separate `u` and `v` with a finite model graph.
///
/// The model must be admissible: every relator closes at every vertex, and
/// `base`, if given, is readable from the root. Words then act on model
/// vertices as partial injections in a way that respects the relations, so
/// equal elements act identically; reaching different vertices, or being
/// readable for one word but not the other, proves `u ≠ v`.
pub fn separate_by_model(
    p: &Presentation,
    model: &InverseWordGraph,
    u: &Word,
    v: &Word,
    base: Option<&Word>,
) -> Result<Separation, GimageError> {
    for x in model.vertices() {
        if let Some(r) = p.relators().iter().find(|r| model.read(x, r) != Some(x)) {
            return Err(GimageError::ModelRelator {
                vertex: x,
                relator: r.to_string(),
            });
        }
    }
    if let Some(b) = base {
        if model.read(model.root(), b).is_none() {
            return Err(GimageError::ModelBase(b.to_string()));
        }
    }
    let (eu, ev) = (model.read(model.root(), u), model.read(model.root(), v));
    Ok(if eu == ev {
        Separation::Inconclusive
    } else {
        Separation::CertifiedDistinct {
            u_end: eu,
            v_end: ev,
        }
    })
}

/// The Cayley graph of a finite group with respect to the images of the
/// generators, rooted at the identity.
pub fn cayley_graph(
    p: &Presentation,
    h: &GroupHom<FiniteGroupOracle>,
) -> Result<InverseWordGraph, GimageError> {
    let t = h.oracle.table();
    let mut raw = RawGraph::new(t.order());
    for g in p.generators() {
        let a = *h
            .image(g)
            .ok_or_else(|| GimageError::Unmapped(g.name().to_string()))?;
        for x in 0..t.order() {
            raw.add_edge(x, g.clone(), t.multiply(x, a));
        }
    }
    raw.set_root(t.identity());
    raw.set_terminal(Some(t.identity()));
    let folded = raw.fold();
    debug_assert!(folded.is_identity());
    Ok(folded.graph)
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

    fn pres(s: &str) -> Presentation {
        Presentation::parse(s).unwrap()
    }

    fn free(gens: &[&str]) -> FreeGroupOracle {
        FreeGroupOracle::new(gens.iter().map(|g| l(g)).collect())
    }

    fn collision_hom() -> GroupHom<FreeGroupOracle> {
        let (a, b, c, d) = (l("a"), l("b"), l("c"), l("d"));
        GroupHom::from_expressions(
            free(&["a", "c"]),
            [(&a, "a"), (&b, "c' a'"), (&c, "c"), (&d, "c")],
        )
        .unwrap()
    }

    fn x_ray_hom() -> GroupHom<FreeGroupOracle> {
        let (x, y) = (l("x"), l("y"));
        GroupHom::from_expressions(free(&["x"]), [(&x, "x"), (&y, "")]).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let h = x_ray_hom();
        assert!(h.is_trivial(&w("x y x'")).unwrap());
        assert!(h.is_trivial(&Word::empty()).unwrap());
        assert!(collision_hom().is_trivial(&w("c' d")).unwrap());
        assert!(matches!(h.sigma(&w("z")), Err(GimageError::Unmapped(_))));
    }

    #[test]
    fn validate_examples() {
        let p = pres("gens: a b c d ; rels: a c b, a d b, c c', d d'");
        assert!(validate_hom(&p, &collision_hom()).is_ok());
        let (a, b, c, d) = (l("a"), l("b"), l("c"), l("d"));
        let bad = GroupHom::from_expressions(
            free(&["a", "c"]),
            [(&a, "a"), (&b, "c' a'"), (&c, "c"), (&d, "a")],
        )
        .unwrap();
        assert_eq!(
            validate_hom(&p, &bad),
            Err(GimageError::Inadmissible {
                index: 1,
                relator: "a d b".into()
            })
        );
        let empty = pres("gens: a b c d ; rels:");
        assert!(validate_hom(&empty, &bad).is_ok());
    }

    #[test]
    fn roi_examples() {
        let collision = pres("gens: a b c d ; rels: a c b, a d b, c c', d d'");
        assert_eq!(
            roi_check(&collision, &collision_hom(), 3).unwrap(),
            RoiReport::CandidateWitness {
                u: "c".into(),
                v: "d".into(),
                rounds: 3
            }
        );
        let x_ray = pres("gens: x y ; rels: x y x'");
        for k in 1..=5 {
            assert!(roi_check(&x_ray, &x_ray_hom(), k).unwrap().is_injective());
        }
        let y_conjugate = pres("gens: x y ; rels: y y' x y x'");
        assert_eq!(
            roi_check(&y_conjugate, &x_ray_hom(), 2).unwrap(),
            RoiReport::CandidateWitness {
                u: "".into(),
                v: "y".into(),
                rounds: 2
            }
        );
    }

    #[test]
    fn trivial_nonloop_edges_are_flagged() {
        let h = x_ray_hom();
        for (text, flagged) in [
            ("gens: x y ; rels: y y' x y x'", true),
            ("gens: x y ; rels: x y x y x' y' x'", true),
            ("gens: x y ; rels: x y x'", false),
        ] {
            let p = pres(text);
            let a = approximate(&p, &Word::empty(), 3).unwrap();
            let flags = flag_trivial_nonloop_edges(&p, &h, &a.graph).unwrap();
            assert_eq!(!flags.is_empty(), flagged, "{text}");
            assert!(flags.iter().all(|f| f.letter == "y"));
        }
    }

    #[test]
    fn model_separation() {
        // Z3 as an image of <x, y | x y x'> with x -> g, y -> e separates
        // x from 1.
        let p = pres("gens: x y ; rels: x y x'");
        let z3 = FiniteGroupOracle::new(FiniteGroupTable::cyclic(3));
        let h = GroupHom::from_expressions(z3, [(&l("x"), "g"), (&l("y"), "")]).unwrap();
        let model = cayley_graph(&p, &h).unwrap();
        assert!(matches!(
            separate_by_model(&p, &model, &w("x"), &Word::empty(), None).unwrap(),
            Separation::CertifiedDistinct { .. }
        ));
        // one vertex with loops everywhere separates nothing
        let mut raw = RawGraph::new(1);
        raw.add_edge(0, l("x"), 0);
        raw.add_edge(0, l("y"), 0);
        let point = raw.fold().graph;
        assert_eq!(
            separate_by_model(&p, &point, &w("x"), &w("y"), None).unwrap(),
            Separation::Inconclusive
        );
        // a lone x-edge is not admissible
        let bad = InverseWordGraph::munn_tree(&w("x"));
        assert!(matches!(
            separate_by_model(&p, &bad, &w("x"), &w("y"), None),
            Err(GimageError::ModelRelator { .. })
        ));
        assert!(matches!(
            separate_by_model(&p, &point, &w("x"), &w("y"), Some(&w("q"))),
            Err(GimageError::ModelBase(_))
        ));
    }

    #[test]
    fn hom_spec_round_trip() {
        let text = r#"{"oracle":{"kind":"free","generators":["a","c"]},"map":{"a":"a","b":"c' a'","c":"c","d":"c"}}"#;
        let spec: HomSpec = serde_json::from_str(text).unwrap();
        let h = spec.build().unwrap();
        let p = pres("gens: a b c d ; rels: a c b, a d b, c c', d d'");
        assert!(validate_hom(&p, &h).is_ok());
        assert_eq!(HomSpec::from_hom(&h), spec);
    }
}
