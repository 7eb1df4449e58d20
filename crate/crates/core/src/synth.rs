//! Presentations with trivial group of units and a prescribed finite
//! maximal subgroup, plus the witness word for units-as-subgroups.
//!
//! For a finite group `G` with `A = G \ {1}` and `R` the words of length 2
//! and 3 over `A` equal to 1, the monoid on `X ∪ Y ∪ Δ` has one relator
//! `x_{r_k} δ_{r,k} δ_{r,k-1}' y_{r_{k-1}}` per position `k` of each
//! `r ∈ R` (indices cyclic). Its group of units is trivial, and the
//! Schützenberger graph of the witness word is a graph `Ω` whose
//! automorphism group is `G`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::blocks::{block_action_with, BlockError};
use crate::gimage::{
    roi_scan, validate_hom, DynElem, DynOracle, FiniteGroupOracle, FiniteGroupTable,
    FreeGroupOracle, FreeProductOracle, GimageError, GroupHom, GroupOracle, RoiReport, Syllable,
};
use crate::green::{Classifier, GreenError};
use crate::igraph::{
    automorphisms, canonical_form, find_morphism, InverseWordGraph, RawGraph, Vertex,
};
use crate::stephen::{approximate_with, ExpansionLimits, StephenError, Verdict};
use crate::words::{Letter, Presentation, Sign, Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("the trivial group has no nonidentity elements")]
    Degenerate,
    #[error("relator {0:?} has a proper subword equal to the identity")]
    ProperSubword(Vec<String>),
    #[error("synthesized hom is not admissible: {0}")]
    Hom(GimageError),
    #[error("attaching copies of SΓ(1) to Ω merged vertices")]
    OmegaNotDeterministic,
    #[error("unit {0:?} is not certified at this budget")]
    UncertifiedUnit(String),
    #[error("{0:?} is not a generator")]
    NotAGenerator(String),
    #[error(transparent)]
    Stephen(#[from] StephenError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Blocks(#[from] BlockError),
}

/// Which family a synthesized letter belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LetterKind {
    X,
    Y,
    Delta,
}

/// The synthesized presentation and its maximal group image.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub table: FiniteGroupTable,
    /// Nonidentity elements in index order.
    pub alphabet: Vec<usize>,
    /// `R`: identity words of length 2 and 3, length then lexicographic.
    pub identity_words: Vec<Vec<usize>>,
    pub x: Vec<Letter>,
    pub y: Vec<Letter>,
    /// `delta[ri][k - 1]` is `δ_{r,k}` for the `ri`-th word of `R`.
    pub delta: Vec<Vec<Letter>>,
    pub presentation: Presentation,
    /// Into the free product of a free group on `X ∪ Λ` with `G`.
    pub hom: GroupHom<DynOracle>,
    kinds: BTreeMap<Letter, LetterKind>,
}

fn letter(name: String) -> Letter {
    Letter::new(&name).expect("synthesized names are valid")
}

pub fn synthesize(table: &FiniteGroupTable) -> Result<Synthesis, SynthError> {
    let alphabet = table.nonidentity();
    if alphabet.is_empty() {
        return Err(SynthError::Degenerate);
    }
    let pos: BTreeMap<usize, usize> = alphabet.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut identity_words = Vec::new();
    for len in [2, 3] {
        let mut word = vec![0usize; len];
        loop {
            let elems: Vec<usize> = word.iter().map(|i| alphabet[*i]).collect();
            if table.evaluate(&elems) == table.identity() {
                identity_words.push(elems);
            }
            let Some(i) = (0..len).rev().find(|&i| word[i] + 1 < alphabet.len()) else {
                break;
            };
            word[i] += 1;
            for w in word.iter_mut().skip(i + 1) {
                *w = 0;
            }
        }
    }
    for r in &identity_words {
        for start in 0..r.len() {
            for end in start + 1..=r.len() {
                if end - start < r.len() && table.evaluate(&r[start..end]) == table.identity() {
                    return Err(SynthError::ProperSubword(
                        r.iter().map(|a| table.name(*a).to_string()).collect(),
                    ));
                }
            }
        }
    }

    let x: Vec<Letter> = alphabet
        .iter()
        .map(|a| letter(format!("x_{}", table.name(*a))))
        .collect();
    let y: Vec<Letter> = alphabet
        .iter()
        .map(|a| letter(format!("y_{}", table.name(*a))))
        .collect();
    let delta: Vec<Vec<Letter>> = identity_words
        .iter()
        .enumerate()
        .map(|(ri, r)| {
            (1..=r.len())
                .map(|k| letter(format!("d_{}_{}", ri + 1, k)))
                .collect()
        })
        .collect();
    let mut kinds = BTreeMap::new();
    kinds.extend(x.iter().map(|l| (l.clone(), LetterKind::X)));
    kinds.extend(y.iter().map(|l| (l.clone(), LetterKind::Y)));
    kinds.extend(
        delta
            .iter()
            .flatten()
            .map(|l| (l.clone(), LetterKind::Delta)),
    );

    let mut relators = Vec::new();
    for (ri, r) in identity_words.iter().enumerate() {
        let n = r.len();
        for k in 0..n {
            let prev = (k + n - 1) % n;
            relators.push(Word::from_symbols(vec![
                x[pos[&r[k]]].positive(),
                delta[ri][k].positive(),
                delta[ri][prev].inverse(),
                y[pos[&r[prev]]].positive(),
            ]));
        }
    }
    let generators: Vec<Letter> = x
        .iter()
        .chain(&y)
        .chain(delta.iter().flatten())
        .cloned()
        .collect();
    let presentation =
        Presentation::new(generators, relators).expect("synthesized presentation is valid");

    let hom = synthesized_hom(table, &alphabet, &identity_words, &x, &y, &delta, &pos);
    validate_hom(&presentation, &hom).map_err(SynthError::Hom)?;
    Ok(Synthesis {
        table: table.clone(),
        alphabet,
        identity_words,
        x,
        y,
        delta,
        presentation,
        hom,
        kinds,
    })
}

/// The maximal group image after eliminating `y` and all but one `δ` per
/// relator word: `x_a ↦ x_a`, `y_a ↦ x_a⁻¹ a`, `δ_{r,|r|} ↦ λ_r`, and
/// `δ_{r,k} = y_{r_k} x_{r_{k+1}} δ_{r,k+1}` for the rest.
fn synthesized_hom(
    table: &FiniteGroupTable,
    alphabet: &[usize],
    identity_words: &[Vec<usize>],
    x: &[Letter],
    y: &[Letter],
    delta: &[Vec<Letter>],
    pos: &BTreeMap<usize, usize>,
) -> GroupHom<DynOracle> {
    let lambdas: Vec<Letter> = (0..identity_words.len())
        .map(|ri| letter(format!("l_{}", ri + 1)))
        .collect();
    let free = FreeGroupOracle::new(x.iter().chain(&lambdas).cloned().collect());
    let oracle = DynOracle::FreeProduct(Box::new(FreeProductOracle::new(
        DynOracle::Free(free),
        DynOracle::Finite(FiniteGroupOracle::new(table.clone())),
    )));
    let gen = |l: &Letter| oracle.element_named(l.name()).expect("free generator");
    let elem = |a: usize| DynElem::Product(vec![Syllable::Right(DynElem::Finite(a))]);
    let mut map = BTreeMap::new();
    for (i, a) in alphabet.iter().enumerate() {
        map.insert(x[i].clone(), gen(&x[i]));
        map.insert(
            y[i].clone(),
            oracle.multiply(&oracle.invert(&gen(&x[i])), &elem(*a)),
        );
    }
    for (ri, r) in identity_words.iter().enumerate() {
        let n = r.len();
        let mut current = gen(&lambdas[ri]);
        map.insert(delta[ri][n - 1].clone(), current.clone());
        for k in (0..n - 1).rev() {
            let yk = &map[&y[pos[&r[k]]]];
            let xk1 = &map[&x[pos[&r[k + 1]]]];
            current = oracle.multiply(&oracle.multiply(yk, xk1), &current);
            map.insert(delta[ri][k].clone(), current.clone());
        }
    }
    GroupHom::new(oracle, map)
}

impl Synthesis {
    pub fn kind(&self, l: &Letter) -> Option<LetterKind> {
        self.kinds.get(l).copied()
    }

    /// `ā = x_a y_a`, extended to words over `A`.
    pub fn bar(&self, elems: &[usize]) -> Word {
        let idx: BTreeMap<usize, usize> = self
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, a)| (*a, i))
            .collect();
        elems
            .iter()
            .flat_map(|a| [self.x[idx[a]].positive(), self.y[idx[a]].positive()])
            .collect()
    }

    /// Product of `x̄ x̄'` over nonempty words of length at most 4 over `A`,
    /// in length then lexicographic order.
    pub fn witness_word(&self) -> Word {
        let mut out = Vec::new();
        let n = self.alphabet.len();
        for len in 1..=4usize {
            let count = n.pow(len as u32);
            for code in 0..count {
                let mut digits = vec![0; len];
                let mut c = code;
                for d in digits.iter_mut().rev() {
                    *d = c % n;
                    c /= n;
                }
                let elems: Vec<usize> = digits.iter().map(|i| self.alphabet[*i]).collect();
                let bar = self.bar(&elems);
                out.extend(bar.iter().cloned());
                out.extend(bar.invert().iter().cloned());
            }
        }
        Word::from_symbols(out)
    }

    /// Number of `x̄ x̄'` factors in the witness word.
    pub fn witness_factor_count(&self) -> usize {
        let n = self.alphabet.len();
        (1..=4u32).map(|l| n.pow(l)).sum()
    }
}

pub fn witness_word(table: &FiniteGroupTable) -> Result<Word, SynthError> {
    Ok(synthesize(table)?.witness_word())
}

/// Core vertex layout of `Ω`.
struct OmegaLayout {
    n: usize,
    a: usize,
    r: usize,
}

impl OmegaLayout {
    fn v(&self, g: usize) -> Vertex {
        g
    }
    fn u(&self, g: usize, ai: usize) -> Vertex {
        self.n + g * self.a + ai
    }
    fn t(&self, g: usize, ri: usize) -> Vertex {
        self.n + self.n * self.a + g * self.r + ri
    }
    fn core(&self) -> usize {
        self.n + self.n * self.a + self.n * self.r
    }
}

/// The graph `Ω` with `SΓ(1)` approximated at the given budget: vertices
/// `v_g`, `u_{g,a}`, `t_{g,r}`, edges `v_g -x_a-> u_{g,a} -y_a-> v_{ga}`
/// and `u_{g r_1…r_{k-1}, r_k} -δ_{r,k}-> t_{g,r}`, with a copy of `SΓ(1)`
/// at every `u` and `t`. Rooted at `v_1`.
pub fn omega_graph(s: &Synthesis, rounds: usize) -> Result<InverseWordGraph, SynthError> {
    omega_graph_with(s, rounds, ExpansionLimits::default())
}

pub fn omega_graph_with(
    s: &Synthesis,
    rounds: usize,
    limits: ExpansionLimits,
) -> Result<InverseWordGraph, SynthError> {
    let t = &s.table;
    let layout = OmegaLayout {
        n: t.order(),
        a: s.alphabet.len(),
        r: s.identity_words.len(),
    };
    let mut raw = RawGraph::new(layout.core());
    for g in 0..t.order() {
        for (ai, a) in s.alphabet.iter().enumerate() {
            raw.add_edge(layout.v(g), s.x[ai].clone(), layout.u(g, ai));
            raw.add_edge(
                layout.u(g, ai),
                s.y[ai].clone(),
                layout.v(t.multiply(g, *a)),
            );
        }
        for (ri, r) in s.identity_words.iter().enumerate() {
            let mut h = g;
            for (k, a) in r.iter().enumerate() {
                let ai = s
                    .alphabet
                    .iter()
                    .position(|b| b == a)
                    .expect("letters of R are in A");
                raw.add_edge(layout.u(h, ai), s.delta[ri][k].clone(), layout.t(g, ri));
                h = t.multiply(h, *a);
            }
        }
    }
    let unit = approximate_with(&s.presentation, &Word::empty(), rounds, limits)?.graph;
    let mut attach = Vec::new();
    for g in 0..t.order() {
        attach.extend((0..layout.a).map(|ai| layout.u(g, ai)));
    }
    for g in 0..t.order() {
        attach.extend((0..layout.r).map(|ri| layout.t(g, ri)));
    }
    for v in &attach {
        let offset = unit.append_to(&mut raw);
        raw.identify(offset + unit.root(), *v);
    }
    raw.set_root(layout.v(t.identity()));
    let expected_vertices = raw.vertex_count() - attach.len();
    let expected_edges = raw.edge_count();
    let folded = raw.fold();
    if folded.graph.vertex_count() != expected_vertices
        || folded.graph.edge_count() != expected_edges
    {
        return Err(SynthError::OmegaNotDeterministic);
    }
    Ok(folded.graph)
}

/// The two structural properties of `SΓ(1)` for the synthesized monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootProperties {
    /// Vertices other than the root all of whose edges are x-out or y-in,
    /// plus the root if it fails that test.
    pub root_characterization_violations: Vec<Vertex>,
    /// Vertices with an x-edge in and a y-edge out.
    pub x_in_y_out: Vec<Vertex>,
}

impl RootProperties {
    pub fn holds(&self) -> bool {
        self.root_characterization_violations.is_empty() && self.x_in_y_out.is_empty()
    }
}

pub fn root_properties(s: &Synthesis, g: &InverseWordGraph) -> RootProperties {
    let kind = |l: &Letter| s.kind(l);
    let only_x_out_y_in = |v: Vertex| {
        g.out_edges(v)
            .iter()
            .all(|(l, _)| kind(l) == Some(LetterKind::X))
            && g.in_edges(v)
                .iter()
                .all(|(l, _)| kind(l) == Some(LetterKind::Y))
    };
    let root_characterization_violations = g
        .vertices()
        .filter(|&v| (v == g.root()) != only_x_out_y_in(v))
        .collect();
    let x_in_y_out = g
        .vertices()
        .filter(|&v| {
            g.in_edges(v)
                .iter()
                .any(|(l, _)| kind(l) == Some(LetterKind::X))
                && g.out_edges(v)
                    .iter()
                    .any(|(l, _)| kind(l) == Some(LetterKind::Y))
        })
        .collect();
    RootProperties {
        root_characterization_violations,
        x_in_y_out,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisReport {
    pub group_order: usize,
    pub rounds: usize,
    pub generators: usize,
    pub relators: usize,
    pub witness_length: usize,
    pub identity_vertices: usize,
    pub witness_vertices: usize,
    pub omega_vertices: usize,
    /// (a) root characterization and no x-in/y-out vertex in `SΓ(1)`.
    pub root_properties: RootProperties,
    pub check_a: bool,
    /// (b) `SΓ(1)` has only the identity automorphism.
    pub identity_automorphisms: usize,
    pub check_b: bool,
    /// (c) root balls of `SΓ(w)` and `Ω` map into each other and agree.
    pub ball_radius: usize,
    pub morphism_to_omega: bool,
    pub morphism_from_omega: bool,
    pub balls_isomorphic: bool,
    pub check_c: bool,
    /// (d) the group image separates the right units at this budget.
    pub roi: RoiReport,
    pub check_d: bool,
    pub omega_automorphisms: usize,
}

impl SynthesisReport {
    pub fn passed(&self) -> bool {
        self.check_a && self.check_b && self.check_c && self.check_d
    }
}

pub fn verify_synthesis(
    table: &FiniteGroupTable,
    rounds: usize,
) -> Result<SynthesisReport, SynthError> {
    let s = synthesize(table)?;
    let p = s.presentation.clone();
    verify_synthesis_with(&s, &p, rounds)
}

/// Runs the checks with `p` standing in for the synthesized presentation
/// when approximating `SΓ(1)` and `SΓ(w)`; `Ω` always comes from `s`.
/// Passing a corrupted presentation is a negative control.
pub fn verify_synthesis_with(
    s: &Synthesis,
    p: &Presentation,
    rounds: usize,
) -> Result<SynthesisReport, SynthError> {
    let limits = ExpansionLimits::default();
    let unit = approximate_with(p, &Word::empty(), rounds, limits)?.graph;
    let root_properties = root_properties(s, &unit);
    let identity_automorphisms = automorphisms(&unit).len();

    let w = s.witness_word();
    let sw = approximate_with(p, &w, rounds, limits)?.graph;
    let omega = omega_graph_with(s, rounds, limits)?;
    let radius = rounds + 1;
    let (ball_w, _) = sw.ball(sw.root(), radius);
    let (ball_o, _) = omega.ball(omega.root(), radius);
    let to = find_morphism(&ball_w, &ball_o, (ball_w.root(), ball_o.root())).is_ok();
    let from = find_morphism(&ball_o, &ball_w, (ball_o.root(), ball_w.root())).is_ok();
    let iso = canonical_form(&ball_w.rerooted(ball_w.root(), None), ball_w.root())
        == canonical_form(&ball_o.rerooted(ball_o.root(), None), ball_o.root());

    let roi = match validate_hom(p, &s.hom) {
        Ok(()) => roi_scan(&unit, &s.hom, rounds).map_err(SynthError::Hom)?,
        Err(e) => return Err(SynthError::Hom(e)),
    };
    let omega_automorphisms = automorphisms(&omega).len();
    Ok(SynthesisReport {
        group_order: s.table.order(),
        rounds,
        generators: s.presentation.generators().len(),
        relators: s.presentation.relators().len(),
        witness_length: w.len(),
        identity_vertices: unit.vertex_count(),
        witness_vertices: sw.vertex_count(),
        omega_vertices: omega.vertex_count(),
        check_a: root_properties.holds(),
        root_properties,
        check_b: identity_automorphisms == 1,
        identity_automorphisms,
        ball_radius: radius,
        morphism_to_omega: to,
        morphism_from_omega: from,
        balls_isomorphic: iso,
        check_c: to && from && iso,
        check_d: roi.is_injective(),
        roi,
        omega_automorphisms,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupWordReport {
    pub word: String,
    pub rounds: usize,
    pub units: Vec<String>,
    pub generator: String,
    pub generator_right_unit: Verdict,
    pub generator_left_unit: Verdict,
    /// The construction needs the generator to be neither a left nor a
    /// right unit; this says what was certified about that.
    pub caveat: String,
    pub block_count: usize,
    pub expected_block_count: usize,
    pub automorphism_order: usize,
    /// Whether the unit images are closed under products at this budget.
    pub units_form_subgroup: bool,
}

/// The word `∏ u_i v v' u_i'` whose D-class carries the subgroup of units
/// `{u_i}` as a maximal subgroup.
pub fn finite_subgroup_word(
    p: &Presentation,
    units: &[Word],
    v: &Letter,
    rounds: usize,
) -> Result<(Word, SubgroupWordReport), SynthError> {
    if !p.has_generator(v) {
        return Err(SynthError::NotAGenerator(v.name().to_string()));
    }
    let classifier = Classifier::new(p, rounds)?;
    for u in units {
        if !classifier.is_unit(u)?.is_yes() {
            return Err(SynthError::UncertifiedUnit(u.to_string()));
        }
    }
    let vw = Word::from_symbols(vec![Symbol::new(v.clone(), Sign::Positive)]);
    let right = classifier.is_right_unit(&vw)?.certificate.verdict;
    let left = classifier.is_left_unit(&vw)?.certificate.verdict;
    let caveat = if right == Verdict::Unknown && left == Verdict::Unknown {
        format!("{v} is not certified to be a unit on either side; that it is neither is assumed")
    } else {
        format!("{v} is certified to be a one-sided unit, so the construction does not apply")
    };
    let vv = Word::from_symbols(vec![v.positive(), v.inverse()]);
    let mut out = Vec::new();
    for u in units {
        out.extend(u.iter().cloned());
        out.extend(vv.iter().cloned());
        out.extend(u.invert().iter().cloned());
    }
    let word = Word::from_symbols(out);

    let (cover, action) = block_action_with(p, &word, rounds, ExpansionLimits::default())?;
    let g = &classifier.approximation().graph;
    let ends: BTreeSet<Option<Vertex>> = units.iter().map(|u| g.read(g.root(), u)).collect();
    let units_form_subgroup = units.iter().all(|a| {
        units
            .iter()
            .all(|b| ends.contains(&g.read(g.root(), &a.concat(b))))
    });
    let report = SubgroupWordReport {
        word: word.to_string(),
        rounds,
        units: units.iter().map(Word::to_string).collect(),
        generator: v.name().to_string(),
        generator_right_unit: right,
        generator_left_unit: left,
        caveat,
        block_count: cover.blocks.len(),
        expected_block_count: 1 + units.len(),
        automorphism_order: action.order,
        units_form_subgroup,
    };
    Ok((word, report))
}
