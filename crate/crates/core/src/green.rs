//! Green's classes of the identity, read off an approximation of `SΓ(1)`.
//!
//! A word is a right unit when it labels a path from the root of `SΓ(1)`, a
//! left unit when its inverse does, and lies in the D-class of 1 when it
//! factors as a left unit times a right unit. All positive answers are
//! certificates; negative answers are `Unknown`.

use serde::Serialize;
use thiserror::Error;

use crate::stephen::{
    approximate_with, Approximation, Certificate, ExpansionLimits, StephenError, Witness,
};
use crate::words::{Letter, Presentation, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GreenError {
    #[error(transparent)]
    Stephen(#[from] StephenError),
    #[error("{0:?} is not a generator")]
    NotAGenerator(String),
    #[error("internal invariant breached: {0}")]
    InvariantBreach(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GreenClass {
    R1,
    L1,
    H1,
    D1,
    J1,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub class: GreenClass,
    pub certificate: Certificate,
}

impl ClassificationResult {
    pub fn is_yes(&self) -> bool {
        self.certificate.is_yes()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DichotomyReport {
    pub generator: String,
    pub right_unit: Certificate,
    pub left_unit: Certificate,
    pub d1: Certificate,
}

/// Classifies words against one cached approximation of `SΓ(1)`.
#[derive(Debug, Clone)]
pub struct Classifier {
    identity: Approximation,
}

impl Classifier {
    pub fn new(p: &Presentation, rounds: usize) -> Result<Self, GreenError> {
        Self::with_limits(p, rounds, ExpansionLimits::default())
    }

    pub fn with_limits(
        p: &Presentation,
        rounds: usize,
        limits: ExpansionLimits,
    ) -> Result<Self, GreenError> {
        Ok(Classifier {
            identity: approximate_with(p, &Word::empty(), rounds, limits)?,
        })
    }

    /// Wraps an existing approximation of `SΓ(1)`.
    pub fn from_approximation(identity: Approximation) -> Self {
        assert!(
            identity.word.is_empty(),
            "classifier needs an approximation of SΓ(1)"
        );
        Classifier { identity }
    }

    pub fn approximation(&self) -> &Approximation {
        &self.identity
    }

    pub fn rounds(&self) -> usize {
        self.identity.rounds
    }

    fn check(&self, w: &Word) -> Result<(), GreenError> {
        self.identity
            .presentation
            .check_word(w)
            .map_err(|e| GreenError::Stephen(e.into()))
    }

    fn read_from_root(&self, w: &Word) -> Option<usize> {
        let g = &self.identity.graph;
        g.read(g.root(), w)
    }

    fn result(&self, class: GreenClass, hit: Option<Witness>) -> ClassificationResult {
        let certificate = match hit {
            Some(w) => Certificate::yes(self.rounds(), Some(w)),
            None => Certificate::unknown(self.rounds()),
        };
        ClassificationResult { class, certificate }
    }

    pub fn is_right_unit(&self, w: &Word) -> Result<ClassificationResult, GreenError> {
        self.check(w)?;
        Ok(self.result(
            GreenClass::R1,
            self.read_from_root(w).map(Witness::Endpoint),
        ))
    }

    pub fn is_left_unit(&self, w: &Word) -> Result<ClassificationResult, GreenError> {
        self.check(w)?;
        Ok(self.result(
            GreenClass::L1,
            self.read_from_root(&w.invert()).map(Witness::Endpoint),
        ))
    }

    pub fn is_unit(&self, w: &Word) -> Result<ClassificationResult, GreenError> {
        let both = self.is_right_unit(w)?.is_yes() && self.is_left_unit(w)?.is_yes();
        Ok(self.result(
            GreenClass::H1,
            both.then(|| Witness::Endpoint(self.read_from_root(w).unwrap())),
        ))
    }

    /// Readable from some vertex of `SΓ(1)`.
    pub fn in_j1(&self, w: &Word) -> Result<ClassificationResult, GreenError> {
        self.check(w)?;
        let g = &self.identity.graph;
        let start = g.vertices().find(|v| g.read(*v, w).is_some());
        Ok(self.result(GreenClass::J1, start.map(Witness::Endpoint)))
    }

    /// Membership in the D-class of 1.
    ///
    /// Searches literal splits `w = u v` with `u` a left unit and `v` a right
    /// unit, smallest `u` first, and independently looks for a `w`-path
    /// through the root. On a fixed graph the two searches succeed together;
    /// a disagreement is an internal error.
    pub fn in_d1(&self, w: &Word) -> Result<ClassificationResult, GreenError> {
        self.check(w)?;
        let split = (0..=w.len()).find(|&i| {
            self.read_from_root(&w.prefix(i).invert()).is_some()
                && self.read_from_root(&w.suffix_from(i)).is_some()
        });
        let through = self.path_through_root(w);
        if split.is_some() != through.is_some() {
            return Err(GreenError::InvariantBreach(format!(
                "split search ({split:?}) and through-root search ({through:?}) disagree on {w}"
            )));
        }
        Ok(self.result(GreenClass::D1, split.map(Witness::Split)))
    }

    /// A start vertex and position at which a `w`-path visits the root.
    pub fn path_through_root(&self, w: &Word) -> Option<(usize, usize)> {
        let g = &self.identity.graph;
        let root = g.root();
        g.vertices().find_map(|v| {
            let trace = g.trace(v, w);
            if trace.len() != w.len() + 1 {
                return None;
            }
            trace.iter().position(|u| *u == root).map(|at| (v, at))
        })
    }

    /// Through-root witness as a classification result.
    pub fn in_d1_by_path(&self, w: &Word) -> Result<ClassificationResult, GreenError> {
        self.check(w)?;
        Ok(self.result(
            GreenClass::D1,
            self.path_through_root(w)
                .map(|(start, at)| Witness::ThroughRoot { start, at }),
        ))
    }

    /// One-sided verdicts for a generator. A generator in the D-class of 1
    /// must be a left or a right unit.
    pub fn generator_dichotomy(&self, g: &Letter) -> Result<DichotomyReport, GreenError> {
        if !self.identity.presentation.has_generator(g) {
            return Err(GreenError::NotAGenerator(g.name().to_string()));
        }
        let w = Word::from_symbols(vec![g.positive()]);
        let right = self.is_right_unit(&w)?.certificate;
        let left = self.is_left_unit(&w)?.certificate;
        let d1 = self.in_d1(&w)?.certificate;
        if d1.is_yes() && !right.is_yes() && !left.is_yes() {
            return Err(GreenError::InvariantBreach(format!(
                "generator {g} is in D1 but neither a left nor a right unit"
            )));
        }
        Ok(DichotomyReport {
            generator: g.name().to_string(),
            right_unit: right,
            left_unit: left,
            d1,
        })
    }
}

pub fn is_right_unit(
    p: &Presentation,
    w: &Word,
    rounds: usize,
) -> Result<ClassificationResult, GreenError> {
    Classifier::new(p, rounds)?.is_right_unit(w)
}

pub fn is_left_unit(
    p: &Presentation,
    w: &Word,
    rounds: usize,
) -> Result<ClassificationResult, GreenError> {
    Classifier::new(p, rounds)?.is_left_unit(w)
}

pub fn is_unit(
    p: &Presentation,
    w: &Word,
    rounds: usize,
) -> Result<ClassificationResult, GreenError> {
    Classifier::new(p, rounds)?.is_unit(w)
}

pub fn in_d1(
    p: &Presentation,
    w: &Word,
    rounds: usize,
) -> Result<ClassificationResult, GreenError> {
    Classifier::new(p, rounds)?.in_d1(w)
}

pub fn generator_dichotomy(
    p: &Presentation,
    g: &Letter,
    rounds: usize,
) -> Result<DichotomyReport, GreenError> {
    Classifier::new(p, rounds)?.generator_dichotomy(g)
}
