//! Computations with finitely presented special inverse monoids.
//!
//! The crate approximates Schützenberger graphs by Stephen's procedure,
//! classifies words relative to the Green's classes of the identity, checks
//! injectivity of the maximal group image on the right units, computes block
//! covers with their automorphism actions, and synthesizes presentations
//! whose group of units is trivial but which carry a prescribed finite
//! maximal subgroup.
//!
//! Every positive answer is a certificate that stays valid at larger
//! budgets. Negative answers are never issued from a finite approximation;
//! they are reported as `Unknown`.

pub mod blocks;
pub mod gimage;
pub mod green;
pub mod igraph;
pub mod stephen;
pub mod synth;
pub mod words;

pub use igraph::{InverseWordGraph, Vertex};
pub use stephen::{Approximation, Certificate, Verdict};
pub use words::{Letter, Presentation, Sign, Symbol, Word};
