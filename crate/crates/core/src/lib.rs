//! Approximating propositional Hilbert calculi by finite-valued matrices.
//!
//! The crate decides whether a matrix is a cover of a calculus (every axiom a
//! tautology, every rule preserving designated values valuation by
//! valuation), builds product, compressed, quotient and Kripke-derived
//! matrices, compares matrices by their tautology sets through separating
//! formulas, and emits and checks underivability certificates.

pub mod calculus;
pub mod kripke;
pub mod lang;
pub mod matrix;
pub mod normality;
pub mod odometer;
pub mod search;
pub mod workspace;

pub use calculus::{Calculus, Derivation, Rule};
pub use kripke::KripkeModel;
pub use lang::{Formula, Signature, Substitution};
pub use matrix::{Matrix, Tautology, Valuation};
pub use search::{Budget, Certificate};
