//! Realizability and counting for tropical curves in real 2-tori.
//!
//! A tropical curve in `S = ℝ²/Λ` is given by rational vertex lifts, integer
//! weight vectors, rational edge lengths and integer deck shifts. This crate
//! decides whether such a curve lifts to algebraic curves in the associated
//! family of complex tori, builds the multiplicative gluing data of the
//! central-fiber curve, and counts curves through point constraints.
//!
//! Module map:
//! - [`exactmath`]: big-integer matrices, Smith and Hermite forms.
//! - [`valuegroup`]: the multiplicative group holding σ and the gluing data.
//! - [`curve`]: the curve model, validation, subdivision, crossings.
//! - [`realize`]: the invariant σ and the realizability verdict.
//! - [`moduli`]: deformation ranks, rigidity, kernel orders, counts.
//! - [`prelog`]: the monomial gluing system and its solver.
//! - [`catalog`]: example curves and random generators.
//! - [`cli`]: the `tropabel` command-line front end.

pub mod catalog;
pub mod cli;
pub mod curve;
pub mod exactmath;
pub mod moduli;
pub mod prelog;
pub mod realize;
pub mod valuegroup;
