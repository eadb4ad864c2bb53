//! Exact verification kernel for the CR twistor space of a quaternionic
//! contact manifold: the graded algebras `sp(Q) ⊂ su(Q~)`, the Levi factor
//! actions, the algebra behind the CR structure identification, and a
//! polynomial exterior calculus on the flat model.

pub mod check;
pub mod correspondence;
pub mod embedding;
pub mod error;
pub mod flat;
pub mod forms;
pub mod g0;
pub mod graded;
pub mod matrix;
pub mod report;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
