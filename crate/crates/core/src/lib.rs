//! Fortified global-optimization test functions and a replicate benchmark
//! harness.
//!
//! The crate provides box-bounded test functions with registries of their
//! known optima ([`test_functions`]), a way to make multi-global-optimum
//! functions genuinely hard by subtracting a compactly-supported radial bump
//! at one optimum ([`fortification`]), a differential-evolution optimizer
//! with exact evaluation accounting and an optional quasi-Newton polish
//! ([`de_optimizer`]), a replicate harness that estimates failure
//! probabilities over large run counts ([`replicate_harness`]), and an
//! analysis of the multiple-short-runs restart strategy
//! ([`multirun_analysis`]).

// Negated comparisons in validation paths double as NaN guards: `!(a < b)`
// rejects NaN inputs where `a >= b` would accept them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod de_optimizer;
pub mod error;
pub mod fortification;
pub mod multirun_analysis;
pub mod replicate_harness;
pub mod test_functions;

pub use error::{Error, Result};
