//! Multiplicative metric spaces and fixed points of multiplicative
//! contractions.
//!
//! A multiplicative metric `d` satisfies `d >= 1`, `d(x, y) = 1` iff `x = y`,
//! symmetry, and `d(x, z) <= d(x, y) · d(y, z)`. Every `d` is `e^ρ` for an
//! ordinary metric `ρ`, and this crate works with `ρ = ln d` throughout:
//! distances near 1 are where convergence lives, and logs keep them exact.

pub mod cli;
pub mod error;
pub mod expr;
pub mod fixed_point;
pub mod json;
pub mod maps;
pub mod metric;
pub mod problem;
pub mod sampler;
pub mod sequence;
pub mod space;
pub mod verifier;

pub use error::{Error, Result};
pub use fixed_point::{
    ContractionKind, ContractionSpec, IterationTrace, SelfMap, SolverConfig, SolverReport,
    TraceStep,
};
pub use metric::{MulDistance, MultiplicativeMetric};
