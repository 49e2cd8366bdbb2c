//! Exact-arithmetic engine for Fock-space realizations of multi-dimensional
//! Virasoro and gauge algebras on p-jet trajectories.

pub mod currents;
pub mod dgro;
pub mod dro;
pub mod error;
pub mod fields;
pub mod fock;
pub mod gauge_fix;
pub mod gl_reps;
pub mod harness;
pub mod jets;
pub mod linalg;
pub mod multi_index;
pub mod poly;
pub mod realization;
pub mod scalar;
pub mod serde_util;
pub mod spectrum;

pub use error::{EngineError, Result};
pub use scalar::{GaussianRational, Rational};
