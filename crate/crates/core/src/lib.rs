//! Exact evaluation of honeycomb spin-networks under Kauffman–Lins recoupling
//! theory, plus the cycle-coloring phase-space pipeline built on top of it.

pub mod colorings;
pub mod error;
pub mod evaluator;
pub mod lattice;
pub mod phase_space;
pub mod recoupling;
pub mod scalar;
pub mod tl_oracle;

pub use error::{Error, Result};
pub use recoupling::{is_admissible, Engine, Recoupling, SpinColor};
pub use scalar::{QParam, QScalar, Scalar};
