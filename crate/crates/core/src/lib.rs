//! Computational operator theory on the symmetrized bidisc.

pub mod error;
pub mod fundamental;
pub mod gamma_pairs;
pub mod generators;
pub mod geometry;
pub mod model_theory;
pub mod numerics;
pub mod varieties;
pub mod von_neumann;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, Tolerances};
