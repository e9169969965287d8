//! Quantum discord of a dipolar nuclear spin chain coupled to an impurity spin.
//!
//! The numeric pipeline ([`model`] -> [`qinfo`] with an [`optimizer`]) works
//! for chains of any length that fit in memory; [`analytic`] holds the closed
//! forms for the two-spin chain that the pipeline is checked against.
//! Everything is generic over the real scalar type; the aliases below fix it
//! to `f64`.

pub mod analytic;
pub mod density;
pub mod error;
pub mod linalg;
pub mod model;
pub mod optimizer;
pub mod qinfo;
pub mod scalar;
pub mod scenario;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition};
pub use model::{Couplings, SystemSpec};
pub use optimizer::{EvolutionaryStrategy, GridConfig, GridSearch, Minimizer, OptimizerConfig};
pub use qinfo::{BlochVector, DiscordResult};
pub use scalar::Real;

pub type Matrix = ComplexMatrix<f64>;
pub type Density = DensityMatrix<f64>;
pub type Bloch = BlochVector<f64>;
pub type Spec = SystemSpec<f64>;
pub type Discord = DiscordResult<f64>;
