//! Sparse recovery under an L1 residual constraint with the Lp quasi-norm objective.

pub mod config;
pub mod error;
pub mod experiments;
pub mod gen;
pub mod instance;
pub mod linalg;
pub mod npg;
pub mod oracle;
pub mod prox;
pub mod simplex;
pub mod smoothing;
pub mod spel1;
pub mod verify;

pub use config::{NpgParams, SolverConfig};
pub use error::{Error, Result};
pub use instance::{Norm, ProblemInstance, SupportSet};
pub use smoothing::SmoothingParams;
