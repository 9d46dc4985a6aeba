//! Hyperbolic gluing equations on triangulated oriented 3-manifolds.
//!
//! The crate builds the edge consistency equations of a triangulation,
//! manufactures solutions by spinning an equivariant vertex placement out of
//! a `PSL(2,C)` representation of the fundamental group, reconstructs the
//! holonomy representation associated to a solution, and computes volumes.

pub mod fundamental_group;
pub mod geometry;
pub mod gluing;
pub mod holonomy;
pub mod par;
pub mod rng;
pub mod spinning;
pub mod tolerances;
pub mod triangulation;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("representation rejected: {0}")]
    BadRepresentation(String),
    #[error("solution rejected: {0}")]
    BadSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
