//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the resonator pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid geometry (overlapping spheres, degenerate panels, ...).
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// Invalid experiment configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A numerical method failed (ill-conditioned solve, stiff integration, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
