//! Numerical toolkit for systems of subwavelength resonators.
//!
//! The crate computes capacitance matrices of sphere systems from first
//! principles (collocation boundary element method), assembles the
//! time-modulated Hill system driven by periodic material parameters,
//! recasts it as a Hermitian Hamiltonian via a first-order periodic
//! transformation, and builds the dilute-regime tight-binding approximant
//! of the static Hamiltonian — including a quantitative diagnostic showing
//! that nearest-neighbour truncation of the hopping matrix is not valid.
//!
//! # Module map
//!
//! - [`geometry`] — sphere systems, icosphere meshing, dilute scaling
//! - [`capacitance`] — single-layer operator, densities, capacitance matrix
//! - [`modulation`] — Fourier material laws, `W` matrices, Hill coefficient `M(t)`
//! - [`floquet`] — Hill integration, monodromy, quasifrequencies
//! - [`hamiltonian`] — static Hamiltonian, modulated transform, reconstruction
//! - [`tightbinding`] — interaction matrix, approximant spectra, truncation ratio
//! - [`cli`] — JSON-config driven commands emitting CSV (see the `reslab` binary)
//!
//! Each major capability has a runnable example under `examples/`; the
//! acceptance suite lives in `tests/acceptance.rs`.

pub mod capacitance;
pub mod cli;
pub mod config;
pub mod error;
pub mod floquet;
pub mod geometry;
pub mod hamiltonian;
pub mod linalg;
pub mod modulation;
pub mod ode;
pub mod tightbinding;

pub use error::{Error, Result};
