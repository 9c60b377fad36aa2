//! `entdist`: one-shot entanglement-distillation quantities on explicit
//! finite-dimensional quantum states.
//!
//! The crate computes, on dense complex matrices small enough to
//! eigendecompose at your desk:
//!
//! - closed-form distance measures and entropies (fidelity, trace distance,
//!   von Neumann / relative / Rényi entropies, min-entropy, coherent and
//!   zero-coherent information),
//! - smoothed quantities over fidelity and operator balls (smoothed
//!   min-entropy via an exact cap solver, state- and operator-smoothed
//!   zero-coherent information),
//! - one-shot distillation bounds: the pure-state sandwich, ensemble
//!   bounds with average-fidelity budgets, and the one-shot entanglement
//!   of assistance via an ensemble-decomposition search,
//! - information-spectrum diagnostics at finite block length,
//! - brute-force oracles that independently verify every solver at small
//!   dimension, plus a randomized inequality test harness.
//!
//! Everything is a pure function of its inputs; randomness enters only
//! through explicit seeds, so results are reproducible bit for bit.

#![forbid(unsafe_code)]

pub mod decomposition;
pub mod distillation;
pub mod entropy;
pub mod linalg;
pub mod oracles;
pub mod random;
pub mod smoothing;
pub mod spectrum;
pub mod states;

use thiserror::Error;

/// Errors surfaced by state construction and the bound solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystem { index: usize, count: usize },

    #[error("not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace {got:.6} violates the {expected} invariant")]
    InvalidTrace { got: f64, expected: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
