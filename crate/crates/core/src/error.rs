// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every stage of the design and simulation pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A specification or argument violates its documented contract.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// A sequence that should carry a symmetry does not.
    #[error("symmetry violation: {0}")]
    Symmetry(String),

    #[error("symmetric eigensolver did not converge for {dim}x{dim} matrix (diagonal {diag:.3e}, frobenius norm {frobenius:.3e})")]
    Eigensolver {
        dim: usize,
        diag: f64,
        frobenius: f64,
    },

    /// The Remez exchange stopped before the extremal errors levelled out.
    #[error("remez exchange did not converge after {iterations} iterations (relative spread {spread:.3e})")]
    RemezNonConvergence {
        iterations: usize,
        spread: f64,
        extremal_set: Vec<f64>,
    },

    /// A pulse whose half-sum is zero cannot be normalized into a trajectory.
    #[error("degenerate pulse: {0}")]
    DegeneratePulse(String),

    /// A value left the domain on which a transformation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested qubit frequency is outside what the flux map can reach.
    #[error("frequency {requested:.6} rad/ns outside achievable band [{min:.6}, {max:.6}] rad/ns")]
    FrequencyRange { requested: f64, min: f64, max: f64 },

    /// |chi| exceeded one, so the geometric leakage estimate no longer applies.
    #[error("chi accumulation saturated (|chi| = {0:.4}); trajectory is outside the adiabatic regime")]
    ChiSaturation(f64),

    #[error("hamiltonian is not hermitian at t = {t:.6} (max asymmetry {residual:.3e})")]
    NonHermitian { t: f64, residual: f64 },

    /// The phase surface crosses the target more than once along amplitude.
    #[error("ambiguous pi crossing at durations {0:?}")]
    AmbiguousContour(Vec<f64>),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}
