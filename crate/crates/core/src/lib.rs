// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Flux-pulse design and simulation for adiabatic controlled-phase gates
//! between two fixed-coupling transmons.
//!
//! The crate is organised as a pipeline:
//!
//! 1. [`window`] designs a finite-length antisymmetric pulse (second Slepian
//!    sequence or an equiripple Chebyshev design).
//! 2. [`trajectory`] normalizes the pulse into a mixing-angle trajectory and
//!    maps it to detuning, qubit frequency and external flux waveforms.
//! 3. [`leakage`] predicts the leakage of a trajectory in closed form.
//! 4. [`sim`] propagates the two-transmon Hamiltonian and extracts the
//!    conditional phase, leakage and average gate fidelity.
//! 5. [`calibration`] scans duration and amplitude, extracts the pi contour
//!    and picks operating points.
//! 6. [`hardware`] applies sampling and bandwidth limits to a waveform.
//!
//! [`presets`] pins the designs and windows of the standard comparisons.

pub mod calibration;
pub mod error;
pub mod hardware;
pub mod interp;
pub mod io;
pub mod leakage;
pub mod presets;
pub mod sim;
pub mod trajectory;
pub mod window;

pub use error::{Error, Result};

/// Converts a frequency in GHz to an angular frequency in rad/ns.
pub fn ghz_to_radns(f_ghz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_ghz
}

/// Converts an angular frequency in rad/ns to GHz.
pub fn radns_to_ghz(w: f64) -> f64 {
    w / (2.0 * std::f64::consts::PI)
}

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
