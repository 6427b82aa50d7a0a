// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form leakage estimates for the |11>-|20> two-level model.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{resample_theta, time_frame_invert, ControlTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageMethod {
    Fourier,
    ChiSum,
    LandauZener,
}

impl LeakageMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            LeakageMethod::Fourier => "fourier",
            LeakageMethod::ChiSum => "chi_sum",
            LeakageMethod::LandauZener => "landau_zener",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakagePrediction {
    pub pe: f64,
    /// Running value of chi after each step, when computed.
    pub chi_trace: Option<Vec<Complex64>>,
    pub method: LeakageMethod,
}

/// G(omega) = sum_n g[n] exp(-i omega n / (N - 1)), the transform of the
/// unit-duration normalized trajectory.
pub fn trajectory_transform(traj: &ControlTrajectory, omega: f64) -> Complex64 {
    crate::window::dtft_value(traj.g(), omega / (traj.len() - 1) as f64)
}

/// Frequency at which the transform is evaluated for lab duration `td`:
/// delta times the duration of the trajectory in the nonlinear frame.
pub fn transform_frequency(traj: &ControlTrajectory, td: f64, delta: f64) -> f64 {
    delta * td / traj.mean_sin()
}

/// |G(delta tau_d)|^2 / 4 for the normalized trajectory, ignoring the
/// angular excursion. This is the quantity the pulse designs bound.
pub fn normalized_leakage(traj: &ControlTrajectory, td: f64, delta: f64) -> f64 {
    trajectory_transform(traj, transform_frequency(traj, td, delta)).norm_sqr() / 4.0
}

/// Leakage of the physical trajectory theta~ = theta_ini + (theta_mid -
/// theta_ini) S(tau), i.e. the normalized value scaled by the squared
/// excursion.
pub fn analytic_leakage(traj: &ControlTrajectory, td: f64, delta: f64) -> LeakagePrediction {
    let excursion = traj.theta_mid() - traj.theta_ini();
    let pe = excursion * excursion * normalized_leakage(traj, td, delta);
    LeakagePrediction { pe: pe.clamp(0.0, 1.0), chi_trace: None, method: LeakageMethod::Fourier }
}

/// chi = sum_j -dtheta_j exp(-i phi_j) on a shared time grid, with phi_j the
/// phase accumulated before step j (midpoint omega per interval).
pub fn chi_accumulate(times: &[f64], theta: &[f64], omega: &[f64]) -> Result<LeakagePrediction> {
    if times.len() != theta.len() || times.len() != omega.len() || times.len() < 2 {
        return Err(Error::InvalidSpec("chi accumulation needs aligned grids of length >= 2".into()));
    }
    let mut chi = Complex64::new(0.0, 0.0);
    let mut phase = 0.0;
    let mut trace = Vec::with_capacity(times.len() - 1);
    for j in 0..times.len() - 1 {
        chi -= Complex64::from_polar(theta[j + 1] - theta[j], -phase);
        phase += 0.5 * (omega[j] + omega[j + 1]) * (times[j + 1] - times[j]);
        trace.push(chi);
    }
    let mag = chi.norm();
    if mag > 1.0 {
        return Err(Error::ChiSaturation(mag));
    }
    let pe = (0.5 * mag.asin()).sin().powi(2);
    Ok(LeakagePrediction { pe, chi_trace: Some(trace), method: LeakageMethod::ChiSum })
}

/// chi accumulation along the lab-time waveform produced by `traj` at
/// duration `td`, with omega(t) = delta / sin(theta(t)).
pub fn chi_for_trajectory(traj: &ControlTrajectory, td: f64, delta: f64, steps: usize) -> Result<LeakagePrediction> {
    let map = time_frame_invert(traj, td, delta)?;
    let times: Vec<f64> = (0..=steps).map(|k| td * k as f64 / steps as f64).collect();
    let theta = resample_theta(traj, &map, &times)?;
    let omega: Vec<f64> = theta.iter().map(|t| delta / t.sin()).collect();
    chi_accumulate(&times, &theta, &omega)
}

/// Linear sweep eps(t) = alpha t with coupling delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzParams {
    pub delta: f64,
    pub alpha: f64,
}

impl LzParams {
    pub fn new(delta: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && delta >= 0.0) {
            return Err(Error::InvalidSpec(format!("need alpha > 0 and delta >= 0, got {alpha}, {delta}")));
        }
        Ok(LzParams { delta, alpha })
    }

    fn ratio(&self) -> f64 {
        self.delta * self.delta / self.alpha
    }
}

/// exp(-pi delta^2 / (2 alpha)).
pub fn lz_probability(p: LzParams) -> f64 {
    (-PI * p.ratio() / 2.0).exp()
}

/// (pi^2 / 4) exp(-2 delta^2 / alpha), the Fourier estimate for the sweep.
pub fn lz_formula_pe(p: LzParams) -> f64 {
    PI * PI / 4.0 * (-2.0 * p.ratio()).exp()
}

/// log P_LZ - (pi / 4)(log P_eLZ - log(pi^2 / 4)); zero up to rounding.
pub fn lz_relation_residual(p: LzParams) -> f64 {
    let c = (PI * PI / 4.0).ln();
    lz_probability(p).ln() - PI / 4.0 * (lz_formula_pe(p).ln() - c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::{dpss, Pulse, SlepianSpec, Symmetry};

    #[test]
    fn lz_examples() {
        assert_eq!(lz_probability(LzParams::new(0.0, 1.0).unwrap()), 1.0);
        assert!((lz_probability(LzParams::new(1.0, 1e12).unwrap()) - 1.0).abs() < 1e-11);
        assert!((lz_probability(LzParams::new(1.0, 1.0).unwrap()) - (-PI / 2.0).exp()).abs() < 1e-15);
        assert!((lz_formula_pe(LzParams::new(0.0, 1.0).unwrap()) - PI * PI / 4.0).abs() < 1e-15);
        let p = LzParams::new(2f64.sqrt(), 1.0).unwrap();
        assert!((lz_formula_pe(p) - PI * PI / 4.0 * (-4.0f64).exp()).abs() < 1e-15);
        assert!(LzParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn chi_examples() {
        let one = chi_accumulate(&[0.0, 1.0], &[0.0, 0.1], &[0.0, 0.0]).unwrap();
        assert!((one.chi_trace.unwrap()[0].norm() - 0.1).abs() < 1e-15);
        let two = chi_accumulate(&[0.0, 1.0, 2.0], &[0.0, 0.1, 0.2], &[PI, PI, PI]).unwrap();
        assert!(two.chi_trace.unwrap()[1].norm() < 1e-15);
        assert!(matches!(chi_accumulate(&[0.0, 1.0], &[0.0, 1.5], &[0.0, 0.0]), Err(Error::ChiSaturation(_))));
    }

    #[test]
    fn flat_trajectory_has_no_leakage() {
        let s = dpss(SlepianSpec::from_nw(101, 2.9, 1).unwrap()).unwrap().pulse;
        let tr = ControlTrajectory::new(&s, 0.3, 0.3).unwrap();
        assert_eq!(analytic_leakage(&tr, 40.0, 0.25).pe, 0.0);
    }

    #[test]
    fn transform_at_zero_vanishes_for_antisymmetric_shapes() {
        let p = Pulse::new(vec![1.0, 2.0, 0.0, -2.0, -1.0], Symmetry::Antisymmetric, "x").unwrap();
        let tr = ControlTrajectory::new(&p, 0.2, 1.0).unwrap();
        assert!(trajectory_transform(&tr, 0.0).norm() < 1e-15);
    }
}
