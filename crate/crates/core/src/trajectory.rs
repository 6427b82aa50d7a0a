// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! From a designed pulse to the physical flux waveform.
//!
//! The chain is g -> theta~(tau) -> theta(t) -> epsilon(t) -> omega1(t) ->
//! flux(t). The pulse is first normalized into a control trajectory, whose
//! integral gives the mixing angle in the nonlinear frame `tau`. Mapping
//! `tau` back to lab time uses dt = sin(theta~) dtau.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::sim::TransmonPair;
use crate::window::{Pulse, Symmetry, SYMMETRY_TOL};

/// Minimum number of time steps accepted by [`build_physical_pulse`].
pub const MIN_STEPS: usize = 200;

/// Normalized antisymmetric control trajectory and its mixing-angle profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlTrajectory {
    g: Vec<f64>,
    /// Integrated shape, 0 at both ends and 1 at the middle (odd N).
    profile: Vec<f64>,
    theta_ini: f64,
    theta_mid: f64,
    theta_tilde: Vec<f64>,
    label: String,
}

impl ControlTrajectory {
    /// Normalizes an antisymmetric pulse so that its first half sums to one.
    ///
    /// For odd N the first half includes the (zero) centre sample. The
    /// profile is the left Riemann sum of `g` over the first half, mirrored
    /// onto the second half so that theta~ is exactly symmetric.
    pub fn new(pulse: &Pulse, theta_ini: f64, theta_mid: f64) -> Result<Self> {
        let x = pulse.samples();
        let n = x.len();
        if pulse.symmetry() != Symmetry::Antisymmetric {
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let worst = (0..n).map(|i| (x[i] + x[n - 1 - i]).abs()).fold(0.0, f64::max);
            if scale == 0.0 || worst > SYMMETRY_TOL * scale {
                return Err(Error::Symmetry(format!(
                    "control trajectory needs an antisymmetric pulse (residual {worst:e})"
                )));
            }
        }
        let half = (n + 1) / 2;
        let sum: f64 = x[..half].iter().sum();
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(sum.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::DegeneratePulse(format!(
                "half-sum {sum:e} cannot be normalized"
            )));
        }
        let mut g: Vec<f64> = x.iter().map(|v| v / sum).collect();
        // antisymmetrize exactly; the centre of an odd pulse is set to zero
        for i in 0..n / 2 {
            let a = 0.5 * (g[i] - g[n - 1 - i]);
            g[i] = a;
            g[n - 1 - i] = -a;
        }
        if n % 2 == 1 {
            g[n / 2] = 0.0;
        }
        let mut profile = vec![0.0; n];
        for i in 1..half {
            profile[i] = profile[i - 1] + g[i - 1];
        }
        for i in half..n {
            profile[i] = profile[n - 1 - i];
        }
        let mut traj = ControlTrajectory {
            g,
            profile,
            theta_ini: 0.0,
            theta_mid: 0.0,
            theta_tilde: Vec::new(),
            label: pulse.label().to_string(),
        };
        traj.set_angles(theta_ini, theta_mid)?;
        Ok(traj)
    }

    /// Returns the same shape with different endpoint and midpoint angles.
    pub fn with_angles(&self, theta_ini: f64, theta_mid: f64) -> Result<Self> {
        let mut out = self.clone();
        out.set_angles(theta_ini, theta_mid)?;
        Ok(out)
    }

    fn set_angles(&mut self, theta_ini: f64, theta_mid: f64) -> Result<()> {
        for (name, v) in [("theta_ini", theta_ini), ("theta_mid", theta_mid)] {
            if !(v > 0.0 && v < PI) {
                return Err(Error::Domain(format!("{name} = {v} must lie in (0, pi)")));
            }
        }
        let delta = theta_mid - theta_ini;
        let theta: Vec<f64> = self.profile.iter().map(|s| theta_ini + delta * s).collect();
        if let Some((i, v)) = theta.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < PI)) {
            return Err(Error::Domain(format!("theta~[{i}] = {v} leaves (0, pi)")));
        }
        self.theta_ini = theta_ini;
        self.theta_mid = theta_mid;
        self.theta_tilde = theta;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// Normalized samples g~[n].
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    pub fn theta_ini(&self) -> f64 {
        self.theta_ini
    }

    pub fn theta_mid(&self) -> f64 {
        self.theta_mid
    }

    /// theta~ sampled at tau_n = n / (N - 1).
    pub fn theta_tilde(&self) -> &[f64] {
        &self.theta_tilde
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Normalized tau grid n / (N - 1).
    pub fn tau_grid(&self) -> Vec<f64> {
        let last = (self.len() - 1) as f64;
        (0..self.len()).map(|i| i as f64 / last).collect()
    }

    /// Mean of sin(theta~) over normalized tau; equals t_d / tau_d.
    pub fn mean_sin(&self) -> f64 {
        let s: Vec<f64> = self.theta_tilde.iter().map(|t| t.sin()).collect();
        trapezoid_total(&s) / (self.len() - 1) as f64
    }
}

/// Normalizes `pulse` into a control trajectory; see [`ControlTrajectory::new`].
pub fn normalize_trajectory(pulse: &Pulse, theta_ini: f64, theta_mid: f64) -> Result<ControlTrajectory> {
    ControlTrajectory::new(pulse, theta_ini, theta_mid)
}

fn trapezoid_total(y: &[f64]) -> f64 {
    y.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum()
}

/// Map between the nonlinear frame and lab time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFrameMap {
    /// Normalized tau samples in [0, 1].
    pub tau_grid: Vec<f64>,
    /// Lab time t(tau) in ns.
    pub t_of_tau: Vec<f64>,
    /// omega_tau in rad/ns.
    pub omega_tau: f64,
    /// Duration of the trajectory in the nonlinear frame, in ns.
    pub tau_duration: f64,
}

/// Integrates dt = sin(theta~) dtau by the trapezoid rule and rescales the
/// total to `td`.
pub fn time_frame_invert(traj: &ControlTrajectory, td: f64, delta: f64) -> Result<TimeFrameMap> {
    if !(td > 0.0) {
        return Err(Error::InvalidSpec(format!("duration must be positive, got {td}")));
    }
    let s: Vec<f64> = traj.theta_tilde().iter().map(|t| t.sin()).collect();
    if let Some(i) = s.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::Domain(format!("sin(theta~) is not positive at sample {i}")));
    }
    let n = s.len();
    let mut cum = vec![0.0; n];
    for i in 1..n {
        cum[i] = cum[i - 1] + 0.5 * (s[i - 1] + s[i]);
    }
    let total = cum[n - 1];
    let t_of_tau: Vec<f64> = cum.iter().map(|c| c * td / total).collect();
    Ok(TimeFrameMap {
        tau_grid: traj.tau_grid(),
        t_of_tau,
        omega_tau: delta,
        tau_duration: td * (n - 1) as f64 / total,
    })
}

/// epsilon = Delta / tan(theta), with theta on the (0, pi) branch.
pub fn theta_to_epsilon(theta: &[f64], delta: f64) -> Result<Vec<f64>> {
    theta
        .iter()
        .map(|&th| {
            let s = th.sin();
            if !(th > 0.0 && th < PI) || s < 1e-12 {
                Err(Error::Domain(format!("theta = {th} too close to 0 or pi")))
            } else {
                Ok(delta * th.cos() / s)
            }
        })
        .collect()
}

/// omega1 = (omega2 - alpha1) + epsilon.
pub fn epsilon_to_omega1(eps: &[f64], pair: &TransmonPair) -> Vec<f64> {
    let offset = pair.degeneracy_omega1();
    eps.iter().map(|e| offset + e).collect()
}

/// Flux-tunable transmon frequency map. Energies are in GHz (E / h).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxMapParams {
    pub ej: f64,
    pub ec: f64,
    pub d: f64,
}

impl Default for FluxMapParams {
    fn default() -> Self {
        let ec = 0.3;
        let plasma = 6.1;
        FluxMapParams { ej: plasma * plasma / (8.0 * ec), ec, d: 0.1 }
    }
}

const FLUX_TOL: f64 = 1e-13;

impl FluxMapParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.ej > 0.0 && self.ec > 0.0 && self.d >= 0.0 && self.d < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "flux map needs EJ > 0, EC > 0, 0 <= d < 1, got {self:?}"
            )));
        }
        Ok(())
    }

    /// omega1 in rad/ns at external flux `phi` (units of the flux quantum).
    pub fn omega1(&self, phi: f64) -> f64 {
        let c = (PI * phi).cos();
        let root = (self.d * self.d + (1.0 - self.d * self.d) * c * c).sqrt().sqrt();
        crate::ghz_to_radns((8.0 * self.ej * self.ec).sqrt() * root - self.ec)
    }

    /// Achievable (min, max) omega1 on the branch [0, 1/2].
    pub fn range(&self) -> (f64, f64) {
        (self.omega1(0.5), self.omega1(0.0))
    }

    /// Inverts [`Self::omega1`] on [0, 1/2] by bisection.
    pub fn flux_for(&self, omega1: f64) -> Result<f64> {
        let (lo_w, hi_w) = self.range();
        let slack = 1e-12 * hi_w;
        if !(omega1 >= lo_w - slack && omega1 <= hi_w + slack) {
            return Err(Error::FrequencyRange { requested: omega1, min: lo_w, max: hi_w });
        }
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        while hi - lo > FLUX_TOL {
            let mid = 0.5 * (lo + hi);
            if self.omega1(mid) > omega1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

pub fn omega1_to_flux(omega1: &[f64], flux: &FluxMapParams) -> Result<Vec<f64>> {
    flux.validate()?;
    omega1.iter().map(|w| flux.flux_for(*w)).collect()
}

/// Sampled control waveforms on a uniform lab-time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalPulse {
    pub time_grid: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub omega1: Vec<f64>,
    pub flux_ext: Vec<f64>,
    pub duration: f64,
    pub amplitude: f64,
}

impl PhysicalPulse {
    pub fn len(&self) -> usize {
        self.time_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_grid.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.time_grid[1] - self.time_grid[0]
    }

    pub fn steps(&self) -> usize {
        self.len() - 1
    }
}

/// Resamples theta(t) from the (t(tau), theta~) pairs onto `times`.
pub fn resample_theta(traj: &ControlTrajectory, map: &TimeFrameMap, times: &[f64]) -> Result<Vec<f64>> {
    let p = Pchip::new(map.t_of_tau.clone(), traj.theta_tilde().to_vec())?;
    Ok(times.iter().map(|&t| p.eval(t)).collect())
}

/// Runs the full chain for duration `td`, normalized amplitude `amplitude`
/// and nominal step `dt`.
///
/// The mixing angles stored in `traj` are replaced by the ones implied by
/// `pair` and `amplitude`: theta_ini = atan(Delta / eps_ini) and
/// theta_mid = atan(Delta / (eps_ini (1 - A))). The step is adjusted so that
/// an integer number of steps spans `td`.
pub fn build_physical_pulse(
    traj: &ControlTrajectory,
    td: f64,
    amplitude: f64,
    pair: &TransmonPair,
    flux: &FluxMapParams,
    dt: f64,
) -> Result<PhysicalPulse> {
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::InvalidSpec(format!("amplitude must lie in [0, 1], got {amplitude}")));
    }
    if !(td > 0.0 && dt > 0.0) {
        return Err(Error::InvalidSpec(format!("need td > 0 and dt > 0, got {td}, {dt}")));
    }
    let steps = (td / dt).round() as usize;
    if steps < MIN_STEPS {
        return Err(Error::InvalidSpec(format!(
            "dt = {dt} gives {steps} steps over {td} ns, need at least {MIN_STEPS}"
        )));
    }
    let delta = pair.delta();
    let traj = traj.with_angles(pair.theta_ini(), pair.theta_for_amplitude(amplitude))?;
    let map = time_frame_invert(&traj, td, delta)?;
    let times: Vec<f64> = (0..=steps).map(|k| td * k as f64 / steps as f64).collect();
    let theta = resample_theta(&traj, &map, &times)?;
    let epsilon = theta_to_epsilon(&theta, delta)?;
    let omega1 = epsilon_to_omega1(&epsilon, pair);
    let flux_ext = omega1_to_flux(&omega1, flux)?;
    Ok(PhysicalPulse { time_grid: times, epsilon, omega1, flux_ext, duration: td, amplitude })
}
