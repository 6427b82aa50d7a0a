// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Waveform generator limits: zero-order hold at a finite sample rate
//! followed by a first-order lowpass.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate, CalibrationConfig, GateModel};
use crate::error::{Error, Result};
use crate::sim::TransmonPair;
use crate::trajectory::{FluxMapParams, PhysicalPulse};

/// Number of filter time constants of idle tail appended after the pulse.
pub const SETTLE_TAUS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareSpec {
    /// Sample rate in GSa/s.
    #[serde(rename = "fs_gsas")]
    pub fs: f64,
    /// 3 dB bandwidth in GHz.
    #[serde(rename = "bw_ghz")]
    pub bw: f64,
    /// Flux quanta per control unit.
    #[serde(default = "unit")]
    pub k: f64,
}

fn unit() -> f64 {
    1.0
}

impl HardwareSpec {
    pub fn new(fs: f64, bw: f64) -> Result<Self> {
        let hw = HardwareSpec { fs, bw, k: 1.0 };
        hw.validate()?;
        Ok(hw)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fs > 0.0 && self.bw > 0.0 && self.k != 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidSpec(format!("hardware needs fs > 0, bw > 0, k != 0, got {self:?}")));
        }
        Ok(())
    }

    /// Filter time constant 1 / (2 pi bw) in ns.
    pub fn tau(&self) -> f64 {
        1.0 / (2.0 * PI * self.bw)
    }

    /// Largest fine step that resolves the filter.
    pub fn max_fine_dt(&self) -> f64 {
        1.0 / (20.0 * self.bw)
    }
}

/// The four generator settings compared in the hardware study, worst first.
pub fn reference_specs() -> Vec<HardwareSpec> {
    [(1.0, 0.4), (2.0, 0.8), (5.0, 2.0), (10.0, 4.0)]
        .into_iter()
        .map(|(fs, bw)| HardwareSpec { fs, bw, k: 1.0 })
        .collect()
}

fn linear_at(t: &[f64], y: &[f64], x: f64) -> f64 {
    let i = t.partition_point(|&v| v <= x);
    if i == 0 {
        return y[0];
    }
    if i >= t.len() {
        return y[t.len() - 1];
    }
    let w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    y[i - 1] * (1.0 - w) + y[i] * w
}

/// Held DAC samples at t_k = k / fs for t_k < td; the idle value follows.
pub fn sample_and_hold(pulse: &PhysicalPulse, hw: &HardwareSpec, times: &[f64]) -> Vec<f64> {
    let t = &pulse.time_grid;
    let control: Vec<f64> = pulse.flux_ext.iter().map(|p| p / hw.k).collect();
    let idle = control[0];
    let count = (pulse.duration * hw.fs - 1e-9).ceil().max(1.0) as usize;
    let samples: Vec<f64> = (0..count).map(|k| linear_at(t, &control, k as f64 / hw.fs)).collect();
    times
        .iter()
        .map(|&x| {
            let k = (x * hw.fs + 1e-9).floor();
            if k < 0.0 {
                idle
            } else {
                samples.get(k as usize).copied().unwrap_or(idle)
            }
        })
        .collect()
}

/// First-order lowpass with exact exponential update on a uniform grid,
/// starting from `y0`.
pub fn lowpass(input: &[f64], bw: f64, dt: f64, y0: f64) -> Vec<f64> {
    let gain = 1.0 - (-2.0 * PI * bw * dt).exp();
    let mut y = y0;
    let mut out = Vec::with_capacity(input.len());
    for &u in input {
        out.push(y);
        y += gain * (u - y);
    }
    out
}

/// Distorts `pulse` by the generator model and maps the filtered flux back
/// to omega1. The result covers the pulse plus a settling tail; its
/// `duration` stays the programmed one.
pub fn apply_hardware(
    pulse: &PhysicalPulse,
    hw: &HardwareSpec,
    flux: &FluxMapParams,
    pair: &TransmonPair,
    fine_dt: f64,
) -> Result<PhysicalPulse> {
    hw.validate()?;
    if pulse.len() < 2 {
        return Err(Error::InvalidSpec("pulse needs at least two samples".into()));
    }
    if !(fine_dt > 0.0 && fine_dt <= hw.max_fine_dt() * (1.0 + 1e-12)) {
        return Err(Error::InvalidSpec(format!(
            "fine step {fine_dt} does not resolve a {} GHz filter (need <= {})",
            hw.bw,
            hw.max_fine_dt()
        )));
    }
    let total = pulse.duration + SETTLE_TAUS * hw.tau();
    let steps = (total / fine_dt).ceil() as usize;
    let dt = total / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let held = sample_and_hold(pulse, hw, &times);
    let filtered = lowpass(&held, hw.bw, dt, pulse.flux_ext[0] / hw.k);
    let (lo, hi) = flux.range();
    let mut omega1 = Vec::with_capacity(filtered.len());
    for (t, p) in times.iter().zip(&filtered) {
        let phi = hw.k * p;
        if !(-0.5..=0.5).contains(&phi) {
            return Err(Error::FrequencyRange { requested: flux.omega1(phi), min: lo, max: hi });
        }
        let w = flux.omega1(phi);
        if !w.is_finite() {
            return Err(Error::Domain(format!("filtered flux {phi} at t = {t} leaves the flux map")));
        }
        omega1.push(w);
    }
    let offset = pair.degeneracy_omega1();
    Ok(PhysicalPulse {
        epsilon: omega1.iter().map(|w| w - offset).collect(),
        flux_ext: filtered.iter().map(|p| hw.k * p).collect(),
        omega1,
        time_grid: times,
        duration: pulse.duration,
        amplitude: pulse.amplitude,
    })
}

/// max |omega1_hat(t) - omega1(t)| over the distorted grid, with the ideal
/// waveform held at its final value past its end.
pub fn max_deviation(ideal: &PhysicalPulse, distorted: &PhysicalPulse) -> f64 {
    distorted
        .time_grid
        .iter()
        .zip(&distorted.omega1)
        .map(|(&t, w)| (w - linear_at(&ideal.time_grid, &ideal.omega1, t)).abs())
        .fold(0.0, f64::max)
}

/// Best operating point of one family under one hardware setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareRow {
    pub index: usize,
    pub family: String,
    pub fs: f64,
    pub bw: f64,
    pub td: Option<f64>,
    pub log10_pe: Option<f64>,
    pub infidelity: Option<f64>,
}

/// Calibrates every (family, hardware) pair; rows are ordered by hardware
/// index, then by family in the given order.
pub fn hardware_sweep(
    families: &[(String, GateModel)],
    specs: &[HardwareSpec],
    config: &CalibrationConfig,
) -> Result<Vec<HardwareRow>> {
    let jobs: Vec<(usize, usize)> = (0..specs.len()).flat_map(|h| (0..families.len()).map(move |f| (h, f))).collect();
    jobs.par_iter()
        .map(|&(h, f)| {
            let (name, base) = &families[f];
            let model = base.clone().with_hardware(Some(specs[h]));
            let cal = calibrate(&model, config)?;
            let best = cal.best_point();
            Ok(HardwareRow {
                index: h,
                family: name.clone(),
                fs: specs[h].fs,
                bw: specs[h].bw,
                td: best.map(|b| b.td),
                log10_pe: best.map(|b| b.pe.log10()),
                infidelity: best.map(|b| 1.0 - b.fg),
            })
        })
        .collect()
}
