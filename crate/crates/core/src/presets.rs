// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Pinned designs and calibration windows for the standard comparisons.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationConfig, GateModel};
use crate::error::{Error, Result};
use crate::hardware::HardwareSpec;
use crate::leakage::trajectory_transform;
use crate::sim::TransmonPair;
use crate::trajectory::{ControlTrajectory, FluxMapParams};
use crate::window::{design_chebyshev2, dpss, Chebyshev2Spec, Pulse, SlepianSpec};

pub const PULSE_LENGTH: usize = 1001;
pub const HEADLINE_NW: f64 = 2.9;
/// gamma^2 / 4 = 1e-6.
pub const HEADLINE_GAMMA: f64 = 2e-3;

/// Half bandwidths of the eight comparison pairs, highest leakage first.
pub const COMPARISON_NW: [f64; 8] = [2.3, 2.45, 2.6, 2.75, 2.9, 3.05, 3.2, 3.35];

/// Coupling of the two-level validity study, rad/ns.
pub const VALIDITY_DELTA: f64 = 2.0 * PI * 0.05;
pub const VALIDITY_EPS_INI: f64 = 2.0 * PI * 0.8;
pub const VALIDITY_EPS_MID: f64 = 2.0 * PI * 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Slepian,
    Chebyshev2,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Slepian => "slepian",
            Family::Chebyshev2 => "chebyshev2",
        }
    }
}

/// A trajectory family with its design parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub family: Family,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl TrajectorySpec {
    pub fn slepian(n: usize, nw: f64) -> Self {
        TrajectorySpec { family: Family::Slepian, n, nw: Some(nw), gamma: None }
    }

    pub fn chebyshev2(n: usize, gamma: f64) -> Self {
        TrajectorySpec { family: Family::Chebyshev2, n, nw: None, gamma: Some(gamma) }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::Slepian => SlepianSpec::from_nw(self.n, self.param("nw", self.nw)?, 1)?.validate(),
            Family::Chebyshev2 => Chebyshev2Spec::new(self.n, self.param("gamma", self.gamma)?)?.validate(),
        }
    }

    fn param(&self, name: &str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| Error::InvalidSpec(format!("{} trajectory needs `{name}`", self.family.as_str())))
    }

    pub fn design(&self) -> Result<Pulse> {
        match self.family {
            Family::Slepian => {
                let nw = self.param("nw", self.nw)?;
                Ok(dpss(SlepianSpec::from_nw(self.n, nw, 1)?)?.pulse.with_label(format!("slepian NW={nw}")))
            }
            Family::Chebyshev2 => {
                let gamma = self.param("gamma", self.gamma)?;
                let d = design_chebyshev2(&Chebyshev2Spec::new(self.n, gamma)?)?;
                Ok(d.pulse.with_label(format!("chebyshev2 gamma={gamma}")))
            }
        }
    }

    /// Designs the pulse and wraps it in a gate model. The trajectory angles
    /// are placeholders; the model sets them from the amplitude.
    pub fn gate_model(&self, pair: &TransmonPair, flux: &FluxMapParams) -> Result<GateModel> {
        let traj = ControlTrajectory::new(&self.design()?, pair.theta_ini(), PI / 2.0)?;
        Ok(GateModel::new(traj, *pair, *flux))
    }
}

pub fn headline_pair() -> [TrajectorySpec; 2] {
    [TrajectorySpec::slepian(PULSE_LENGTH, HEADLINE_NW), TrajectorySpec::chebyshev2(PULSE_LENGTH, HEADLINE_GAMMA)]
}

/// Peak of |G|^2 / 4 on the first sidelobe of a normalized trajectory.
pub fn first_sidelobe_level(traj: &ControlTrajectory) -> Option<f64> {
    let step = 0.02;
    let value = |k: usize| trajectory_transform(traj, k as f64 * step).norm_sqr() / 4.0;
    let limit = (PI * traj.len() as f64 / step) as usize;
    let (mut prev, mut cur) = (value(0), value(1));
    let mut past_null = false;
    for k in 2..limit {
        let next = value(k);
        if !past_null && cur < prev && cur <= next {
            past_null = true;
        } else if past_null && cur > prev && cur >= next {
            return Some(cur);
        }
        prev = cur;
        cur = next;
    }
    None
}

/// Chebyshev target whose threshold sits as far below the headline one as
/// the Slepian NW's first sidelobe sits below the headline Slepian's.
pub fn matched_gamma(n: usize, nw: f64) -> Result<f64> {
    let level = |nw: f64| -> Result<f64> {
        let traj = ControlTrajectory::new(&TrajectorySpec::slepian(n, nw).design()?, 0.1, 1.5)?;
        first_sidelobe_level(&traj)
            .map(f64::log10)
            .ok_or_else(|| Error::DegeneratePulse(format!("no sidelobe found for NW = {nw}")))
    };
    let threshold = (HEADLINE_GAMMA * HEADLINE_GAMMA / 4.0).log10() + level(nw)? - level(HEADLINE_NW)?;
    Ok(2.0 * 10f64.powf(0.5 * threshold))
}

/// The eight (Slepian, Chebyshev) comparison pairs.
pub fn comparison_pairs(n: usize) -> Result<Vec<[TrajectorySpec; 2]>> {
    COMPARISON_NW
        .iter()
        .map(|&nw| Ok([TrajectorySpec::slepian(n, nw), TrajectorySpec::chebyshev2(n, matched_gamma(n, nw)?)]))
        .collect()
}

/// Window around the first leakage lobes of the ideal gate.
pub fn ideal_calibration() -> CalibrationConfig {
    CalibrationConfig { td_min: 38.0, td_max: 56.0, ..Default::default() }
}

/// Coarser window used for the eight-pair comparison; wide enough for the
/// early pre-lobes of the high-NW pairs.
pub fn comparison_calibration() -> CalibrationConfig {
    CalibrationConfig { td_min: 36.0, td_max: 58.0, td_step: 0.2, ..Default::default() }
}

/// Hardware distortion delays the lobes, so the window extends further.
pub fn hardware_calibration() -> CalibrationConfig {
    CalibrationConfig { td_min: 38.0, td_max: 60.0, ..Default::default() }
}

pub fn hardware_specs() -> Vec<HardwareSpec> {
    crate::hardware::reference_specs()
}

/// (theta_ini, theta_mid) of the two-level validity study.
pub fn validity_angles() -> (f64, f64) {
    (VALIDITY_DELTA.atan2(VALIDITY_EPS_INI), VALIDITY_DELTA.atan2(VALIDITY_EPS_MID))
}

/// Duration grid of the validity study, ns.
pub fn validity_durations() -> Vec<f64> {
    crate::calibration::grid(25.0, 100.0, 0.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        let s: TrajectorySpec = serde_json::from_str(r#"{"family":"chebyshev2","N":11,"gamma":0.1}"#).unwrap();
        assert_eq!(s, TrajectorySpec::chebyshev2(11, 0.1));
        let bad: TrajectorySpec = serde_json::from_str(r#"{"family":"slepian","N":11}"#).unwrap();
        assert!(bad.validate().unwrap_err().to_string().contains("nw"));
    }

    #[test]
    fn matched_gamma_reproduces_headline() {
        let g = matched_gamma(201, HEADLINE_NW).unwrap();
        assert!((g - HEADLINE_GAMMA).abs() < 1e-15);
    }

    #[test]
    fn sidelobes_fall_with_nw() {
        let lv = |nw| {
            let t = ControlTrajectory::new(&TrajectorySpec::slepian(201, nw).design().unwrap(), 0.1, 1.5).unwrap();
            first_sidelobe_level(&t).unwrap()
        };
        assert!(lv(2.3) > lv(2.9) && lv(2.9) > lv(3.5));
    }
}
