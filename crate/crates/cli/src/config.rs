// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fluxpulse::calibration::{CalibrationConfig, LobeSelector};
use fluxpulse::hardware::HardwareSpec;
use fluxpulse::presets::{self, TrajectorySpec};
use fluxpulse::sim::TransmonPair;
use fluxpulse::trajectory::FluxMapParams;
use fluxpulse::{ghz_to_radns, radns_to_ghz};
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Design,
    Analyze,
    Simulate,
    Scan,
    HardwareSweep,
    Reproduce,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Analyze => "analyze",
            Command::Simulate => "simulate",
            Command::Scan => "scan",
            Command::HardwareSweep => "hardware-sweep",
            Command::Reproduce => "reproduce",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    /// One `[trajectory]` table or several `[[trajectory]]` tables. Empty
    /// means the headline Slepian and Chebyshev pair.
    #[serde(default, deserialize_with = "one_or_many")]
    pub trajectory: Vec<TrajectorySpec>,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub hardware: Vec<HardwareSpec>,
    #[serde(default)]
    pub reproduce: ReproduceConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<TrajectorySpec>, D::Error> {
    // An untagged enum would swallow field-level errors such as
    // "missing field `N`", so dispatch on the raw value instead.
    match toml::Value::deserialize(d)? {
        toml::Value::Array(items) => {
            items.into_iter().map(|v| v.try_into().map_err(serde::de::Error::custom)).collect()
        }
        other => Ok(vec![other.try_into().map_err(serde::de::Error::custom)?]),
    }
}

/// Device parameters in GHz (f / 2 pi) units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub omega1_idle_ghz: f64,
    pub omega2_ghz: f64,
    pub alpha1_ghz: f64,
    pub alpha2_ghz: f64,
    pub g_ghz: f64,
    pub ej_ghz: f64,
    pub ec_ghz: f64,
    pub asymmetry: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let p = TransmonPair::default();
        let f = FluxMapParams::default();
        SystemConfig {
            omega1_idle_ghz: radns_to_ghz(p.omega1_idle),
            omega2_ghz: radns_to_ghz(p.omega2),
            alpha1_ghz: radns_to_ghz(p.alpha1),
            alpha2_ghz: radns_to_ghz(p.alpha2),
            g_ghz: radns_to_ghz(p.g),
            ej_ghz: f.ej,
            ec_ghz: f.ec,
            asymmetry: f.d,
        }
    }
}

impl SystemConfig {
    pub fn pair(&self) -> TransmonPair {
        TransmonPair {
            omega1_idle: ghz_to_radns(self.omega1_idle_ghz),
            omega2: ghz_to_radns(self.omega2_ghz),
            alpha1: ghz_to_radns(self.alpha1_ghz),
            alpha2: ghz_to_radns(self.alpha2_ghz),
            g: ghz_to_radns(self.g_ghz),
        }
    }

    pub fn flux(&self) -> FluxMapParams {
        FluxMapParams { ej: self.ej_ghz, ec: self.ec_ghz, d: self.asymmetry }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub td_min: f64,
    pub td_max: f64,
    pub td_step: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub a_step: f64,
    pub selector: LobeSelector,
    pub min_prominence: f64,
    pub envelope_window: f64,
    /// Propagation steps per gate.
    pub steps: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let c = presets::ideal_calibration();
        ScanConfig {
            td_min: c.td_min,
            td_max: c.td_max,
            td_step: c.td_step,
            a_min: c.a_min,
            a_max: c.a_max,
            a_step: c.a_step,
            selector: c.selector,
            min_prominence: c.min_prominence,
            envelope_window: c.envelope_window,
            steps: fluxpulse::sim::DEFAULT_STEPS,
        }
    }
}

impl ScanConfig {
    pub fn calibration(&self) -> CalibrationConfig {
        CalibrationConfig {
            td_min: self.td_min,
            td_max: self.td_max,
            td_step: self.td_step,
            a_min: self.a_min,
            a_max: self.a_max,
            a_step: self.a_step,
            selector: self.selector,
            min_prominence: self.min_prominence,
            envelope_window: self.envelope_window,
        }
    }
}

/// Closed-form leakage predictions against duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeConfig {
    pub td_min: f64,
    pub td_max: f64,
    pub td_step: f64,
    /// Pulse amplitude that sets the mid-point angle.
    pub amplitude: f64,
    /// Steps of the chi accumulation.
    pub steps: usize,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig { td_min: 25.0, td_max: 100.0, td_step: 0.5, amplitude: 0.9, steps: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub td: f64,
    pub amplitude: f64,
    pub steps: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { td: 47.0, amplitude: 0.9, steps: fluxpulse::sim::DEFAULT_STEPS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceConfig {
    #[serde(default)]
    pub figure: Option<u32>,
    #[serde(default)]
    pub table: Option<u32>,
}

pub const FIGURES: [u32; 4] = [3, 4, 5, 12];
pub const TABLES: [u32; 2] = [2, 3];

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn trajectories(&self) -> Vec<TrajectorySpec> {
        if self.trajectory.is_empty() {
            presets::headline_pair().to_vec()
        } else {
            self.trajectory.clone()
        }
    }

    pub fn hardware_specs(&self) -> Vec<HardwareSpec> {
        if self.hardware.is_empty() {
            presets::hardware_specs()
        } else {
            self.hardware.clone()
        }
    }

    /// Checks every section and names the first bad field.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.trajectory.iter().enumerate() {
            t.validate().with_context(|| format!("trajectory[{i}]"))?;
        }
        self.system.pair().validate().context("system")?;
        self.system.flux().validate().context("system")?;
        self.scan.calibration().validate().context("scan")?;
        if self.scan.steps < 2 {
            bail!("scan.steps must be at least 2");
        }
        let a = &self.analyze;
        if !(a.td_min > 0.0 && a.td_max >= a.td_min && a.td_step > 0.0) {
            bail!("analyze: td_min > 0, td_max >= td_min and td_step > 0 required");
        }
        if !(a.amplitude > 0.0 && a.amplitude <= 1.0) {
            bail!("analyze.amplitude must lie in (0, 1]");
        }
        if a.steps < 2 {
            bail!("analyze.steps must be at least 2");
        }
        let s = &self.simulate;
        if !(s.td > 0.0) {
            bail!("simulate.td must be positive");
        }
        if !(s.amplitude > 0.0 && s.amplitude <= 1.0) {
            bail!("simulate.amplitude must lie in (0, 1]");
        }
        if s.steps < 2 {
            bail!("simulate.steps must be at least 2");
        }
        for (i, h) in self.hardware.iter().enumerate() {
            h.validate().with_context(|| format!("hardware[{i}]"))?;
        }
        if let Some(f) = self.reproduce.figure {
            if !FIGURES.contains(&f) {
                bail!("reproduce.figure must be one of {FIGURES:?}, got {f}");
            }
        }
        if let Some(t) = self.reproduce.table {
            if !TABLES.contains(&t) {
                bail!("reproduce.table must be one of {TABLES:?}, got {t}");
            }
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_repeated_trajectory_tables() {
        let one: RunConfig = toml::from_str("[trajectory]\nfamily = \"slepian\"\nN = 101\nnw = 2.9\n").unwrap();
        assert_eq!(one.trajectory.len(), 1);
        let two: RunConfig = toml::from_str(
            "[[trajectory]]\nfamily = \"slepian\"\nN = 101\nnw = 2.9\n\
             [[trajectory]]\nfamily = \"chebyshev2\"\nN = 101\ngamma = 0.002\n",
        )
        .unwrap();
        assert_eq!(two.trajectory[1], TrajectorySpec::chebyshev2(101, 0.002));
    }

    #[test]
    fn missing_length_is_named() {
        let err = toml::from_str::<RunConfig>("[trajectory]\nfamily = \"slepian\"\nnw = 2.9\n").unwrap_err();
        assert!(err.to_string().contains("`N`"), "{err}");
    }

    #[test]
    fn defaults_round_trip_the_device() {
        let s = SystemConfig::default();
        let p = s.pair();
        assert!((p.g - TransmonPair::default().g).abs() < 1e-12);
        assert_eq!(s.flux(), FluxMapParams::default());
        toml::from_str::<RunConfig>("").unwrap().validate().unwrap();
    }
}
