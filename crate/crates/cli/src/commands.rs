// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! One pipeline per subcommand. Each fills an [`Artifacts`] set; nothing
//! touches the filesystem here.

use anyhow::{Context, Result};
use fluxpulse::calibration::{
    calibrate, lobe_extrema, operating_points, pi_contour, scan, Calibration, CalibrationConfig, GateModel,
};
use fluxpulse::hardware::hardware_sweep;
use fluxpulse::io;
use fluxpulse::leakage::{analytic_leakage, chi_for_trajectory};
use fluxpulse::presets::{self, TrajectorySpec};
use fluxpulse::sim::two_level_leakage_sim;
use fluxpulse::trajectory::ControlTrajectory;
use fluxpulse::window::{dtft, dtft_samples, Symmetry};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::output::Artifacts;

/// Frequency samples of design spectra.
const SPECTRUM_GRID: usize = 4096;
/// Finer grid used to locate the design crossover.
const CROSSOVER_GRID: usize = 1 << 15;
/// Steps of the two-level simulation in the validity study.
const VALIDITY_STEPS: usize = 2000;

pub fn run(command: Command, cfg: &RunConfig) -> Result<Artifacts> {
    let mut out = Artifacts::default();
    match command {
        Command::Design => design(cfg, &mut out)?,
        Command::Analyze => analyze(cfg, &mut out)?,
        Command::Simulate => simulate(cfg, &mut out)?,
        Command::Scan => scan_cmd(cfg, &mut out)?,
        Command::HardwareSweep => sweep(cfg, &mut out)?,
        Command::Reproduce => reproduce(cfg, &mut out)?,
    }
    Ok(out)
}

/// File stems: the family name, indexed when a family repeats.
fn stems(specs: &[TrajectorySpec]) -> Vec<String> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let repeated = specs.iter().filter(|o| o.family == s.family).count() > 1;
            if repeated {
                format!("{}_{i}", s.family.as_str())
            } else {
                s.family.as_str().to_string()
            }
        })
        .collect()
}

fn model(cfg: &RunConfig, spec: &TrajectorySpec, steps: usize) -> Result<GateModel> {
    Ok(spec.gate_model(&cfg.system.pair(), &cfg.system.flux())?.with_steps(steps))
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> impl FnOnce(&mut Vec<u8>) -> fluxpulse::Result<()> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    move |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(&header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn design(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let specs = cfg.trajectories();
    for (spec, stem) in specs.iter().zip(stems(&specs)) {
        let pulse = spec.design().with_context(|| format!("designing {stem}"))?;
        let spectrum = dtft(&pulse, SPECTRUM_GRID)?;
        out.write(format!("{stem}_pulse.csv"), |b| io::write_pulse_csv(b, &pulse))?;
        out.write(format!("{stem}_pulse.json"), |b| io::write_pulse_json(b, &pulse))?;
        out.write(format!("{stem}_spectrum.csv"), |b| io::write_spectrum_csv(b, &spectrum))?;
    }
    Ok(())
}

fn analyze(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let a = &cfg.analyze;
    let pair = cfg.system.pair();
    let delta = pair.delta();
    let tds = fluxpulse::calibration::grid(a.td_min, a.td_max, a.td_step);
    let specs = cfg.trajectories();
    for (spec, stem) in specs.iter().zip(stems(&specs)) {
        let traj = ControlTrajectory::new(&spec.design()?, pair.theta_ini(), pair.theta_for_amplitude(a.amplitude))?;
        let mut rows = Vec::with_capacity(2 * tds.len());
        for &td in &tds {
            let mut chi = chi_for_trajectory(&traj, td, delta, a.steps)?;
            chi.chi_trace = None;
            rows.push((td, analytic_leakage(&traj, td, delta)));
            rows.push((td, chi));
        }
        out.write(format!("{stem}_predictions.csv"), |b| io::write_predictions_csv(b, &rows))?;
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let s = &cfg.simulate;
    let specs = cfg.trajectories();
    for (spec, stem) in specs.iter().zip(stems(&specs)) {
        let ideal = model(cfg, spec, s.steps)?;
        let variants = std::iter::once((stem.clone(), None))
            .chain(cfg.hardware.iter().enumerate().map(|(i, h)| (format!("{stem}_hw{i}"), Some(*h))));
        for (name, hw) in variants {
            let m = ideal.clone().with_hardware(hw);
            let pulse = m.pulse(s.td, s.amplitude).with_context(|| format!("building {name} waveform"))?;
            let gate = m.simulate(s.td, s.amplitude)?;
            out.write(format!("{name}_waveform.csv"), |b| io::write_waveform_csv(b, &pulse))?;
            out.write(format!("{name}_gate.csv"), |b| io::write_gate_points_csv(b, &[gate]))?;
        }
    }
    Ok(())
}

fn scan_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let sc = &cfg.scan;
    let cal = sc.calibration();
    let specs = cfg.trajectories();
    for (spec, stem) in specs.iter().zip(stems(&specs)) {
        let m = model(cfg, spec, sc.steps)?;
        let result = scan(&m, &cal.td_grid(), &cal.a_grid())?;
        let curve = pi_contour(&result)?;
        let search = lobe_extrema(&curve, sc.selector, sc.min_prominence, sc.envelope_window)?;
        let ops = operating_points(&m, &search, sc.a_min, sc.a_max)?;
        out.write(format!("{stem}_phase.csv"), |b| io::write_scan_matrix_csv(b, &result, &result.phase))?;
        out.write(format!("{stem}_leakage.csv"), |b| io::write_scan_matrix_csv(b, &result, &result.leakage))?;
        out.write(format!("{stem}_contour.csv"), |b| io::write_contour_csv(b, &curve))?;
        out.write(format!("{stem}_operating_points.json"), |b| io::write_operating_points_json(b, &ops))?;
    }
    Ok(())
}

fn sweep_with(cfg: &RunConfig, steps: usize, cal: &CalibrationConfig, out: &mut Artifacts, name: &str) -> Result<()> {
    let specs = cfg.trajectories();
    let families = specs
        .iter()
        .zip(stems(&specs))
        .map(|(s, stem)| Ok((stem, model(cfg, s, steps)?)))
        .collect::<Result<Vec<_>>>()?;
    let rows = hardware_sweep(&families, &cfg.hardware_specs(), cal)?;
    out.write(name, |b| io::write_hardware_csv(b, &rows))
}

fn sweep(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    sweep_with(cfg, cfg.scan.steps, &cfg.scan.calibration(), out, "hardware_sweep.csv")
}

/// Calibration outputs shared by the figure reproductions.
fn calibration_artifacts(out: &mut Artifacts, stem: &str, cal: &Calibration) -> Result<()> {
    out.write(format!("{stem}_contour.csv"), |b| io::write_gate_points_csv(b, &cal.contour))?;
    out.write(format!("{stem}_operating_points.json"), |b| io::write_operating_points_json(b, &cal.operating_points))
}

#[derive(Serialize)]
struct Crossover {
    family: &'static str,
    level: f64,
    /// rad/sample of the normalized trajectory; absent when never reached.
    omega: Option<f64>,
}

fn reproduce(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let pair = cfg.system.pair();
    let headline = presets::headline_pair();
    if cfg.reproduce.figure.is_none() && cfg.reproduce.table.is_none() {
        anyhow::bail!("reproduce needs a figure or a table");
    }
    if let Some(fig) = cfg.reproduce.figure {
        match fig {
            3 => {
                let mut cross = Vec::new();
                for spec in &headline {
                    let stem = format!("fig3_{}", spec.family.as_str());
                    let pulse = spec.design()?;
                    let traj = ControlTrajectory::new(&pulse, pair.theta_ini(), pair.theta_for_amplitude(1.0))?;
                    let spectrum = dtft_samples(traj.g(), Symmetry::Antisymmetric, SPECTRUM_GRID);
                    out.write(format!("{stem}_pulse.csv"), |b| io::write_pulse_csv(b, &pulse))?;
                    out.write(format!("{stem}_spectrum.csv"), |b| io::write_spectrum_csv(b, &spectrum))?;
                    let fine = dtft_samples(traj.g(), Symmetry::Antisymmetric, CROSSOVER_GRID);
                    cross.push(Crossover {
                        family: spec.family.as_str(),
                        level: presets::HEADLINE_GAMMA,
                        omega: fine.crossover_frequency(presets::HEADLINE_GAMMA),
                    });
                }
                out.json("fig3_crossover.json", &cross)?;
            }
            4 => {
                let cal = presets::ideal_calibration();
                out.json("fig4_calibration.json", &cal)?;
                let runs = headline
                    .par_iter()
                    .map(|s| Ok((s.family.as_str(), calibrate(&model(cfg, s, cfg.scan.steps)?, &cal)?)))
                    .collect::<Result<Vec<_>>>()?;
                for (fam, c) in &runs {
                    calibration_artifacts(out, &format!("fig4_{fam}"), c)?;
                }
            }
            5 => {
                let cal = presets::hardware_calibration();
                out.json("fig5_calibration.json", &cal)?;
                let hw = cfg.hardware_specs();
                let jobs: Vec<(usize, &TrajectorySpec)> =
                    (0..hw.len()).flat_map(|h| headline.iter().map(move |s| (h, s))).collect();
                let runs = jobs
                    .par_iter()
                    .map(|&(h, s)| {
                        let m = model(cfg, s, cfg.scan.steps)?.with_hardware(Some(hw[h]));
                        Ok((h, s.family.as_str(), calibrate(&m, &cal)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                for (h, fam, c) in &runs {
                    calibration_artifacts(out, &format!("fig5_hw{h}_{fam}"), c)?;
                }
            }
            12 => {
                let delta = presets::VALIDITY_DELTA;
                let (theta_ini, theta_mid) = presets::validity_angles();
                let tds = presets::validity_durations();
                for spec in &headline {
                    let traj = ControlTrajectory::new(&spec.design()?, theta_ini, theta_mid)?;
                    let rows = tds
                        .par_iter()
                        .map(|&td| {
                            let sim = two_level_leakage_sim(&traj, td, delta, VALIDITY_STEPS)?;
                            Ok(vec![num(td), num(analytic_leakage(&traj, td, delta).pe), num(sim)])
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let header = ["td_ns", "pe_analytic", "pe_simulated"];
                    out.write(format!("fig12_{}.csv", spec.family.as_str()), csv_table(&header, rows))?;
                }
            }
            other => anyhow::bail!("no reproduction for figure {other}"),
        }
    }
    if let Some(table) = cfg.reproduce.table {
        match table {
            2 => {
                let cal = presets::comparison_calibration();
                out.json("table2_calibration.json", &cal)?;
                let jobs: Vec<(usize, TrajectorySpec)> = presets::comparison_pairs(presets::PULSE_LENGTH)?
                    .into_iter()
                    .enumerate()
                    .flat_map(|(i, p)| p.into_iter().map(move |s| (i, s)))
                    .collect();
                let rows = jobs
                    .par_iter()
                    .map(|(i, s)| {
                        let c = calibrate(&model(cfg, s, cfg.scan.steps)?, &cal)?;
                        let best = c.best_point();
                        Ok(vec![
                            i.to_string(),
                            s.family.as_str().to_string(),
                            opt(s.nw),
                            opt(s.gamma),
                            opt(best.map(|b| b.td)),
                            opt(best.map(|b| b.pe.log10())),
                            opt(best.map(|b| 1.0 - b.fg)),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()?;
                let header = ["index", "family", "nw", "gamma", "td_ns", "log10_pe", "infidelity"];
                out.write("table2.csv", csv_table(&header, rows))?;
            }
            3 => {
                let cal = presets::hardware_calibration();
                out.json("table3_calibration.json", &cal)?;
                let headline_cfg = RunConfig { trajectory: headline.to_vec(), ..cfg.clone() };
                sweep_with(&headline_cfg, cfg.scan.steps, &cal, out, "table3.csv")?;
            }
            other => anyhow::bail!("no reproduction for table {other}"),
        }
    }
    Ok(())
}
