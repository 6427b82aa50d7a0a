// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON artifacts. Every CSV has a header row and a fixed column
//! order; floats are written in shortest round-trip form.

use std::io::Write;

use serde::Serialize;

use crate::calibration::{ContourCurve, OperatingPoint, ScanResult};
use crate::error::Result;
use crate::hardware::HardwareRow;
use crate::leakage::LeakagePrediction;
use crate::sim::GatePoint;
use crate::trajectory::PhysicalPulse;
use crate::window::{Pulse, Spectrum, Symmetry};

fn table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

pub fn write_pulse_csv<W: Write>(out: W, pulse: &Pulse) -> Result<()> {
    let rows = pulse.samples().iter().enumerate().map(|(n, v)| vec![n.to_string(), f(*v)]);
    table(out, &["n", "value"], rows)
}

#[derive(Serialize)]
struct PulseJson<'a> {
    #[serde(rename = "N")]
    n: usize,
    symmetry: Symmetry,
    label: &'a str,
    samples: &'a [f64],
}

pub fn write_pulse_json<W: Write>(out: W, pulse: &Pulse) -> Result<()> {
    let doc = PulseJson { n: pulse.len(), symmetry: pulse.symmetry(), label: pulse.label(), samples: pulse.samples() };
    write_json(out, &doc)
}

pub fn write_spectrum_csv<W: Write>(out: W, spectrum: &Spectrum) -> Result<()> {
    let rows = (0..spectrum.len()).map(|k| {
        let v = spectrum.values[k];
        vec![f(spectrum.frequencies[k]), f(v.re), f(v.im), f(spectrum.amplitude[k])]
    });
    table(out, &["omega", "re", "im", "amplitude"], rows)
}

pub fn write_waveform_csv<W: Write>(out: W, pulse: &PhysicalPulse) -> Result<()> {
    let rows = (0..pulse.len())
        .map(|k| vec![f(pulse.time_grid[k]), f(pulse.epsilon[k]), f(pulse.omega1[k]), f(pulse.flux_ext[k])]);
    table(out, &["t_ns", "epsilon_radns", "omega1_radns", "flux_phi0"], rows)
}

pub fn write_predictions_csv<W: Write>(out: W, rows: &[(f64, LeakagePrediction)]) -> Result<()> {
    let rows = rows.iter().map(|(td, p)| vec![f(*td), f(p.pe), p.method.as_str().to_string()]);
    table(out, &["td_ns", "pe", "method"], rows)
}

pub fn write_gate_points_csv<W: Write>(out: W, points: &[GatePoint]) -> Result<()> {
    let rows = points.iter().map(|g| vec![f(g.td), f(g.amplitude), f(g.cond_phase), f(g.pe), f(g.fg), f(g.l1)]);
    table(out, &["td_ns", "A", "phase_rad", "pe", "fg", "l1"], rows)
}

pub fn write_contour_csv<W: Write>(out: W, curve: &ContourCurve) -> Result<()> {
    let rows = curve.points.iter().map(|p| vec![f(p.td), f(p.amplitude), f(p.pe)]);
    table(out, &["td_ns", "A", "pe"], rows)
}

/// One matrix of a scan: a row per duration, a column per amplitude.
pub fn write_scan_matrix_csv<W: Write>(out: W, scan: &ScanResult, values: &[Vec<f64>]) -> Result<()> {
    let mut header = vec!["td_ns".to_string()];
    header.extend(scan.amplitudes.iter().map(|a| format!("A={a:?}")));
    let head: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = scan.durations.iter().zip(values).map(|(td, row)| {
        let mut r = vec![f(*td)];
        r.extend(row.iter().map(|v| f(*v)));
        r
    });
    table(out, &head, rows)
}

pub fn write_operating_points_json<W: Write>(out: W, points: &[OperatingPoint]) -> Result<()> {
    write_json(out, &points)
}

pub fn write_hardware_csv<W: Write>(out: W, rows: &[HardwareRow]) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![r.index.to_string(), r.family.clone(), f(r.fs), f(r.bw), opt(r.td), opt(r.log10_pe), opt(r.infidelity)]
    });
    table(out, &["index", "family", "fs_gsas", "bw_ghz", "td_ns", "log10_pe", "infidelity"], rows)
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}
