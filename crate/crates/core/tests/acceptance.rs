// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs with a custom harness so every line is printed. A failing criterion
//! does not fail the run unless FLUXPULSE_STRICT_ACCEPTANCE is set.

use std::f64::consts::PI;
use std::time::Instant;

use fluxpulse::calibration::{calibrate, Calibration, GateModel};
use fluxpulse::hardware::{apply_hardware, hardware_sweep, max_deviation, HardwareRow};
use fluxpulse::leakage::{analytic_leakage, lz_probability, lz_relation_residual, LzParams};
use fluxpulse::presets::{self, Family, TrajectorySpec};
use fluxpulse::sim::{landau_zener_sim, two_level_leakage_sim, wrap_phase, TransmonPair};
use fluxpulse::trajectory::{ControlTrajectory, FluxMapParams};
use fluxpulse::window::{
    chebyshev1, dpss, dtft_samples, dtft_value, wca_design, Band, Chebyshev1Spec, SlepianSpec, Symmetry, WcaCase,
    WcaSpec,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// Shared between criteria 5, 6 and 8.
struct Headline {
    models: Vec<(Family, GateModel)>,
    cals: Vec<Calibration>,
}

fn headline() -> Headline {
    let pair = TransmonPair::default();
    let flux = FluxMapParams::default();
    let config = presets::ideal_calibration();
    let mut models = Vec::new();
    let mut cals = Vec::new();
    for spec in presets::headline_pair() {
        let model = spec.gate_model(&pair, &flux).expect("headline design");
        cals.push(calibrate(&model, &config).expect("headline calibration"));
        models.push((spec.family, model));
    }
    Headline { models, cals }
}

fn criterion_1() -> Outcome {
    // DPSS orthogonality over the first five orders
    let (n, nw) = (201, 2.9);
    let seqs: Vec<_> = (0..5).map(|k| dpss(SlepianSpec::from_nw(n, nw, k).unwrap()).unwrap()).collect();
    let mut ortho = 0.0f64;
    for (i, a) in seqs.iter().enumerate() {
        for (j, b) in seqs.iter().enumerate() {
            let dot: f64 = a.pulse.samples().iter().zip(b.pulse.samples()).map(|(x, y)| x * y).sum();
            ortho = ortho.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    // concentration by Simpson integration of |V(f)|^2 over [-W, W]
    let w = nw / n as f64;
    let m = 20_000;
    let h = 2.0 * w / m as f64;
    let mut conc = 0.0f64;
    for s in &seqs {
        let x = s.pulse.samples();
        let mut acc = 0.0;
        for k in 0..=m {
            let f = -w + k as f64 * h;
            let c = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += c * dtft_value(x, 2.0 * PI * f).norm_sqr();
        }
        let energy: f64 = x.iter().map(|v| v * v).sum();
        conc = conc.max((acc * h / 3.0 / energy - s.eigenvalue).abs());
    }
    // Chebyshev I sidelobe extrema all at r relative to the DC gain
    let mut ripple = 0.0f64;
    for (n, r) in [(25usize, 1e-3), (101, 1e-4)] {
        let spec = Chebyshev1Spec::new(n, r).unwrap();
        let p = chebyshev1(spec).unwrap();
        let dc = dtft_value(p.samples(), 0.0).norm();
        for k in 1..=(n - 1) / 2 {
            let x = (k as f64 * PI / (n - 1) as f64).cos() / spec.x0();
            let omega = 2.0 * x.acos();
            let level = dtft_value(p.samples(), omega).norm() / dc;
            ripple = ripple.max((level - r).abs() / r);
        }
    }
    // WCA with the Dolph band edge coincides with Chebyshev I
    let cheb = Chebyshev1Spec::new(25, 1e-3).unwrap();
    let edge = 2.0 * (1.0 / cheb.x0()).acos();
    let spec = WcaSpec::new(25, WcaCase::One, vec![Band::point(0.0, 1.0, 1.0), Band::constant(edge, PI, 0.0, 1.0)])
        .unwrap();
    let wca = wca_design(&spec).unwrap();
    let wca = wca.scaled(1.0 / wca.amplitude_at(0.0));
    let dolph = chebyshev1(cheb).unwrap();
    let coeff = wca.samples().iter().zip(dolph.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(
        ortho < 1e-8 && conc < 1e-8 && ripple < 1e-6 && coeff < 1e-6,
        format!("orthogonality {ortho:.1e}, concentration {conc:.1e}, ripple {ripple:.1e}, dolph {coeff:.1e}"),
    )
}

fn normalized(spec: TrajectorySpec) -> ControlTrajectory {
    ControlTrajectory::new(&spec.design().unwrap(), 0.1, 1.5).unwrap()
}

fn criterion_2() -> Outcome {
    let level = presets::HEADLINE_GAMMA;
    let star = |spec: TrajectorySpec| {
        let traj = normalized(spec);
        dtft_samples(traj.g(), Symmetry::Antisymmetric, 1 << 15).crossover_frequency(level)
    };
    let [sl, ch] = presets::headline_pair();
    match (star(sl), star(ch)) {
        (Some(s), Some(c)) => outcome(c < s, format!("omega*_ch2 = {c:.5}, omega*_sl2 = {s:.5} rad/sample")),
        other => outcome(false, format!("crossover not found: {other:?}")),
    }
}

fn criterion_3() -> Outcome {
    let delta = 1.0;
    let mut worst = 0.0f64;
    let mut relation = 0.0f64;
    for k in 0..7 {
        let target = 10f64.powf(-4.0 + 0.5 * k as f64);
        let alpha = PI * delta * delta / (2.0 * (1.0 / target).ln());
        let span = 20.0 * delta / alpha;
        let t_end = span * delta / alpha;
        let steps = (2.0 * t_end * span * delta / 0.2).ceil() as usize;
        let sim = landau_zener_sim(delta, alpha, span, steps).unwrap();
        let p = LzParams::new(delta, alpha).unwrap();
        worst = worst.max((sim - lz_probability(p)).abs() / lz_probability(p));
        relation = relation.max(lz_relation_residual(p).abs());
    }
    outcome(worst < 0.05 && relation < 1e-12, format!("max relative error {worst:.2e}, relation residual {relation:.1e}"))
}

fn local_minima(t: &[f64], y: &[f64]) -> Vec<f64> {
    (1..y.len() - 1).filter(|&i| y[i] < y[i - 1] && y[i] <= y[i + 1]).map(|i| t[i]).collect()
}

fn local_peaks(y: &[f64]) -> Vec<f64> {
    (1..y.len() - 1).filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1]).map(|i| y[i].log10()).collect()
}

/// Upper envelope of a peak sequence: the peaks not lower than their
/// neighbouring peaks. The simulated lobes alternate in height, so the raw
/// sequence zig-zags around its envelope.
fn upper_envelope(peaks: &[f64]) -> Vec<f64> {
    let n = peaks.len();
    (0..n)
        .filter(|&i| (i == 0 || peaks[i] >= peaks[i - 1]) && (i + 1 == n || peaks[i] >= peaks[i + 1]))
        .map(|i| peaks[i])
        .collect()
}

fn criterion_4() -> Outcome {
    let delta = presets::VALIDITY_DELTA;
    let (theta_ini, theta_mid) = presets::validity_angles();
    let tds = presets::validity_durations();
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    let mut drops = Vec::new();
    let mut shapes_ok = true;
    for spec in presets::headline_pair() {
        let traj = ControlTrajectory::new(&spec.design().unwrap(), theta_ini, theta_mid).unwrap();
        let ana: Vec<f64> = tds.iter().map(|&td| analytic_leakage(&traj, td, delta).pe).collect();
        let sim: Vec<f64> = tds.iter().map(|&td| two_level_leakage_sim(&traj, td, delta, 2000).unwrap()).collect();
        let (ma, ms) = (local_minima(&tds, &ana), local_minima(&tds, &sim));
        if ma.len() != ms.len() || ma.is_empty() {
            shapes_ok = false;
        }
        for a in &ma {
            let near = ms.iter().map(|s| (s - a).abs() / a).fold(f64::INFINITY, f64::min);
            worst = worst.max(near);
        }
        let peaks = upper_envelope(&local_peaks(&sim));
        let rises = peaks.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        let drop = peaks.first().unwrap_or(&0.0) - peaks.last().unwrap_or(&0.0);
        notes.push(format!(
            "{}: {} minima, {} envelope peaks, drop {drop:.2} dex, largest rise {rises:.3} dex",
            spec.family.as_str(),
            ma.len(),
            peaks.len()
        ));
        drops.push((spec.family, drop, rises));
    }
    let (_, sl_drop, sl_rise) = drops[0];
    let (_, ch_drop, ch_rise) = drops[1];
    // Slepian strictly decreasing; Chebyshev never rising by more than
    // 0.05 dex per lobe and falling less than the Slepian overall
    let envelope = sl_rise < 0.0 && sl_drop > 0.0 && ch_rise < 0.05 && ch_drop > -0.05 && ch_drop < sl_drop;
    outcome(
        shapes_ok && worst < 0.03 && envelope,
        format!("max minima offset {:.2}%; {}", 100.0 * worst, notes.join("; ")),
    )
}

fn criterion_5(h: &Headline) -> Outcome {
    let reference = [(47.0, -4.66), (46.1, -4.72)];
    let mut pass = true;
    let mut notes = Vec::new();
    let mut phase = 0.0f64;
    for (((family, _), cal), (td_ref, pe_ref)) in h.models.iter().zip(&h.cals).zip(reference) {
        phase = cal.contour.iter().map(|g| (g.cond_phase.abs() - PI).abs()).fold(phase, f64::max);
        match cal.best_point() {
            Some(b) => {
                let lp = b.pe.log10();
                pass &= (b.td - td_ref).abs() <= 1.0 && (lp - pe_ref).abs() <= 0.2;
                notes.push(format!("{} td {:.2} ns log10 Pe {lp:.3}", family.as_str(), b.td));
            }
            None => {
                pass = false;
                notes.push(format!("{} no operating point", family.as_str()));
            }
        }
    }
    pass &= phase < 1e-3;
    outcome(pass, format!("{}; max |phi' - pi| on contour {phase:.1e}", notes.join(", ")))
}

const COMPARISON_REFERENCE: [(f64, f64); 8] =
    [(1.8e-4, 1.5e-4), (8.4e-5, 6.8e-5), (3.7e-5, 1.8e-5), (1.7e-5, 9.5e-6), (7.3e-6, 4.0e-6), (4.2e-6, 2.9e-6), (6.8e-6, 2.2e-6), (1.2e-6, 1.7e-6)];

fn criterion_6(h: &Headline) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for ((family, _), cal) in h.models.iter().zip(&h.cals) {
        let reference = if *family == Family::Slepian { 5.5e-6 } else { 6.8e-6 };
        match cal.best_point() {
            Some(b) => {
                let inf = 1.0 - b.fg;
                let ratio = inf / reference;
                pass &= (0.5..=2.0).contains(&ratio);
                notes.push(format!("{} 1-Fg {inf:.2e} (x{ratio:.2})", family.as_str()));
            }
            None => pass = false,
        }
    }
    let pair = TransmonPair::default();
    let flux = FluxMapParams::default();
    let config = presets::comparison_calibration();
    let mut agree = 0;
    let mut rows = Vec::new();
    for (row, specs) in presets::comparison_pairs(presets::PULSE_LENGTH).unwrap().iter().enumerate() {
        let inf: Vec<Option<f64>> = specs
            .iter()
            .map(|s| {
                let cal = calibrate(&s.gate_model(&pair, &flux).unwrap(), &config).unwrap();
                cal.best_point().map(|b| 1.0 - b.fg)
            })
            .collect();
        let (ps, pc) = COMPARISON_REFERENCE[row];
        let label = (b'a' + row as u8) as char;
        if let (Some(s), Some(c)) = (inf[0], inf[1]) {
            if (c < s) == (pc < ps) {
                agree += 1;
            }
            rows.push(format!("({label}) {s:.1e}/{c:.1e}"));
        } else {
            rows.push(format!("({label}) missing"));
        }
    }
    pass &= agree >= 6;
    outcome(pass, format!("{}; comparison sign agreement {agree}/8 [{}]", notes.join(", "), rows.join(" ")))
}

const HARDWARE_REFERENCE: [[(f64, f64); 2]; 4] = [
    [(51.9, -3.14), (51.5, -3.15)],
    [(48.5, -3.91), (47.6, -3.96)],
    [(47.0, -4.47), (46.0, -4.55)],
    [(47.0, -4.62), (46.0, -4.69)],
];

fn criterion_7(h: &Headline) -> Outcome {
    let specs = presets::hardware_specs();
    let families: Vec<(String, GateModel)> =
        h.models.iter().map(|(f, m)| (f.as_str().to_string(), m.clone())).collect();
    let rows: Vec<HardwareRow> = hardware_sweep(&families, &specs, &presets::hardware_calibration()).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for r in &rows {
        let f = families.iter().position(|(name, _)| *name == r.family).unwrap();
        let (td_ref, pe_ref) = HARDWARE_REFERENCE[r.index][f];
        match (r.td, r.log10_pe) {
            (Some(td), Some(lp)) => {
                let ok = (td - td_ref).abs() <= 1.5 && (lp - pe_ref).abs() <= 0.25;
                pass &= ok;
                notes.push(format!(
                    "({},{}) {} {td:.2}/{lp:.2}{}",
                    r.fs,
                    r.bw,
                    r.family,
                    if ok { "" } else { " off" }
                ));
            }
            _ => {
                pass = false;
                notes.push(format!("({},{}) {} none", r.fs, r.bw, r.family));
            }
        }
    }
    // waveform deviation at the ideal operating points
    let mut monotone = true;
    let mut devs = Vec::new();
    for ((_, model), cal) in h.models.iter().zip(&h.cals) {
        let Some(b) = cal.best_point() else {
            monotone = false;
            continue;
        };
        let ideal = model.pulse(b.td, b.amplitude).unwrap();
        let d: Vec<f64> = specs
            .iter()
            .map(|hw| {
                let fine = ideal.dt().min(hw.max_fine_dt());
                max_deviation(&ideal, &apply_hardware(&ideal, hw, &model.flux, &model.pair, fine).unwrap())
            })
            .collect();
        monotone &= d.windows(2).all(|w| w[1] < w[0]);
        devs.push(d.iter().map(|v| format!("{:.3}", fluxpulse::radns_to_ghz(*v))).collect::<Vec<_>>().join(">"));
    }
    pass &= monotone;
    outcome(pass, format!("{}; max |w1hat - w1| GHz {}", notes.join(", "), devs.join(" / ")))
}

fn criterion_8(h: &Headline) -> Outcome {
    let mut drift = 0.0f64;
    let mut dphi = 0.0f64;
    let mut dlog = 0.0f64;
    let mut sym = 0.0f64;
    for ((_, model), cal) in h.models.iter().zip(&h.cals) {
        let Some(b) = cal.best_point() else { return outcome(false, "no operating point".into()) };
        let coarse = model.unitary(b.td, b.amplitude).unwrap();
        let fine = model.clone().with_steps(2 * model.steps).unitary(b.td, b.amplitude).unwrap();
        drift = drift.max(coarse.norm_drift).max(coarse.unitarity_error()).max(fine.unitarity_error());
        dphi = dphi.max(wrap_phase(coarse.conditional_phase() - fine.conditional_phase()).abs());
        dlog = dlog.max((coarse.leakage().log10() - fine.leakage().log10()).abs());
        let eps = model.pulse(b.td, b.amplitude).unwrap().epsilon;
        let scale = eps.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let n = eps.len();
        sym = (0..n).map(|k| (eps[k] - eps[n - 1 - k]).abs() / scale).fold(sym, f64::max);
    }
    // Exact up to rounding of c * td * delta. G is a cancelling sum, so the
    // residual is measured against its uncancelled scale (sum |g|)^2 / 4;
    // the plain relative residual is reported alongside.
    let mut scaling = 0.0f64;
    let mut relative = 0.0f64;
    for spec in presets::headline_pair() {
        let traj = normalized(spec);
        let bound = traj.g().iter().map(|v| v.abs()).sum::<f64>().powi(2) / 4.0;
        for (td, delta, c) in [(40.0, 0.25, 1.5), (55.0, 0.2, 0.7), (30.0, 0.3, 3.0)] {
            let a = analytic_leakage(&traj, c * td, delta).pe;
            let b = analytic_leakage(&traj, td, c * delta).pe;
            scaling = scaling.max((a - b).abs() / bound);
            relative = relative.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
        }
    }
    outcome(
        drift < 1e-9 && dphi < 1e-5 && dlog < 0.01 && sym < 1e-6 && scaling < 1e-12,
        format!(
            "unitarity {drift:.1e}, halving dphi {dphi:.1e} rad dlog10Pe {dlog:.1e}, epsilon symmetry {sym:.1e}, scaling {scaling:.1e} (relative to pe {relative:.1e})"
        ),
    )
}

fn main() {
    let mut results = Vec::new();
    let mut run = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        println!(
            "criterion {n} [{name}]: {} ({:.1} s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        results.push(o.pass);
    };
    run(1, "window correctness", &mut criterion_1);
    run(2, "frequency crossover", &mut criterion_2);
    run(3, "landau-zener oracle", &mut criterion_3);
    run(4, "two-level validity", &mut criterion_4);
    let h = headline();
    run(5, "headline operating points", &mut || criterion_5(&h));
    run(6, "fidelity", &mut || criterion_6(&h));
    run(7, "hardware sweep", &mut || criterion_7(&h));
    run(8, "numerical hygiene", &mut || criterion_8(&h));
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed < results.len() && std::env::var_os("FLUXPULSE_STRICT_ACCEPTANCE").is_some() {
        std::process::exit(1);
    }
}
