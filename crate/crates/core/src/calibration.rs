// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Duration/amplitude scans, the phi = pi contour and operating points.
//!
//! The conditional phase is increasing in the amplitude near the contour, so
//! the contour is found by root finding in A at fixed duration. Operating
//! points are the lobe extrema of the leakage along the contour.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::{apply_hardware, HardwareSpec};
use crate::interp::Pchip;
use crate::sim::{gate_unitary, wrap_phase, GatePoint, GateUnitary, TransmonPair, DEFAULT_STEPS};
use crate::trajectory::{build_physical_pulse, ControlTrajectory, FluxMapParams, PhysicalPulse};

/// Everything needed to turn (td, A) into a simulated gate.
#[derive(Debug, Clone)]
pub struct GateModel {
    pub traj: ControlTrajectory,
    pub pair: TransmonPair,
    pub flux: FluxMapParams,
    /// Propagation steps over the programmed duration.
    pub steps: usize,
    pub hardware: Option<HardwareSpec>,
}

impl GateModel {
    pub fn new(traj: ControlTrajectory, pair: TransmonPair, flux: FluxMapParams) -> Self {
        GateModel { traj, pair, flux, steps: DEFAULT_STEPS, hardware: None }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_hardware(mut self, hw: Option<HardwareSpec>) -> Self {
        self.hardware = hw;
        self
    }

    pub fn pulse(&self, td: f64, amplitude: f64) -> Result<PhysicalPulse> {
        let dt = td / self.steps as f64;
        let ideal = build_physical_pulse(&self.traj, td, amplitude, &self.pair, &self.flux, dt)?;
        match &self.hardware {
            None => Ok(ideal),
            Some(hw) => {
                let fine = dt.min(hw.max_fine_dt());
                apply_hardware(&ideal, hw, &self.flux, &self.pair, fine)
            }
        }
    }

    pub fn unitary(&self, td: f64, amplitude: f64) -> Result<GateUnitary> {
        gate_unitary(&self.pair, &self.pulse(td, amplitude)?)
    }

    pub fn simulate(&self, td: f64, amplitude: f64) -> Result<GatePoint> {
        Ok(GatePoint::from_unitary(&self.unitary(td, amplitude)?, td, amplitude))
    }
}

pub const DEFAULT_MIN_PROMINENCE: f64 = 0.15;
pub const DEFAULT_ENVELOPE_WINDOW: f64 = 1.5;

/// Grids and selection rules for a calibration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub td_min: f64,
    pub td_max: f64,
    pub td_step: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub a_step: f64,
    pub selector: LobeSelector,
    /// Smallest topographic prominence of an accepted extremum, in decades
    /// of pe.
    pub min_prominence: f64,
    /// Width in ns of the running-extremum envelope on which lobes are
    /// detected; suppresses ripple faster than a lobe.
    pub envelope_window: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            td_min: 30.0,
            td_max: 80.0,
            td_step: 0.1,
            a_min: 0.80,
            a_max: 1.00,
            a_step: 0.002,
            selector: LobeSelector::Peak,
            min_prominence: DEFAULT_MIN_PROMINENCE,
            envelope_window: DEFAULT_ENVELOPE_WINDOW,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.td_min > 0.0
            && self.td_max >= self.td_min
            && self.td_step > 0.0
            && self.a_min >= 0.0
            && self.a_max <= 1.0
            && self.a_max > self.a_min
            && self.a_step > 0.0
            && self.min_prominence >= 0.0
            && self.envelope_window >= 0.0;
        if !ok {
            return Err(Error::InvalidSpec(format!("calibration grids are inconsistent: {self:?}")));
        }
        Ok(())
    }

    pub fn td_grid(&self) -> Vec<f64> {
        grid(self.td_min, self.td_max, self.td_step)
    }

    pub fn a_grid(&self) -> Vec<f64> {
        grid(self.a_min, self.a_max, self.a_step)
    }
}

/// Inclusive uniform grid; the endpoint is kept when the step lands on it.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + step * k as f64).collect()
}

/// Phase and leakage on a rectangular (td, A) grid; rows are durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub durations: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phase: Vec<Vec<f64>>,
    pub leakage: Vec<Vec<f64>>,
}

fn check_ascending(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() || v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSpec(format!("{name} grid must be nonempty and ascending")));
    }
    Ok(())
}

pub fn scan(model: &GateModel, td_grid: &[f64], a_grid: &[f64]) -> Result<ScanResult> {
    check_ascending("duration", td_grid)?;
    check_ascending("amplitude", a_grid)?;
    let na = a_grid.len();
    let cells: Vec<(f64, f64)> = (0..td_grid.len() * na)
        .into_par_iter()
        .map(|k| {
            let u = model.unitary(td_grid[k / na], a_grid[k % na])?;
            Ok((u.conditional_phase(), u.leakage()))
        })
        .collect::<Result<_>>()?;
    let rows = |f: fn(&(f64, f64)) -> f64| -> Vec<Vec<f64>> {
        cells.chunks(na).map(|r| r.iter().map(f).collect()).collect()
    };
    Ok(ScanResult {
        durations: td_grid.to_vec(),
        amplitudes: a_grid.to_vec(),
        phase: rows(|c| c.0),
        leakage: rows(|c| c.1),
    })
}

/// One point of the phi = pi contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub td: f64,
    pub amplitude: f64,
    pub pe: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContourCurve {
    pub points: Vec<ContourPoint>,
}

impl ContourCurve {
    pub fn from_gates(gates: &[GatePoint]) -> ContourCurve {
        let points = gates.iter().map(|g| ContourPoint { td: g.td, amplitude: g.amplitude, pe: g.pe }).collect();
        ContourCurve { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Unwraps a phase sequence so consecutive samples differ by less than pi.
fn unwrap(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut prev = match phase.first() {
        Some(p) => *p,
        None => return out,
    };
    out.push(prev);
    for &p in &phase[1..] {
        prev += wrap_phase(p - prev);
        out.push(prev);
    }
    out
}

/// Extracts the contour from a grid scan by monotone interpolation of the
/// unwrapped phase in A.
pub fn pi_contour(scan: &ScanResult) -> Result<ContourCurve> {
    let a = &scan.amplitudes;
    let mut points = Vec::new();
    let mut ambiguous = Vec::new();
    for (i, &td) in scan.durations.iter().enumerate() {
        let ph = unwrap(&scan.phase[i]);
        let pairs = 0..ph.len().saturating_sub(1);
        let up: Vec<usize> = pairs.clone().filter(|&j| ph[j] < PI && ph[j + 1] >= PI).collect();
        let down = pairs.filter(|&j| ph[j] >= PI && ph[j + 1] < PI).count();
        let j = match (up.as_slice(), down) {
            ([], 0) => {
                log::info!("no phi = pi crossing at td = {td}");
                continue;
            }
            ([j], 0) => *j,
            _ => {
                ambiguous.push(td);
                continue;
            }
        };
        let amp = if a.len() == 2 {
            a[j] + (PI - ph[j]) * (a[j + 1] - a[j]) / (ph[j + 1] - ph[j])
        } else {
            let interp = Pchip::new(a.clone(), ph.clone())?;
            bisect(|x| interp.eval(x) - PI, a[j], a[j + 1])
        };
        let pe = if a.len() == 2 {
            let w = (amp - a[j]) / (a[j + 1] - a[j]);
            scan.leakage[i][j] * (1.0 - w) + scan.leakage[i][j + 1] * w
        } else {
            Pchip::new(a.clone(), scan.leakage[i].clone())?.eval(amp).max(0.0)
        };
        points.push(ContourPoint { td, amplitude: amp, pe });
    }
    if !ambiguous.is_empty() {
        return Err(Error::AmbiguousContour(ambiguous));
    }
    Ok(ContourCurve { points })
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo < 1e-15 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}


const MARCH_STEP: f64 = 0.004;
const PHASE_TOL: f64 = 1e-7;

/// Finds A in [lo, hi] with phi' = pi at duration `td`, marching from
/// `guess` and refining with Illinois regula falsi. Returns `None` when the
/// phase does not reach pi inside the interval.
pub fn solve_amplitude(
    model: &GateModel,
    td: f64,
    guess: f64,
    lo: f64,
    hi: f64,
) -> Result<Option<(f64, GateUnitary)>> {
    let eval = |a: f64| -> Result<(f64, GateUnitary)> {
        let u = model.unitary(td, a)?;
        Ok((wrap_phase(u.conditional_phase() - PI), u))
    };
    let mut a0 = guess.clamp(lo, hi);
    let (mut f0, mut u0) = eval(a0)?;
    if f0.abs() < PHASE_TOL {
        return Ok(Some((a0, u0)));
    }
    // below pi means the amplitude must grow
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
    let (a1, f1, u1) = loop {
        if (dir > 0.0 && a0 >= hi) || (dir < 0.0 && a0 <= lo) {
            return Ok(None);
        }
        let a = (a0 + dir * MARCH_STEP).clamp(lo, hi);
        let (f, u) = eval(a)?;
        if f.abs() < PHASE_TOL {
            return Ok(Some((a, u)));
        }
        // a sign change with a jump of ~2 pi is the wrap at phi' = 0
        if f0 * f < 0.0 && (f - f0).abs() < PI {
            break (a, f, u);
        }
        a0 = a;
        f0 = f;
        u0 = u;
    };
    let (mut xa, mut fa, mut xb, mut fb) = (a0, f0, a1, f1);
    let mut best = if f0.abs() < f1.abs() { (f0, a0, u0) } else { (f1, a1, u1) };
    let mut side = 0i8;
    for _ in 0..60 {
        let x = (xa * fb - xb * fa) / (fb - fa);
        let (fx, ux) = eval(x)?;
        let done = fx.abs() < PHASE_TOL;
        if fx.abs() < best.0.abs() {
            best = (fx, x, ux);
        }
        if done || (xb - xa).abs() < 1e-13 {
            break;
        }
        if (fx < 0.0) == (fa < 0.0) {
            xa = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            xb = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok(Some((best.1, best.2)))
}

/// Simulated gate on the contour at one duration, or `None` if the phase
/// does not reach pi for A in [lo, hi].
pub fn solve_contour_point(model: &GateModel, td: f64, guess: f64, lo: f64, hi: f64) -> Result<Option<GatePoint>> {
    let found = solve_amplitude(model, td, guess, lo, hi)?;
    Ok(found.map(|(a, u)| GatePoint::from_unitary(&u, td, a)))
}

const CHUNK: usize = 16;

/// Contour by direct root finding at every duration. Durations are split
/// into chunks evaluated in parallel; inside a chunk each root seeds the
/// next search.
pub fn contour_direct(model: &GateModel, td_grid: &[f64], lo: f64, hi: f64) -> Result<Vec<GatePoint>> {
    check_ascending("duration", td_grid)?;
    let chunks: Vec<Vec<GatePoint>> = td_grid
        .par_chunks(CHUNK)
        .map(|tds| {
            let mut out = Vec::with_capacity(tds.len());
            let mut guess = 0.5 * (lo + hi);
            for &td in tds {
                match solve_contour_point(model, td, guess, lo, hi)? {
                    Some(gp) => {
                        guess = gp.amplitude;
                        out.push(gp);
                    }
                    None => log::info!("no phi = pi crossing at td = {td}"),
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Which extrema of pe(td) along the contour count as operating points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LobeSelector {
    /// Lobe maxima, where pe is stationary and any duration error lowers it.
    Peak,
    /// Lobe minima.
    Trough,
}

/// A refined extremum of the leakage along the contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeExtremum {
    pub td: f64,
    pub amplitude: f64,
    pub pe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeSearch {
    pub extrema: Vec<LobeExtremum>,
    /// Set when the curve has no extremum of the requested kind.
    pub monotone: bool,
}

/// Height of the peak at `i` above the higher of its two bases, where a
/// base is the lowest point before the curve rises above the peak again
/// (or ends).
pub fn prominence(y: &[f64], i: usize) -> f64 {
    let side = |range: &mut dyn Iterator<Item = usize>| {
        let mut low = y[i];
        for j in range {
            if y[j] > y[i] {
                break;
            }
            low = low.min(y[j]);
        }
        low
    };
    let left = side(&mut (0..i).rev());
    let right = side(&mut (i + 1..y.len()));
    y[i] - left.max(right)
}

/// Lobe extrema of log10 pe(td).
///
/// The curve is replaced by its running maximum over `window` ns (running
/// minimum for troughs). Each plateau of that envelope that rises above
/// both neighbours by at least `min_prominence` decades marks one lobe,
/// located at the extreme raw sample inside the plateau and refined by a
/// parabola through its neighbours. Plateaus touching either end of the
/// curve are partial lobes and are skipped. With `window = 0` this is the
/// plain three-point test.
pub fn lobe_extrema(
    curve: &ContourCurve,
    selector: LobeSelector,
    min_prominence: f64,
    window: f64,
) -> Result<LobeSearch> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(Error::InvalidSpec(format!("need at least 3 contour points, got {}", pts.len())));
    }
    if pts.windows(2).any(|w| !(w[1].td > w[0].td)) {
        return Err(Error::InvalidSpec("contour durations must be strictly increasing".into()));
    }
    let sign = match selector {
        LobeSelector::Peak => 1.0,
        LobeSelector::Trough => -1.0,
    };
    let n = pts.len();
    let y: Vec<f64> = pts.iter().map(|p| sign * p.pe.max(f64::MIN_POSITIVE).log10()).collect();
    let half = 0.5 * window + 1e-9;
    let env: Vec<f64> = (0..n)
        .map(|i| {
            let lo = pts.partition_point(|p| p.td < pts[i].td - half);
            let hi = pts.partition_point(|p| p.td <= pts[i].td + half);
            y[lo..hi].iter().copied().fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let mut extrema = Vec::new();
    let mut any = false;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && env[end + 1] == env[start] {
            end += 1;
        }
        let interior = start > 0 && end + 1 < n;
        if interior && env[start - 1] < env[start] && env[end + 1] < env[start] {
            any = true;
            let prom = prominence(&env, start);
            let i = (start..=end).max_by(|&a, &b| y[a].total_cmp(&y[b]).then(b.cmp(&a))).expect("nonempty run");
            if prom < min_prominence {
                log::debug!("dropping extremum at td = {} (prominence {prom:.3})", pts[i].td);
            } else if i == 0 || i + 1 == n || !(y[i] >= y[i - 1] && y[i] >= y[i + 1]) {
                extrema.push(LobeExtremum { td: pts[i].td, amplitude: pts[i].amplitude, pe: pts[i].pe });
            } else {
                let logs: Vec<f64> = y[i - 1..=i + 1].iter().map(|v| sign * v).collect();
                extrema.push(refine(&pts[i - 1..=i + 1], &logs));
            }
        }
        start = end + 1;
    }
    Ok(LobeSearch { extrema, monotone: !any })
}

fn refine(p: &[ContourPoint], y: &[f64]) -> LobeExtremum {
    let (x0, x1, x2) = (p[0].td, p[1].td, p[2].td);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let x = if den == 0.0 { x1 } else { (x1 - 0.5 * num / den).clamp(x0, x2) };
    // Lagrange form of the parabola through the three samples
    let l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    let logpe = l0 * y0 + l1 * y1 + l2 * y2;
    let (a, b) = if x <= x1 { (0, 1) } else { (1, 2) };
    let w = (x - p[a].td) / (p[b].td - p[a].td);
    LobeExtremum {
        td: x,
        amplitude: p[a].amplitude * (1.0 - w) + p[b].amplitude * w,
        pe: 10f64.powf(logpe),
    }
}

/// Re-simulated operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub td: f64,
    pub amplitude: f64,
    pub pe: f64,
    pub fg: f64,
    pub cond_phase: f64,
    pub is_best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub contour: Vec<GatePoint>,
    pub operating_points: Vec<OperatingPoint>,
    /// Index into `operating_points` of the shortest one.
    pub best: Option<usize>,
    pub monotone: bool,
}

impl Calibration {
    pub fn best_point(&self) -> Option<&OperatingPoint> {
        self.best.map(|i| &self.operating_points[i])
    }
}

/// Re-solves the contour at each refined extremum and marks the shortest.
pub fn operating_points(model: &GateModel, search: &LobeSearch, lo: f64, hi: f64) -> Result<Vec<OperatingPoint>> {
    let mut out: Vec<OperatingPoint> = search
        .extrema
        .par_iter()
        .map(|e| {
            let gp = solve_contour_point(model, e.td, e.amplitude, lo, hi)?;
            Ok(gp.map(|g| OperatingPoint {
                td: g.td,
                amplitude: g.amplitude,
                pe: g.pe,
                fg: g.fg,
                cond_phase: g.cond_phase,
                is_best: false,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if let Some(first) = out.first_mut() {
        first.is_best = true;
    }
    Ok(out)
}

/// Contour, lobe search and operating points for one model.
pub fn calibrate(model: &GateModel, config: &CalibrationConfig) -> Result<Calibration> {
    config.validate()?;
    let contour = contour_direct(model, &config.td_grid(), config.a_min, config.a_max)?;
    let curve = ContourCurve::from_gates(&contour);
    if curve.len() < 3 {
        return Err(Error::DegeneratePulse(format!(
            "only {} contour points inside the scan window",
            curve.len()
        )));
    }
    let search = lobe_extrema(&curve, config.selector, config.min_prominence, config.envelope_window)?;
    let ops = operating_points(model, &search, config.a_min, config.a_max)?;
    let best = if ops.is_empty() { None } else { Some(0) };
    Ok(Calibration { contour, operating_points: ops, best, monotone: search.monotone })
}
