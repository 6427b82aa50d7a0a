// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Weighted Chebyshev approximation of linear-phase pulses by Remez exchange.
//!
//! Each linear-phase case writes the amplitude as A(w) = Q(w) P(w) with P a
//! cosine polynomial of L terms. The exchange runs on the reduced problem
//! `What |Dhat - P|` with `What = W Q` and `Dhat = D / Q`, interpolating P in
//! x = cos w with the barycentric formula. Barycentric weights are formed in
//! the log domain because products of L node differences underflow once L
//! reaches a few hundred.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Chebyshev1Spec, Pulse, Symmetry};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 60;
const CONVERGENCE_SPREAD: f64 = 1e-10;
/// Relative change of |delta| below which the exchange is considered settled.
const STALL_TOLERANCE: f64 = 1e-11;
const STALL_SPREAD: f64 = 1e-6;
const DEFAULT_GRID_DENSITY: usize = 16;
/// Grid points where |Q| falls below this are dropped (the band is open there).
const Q_FLOOR: f64 = 1e-9;

/// The four linear-phase FIR classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WcaCase {
    /// Symmetric, odd length.
    One,
    /// Symmetric, even length.
    Two,
    /// Antisymmetric, odd length.
    Three,
    /// Antisymmetric, even length.
    Four,
}

impl WcaCase {
    pub fn from_parts(symmetry: Symmetry, n: usize) -> Result<Self> {
        match (symmetry, n % 2) {
            (Symmetry::Symmetric, 1) => Ok(WcaCase::One),
            (Symmetry::Symmetric, _) => Ok(WcaCase::Two),
            (Symmetry::Antisymmetric, 1) => Ok(WcaCase::Three),
            (Symmetry::Antisymmetric, _) => Ok(WcaCase::Four),
            (Symmetry::None, _) => Err(Error::InvalidSpec("weighted approximation needs a linear-phase symmetry".into())),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            WcaCase::One => 1,
            WcaCase::Two => 2,
            WcaCase::Three => 3,
            WcaCase::Four => 4,
        }
    }

    pub fn symmetry(self) -> Symmetry {
        match self {
            WcaCase::One | WcaCase::Two => Symmetry::Symmetric,
            WcaCase::Three | WcaCase::Four => Symmetry::Antisymmetric,
        }
    }

    fn odd_length(self) -> bool {
        matches!(self, WcaCase::One | WcaCase::Three)
    }

    /// Number of cosine terms in P for a length-n pulse.
    fn num_coefficients(self, n: usize) -> usize {
        match self {
            WcaCase::One => (n - 1) / 2 + 1,
            WcaCase::Two | WcaCase::Four => n / 2,
            WcaCase::Three => (n - 1) / 2,
        }
    }

    fn q(self, omega: f64) -> f64 {
        match self {
            WcaCase::One => 1.0,
            WcaCase::Two => (omega / 2.0).cos(),
            WcaCase::Three => omega.sin(),
            WcaCase::Four => (omega / 2.0).sin(),
        }
    }
}

/// A closed frequency band with linearly varying desired amplitude and constant weight.
///
/// `lower == upper` describes a single constraint point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
    pub desired_lower: f64,
    pub desired_upper: f64,
    pub weight: f64,
}

impl Band {
    pub fn constant(lower: f64, upper: f64, desired: f64, weight: f64) -> Self {
        Band {
            lower,
            upper,
            desired_lower: desired,
            desired_upper: desired,
            weight,
        }
    }

    pub fn point(omega: f64, desired: f64, weight: f64) -> Self {
        Band::constant(omega, omega, desired, weight)
    }

    fn desired(&self, omega: f64) -> f64 {
        if self.upper == self.lower {
            self.desired_lower
        } else {
            let t = (omega - self.lower) / (self.upper - self.lower);
            self.desired_lower + t * (self.desired_upper - self.desired_lower)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WcaSpec {
    pub n: usize,
    pub case: WcaCase,
    pub bands: Vec<Band>,
    /// Grid points per band, in units of L points per pi of bandwidth.
    pub grid_density: usize,
}

impl WcaSpec {
    pub fn new(n: usize, case: WcaCase, bands: Vec<Band>) -> Result<Self> {
        let spec = WcaSpec {
            n,
            case,
            bands,
            grid_density: DEFAULT_GRID_DENSITY,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidSpec(format!("pulse length must be >= 3, got {}", self.n)));
        }
        if self.case.odd_length() != (self.n % 2 == 1) {
            return Err(Error::InvalidSpec(format!(
                "case {} is incompatible with length {}",
                self.case.id(),
                self.n
            )));
        }
        if self.bands.is_empty() {
            return Err(Error::InvalidSpec("at least one band is required".into()));
        }
        if self.grid_density < 2 {
            return Err(Error::InvalidSpec("grid density must be at least 2".into()));
        }
        let mut prev_upper = f64::NEG_INFINITY;
        for band in &self.bands {
            if !(0.0..=PI).contains(&band.lower) || !(0.0..=PI).contains(&band.upper) || band.lower > band.upper {
                return Err(Error::InvalidSpec(format!(
                    "band [{}, {}] is not an interval inside [0, pi]",
                    band.lower, band.upper
                )));
            }
            if band.lower <= prev_upper {
                return Err(Error::InvalidSpec("bands must be sorted and disjoint".into()));
            }
            if !(band.weight > 0.0) {
                return Err(Error::InvalidSpec(format!("band weight must be positive, got {}", band.weight)));
            }
            if band.lower == band.upper && self.case.q(band.lower).abs() < Q_FLOOR {
                return Err(Error::InvalidSpec(format!(
                    "point constraint at {} falls on a forced zero of case {}",
                    band.lower,
                    self.case.id()
                )));
            }
            prev_upper = band.upper;
        }
        Ok(())
    }
}

/// Per-iteration record of the exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemezTrace {
    /// Levelled error |delta| of every reference set, in order.
    pub deltas: Vec<f64>,
    /// Relative spread of the extremal errors at the final iteration.
    pub spread: f64,
    /// Final extremal frequencies.
    pub extremal_frequencies: Vec<f64>,
}

impl RemezTrace {
    pub fn iterations(&self) -> usize {
        self.deltas.len()
    }

    pub fn final_delta(&self) -> f64 {
        self.deltas.last().copied().unwrap_or(f64::NAN)
    }
}

/// Runs the exchange and returns the minimax pulse.
pub fn wca_design(spec: &WcaSpec) -> Result<Pulse> {
    wca_design_traced(spec).map(|(p, _)| p)
}

/// Like [`wca_design`] but also returns the iteration trace.
pub fn wca_design_traced(spec: &WcaSpec) -> Result<(Pulse, RemezTrace)> {
    spec.validate()?;
    let l = spec.case.num_coefficients(spec.n);
    let grid = Grid::build(spec, l);
    if grid.len() < l + 1 {
        return Err(Error::InvalidSpec(format!(
            "grid holds {} usable points but {} extremal candidates are needed",
            grid.len(),
            l + 1
        )));
    }
    let mut refs: Vec<RefPoint> = initial_reference(&grid, spec, l + 1);
    let mut deltas = Vec::new();
    let mut spread = f64::INFINITY;
    let mut interp;
    let mut iteration = 0;
    loop {
        iteration += 1;
        interp = Interpolant::fit(&refs, spec)?;
        deltas.push(interp.delta.abs());
        let candidates = find_extrema(&grid, &interp, spec, &refs, l + 1);
        let Some((next, merged)) = candidates else {
            return Err(Error::RemezNonConvergence {
                iterations: iteration,
                spread,
                extremal_set: refs.iter().map(|r| r.omega).collect(),
            });
        };
        let (emax, emin) = next
            .iter()
            .fold((0.0f64, f64::INFINITY), |(hi, lo), r| (hi.max(r.err.abs()), lo.min(r.err.abs())));
        spread = (emax - emin) / emax;
        refs = next;
        // a merged reference carries the old, exactly levelled errors, so its
        // spread says nothing about convergence
        if merged {
            spread = f64::INFINITY;
        }
        if spread < CONVERGENCE_SPREAD {
            break;
        }
        // rounding in the barycentric sums near a forced zero of Q puts a
        // floor under the spread for long pulses; accept once the levelled
        // error itself has settled
        let settled = deltas.len() >= 3
            && deltas[deltas.len() - 3..]
                .windows(2)
                .all(|w| (w[1] - w[0]).abs() <= STALL_TOLERANCE * w[1]);
        if settled && spread < STALL_SPREAD {
            log::debug!("remez settled at iteration {} with spread {:.3e}", iteration, spread);
            break;
        }
        if iteration >= MAX_ITERATIONS {
            // the last reference is still a valid best estimate when the
            // spread stalls at grid resolution; only fail when it is large
            if spread > 1e-4 {
                return Err(Error::RemezNonConvergence {
                    iterations: iteration,
                    spread,
                    extremal_set: refs.iter().map(|r| r.omega).collect(),
                });
            }
            log::warn!("remez stopped at {} iterations with spread {:.3e}", iteration, spread);
            break;
        }
    }
    let pulse = reconstruct(spec, l, &interp)?;
    let trace = RemezTrace {
        deltas,
        spread,
        extremal_frequencies: refs.iter().map(|r| r.omega).collect(),
    };
    Ok((pulse, trace))
}

#[derive(Debug, Clone, Copy)]
struct RefPoint {
    omega: f64,
    /// Signed weighted error at this point (filled by the extremum search).
    err: f64,
    band: usize,
}

/// Dense evaluation grid, stored band by band.
struct Grid {
    omega: Vec<f64>,
    band: Vec<usize>,
    /// Index range of each band inside the flat arrays.
    spans: Vec<(usize, usize)>,
    /// Grid spacing of each band, for refinement.
    steps: Vec<f64>,
}

impl Grid {
    fn build(spec: &WcaSpec, l: usize) -> Self {
        let mut omega = Vec::new();
        let mut band_of = Vec::new();
        let mut spans = Vec::new();
        let mut steps = Vec::new();
        for (b, band) in spec.bands.iter().enumerate() {
            let start = omega.len();
            let width = band.upper - band.lower;
            let count = if width == 0.0 {
                1
            } else {
                ((spec.grid_density * l) as f64 * width / PI).ceil().max(2.0) as usize + 1
            };
            let step = if count > 1 { width / (count - 1) as f64 } else { 0.0 };
            for j in 0..count {
                let w = if j + 1 == count { band.upper } else { band.lower + step * j as f64 };
                if spec.case.q(w).abs() >= Q_FLOOR {
                    omega.push(w);
                    band_of.push(b);
                }
            }
            spans.push((start, omega.len()));
            steps.push(step);
        }
        Grid {
            omega,
            band: band_of,
            spans,
            steps,
        }
    }

    fn len(&self) -> usize {
        self.omega.len()
    }
}

/// Starting reference: one point per constraint point, the rest spread over
/// the interval bands with the node density of a Dolph-Chebyshev stopband
/// (clustered toward the lower band edge), snapped to the grid.
fn initial_reference(grid: &Grid, spec: &WcaSpec, count: usize) -> Vec<RefPoint> {
    let sizes: Vec<usize> = grid.spans.iter().map(|(a, b)| b - a).collect();
    let is_point: Vec<bool> = spec.bands.iter().map(|b| b.lower == b.upper).collect();
    let fixed: usize = (0..sizes.len()).filter(|&b| is_point[b] && sizes[b] > 0).count();
    let interval_total: usize = (0..sizes.len()).filter(|&b| !is_point[b]).map(|b| sizes[b]).sum();
    let mut alloc = vec![0usize; sizes.len()];
    if count >= fixed && interval_total > 0 {
        let free = count - fixed;
        let mut given = 0;
        let mut remainders = Vec::new();
        for b in 0..sizes.len() {
            if is_point[b] {
                alloc[b] = sizes[b].min(1);
            } else {
                let share = free as f64 * sizes[b] as f64 / interval_total as f64;
                alloc[b] = (share.floor() as usize).min(sizes[b]);
                given += alloc[b];
                remainders.push((share - share.floor(), b));
            }
        }
        remainders.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(_, b) in remainders.iter().cycle().take(4 * remainders.len()) {
            if given >= free {
                break;
            }
            if alloc[b] < sizes[b] {
                alloc[b] += 1;
                given += 1;
            }
        }
    }
    if alloc.iter().sum::<usize>() != count {
        return uniform_reference(grid, count);
    }
    let mut refs = Vec::with_capacity(count);
    for (b, band) in spec.bands.iter().enumerate() {
        let (start, end) = grid.spans[b];
        let k = alloc[b];
        if k == 0 {
            continue;
        }
        let omegas = &grid.omega[start..end];
        let ua = (omegas[0] / 2.0).cos();
        let ub = (omegas[omegas.len() - 1] / 2.0).cos();
        let span = (ub / ua).clamp(-1.0, 1.0).acos();
        let mut prev: Option<usize> = None;
        for j in 0..k {
            let theta = if k == 1 { 0.0 } else { span * j as f64 / (k - 1) as f64 };
            let target = if band.lower == band.upper {
                omegas[0]
            } else {
                2.0 * (ua * theta.cos()).clamp(-1.0, 1.0).acos()
            };
            let mut idx = omegas.partition_point(|&w| w < target).min(omegas.len() - 1);
            if idx > 0 && (target - omegas[idx - 1]).abs() < (omegas[idx] - target).abs() {
                idx -= 1;
            }
            if let Some(p) = prev {
                idx = idx.max(p + 1);
            }
            idx = idx.min(omegas.len() - (k - j));
            prev = Some(idx);
            refs.push(RefPoint {
                omega: omegas[idx],
                err: 0.0,
                band: b,
            });
        }
    }
    refs
}

fn uniform_reference(grid: &Grid, count: usize) -> Vec<RefPoint> {
    let n = grid.len();
    (0..count)
        .map(|k| {
            let idx = if count == 1 { 0 } else { (k * (n - 1)) / (count - 1) };
            RefPoint {
                omega: grid.omega[idx],
                err: 0.0,
                band: grid.band[idx],
            }
        })
        .collect()
}

/// Barycentric weights 1/prod(x_k - x_j) as (sign, log magnitude), rescaled to max 1.
fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    let mut logs = Vec::with_capacity(x.len());
    let mut signs = Vec::with_capacity(x.len());
    for (k, &xk) in x.iter().enumerate() {
        let mut log_mag = 0.0;
        let mut sign = 1.0;
        for (j, &xj) in x.iter().enumerate() {
            if j != k {
                let d = xk - xj;
                log_mag -= d.abs().ln();
                if d < 0.0 {
                    sign = -sign;
                }
            }
        }
        logs.push(log_mag);
        signs.push(sign);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logs.iter().zip(&signs).map(|(l, s)| s * (l - top).exp()).collect()
}

/// The reduced polynomial P for the current reference, in barycentric form.
struct Interpolant {
    delta: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl Interpolant {
    fn fit(refs: &[RefPoint], spec: &WcaSpec) -> Result<Self> {
        let (dhat, what): (Vec<f64>, Vec<f64>) = refs
            .iter()
            .map(|r| {
                let b = &spec.bands[r.band];
                let q = spec.case.q(r.omega);
                (b.desired(r.omega) / q, b.weight * q)
            })
            .unzip();
        let x: Vec<f64> = refs.iter().map(|r| r.omega.cos()).collect();
        let gamma = barycentric_weights(&x);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..refs.len() {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            num += gamma[k] * dhat[k];
            den += s * gamma[k] / what[k];
        }
        let delta = num / den;
        if !delta.is_finite() {
            return Err(Error::InvalidSpec("reference set is degenerate (coincident nodes)".into()));
        }
        let m = refs.len() - 1;
        let nodes: Vec<f64> = x[..m].to_vec();
        let values: Vec<f64> = (0..m)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                dhat[k] - s * delta / what[k]
            })
            .collect();
        let weights = barycentric_weights(&nodes);
        Ok(Interpolant {
            delta,
            nodes,
            values,
            weights,
        })
    }

    fn eval_x(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..self.nodes.len() {
            let d = x - self.nodes[k];
            if d == 0.0 {
                return self.values[k];
            }
            let t = self.weights[k] / d;
            num += t * self.values[k];
            den += t;
        }
        num / den
    }

    fn eval(&self, omega: f64) -> f64 {
        self.eval_x(omega.cos())
    }
}

fn weighted_error(spec: &WcaSpec, interp: &Interpolant, omega: f64, band: usize) -> f64 {
    let b = &spec.bands[band];
    let q = spec.case.q(omega);
    b.weight * q * (b.desired(omega) / q - interp.eval(omega))
}

/// Locates the next reference: alternating local extrema of the error.
///
/// When too few alternations survive (possible while the error is still far
/// from levelled), the previous reference is merged in: its errors alternate
/// at exactly |delta|, so the merged set always has enough of them.
fn find_extrema(
    grid: &Grid,
    interp: &Interpolant,
    spec: &WcaSpec,
    previous: &[RefPoint],
    count: usize,
) -> Option<(Vec<RefPoint>, bool)> {
    let err: Vec<f64> = (0..grid.len())
        .map(|i| weighted_error(spec, interp, grid.omega[i], grid.band[i]))
        .collect();
    let level = interp.delta.abs() * (1.0 - 1e-9);
    let cands = collect_extrema(grid, &err, spec, interp, level);
    if let Some(found) = exchange(cands, count) {
        return Some((found, false));
    }
    let cands = collect_extrema(grid, &err, spec, interp, 0.0);
    if let Some(found) = exchange(cands.clone(), count) {
        log::trace!("remez: extrema below the levelled error were needed");
        return Some((found, false));
    }
    log::trace!("remez: previous reference merged into the candidates");
    let mut merged = cands;
    for r in previous {
        let e = weighted_error(spec, interp, r.omega, r.band);
        merged.push(RefPoint { err: e, ..*r });
    }
    merged.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    merged.dedup_by(|a, b| a.omega == b.omega);
    exchange(merged, count).map(|found| (found, true))
}

/// Reduces sorted candidates to exactly `count` alternating points.
fn exchange(cands: Vec<RefPoint>, count: usize) -> Option<Vec<RefPoint>> {
    // merge runs of equal sign, keeping the larger magnitude
    let mut alt: Vec<RefPoint> = Vec::with_capacity(cands.len());
    for c in cands {
        match alt.last_mut() {
            Some(last) if last.err.signum() == c.err.signum() => {
                if c.err.abs() > last.err.abs() {
                    *last = c;
                }
            }
            _ => alt.push(c),
        }
    }
    while alt.len() > count {
        let excess = alt.len() - count;
        let (imin, _) = alt
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.err.abs().total_cmp(&b.1.err.abs()))
            .expect("nonempty");
        let last = alt.len() - 1;
        if imin == 0 || imin == last {
            alt.remove(imin);
        } else if excess == 1 {
            if alt[0].err.abs() < alt[last].err.abs() {
                alt.remove(0);
            } else {
                alt.remove(last);
            }
        } else {
            // dropping an interior point leaves two equal-sign neighbours
            alt.remove(imin);
            let keep_left = alt[imin - 1].err.abs() >= alt[imin].err.abs();
            alt.remove(if keep_left { imin } else { imin - 1 });
        }
    }
    if alt.len() < count {
        return None;
    }
    Some(alt)
}

fn collect_extrema(grid: &Grid, err: &[f64], spec: &WcaSpec, interp: &Interpolant, level: f64) -> Vec<RefPoint> {
    let mut out = Vec::new();
    for (b, &(start, end)) in grid.spans.iter().enumerate() {
        for i in start..end {
            let e = err[i];
            if e.abs() < level {
                continue;
            }
            let left = if i > start { Some(err[i - 1]) } else { None };
            let right = if i + 1 < end { Some(err[i + 1]) } else { None };
            let s = e.signum();
            let ge_left = left.is_none_or(|l| s * e >= s * l);
            let gt_right = right.is_none_or(|r| s * e > s * r);
            if !(ge_left && gt_right) {
                continue;
            }
            let (omega, e) = match (left, right) {
                (Some(_), Some(_)) => refine(spec, interp, b, grid.omega[i], grid.steps[b], s, e),
                _ => (grid.omega[i], e),
            };
            out.push(RefPoint { omega, err: e, band: b });
        }
    }
    out
}

/// Sharpens an interior extremum off the grid by repeated three-point parabolic fits.
fn refine(spec: &WcaSpec, interp: &Interpolant, band: usize, omega: f64, step: f64, sign: f64, err: f64) -> (f64, f64) {
    let lo = spec.bands[band].lower;
    let hi = spec.bands[band].upper;
    let f = |w: f64| sign * weighted_error(spec, interp, w, band);
    let (mut x, mut fx) = (omega, sign * err);
    let mut h = step;
    for _ in 0..5 {
        let (a, b) = ((x - h).max(lo), (x + h).min(hi));
        let (fa, fb) = (f(a), f(b));
        let denom = (x - a) * (fx - fb) + (b - x) * (fx - fa);
        if denom.abs() > 0.0 && (a < x && x < b) {
            let num = (x - a).powi(2) * (fx - fb) - (b - x).powi(2) * (fx - fa);
            let xn = (x - 0.5 * num / denom).clamp(a, b);
            let fxn = f(xn);
            if fxn >= fx {
                x = xn;
                fx = fxn;
            }
        }
        if fa > fx {
            x = a;
            fx = fa;
        }
        if fb > fx {
            x = b;
            fx = fb;
        }
        h *= 0.25;
    }
    (x, sign * fx)
}

/// Recovers the cosine coefficients of P and maps them back to h[n].
fn reconstruct(spec: &WcaSpec, l: usize, interp: &Interpolant) -> Result<Pulse> {
    // DCT of P on the L-point Chebyshev grid is exact for degree L-1
    let p: Vec<f64> = (0..l).map(|j| interp.eval(PI * (j as f64 + 0.5) / l as f64)).collect();
    let a: Vec<f64> = (0..l)
        .map(|k| {
            let s: f64 = p
                .iter()
                .enumerate()
                .map(|(j, v)| v * (k as f64 * PI * (j as f64 + 0.5) / l as f64).cos())
                .sum();
            if k == 0 {
                s / l as f64
            } else {
                2.0 * s / l as f64
            }
        })
        .collect();
    let at = |k: usize| a.get(k).copied().unwrap_or(0.0);
    let n = spec.n;
    let mut h = vec![0.0; n];
    match spec.case {
        WcaCase::One => {
            let m = (n - 1) / 2;
            h[m] = at(0);
            for k in 1..=m {
                h[m - k] = at(k) / 2.0;
                h[m + k] = at(k) / 2.0;
            }
        }
        WcaCase::Two => {
            let half = n / 2;
            for k in 1..=half {
                let b = if k == 1 {
                    at(0) + at(1) / 2.0
                } else {
                    (at(k - 1) + at(k)) / 2.0
                };
                h[half - k] = b / 2.0;
                h[half - 1 + k] = b / 2.0;
            }
        }
        WcaCase::Three => {
            let m = (n - 1) / 2;
            for k in 1..=m {
                let c = if k == 1 {
                    at(0) - at(2) / 2.0
                } else {
                    (at(k - 1) - at(k + 1)) / 2.0
                };
                h[m - k] = c / 2.0;
                h[m + k] = -c / 2.0;
            }
        }
        WcaCase::Four => {
            let half = n / 2;
            for k in 1..=half {
                let d = if k == 1 {
                    at(0) - at(1) / 2.0
                } else {
                    (at(k - 1) - at(k)) / 2.0
                };
                h[half - k] = d / 2.0;
                h[half - 1 + k] = -d / 2.0;
            }
        }
    }
    let label = format!("wca case {} N={}", spec.case.id(), n);
    Pulse::symmetrized(h, spec.case.symmetry(), label)
}

/// Antisymmetric equiripple trajectory pulse tuned to a target sidelobe level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chebyshev2Spec {
    pub n: usize,
    /// Target stopband level of the half-sum-normalized pulse spectrum.
    pub gamma: f64,
    /// Passband constraint frequency as a fraction of the stopband edge.
    pub passband_ratio: f64,
}

impl Chebyshev2Spec {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        let spec = Chebyshev2Spec {
            n,
            gamma,
            passband_ratio: 0.5,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 5 {
            return Err(Error::InvalidSpec(format!("chebyshev-II length must be >= 5, got {}", self.n)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidSpec(format!("target sidelobe must lie in (0, 1), got {}", self.gamma)));
        }
        if !(self.passband_ratio > 0.0 && self.passband_ratio < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "passband ratio must lie in (0, 1), got {}",
                self.passband_ratio
            )));
        }
        Ok(())
    }

    /// The weighted-approximation problem for a given stopband edge.
    pub fn wca_spec(&self, stop_edge: f64) -> Result<WcaSpec> {
        let case = WcaCase::from_parts(Symmetry::Antisymmetric, self.n)?;
        let wp = self.passband_ratio * stop_edge;
        let bands = vec![
            Band::point(wp, case.q(wp), 1.0),
            Band::constant(stop_edge, PI, 0.0, 1.0),
        ];
        WcaSpec::new(self.n, case, bands)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chebyshev2Design {
    pub pulse: Pulse,
    pub stop_edge: f64,
    /// Achieved stopband level of the half-sum-normalized spectrum.
    pub sidelobe: f64,
}

/// First-half sum of a sequence.
fn half_sum(h: &[f64]) -> f64 {
    h[..h.len() / 2].iter().sum()
}

fn normalized_sidelobe(spec: &Chebyshev2Spec, stop_edge: f64) -> Result<(Pulse, f64)> {
    let wca = spec.wca_spec(stop_edge)?;
    let (pulse, trace) = wca_design_traced(&wca)?;
    let s = half_sum(pulse.samples()).abs();
    if s == 0.0 {
        return Err(Error::DegeneratePulse("designed pulse has zero half-sum".into()));
    }
    Ok((pulse, trace.final_delta() / s))
}

/// Searches the stopband edge so that the normalized sidelobe equals `spec.gamma`.
pub fn design_chebyshev2(spec: &Chebyshev2Spec) -> Result<Chebyshev2Design> {
    spec.validate()?;
    // the Dolph mainlobe edge for the same ripple is a good first guess;
    // widen geometrically until the target is bracketed
    let guess = 2.0 * (1.0 / Chebyshev1Spec::new(spec.n, spec.gamma)?.x0()).acos();
    let target = spec.gamma.ln();
    let f = |edge: f64| normalized_sidelobe(spec, edge).map(|(p, g)| (p, g.ln() - target));
    let (mut lo, mut hi) = (guess, guess);
    let (_, mut flo) = f(lo)?;
    let mut fhi = flo;
    let max_edge = 0.9 * PI;
    while flo < 0.0 {
        (hi, fhi) = (lo, flo);
        lo /= 1.5;
        flo = f(lo)?.1;
        if lo < 1e-6 {
            return Err(Error::InvalidSpec(format!(
                "target sidelobe {} is met by every stopband edge",
                spec.gamma
            )));
        }
    }
    while fhi > 0.0 {
        (lo, flo) = (hi, fhi);
        hi = (hi * 1.5).min(max_edge);
        fhi = f(hi)?.1;
        if hi >= max_edge && fhi > 0.0 {
            return Err(Error::InvalidSpec(format!(
                "target sidelobe {} is unreachable for N={}",
                spec.gamma, spec.n
            )));
        }
    }
    // Illinois regula falsi on the log sidelobe level
    let mut best = None;
    let mut side = 0i32;
    for _ in 0..60 {
        let edge = (lo * fhi - hi * flo) / (fhi - flo);
        let (pulse, fe) = f(edge)?;
        let done = fe.abs() < 1e-9 || (hi - lo) < 1e-13;
        best = Some((pulse, edge, fe));
        if done {
            break;
        }
        if fe > 0.0 {
            lo = edge;
            flo = fe;
            if side == 1 {
                fhi /= 2.0;
            }
            side = 1;
        } else {
            hi = edge;
            fhi = fe;
            if side == -1 {
                flo /= 2.0;
            }
            side = -1;
        }
    }
    let (pulse, stop_edge, fe) = best.expect("at least one iteration");
    let label = format!("chebyshev2 N={} gamma={:e}", spec.n, spec.gamma);
    Ok(Chebyshev2Design {
        pulse: pulse.with_label(label),
        stop_edge,
        sidelobe: (fe + target).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::chebyshev1;
    use super::*;

    fn dolph_spec(n: usize, r: f64) -> WcaSpec {
        let cheb = Chebyshev1Spec::new(n, r).unwrap();
        let stop_edge = 2.0 * (1.0 / cheb.x0()).acos();
        WcaSpec::new(
            n,
            WcaCase::One,
            vec![Band::point(0.0, 1.0, 1.0), Band::constant(stop_edge, PI, 0.0, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn case_one_reproduces_dolph() {
        let p = wca_design(&dolph_spec(25, 1e-3)).unwrap();
        let p = p.scaled(1.0 / p.amplitude_at(0.0));
        let reference = chebyshev1(Chebyshev1Spec::new(25, 1e-3).unwrap()).unwrap();
        for (a, b) in p.samples().iter().zip(reference.samples()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn levelled_error_grows_monotonically() {
        let (_, trace) = wca_design_traced(&dolph_spec(31, 1e-2)).unwrap();
        for w in trace.deltas.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-9), "{:?}", trace.deltas);
        }
        assert!(trace.spread < CONVERGENCE_SPREAD);
    }

    #[test]
    fn reconstruction_matches_interpolant_in_every_case() {
        for (case, n) in [(WcaCase::One, 21), (WcaCase::Two, 20), (WcaCase::Three, 21), (WcaCase::Four, 20)] {
            let bands = vec![Band::point(0.3, case.q(0.3), 1.0), Band::constant(0.9, PI, 0.0, 1.0)];
            let spec = WcaSpec::new(n, case, bands).unwrap();
            let (p, trace) = wca_design_traced(&spec).unwrap();
            assert_eq!(p.symmetry(), case.symmetry());
            // equiripple stopband: the amplitude at stopband references is +-delta
            for (&w, k) in trace.extremal_frequencies.iter().zip(0..) {
                if w >= 0.9 {
                    let e = p.amplitude_at(w).abs();
                    assert!((e - trace.final_delta()).abs() < 1e-9 * (1.0 + e), "case {:?} k {k}", case);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(WcaSpec::new(20, WcaCase::One, vec![Band::constant(0.0, 1.0, 1.0, 1.0)]).is_err());
        assert!(WcaSpec::new(21, WcaCase::Three, vec![Band::point(0.0, 1.0, 1.0)]).is_err());
        assert!(WcaSpec::new(
            21,
            WcaCase::One,
            vec![Band::constant(0.0, 1.0, 1.0, 1.0), Band::constant(0.5, 2.0, 0.0, 1.0)]
        )
        .is_err());
        assert!(WcaSpec::new(21, WcaCase::One, vec![Band::constant(0.0, 1.0, 1.0, 0.0)]).is_err());
    }

    #[test]
    fn too_few_grid_points_is_invalid() {
        let spec = WcaSpec::new(21, WcaCase::One, vec![Band::point(0.0, 1.0, 1.0), Band::point(2.0, 0.0, 1.0)]).unwrap();
        assert!(matches!(wca_design(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn chebyshev2_hits_its_target() {
        let spec = Chebyshev2Spec::new(51, 1e-3).unwrap();
        let d = design_chebyshev2(&spec).unwrap();
        assert!((d.sidelobe / 1e-3 - 1.0).abs() < 1e-6);
        let s = half_sum(d.pulse.samples());
        let mut worst: f64 = 0.0;
        for j in 0..4000 {
            let w = d.stop_edge + (PI - d.stop_edge) * j as f64 / 3999.0;
            worst = worst.max(d.pulse.amplitude_at(w).abs() / s.abs());
        }
        assert!((worst / 1e-3 - 1.0).abs() < 1e-4, "worst {worst}");
    }
}
