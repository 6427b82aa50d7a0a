// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Schrödinger propagation of the two-level model and of two coupled
//! transmons truncated to two excitations.
//!
//! Basis order for the six-level model is |00>, |01>, |10>, |11>, |02>, |20>,
//! where the first label is the tunable qubit. The Hamiltonian is block
//! diagonal in excitation number, so the gate propagator is assembled from a
//! 1x1, a 2x2 and a 3x3 block.

pub mod tomography;

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Matrix6, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::trajectory::{time_frame_invert, ControlTrajectory, PhysicalPulse};

pub use tomography::{process_fidelity, unitary_fidelity, ChiMatrix, FidelityReport};

pub const B00: usize = 0;
pub const B01: usize = 1;
pub const B10: usize = 2;
pub const B11: usize = 3;
pub const B02: usize = 4;
pub const B20: usize = 5;

/// Default number of propagation steps per gate.
pub const DEFAULT_STEPS: usize = 4000;

/// Norm drift above this is logged.
pub const NORM_DRIFT_WARN: f64 = 1e-9;

pub type StateVector = DVector<Complex64>;

/// Two capacitively coupled transmons; all values in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonPair {
    pub omega1_idle: f64,
    pub omega2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub g: f64,
}

impl Default for TransmonPair {
    fn default() -> Self {
        use crate::ghz_to_radns as w;
        TransmonPair {
            omega1_idle: w(5.8),
            omega2: w(4.7),
            alpha1: w(-0.3),
            alpha2: w(-0.3),
            g: w(0.01 * SQRT_2),
        }
    }
}

impl TransmonPair {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega1_idle, self.omega2, self.alpha1, self.alpha2, self.g]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.g > 0.0) || !(self.alpha1 < 0.0 && self.alpha2 < 0.0) {
            return Err(Error::InvalidSpec(format!(
                "transmon pair needs g > 0 and negative anharmonicities, got {self:?}"
            )));
        }
        if !(self.eps_ini() > 0.0) {
            return Err(Error::InvalidSpec(
                "idle frequency must sit above the |11>-|20> degeneracy".into(),
            ));
        }
        Ok(())
    }

    /// Splitting of the |11>-|20> avoided crossing, 2 sqrt(2) g.
    pub fn delta(&self) -> f64 {
        2.0 * SQRT_2 * self.g
    }

    /// omega1 at which |11> and |20> are degenerate.
    pub fn degeneracy_omega1(&self) -> f64 {
        self.omega2 - self.alpha1
    }

    pub fn eps_ini(&self) -> f64 {
        self.omega1_idle - self.degeneracy_omega1()
    }

    pub fn eps_for_amplitude(&self, amplitude: f64) -> f64 {
        self.eps_ini() * (1.0 - amplitude)
    }

    pub fn theta_ini(&self) -> f64 {
        self.delta().atan2(self.eps_ini())
    }

    pub fn theta_for_amplitude(&self, amplitude: f64) -> f64 {
        self.delta().atan2(self.eps_for_amplitude(amplitude))
    }

    /// Bare energies in basis order.
    pub fn bare_energies(&self, omega1: f64) -> [f64; 6] {
        let w2 = self.omega2;
        [0.0, w2, omega1, omega1 + w2, 2.0 * w2 + self.alpha2, 2.0 * omega1 + self.alpha1]
    }

    pub fn hamiltonian(&self, omega1: f64) -> Matrix6<f64> {
        let e = self.bare_energies(omega1);
        let mut h = Matrix6::from_diagonal(&e.into());
        let c = SQRT_2 * self.g;
        h[(B01, B10)] = self.g;
        h[(B10, B01)] = self.g;
        for k in [B02, B20] {
            h[(B11, k)] = c;
            h[(k, B11)] = c;
        }
        h
    }

    /// Eigenvectors of the idle Hamiltonian, column i matched to bare label i
    /// by maximum overlap and sign-fixed to a positive overlap. Returns the
    /// basis and the matching eigenenergies.
    pub fn dressed_basis(&self, omega1: f64) -> (Matrix6<f64>, [f64; 6]) {
        let eig = SymmetricEigen::new(self.hamiltonian(omega1));
        let mut basis = Matrix6::zeros();
        let mut energies = [0.0; 6];
        let mut used = [false; 6];
        for label in 0..6 {
            let col = (0..6)
                .filter(|c| !used[*c])
                .max_by(|&a, &b| {
                    eig.eigenvectors[(label, a)].abs().total_cmp(&eig.eigenvectors[(label, b)].abs())
                })
                .expect("six columns");
            used[col] = true;
            let sign = eig.eigenvectors[(label, col)].signum();
            basis.set_column(label, &(eig.eigenvectors.column(col) * sign));
            energies[label] = eig.eigenvalues[col];
        }
        (basis, energies)
    }
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub states: Vec<StateVector>,
    /// Largest | ||psi|| - 1 | seen along the grid.
    pub norm_drift: f64,
}

impl Propagation {
    pub fn last(&self) -> &StateVector {
        self.states.last().expect("propagation stores the initial state")
    }
}

/// Midpoint exponential stepping psi <- exp(-i H(t_mid) dt) psi.
///
/// The state is never renormalized; drift beyond [`NORM_DRIFT_WARN`] is logged.
pub fn propagate<F>(mut hamiltonian: F, psi0: &StateVector, grid: &[f64]) -> Result<Propagation>
where
    F: FnMut(f64) -> DMatrix<Complex64>,
{
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSpec("time grid needs two or more increasing samples".into()));
    }
    let dim = psi0.len();
    let mut states = Vec::with_capacity(grid.len());
    states.push(psi0.clone());
    let mut psi = psi0.clone();
    let norm0 = psi0.norm();
    let mut drift = 0.0f64;
    for w in grid.windows(2) {
        let dt = w[1] - w[0];
        let t = w[0] + 0.5 * dt;
        let h = hamiltonian(t);
        if h.nrows() != dim || h.ncols() != dim {
            return Err(Error::InvalidSpec(format!(
                "hamiltonian at t = {t} is {}x{}, state has {dim} entries",
                h.nrows(),
                h.ncols()
            )));
        }
        let residual = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual > 1e-12 * h.norm().max(1.0) {
            return Err(Error::NonHermitian { t, residual });
        }
        psi = step_unitary(h, dt) * psi;
        drift = drift.max((psi.norm() - norm0).abs());
        states.push(psi.clone());
    }
    if drift > NORM_DRIFT_WARN {
        log::warn!("norm drift {drift:e} over {} steps", grid.len() - 1);
    }
    Ok(Propagation { states, norm_drift: drift })
}

fn step_unitary(h: DMatrix<Complex64>, dt: f64) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h);
    let v = eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * dt)));
    &v * phases * v.adjoint()
}

/// Two-level Hamiltonian (eps / 2) sigma_z + (delta / 2) sigma_x.
pub fn two_level_hamiltonian(eps: f64, delta: f64) -> DMatrix<Complex64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    DMatrix::from_row_slice(2, 2, &[c(0.5 * eps), c(0.5 * delta), c(0.5 * delta), c(-0.5 * eps)])
}

/// Instantaneous eigenstates (psi_minus, psi_plus) for mixing angle theta.
pub fn two_level_eigenstates(theta: f64) -> (StateVector, StateVector) {
    let (s, c) = (0.5 * theta).sin_cos();
    let minus = DVector::from_vec(vec![Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]);
    let plus = DVector::from_vec(vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)]);
    (minus, plus)
}

/// Leakage of the two-level model driven by `traj` over duration `td`.
///
/// epsilon(t) = delta / tan(theta(t)) uses the mixing angles stored in `traj`.
/// The state starts in the instantaneous ground state and the returned value
/// is the final population of the instantaneous excited state.
pub fn two_level_leakage_sim(traj: &ControlTrajectory, td: f64, delta: f64, steps: usize) -> Result<f64> {
    if steps < 2 {
        return Err(Error::InvalidSpec("need at least two steps".into()));
    }
    let map = time_frame_invert(traj, td, delta)?;
    let theta = Pchip::new(map.t_of_tau.clone(), traj.theta_tilde().to_vec())?;
    let grid: Vec<f64> = (0..=steps).map(|k| td * k as f64 / steps as f64).collect();
    let (psi0, _) = two_level_eigenstates(traj.theta_ini());
    let prop = propagate(
        |t| {
            let th = theta.eval(t);
            two_level_hamiltonian(delta * th.cos() / th.sin(), delta)
        },
        &psi0,
        &grid,
    )?;
    let (_, plus) = two_level_eigenstates(theta.eval(td));
    Ok(plus.dotc(prop.last()).norm_sqr())
}

/// Transition probability for the linear sweep eps(t) = alpha t across
/// eps in [-span delta, span delta], starting and ending in adiabatic states.
pub fn landau_zener_sim(delta: f64, alpha: f64, span: f64, steps: usize) -> Result<f64> {
    if !(delta > 0.0 && alpha > 0.0 && span > 0.0) || steps < 2 {
        return Err(Error::InvalidSpec("landau-zener sweep needs positive parameters".into()));
    }
    let t_end = span * delta / alpha;
    let grid: Vec<f64> = (0..=steps).map(|k| -t_end + 2.0 * t_end * k as f64 / steps as f64).collect();
    let theta = |t: f64| delta.atan2(alpha * t);
    let (psi0, _) = two_level_eigenstates(theta(-t_end));
    let prop = propagate(|t| two_level_hamiltonian(alpha * t, delta), &psi0, &grid)?;
    let (_, plus) = two_level_eigenstates(theta(t_end));
    Ok(plus.dotc(prop.last()).norm_sqr())
}

/// Gate propagator in the idle dressed basis, indexed by bare labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GateUnitary {
    pub matrix: Matrix6<Complex64>,
    pub norm_drift: f64,
}

impl GateUnitary {
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// phi' = phi11 - phi01 - phi10 + phi00, wrapped to (-pi, pi].
    pub fn conditional_phase(&self) -> f64 {
        let m = &self.matrix;
        let z = m[(B11, B11)] * m[(B01, B01)].conj() * m[(B10, B10)].conj() * m[(B00, B00)];
        wrap_phase(z.arg())
    }

    /// Population that leaves |11> for |20>.
    pub fn leakage(&self) -> f64 {
        self.matrix[(B20, B11)].norm_sqr()
    }

    /// Population that leaves |11> for |02>.
    pub fn leakage_02(&self) -> f64 {
        self.matrix[(B02, B11)].norm_sqr()
    }

    /// Population exchanged between |01> and |10>.
    pub fn swap_error(&self) -> f64 {
        self.matrix[(B10, B01)].norm_sqr()
    }

    /// Largest deviation of U^dagger U from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.matrix.adjoint() * self.matrix - Matrix6::identity();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

fn cexp(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

fn exp2(h: &Matrix2<f64>, dt: f64) -> Matrix2<Complex64> {
    let mean = 0.5 * (h[(0, 0)] + h[(1, 1)]);
    let half = 0.5 * (h[(0, 0)] - h[(1, 1)]);
    let c = h[(0, 1)];
    let r = (half * half + c * c).sqrt();
    let (s, co) = (r * dt).sin_cos();
    let sinc = if r * dt == 0.0 { dt } else { s / r };
    let i = Complex64::i();
    let p = cexp(-mean * dt);
    Matrix2::new(
        p * (co - i * sinc * half),
        p * (-i * sinc * c),
        p * (-i * sinc * c),
        p * (co + i * sinc * half),
    )
}

fn exp3(h: &Matrix3<f64>, dt: f64) -> Matrix3<Complex64> {
    let shift = h.trace() / 3.0;
    let eig = SymmetricEigen::new(h - Matrix3::identity() * shift);
    let v = eig.eigenvectors;
    let mut out = Matrix3::zeros();
    for k in 0..3 {
        let ph = cexp(-(eig.eigenvalues[k] + shift) * dt);
        for r in 0..3 {
            for c in 0..3 {
                out[(r, c)] += ph * (v[(r, k)] * v[(c, k)]);
            }
        }
    }
    out
}

/// Lab-frame propagator for a piecewise-constant omega1 sequence given as
/// (omega1, dt) pairs, returned in the bare basis.
pub fn block_propagator<I>(pair: &TransmonPair, steps: I) -> Matrix6<Complex64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let g = pair.g;
    let c = SQRT_2 * g;
    let mut u00 = Complex64::new(1.0, 0.0);
    let mut u1 = Matrix2::<Complex64>::identity();
    let mut u2 = Matrix3::<Complex64>::identity();
    for (w1, dt) in steps {
        let e = pair.bare_energies(w1);
        u00 *= cexp(-e[B00] * dt);
        let h1 = Matrix2::new(e[B01], g, g, e[B10]);
        u1 = exp2(&h1, dt) * u1;
        let h2 = Matrix3::new(e[B11], c, c, c, e[B02], 0.0, c, 0.0, e[B20]);
        u2 = exp3(&h2, dt) * u2;
    }
    let mut u = Matrix6::zeros();
    u[(B00, B00)] = u00;
    let one = [B01, B10];
    let two = [B11, B02, B20];
    for (a, &r) in one.iter().enumerate() {
        for (b, &col) in one.iter().enumerate() {
            u[(r, col)] = u1[(a, b)];
        }
    }
    for (a, &r) in two.iter().enumerate() {
        for (b, &col) in two.iter().enumerate() {
            u[(r, col)] = u2[(a, b)];
        }
    }
    u
}

/// Propagates the pulse and expresses the propagator in the idle dressed
/// basis. The Hamiltonian on each step uses the mean of the two bracketing
/// omega1 samples.
pub fn gate_unitary(pair: &TransmonPair, pulse: &PhysicalPulse) -> Result<GateUnitary> {
    pair.validate()?;
    if pulse.len() < 2 {
        return Err(Error::InvalidSpec("pulse needs at least two samples".into()));
    }
    let t = &pulse.time_grid;
    let w = &pulse.omega1;
    let steps = (0..t.len() - 1).map(|k| (0.5 * (w[k] + w[k + 1]), t[k + 1] - t[k]));
    let bare = block_propagator(pair, steps);
    let (d, _) = pair.dressed_basis(pair.omega1_idle);
    let dc = d.map(|x| Complex64::new(x, 0.0));
    let matrix = dc.transpose() * bare * dc;
    let out = GateUnitary { matrix, norm_drift: 0.0 };
    let drift = out.unitarity_error();
    if drift > NORM_DRIFT_WARN {
        log::warn!("gate propagator unitarity error {drift:e}");
    }
    Ok(GateUnitary { norm_drift: drift, ..out })
}

/// Simulated figures of merit at one (duration, amplitude) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatePoint {
    pub td: f64,
    pub amplitude: f64,
    pub cond_phase: f64,
    /// |11> -> |20> leakage.
    pub pe: f64,
    /// |11> -> |02> leakage, reported separately.
    pub pe02: f64,
    pub fg: f64,
    pub l1: f64,
    pub swap: f64,
}

impl GatePoint {
    pub fn from_unitary(u: &GateUnitary, td: f64, amplitude: f64) -> GatePoint {
        let fid = unitary_fidelity(u);
        GatePoint {
            td,
            amplitude,
            cond_phase: u.conditional_phase(),
            pe: u.leakage().clamp(0.0, 1.0),
            pe02: u.leakage_02().clamp(0.0, 1.0),
            fg: fid.fg,
            l1: fid.l1,
            swap: u.swap_error(),
        }
    }
}

pub fn cz_simulate(pair: &TransmonPair, pulse: &PhysicalPulse) -> Result<GatePoint> {
    let u = gate_unitary(pair, pulse)?;
    Ok(GatePoint::from_unitary(&u, pulse.duration, pulse.amplitude))
}

/// Conditional phase of a constant idle evolution, from the dressed energies.
pub fn static_zz_phase(pair: &TransmonPair, td: f64) -> f64 {
    let (_, e) = pair.dressed_basis(pair.omega1_idle);
    wrap_phase(-(e[B11] - e[B01] - e[B10] + e[B00]) * td)
}
