// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulated process tomography and average gate fidelity.
//!
//! The channel on the computational subspace is rho -> M rho M^dagger, where
//! M is the computational block of the propagator after virtual Z
//! corrections. M is not unitary when population leaks.

use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GateUnitary, B00, B01, B10, B11};
use crate::error::{Error, Result};
use crate::trajectory::PhysicalPulse;

type C = Complex64;
pub type Matrix16 = SMatrix<C, 16, 16>;

/// Computational-subspace dimension.
pub const D1: f64 = 4.0;

/// Process matrix in the two-qubit Pauli basis {I, X, Y, Z}^{(x)2}.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    pub entries: Matrix16,
}

impl ChiMatrix {
    /// Tr(other chi); real up to rounding for Hermitian inputs.
    pub fn overlap(&self, other: &ChiMatrix) -> C {
        (other.entries * self.entries).trace()
    }

    /// chi of a single Kraus operator.
    pub fn from_kraus(k: &Matrix4<C>) -> ChiMatrix {
        let basis = pauli_basis();
        let coeff = SVector::<C, 16>::from_fn(|m, _| (basis[m].adjoint() * k).trace() / 4.0);
        ChiMatrix { entries: coeff * coeff.adjoint() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub fp: f64,
    pub fg: f64,
    pub l1: f64,
}

fn paulis() -> [Matrix2<C>; 4] {
    let o = C::new(0.0, 0.0);
    let l = C::new(1.0, 0.0);
    let i = C::i();
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

fn kron2(a: &Matrix2<C>, b: &Matrix2<C>) -> Matrix4<C> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// The sixteen two-qubit Pauli operators, tunable qubit first.
pub fn pauli_basis() -> &'static [Matrix4<C>; 16] {
    static BASIS: OnceLock<[Matrix4<C>; 16]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let p = paulis();
        std::array::from_fn(|k| kron2(&p[k / 4], &p[k % 4]))
    })
}

fn ket(v: [C; 2]) -> Matrix2<C> {
    Matrix2::from_fn(|r, c| v[r] * v[c].conj())
}

/// Single-qubit density matrices |0>, |1>, |+>, |-> used for the leakage average.
fn leakage_inputs() -> [Matrix2<C>; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, l) = (C::new(0.0, 0.0), C::new(1.0, 0.0));
    [ket([l, o]), ket([o, l]), ket([l * h, l * h]), ket([l * h, -l * h])]
}

/// Single-qubit inputs |0>, |1>, |+>, |+i>, which span all 2x2 matrices.
fn tomography_inputs() -> [Matrix2<C>; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, l) = (C::new(0.0, 0.0), C::new(1.0, 0.0));
    [ket([l, o]), ket([o, l]), ket([l * h, l * h]), ket([l * h, C::i() * h])]
}

fn product_inputs(single: [Matrix2<C>; 4]) -> Vec<Matrix4<C>> {
    (0..16).map(|k| kron2(&single[k / 4], &single[k % 4])).collect()
}

fn vec4(m: &Matrix4<C>) -> SVector<C, 16> {
    SVector::from_iterator(m.iter().copied())
}

/// Reconstructs chi by linear inversion from sixteen input/output pairs.
pub fn reconstruct_chi(inputs: &[Matrix4<C>], outputs: &[Matrix4<C>]) -> Result<ChiMatrix> {
    if inputs.len() != 16 || outputs.len() != 16 {
        return Err(Error::InvalidSpec("process tomography needs 16 input/output pairs".into()));
    }
    let ins = Matrix16::from_fn(|r, c| vec4(&inputs[c])[r]);
    let outs = Matrix16::from_fn(|r, c| vec4(&outputs[c])[r]);
    let inv = ins
        .try_inverse()
        .ok_or_else(|| Error::InvalidSpec("tomography inputs do not span the operator space".into()))?;
    // superoperator acting on column-stacked density matrices
    let s = outs * inv;
    let basis = pauli_basis();
    // vec(E_m rho E_n^dagger) = (conj(E_n) (x) E_m) vec(rho); these 256
    // operators are orthogonal with squared norm 16.
    let mut chi = Matrix16::zeros();
    for m in 0..16 {
        for n in 0..16 {
            let en = basis[n].map(|z| z.conj());
            let mut acc = C::new(0.0, 0.0);
            for r in 0..16 {
                for c in 0..16 {
                    let k = en[(r / 4, c / 4)] * basis[m][(r % 4, c % 4)];
                    acc += k.conj() * s[(r, c)];
                }
            }
            chi[(m, n)] = acc / 16.0;
        }
    }
    Ok(ChiMatrix { entries: chi })
}

/// Computational block of the propagator, phase-referenced to |00> and
/// with the single-qubit phases of |01> and |10> removed.
pub fn corrected_block(u: &GateUnitary) -> Matrix4<C> {
    let idx = [B00, B01, B10, B11];
    let mut m = Matrix4::from_fn(|r, c| u.entry(idx[r], idx[c]));
    let p00 = m[(0, 0)].arg();
    let p01 = m[(1, 1)].arg() - p00;
    let p10 = m[(2, 2)].arg() - p00;
    let z = [0.0, p01, p10, p01 + p10];
    for r in 0..4 {
        let f = C::from_polar(1.0, -p00 - z[r]);
        for c in 0..4 {
            m[(r, c)] *= f;
        }
    }
    m
}

pub fn ideal_cz() -> Matrix4<C> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(
        C::new(1.0, 0.0),
        C::new(1.0, 0.0),
        C::new(1.0, 0.0),
        C::new(-1.0, 0.0),
    ))
}

/// Runs simulated tomography on the channel rho -> M rho M^dagger.
pub fn channel_fidelity(m: &Matrix4<C>, target: &Matrix4<C>) -> Result<FidelityReport> {
    let ins = product_inputs(tomography_inputs());
    let outs: Vec<Matrix4<C>> = ins.iter().map(|r| m * r * m.adjoint()).collect();
    let chi = reconstruct_chi(&ins, &outs)?;
    let ideal = ChiMatrix::from_kraus(target);
    let fp = chi.overlap(&ideal);
    if fp.im.abs() > 1e-9 {
        log::warn!("process fidelity has imaginary residue {:e}", fp.im);
    }
    let leak_in = product_inputs(leakage_inputs());
    let kept: f64 = leak_in.iter().map(|r| (m * r * m.adjoint()).trace().re).sum::<f64>() / 16.0;
    let l1 = (1.0 - kept).clamp(0.0, 1.0);
    let fp = fp.re.clamp(0.0, 1.0);
    Ok(FidelityReport { fp, fg: average_gate_fidelity(fp, l1), l1 })
}

/// F_g = (d1 F_p + 1 - L1) / (d1 + 1).
pub fn average_gate_fidelity(fp: f64, l1: f64) -> f64 {
    (D1 * fp + 1.0 - l1) / (D1 + 1.0)
}

/// Tomography-based fidelity of a simulated propagator against ideal CZ.
pub fn unitary_fidelity(u: &GateUnitary) -> FidelityReport {
    channel_fidelity(&corrected_block(u), &ideal_cz()).expect("fixed tomography inputs are complete")
}

pub fn process_fidelity(pair: &super::TransmonPair, pulse: &PhysicalPulse) -> Result<FidelityReport> {
    Ok(unitary_fidelity(&super::gate_unitary(pair, pulse)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix6;

    #[test]
    fn paulis_are_orthogonal() {
        let b = pauli_basis();
        for i in 0..16 {
            for j in 0..16 {
                let t = (b[i].adjoint() * b[j]).trace();
                let expect = if i == j { 4.0 } else { 0.0 };
                assert!((t - C::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn ideal_cz_has_unit_fidelity() {
        let mut m = Matrix6::<C>::identity();
        m[(B11, B11)] = C::new(-1.0, 0.0);
        let u = GateUnitary { matrix: m, norm_drift: 0.0 };
        let f = unitary_fidelity(&u);
        assert!((f.fp - 1.0).abs() < 1e-12 && f.l1.abs() < 1e-12 && (f.fg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_state_input_set_is_incomplete() {
        let ins = product_inputs(leakage_inputs());
        assert!(reconstruct_chi(&ins, &ins).is_err());
    }

    #[test]
    fn tomography_matches_trace_formula() {
        // a leaky, slightly rotated gate
        let theta = 0.03f64;
        let mut m = ideal_cz();
        m[(3, 3)] *= C::new(0.999, 0.0) * C::from_polar(1.0, 0.01);
        m[(1, 1)] = C::new(theta.cos(), 0.0);
        m[(1, 2)] = C::new(0.0, -theta.sin());
        m[(2, 1)] = C::new(0.0, -theta.sin());
        m[(2, 2)] = C::new(theta.cos(), 0.0);
        let f = channel_fidelity(&m, &ideal_cz()).unwrap();
        let direct = (ideal_cz().adjoint() * m).trace().norm_sqr() / 16.0;
        assert!((f.fp - direct).abs() < 1e-12);
        let l1 = 1.0 - (m.adjoint() * m).trace().re / 4.0;
        assert!((f.l1 - l1).abs() < 1e-12);
        assert!((f.fg - (4.0 * f.fp + 1.0 - f.l1) / 5.0).abs() < 1e-15);
    }
}
