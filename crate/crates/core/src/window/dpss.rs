// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete prolate spheroidal (Slepian) sequences.
//!
//! The sinc kernel commutes with index reversal, so its eigenvectors split
//! into symmetric and antisymmetric families. We solve the two half-size
//! problems separately: this halves the dimension and makes the symmetry of
//! each returned pulse exact instead of approximate.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{Pulse, Symmetry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlepianSpec {
    pub n: usize,
    /// Half-bandwidth in cycles per sample.
    pub w: f64,
    pub k: usize,
}

impl SlepianSpec {
    pub fn new(n: usize, w: f64, k: usize) -> Result<Self> {
        let spec = SlepianSpec { n, w, k };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec from the time-bandwidth product `nw = N * W`.
    pub fn from_nw(n: usize, nw: f64, k: usize) -> Result<Self> {
        SlepianSpec::new(n, nw / n as f64, k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("slepian length must be >= 2, got {}", self.n)));
        }
        if !(self.w > 0.0 && self.w < 0.5) {
            return Err(Error::InvalidSpec(format!("half-bandwidth W must lie in (0, 1/2), got {}", self.w)));
        }
        if self.k >= self.n {
            return Err(Error::InvalidSpec(format!("order k={} out of range for N={}", self.k, self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlepianResult {
    pub pulse: Pulse,
    /// Fraction of the pulse energy inside |omega| <= 2 pi W.
    pub eigenvalue: f64,
}

/// Computes the order-`k` Slepian sequence with unit energy.
pub fn dpss(spec: SlepianSpec) -> Result<SlepianResult> {
    spec.validate()?;
    let parity = if spec.k % 2 == 0 { Parity::Even } else { Parity::Odd };
    let half = HalfProblem::new(spec.n, spec.w, parity);
    let (eigenvalues, vectors) = half.solve()?;
    let idx = spec.k / 2;
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let col = order[idx];
    let samples = half.unfold(vectors.column(col).as_slice());
    let samples = fix_sign(samples);
    let symmetry = match parity {
        Parity::Even => Symmetry::Symmetric,
        Parity::Odd => Symmetry::Antisymmetric,
    };
    let label = format!("dpss N={} NW={:.6} k={}", spec.n, spec.w * spec.n as f64, spec.k);
    Ok(SlepianResult {
        pulse: Pulse::new(samples, symmetry, label)?,
        eigenvalue: eigenvalues[col],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

fn kernel(w: f64, lag: i64) -> f64 {
    if lag == 0 {
        2.0 * w
    } else {
        let l = lag as f64;
        (2.0 * PI * w * l).sin() / (PI * l)
    }
}

struct HalfProblem {
    n: usize,
    w: f64,
    parity: Parity,
}

impl HalfProblem {
    fn new(n: usize, w: f64, parity: Parity) -> Self {
        HalfProblem { n, w, parity }
    }

    fn has_centre(&self) -> bool {
        self.n % 2 == 1 && self.parity == Parity::Even
    }

    fn dim(&self) -> usize {
        self.n / 2 + usize::from(self.has_centre())
    }

    fn matrix(&self) -> DMatrix<f64> {
        let n = self.n as i64;
        let m = self.n / 2;
        let sign = match self.parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        };
        let dim = self.dim();
        let mut b = DMatrix::zeros(dim, dim);
        for i in 0..m {
            for j in 0..m {
                let (ii, jj) = (i as i64, j as i64);
                b[(i, j)] = kernel(self.w, ii - jj) + sign * kernel(self.w, ii - (n - 1 - jj));
            }
        }
        if self.has_centre() {
            for i in 0..m {
                let c = SQRT_2 * kernel(self.w, i as i64 - m as i64);
                b[(i, m)] = c;
                b[(m, i)] = c;
            }
            b[(m, m)] = 2.0 * self.w;
        }
        b
    }

    fn solve(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let b = self.matrix();
        let dim = b.nrows();
        let diag = b[(0, 0)];
        let frobenius = b.norm();
        let eig = SymmetricEigen::try_new(b, 1e-15, 10_000).ok_or(Error::Eigensolver {
            dim,
            diag,
            frobenius,
        })?;
        Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
    }

    /// Expands a half-problem eigenvector into the full length-N sequence.
    fn unfold(&self, half: &[f64]) -> Vec<f64> {
        let m = self.n / 2;
        let mut out = vec![0.0; self.n];
        let (scale, sign) = match self.parity {
            Parity::Even => (1.0 / SQRT_2, 1.0),
            Parity::Odd => (1.0 / SQRT_2, -1.0),
        };
        for i in 0..m {
            out[i] = scale * half[i];
            out[self.n - 1 - i] = sign * scale * half[i];
        }
        if self.has_centre() {
            out[m] = half[m];
        }
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.iter_mut().for_each(|x| *x /= norm);
        out
    }
}

/// Makes the first non-vanishing centred moment positive.
fn fix_sign(mut samples: Vec<f64>) -> Vec<f64> {
    let n = samples.len();
    let c = (n as f64 - 1.0) / 2.0;
    for p in 0..n as i32 {
        let moment: f64 = samples
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 - c) / c.max(1.0)).powi(p) * x)
            .sum();
        if moment.abs() > 1e-10 {
            if moment < 0.0 {
                samples.iter_mut().for_each(|x| *x = -*x);
            }
            break;
        }
    }
    samples
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_changes(x: &[f64]) -> usize {
        let nz: Vec<f64> = x.iter().copied().filter(|v| v.abs() > 1e-14).collect();
        nz.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
    }

    /// Dense full-size eigenproblem, solved without the parity split.
    fn dense_reference(n: usize, w: f64) -> Vec<(f64, Vec<f64>)> {
        let a = DMatrix::from_fn(n, n, |i, j| kernel(w, i as i64 - j as i64));
        let eig = SymmetricEigen::new(a);
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
            .map(|c| (eig.eigenvalues[c], eig.eigenvectors.column(c).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs
    }

    #[test]
    fn first_orders_have_expected_shape() {
        let s0 = dpss(SlepianSpec::from_nw(25, 3.0, 0).unwrap()).unwrap();
        let s1 = dpss(SlepianSpec::from_nw(25, 3.0, 1).unwrap()).unwrap();
        assert_eq!(s0.pulse.symmetry(), Symmetry::Symmetric);
        assert_eq!(s1.pulse.symmetry(), Symmetry::Antisymmetric);
        assert!(s0.eigenvalue > s1.eigenvalue);
        assert!(s0.pulse.samples().iter().all(|&x| x > 0.0));
        assert_eq!(sign_changes(s1.pulse.samples()), 1);
        assert!((s0.pulse.energy() - 1.0).abs() < 1e-12);
        assert!((s1.pulse.energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_split_matches_dense_solve() {
        for &n in &[24usize, 25] {
            let w = 3.0 / n as f64;
            let reference = dense_reference(n, w);
            for k in 0..6 {
                let got = dpss(SlepianSpec::new(n, w, k).unwrap()).unwrap();
                assert!((got.eigenvalue - reference[k].0).abs() < 1e-12, "n={n} k={k}");
                let dot: f64 = got.pulse.samples().iter().zip(&reference[k].1).map(|(a, b)| a * b).sum();
                assert!((dot.abs() - 1.0).abs() < 1e-9, "n={n} k={k} dot={dot}");
            }
        }
    }

    #[test]
    fn sign_convention() {
        let s1 = dpss(SlepianSpec::from_nw(101, 2.9, 1).unwrap()).unwrap();
        let c = 50.0;
        let lag: f64 = s1.pulse.samples().iter().enumerate().map(|(i, x)| (i as f64 - c) * x).sum();
        assert!(lag > 0.0);
        let s2 = dpss(SlepianSpec::from_nw(101, 2.9, 2).unwrap()).unwrap();
        assert!(s2.pulse.samples().iter().sum::<f64>() > 0.0);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(SlepianSpec::new(10, 0.5, 0).is_err());
        assert!(SlepianSpec::new(10, 0.0, 0).is_err());
        assert!(SlepianSpec::new(10, 0.1, 10).is_err());
        assert!(SlepianSpec::new(1, 0.1, 0).is_err());
    }
}
