// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Dolph-Chebyshev pulses.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Pulse, Symmetry};
use crate::error::{Error, Result};

/// Chebyshev polynomial of the first kind, T_n(x), for any real x.
pub fn chebyshev_poly(n: u32, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (n as f64 * x.acos()).cos()
    } else {
        let magnitude = (n as f64 * x.abs().acosh()).cosh();
        if x < 0.0 && n % 2 == 1 {
            -magnitude
        } else {
            magnitude
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chebyshev1Spec {
    pub n: usize,
    /// Sidelobe amplitude relative to the DC gain.
    pub r: f64,
}

impl Chebyshev1Spec {
    pub fn new(n: usize, r: f64) -> Result<Self> {
        let spec = Chebyshev1Spec { n, r };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("chebyshev length must be >= 2, got {}", self.n)));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidSpec(format!("sidelobe amplitude r must lie in (0, 1), got {}", self.r)));
        }
        Ok(())
    }

    /// The scale x0 > 1 with T_{N-1}(x0) = 1/r.
    pub fn x0(&self) -> f64 {
        ((1.0 / self.r).acosh() / (self.n as f64 - 1.0)).cosh()
    }

    /// Linear-phase amplitude r T_{N-1}(x0 cos(omega/2)); equals 1 at omega = 0.
    pub fn amplitude(&self, omega: f64) -> f64 {
        let order = (self.n - 1) as u32;
        self.r * chebyshev_poly(order, self.x0() * (omega / 2.0).cos())
    }
}

/// Builds the symmetric Dolph-Chebyshev pulse with unit DC gain.
pub fn chebyshev1(spec: Chebyshev1Spec) -> Result<Pulse> {
    spec.validate()?;
    let n = spec.n;
    let c = (n as f64 - 1.0) / 2.0;
    let nf = n as f64;
    // samples of the amplitude on the N-point DFT grid
    let amp: Vec<f64> = (0..n).map(|k| spec.amplitude(2.0 * PI * k as f64 / nf)).collect();
    let mut samples: Vec<f64> = (0..n)
        .map(|m| {
            let lag = m as f64 - c;
            amp.iter()
                .enumerate()
                .map(|(k, a)| a * (2.0 * PI * k as f64 * lag / nf).cos())
                .sum::<f64>()
                / nf
        })
        .collect();
    let dc: f64 = samples.iter().sum();
    samples.iter_mut().for_each(|x| *x /= dc);
    let label = format!("chebyshev1 N={} r={:e}", n, spec.r);
    Pulse::symmetrized(samples, Symmetry::Symmetric, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_values() {
        assert_eq!(chebyshev_poly(0, 0.3), 1.0);
        assert!((chebyshev_poly(2, 0.5) + 0.5).abs() < 1e-15);
        assert!((chebyshev_poly(3, 2.0) - 26.0).abs() < 1e-12);
        assert!((chebyshev_poly(3, -2.0) + 26.0).abs() < 1e-12);
        assert!((chebyshev_poly(4, -2.0) - 97.0).abs() < 1e-11);
    }

    #[test]
    fn polynomial_matches_recurrence_across_the_branch_point() {
        for &x in &[-1.3f64, -1.0 - 1e-9, -0.7, 0.0, 0.4, 1.0, 1.0 + 1e-12, 1.0 + 1e-6, 1.7] {
            let (mut t0, mut t1) = (1.0f64, x);
            for n in 2..30u32 {
                let t2 = 2.0 * x * t1 - t0;
                let scale = t2.abs().max(1.0);
                assert!((chebyshev_poly(n, x) - t2).abs() < 1e-9 * scale, "n={n} x={x}");
                t0 = t1;
                t1 = t2;
            }
        }
    }

    #[test]
    fn x0_inverts_the_polynomial() {
        let spec = Chebyshev1Spec::new(25, 1e-3).unwrap();
        assert!(spec.x0() > 1.0);
        assert!((chebyshev_poly(24, spec.x0()) * 1e-3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pulse_has_unit_dc_gain_and_matches_amplitude() {
        let spec = Chebyshev1Spec::new(25, 1e-3).unwrap();
        let p = chebyshev1(spec).unwrap();
        assert!((p.samples().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for j in 0..200 {
            let w = PI * j as f64 / 199.0;
            assert!((p.amplitude_at(w) - spec.amplitude(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn even_length_is_supported() {
        let spec = Chebyshev1Spec::new(24, 1e-2).unwrap();
        let p = chebyshev1(spec).unwrap();
        for j in 0..50 {
            let w = PI * j as f64 / 49.0;
            assert!((p.amplitude_at(w) - spec.amplitude(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn r_must_be_below_one() {
        assert!(Chebyshev1Spec::new(25, 1.0).is_err());
        assert!(chebyshev1(Chebyshev1Spec { n: 25, r: 1.5 }).is_err());
    }
}
