// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-length discrete-time pulse families and their spectra.
//!
//! Three families are provided:
//!
//! * [`dpss`]: Slepian sequences from the dense sinc-kernel eigenproblem.
//! * [`chebyshev1`]: the symmetric Dolph-Chebyshev pulse in closed form.
//! * [`wca_design`]: weighted Chebyshev approximation by Remez exchange, which
//!   covers the four linear-phase cases and yields the antisymmetric
//!   equiripple pulses used as control trajectories.

mod chebyshev;
mod dpss;
mod remez;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chebyshev::{chebyshev1, chebyshev_poly, Chebyshev1Spec};
pub use dpss::{dpss, SlepianResult, SlepianSpec};
pub use remez::{
    design_chebyshev2, wca_design, wca_design_traced, Band, Chebyshev2Design, Chebyshev2Spec,
    RemezTrace, WcaCase, WcaSpec,
};

/// Relative tolerance used when checking declared symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    None,
}

/// A real finite-length sequence with a declared symmetry class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    samples: Vec<f64>,
    symmetry: Symmetry,
    label: String,
}

impl Pulse {
    /// Builds a pulse, checking the length and the declared symmetry.
    pub fn new(samples: Vec<f64>, symmetry: Symmetry, label: impl Into<String>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "pulse length must be at least 2, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec("pulse contains non-finite samples".into()));
        }
        let pulse = Pulse {
            samples,
            symmetry,
            label: label.into(),
        };
        pulse.check_symmetry()?;
        Ok(pulse)
    }

    /// Builds a pulse, replacing tiny symmetry defects by exact (anti)symmetrization.
    ///
    /// Intended for values produced by floating-point pipelines whose
    /// symmetry holds only to rounding.
    pub fn symmetrized(mut samples: Vec<f64>, symmetry: Symmetry, label: impl Into<String>) -> Result<Self> {
        let n = samples.len();
        let sign = match symmetry {
            Symmetry::Symmetric => 1.0,
            Symmetry::Antisymmetric => -1.0,
            Symmetry::None => return Pulse::new(samples, symmetry, label),
        };
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let avg = 0.5 * (samples[i] + sign * samples[j]);
            samples[i] = avg;
            samples[j] = sign * avg;
        }
        if n % 2 == 1 && sign < 0.0 {
            samples[n / 2] = 0.0;
        }
        Pulse::new(samples, symmetry, label)
    }

    fn check_symmetry(&self) -> Result<()> {
        let sign = match self.symmetry {
            Symmetry::Symmetric => 1.0,
            Symmetry::Antisymmetric => -1.0,
            Symmetry::None => return Ok(()),
        };
        let n = self.samples.len();
        let scale = self.samples.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n.div_ceil(2) {
            let defect = (self.samples[i] - sign * self.samples[n - 1 - i]).abs();
            if defect > SYMMETRY_TOL * scale {
                return Err(Error::Symmetry(format!(
                    "{:?} pulse '{}' violates symmetry at n={} (defect {:.3e})",
                    self.symmetry, self.label, i, defect
                )));
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Multiplies every sample by `factor`; symmetry is preserved.
    pub fn scaled(&self, factor: f64) -> Pulse {
        Pulse {
            samples: self.samples.iter().map(|x| x * factor).collect(),
            symmetry: self.symmetry,
            label: self.label.clone(),
        }
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    /// Evaluates the DTFT at a single angular frequency.
    pub fn dtft_at(&self, omega: f64) -> Complex64 {
        dtft_value(&self.samples, omega)
    }

    /// Linear-phase amplitude A(omega) at a single frequency.
    pub fn amplitude_at(&self, omega: f64) -> f64 {
        linear_phase_amplitude(self.dtft_at(omega), omega, self.len(), self.symmetry)
    }
}

/// Sampled DTFT of a pulse over a uniform grid on [0, pi].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub amplitude: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Smallest grid frequency beyond which |A| stays at or below `level`.
    ///
    /// Returns `None` when even the last grid point exceeds the level.
    pub fn crossover_frequency(&self, level: f64) -> Option<f64> {
        let last_above = self.amplitude.iter().rposition(|a| a.abs() > level);
        match last_above {
            None => self.frequencies.first().copied(),
            Some(i) if i + 1 < self.len() => {
                // linear interpolation of the down-crossing between i and i+1
                let (a0, a1) = (self.amplitude[i].abs(), self.amplitude[i + 1].abs());
                let (w0, w1) = (self.frequencies[i], self.frequencies[i + 1]);
                Some(w0 + (a0 - level) / (a0 - a1) * (w1 - w0))
            }
            Some(_) => None,
        }
    }
}

/// DTFT of an arbitrary real sequence at one frequency.
pub fn dtft_value(samples: &[f64], omega: f64) -> Complex64 {
    // rotate a phasor instead of calling sin/cos per tap; renormalize periodically
    let step = Complex64::from_polar(1.0, -omega);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &x) in samples.iter().enumerate() {
        if n % 64 == 0 {
            phasor = Complex64::from_polar(1.0, -omega * n as f64);
        }
        acc += phasor * x;
        phasor *= step;
    }
    acc
}

fn linear_phase_amplitude(value: Complex64, omega: f64, len: usize, symmetry: Symmetry) -> f64 {
    let centre = (len as f64 - 1.0) / 2.0;
    let dephased = value * Complex64::from_polar(1.0, omega * centre);
    match symmetry {
        Symmetry::Symmetric => dephased.re,
        // H = i e^{-i w c} A(w)
        Symmetry::Antisymmetric => dephased.im,
        Symmetry::None => value.norm(),
    }
}

/// Evaluates the DTFT of a raw sequence on `grid_size` uniform points over [0, pi].
pub fn dtft_samples(samples: &[f64], symmetry: Symmetry, grid_size: usize) -> Spectrum {
    let denom = (grid_size.max(2) - 1) as f64;
    let frequencies: Vec<f64> = (0..grid_size).map(|j| PI * j as f64 / denom).collect();
    let values: Vec<Complex64> = frequencies.iter().map(|&w| dtft_value(samples, w)).collect();
    let amplitude = frequencies
        .iter()
        .zip(&values)
        .map(|(&w, &v)| linear_phase_amplitude(v, w, samples.len(), symmetry))
        .collect();
    Spectrum {
        frequencies,
        values,
        amplitude,
    }
}

/// DTFT of a pulse on a uniform grid over [0, pi] with the linear phase divided out.
pub fn dtft(pulse: &Pulse, grid_size: usize) -> Result<Spectrum> {
    if grid_size < 2 * pulse.len() {
        return Err(Error::InvalidSpec(format!(
            "dtft grid of {} points is too coarse for a length-{} pulse (need >= {})",
            grid_size,
            pulse.len(),
            2 * pulse.len()
        )));
    }
    Ok(dtft_samples(pulse.samples(), pulse.symmetry(), grid_size))
}
