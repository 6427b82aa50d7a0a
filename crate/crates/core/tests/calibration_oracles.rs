// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use fluxpulse::calibration::{
    calibrate, contour_direct, lobe_extrema, CalibrationConfig, ContourCurve, ContourPoint, GateModel, LobeSelector,
};
use fluxpulse::sim::TransmonPair;
use fluxpulse::trajectory::{ControlTrajectory, FluxMapParams};
use fluxpulse::window::{dpss, SlepianSpec};

// pe(td) = exp(-lambda td) (1 + c cos(w td)); stationary points of log pe
// solve -lambda (1 + c cos) - c w sin = 0, found here by bisection.
fn stationary_points(lambda: f64, c: f64, w: f64, lo: f64, hi: f64) -> Vec<f64> {
    let f = |t: f64| -lambda * (1.0 + c * (w * t).cos()) - c * w * (w * t).sin();
    let n = 20_000;
    let mut out = Vec::new();
    for k in 0..n {
        let (mut a, mut b) = (lo + (hi - lo) * k as f64 / n as f64, lo + (hi - lo) * (k + 1) as f64 / n as f64);
        if f(a) > 0.0 && f(b) <= 0.0 {
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if f(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
    }
    out
}

#[test]
fn peaks_of_a_decaying_sinusoid() {
    let (lambda, c, w) = (0.04, 0.9, 2.0 * PI / 8.0);
    let curve = ContourCurve {
        points: (0..=440)
            .map(|k| {
                let td = 26.0 + 0.1 * k as f64;
                ContourPoint { td, amplitude: 0.9, pe: 1e-4 * (-lambda * td).exp() * (1.0 + c * (w * td).cos()) }
            })
            .collect(),
    };
    let found = lobe_extrema(&curve, LobeSelector::Peak, 0.3, 1.5).unwrap();
    // every lobe with a trough on both sides inside the sampled range
    let expect = stationary_points(lambda, c, w, 28.0, 68.0);
    assert_eq!(found.extrema.len(), expect.len(), "{:?} vs {expect:?}", found.extrema);
    for (e, x) in found.extrema.iter().zip(&expect) {
        assert!((e.td - x).abs() < 2e-3, "{} vs {x}", e.td);
    }
}

fn model() -> GateModel {
    let pair = TransmonPair::default();
    let pulse = dpss(SlepianSpec::from_nw(201, 2.9, 1).unwrap()).unwrap().pulse;
    let traj = ControlTrajectory::new(&pulse, pair.theta_ini(), PI / 2.0).unwrap();
    GateModel::new(traj, pair, FluxMapParams::default()).with_steps(2000)
}

#[test]
fn contour_points_reach_pi() {
    let m = model();
    let pts = contour_direct(&m, &[40.0, 44.5, 49.0, 53.5], 0.8, 1.0).unwrap();
    assert_eq!(pts.len(), 4);
    for p in &pts {
        assert!((p.cond_phase.abs() - PI).abs() < 1e-3, "{p:?}");
        assert!(p.amplitude > 0.8 && p.amplitude < 1.0);
    }
}

#[test]
fn operating_points_are_insensitive_to_duration() {
    let m = model();
    let config = CalibrationConfig { td_min: 40.0, td_max: 56.0, td_step: 0.2, ..Default::default() };
    let cal = calibrate(&m, &config).unwrap();
    let best = cal.best_point().expect("a lobe in the window");
    let around = contour_direct(&m, &[best.td - 0.15, best.td + 0.15], 0.8, 1.0).unwrap();
    assert_eq!(around.len(), 2);
    for p in &around {
        // a lobe peak: small moves in either direction lower the leakage,
        // and only slightly
        assert!(p.pe <= best.pe * (1.0 + 1e-3), "{} vs {}", p.pe, best.pe);
        assert!(p.pe >= 0.5 * best.pe);
    }
}
