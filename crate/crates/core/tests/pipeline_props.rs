// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use fluxpulse::leakage::{analytic_leakage, chi_for_trajectory};
use fluxpulse::sim::{two_level_leakage_sim, TransmonPair};
use fluxpulse::trajectory::{build_physical_pulse, time_frame_invert, ControlTrajectory, FluxMapParams};
use fluxpulse::window::{dpss, SlepianSpec};
use proptest::prelude::*;

fn slepian(n: usize, nw: f64) -> ControlTrajectory {
    ControlTrajectory::new(&dpss(SlepianSpec::from_nw(n, nw, 1).unwrap()).unwrap().pulse, 0.2, 1.2).unwrap()
}

#[test]
fn slow_trajectories_agree_with_first_order_and_simulation() {
    // small excursion, long duration: all three routes should coincide
    let delta = 2.0 * PI * 0.05;
    let traj = slepian(201, 2.0).with_angles(0.3, 0.5).unwrap();
    for td in [40.0, 61.0, 83.0] {
        let chi = chi_for_trajectory(&traj, td, delta, 20_000).unwrap().pe;
        let sim = two_level_leakage_sim(&traj, td, delta, 4000).unwrap();
        assert!((chi - sim).abs() < 0.05 * sim + 1e-12, "td {td}: chi {chi:e} sim {sim:e}");
        let ana = analytic_leakage(&traj, td, delta).pe;
        assert!(ana < 1e-3 && sim < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn time_map_is_strictly_increasing(nw in 1.5f64..3.5, td in 5.0f64..120.0, a in 0.05f64..0.8, b in 0.9f64..2.0) {
        let traj = slepian(101, nw).with_angles(a, b).unwrap();
        let map = time_frame_invert(&traj, td, 1.0).unwrap();
        prop_assert_eq!(map.t_of_tau[0], 0.0);
        prop_assert!((map.t_of_tau[map.t_of_tau.len() - 1] - td).abs() < 1e-12 * td);
        prop_assert!(map.t_of_tau.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn profile_is_symmetric_and_pinned(nw in 1.5f64..3.5, n in 21usize..160) {
        let traj = slepian(n, nw);
        let th = traj.theta_tilde();
        prop_assert_eq!(th[0], traj.theta_ini());
        prop_assert_eq!(th[n - 1], traj.theta_ini());
        for k in 0..n {
            prop_assert!((th[k] - th[n - 1 - k]).abs() < 1e-14);
        }
    }

    #[test]
    fn epsilon_is_pinned_and_symmetric(nw in 2.0f64..3.5, td in 30.0f64..70.0, amp in 0.3f64..0.98) {
        let pair = TransmonPair::default();
        let pulse = build_physical_pulse(&slepian(201, nw), td, amp, &pair, &FluxMapParams::default(), td / 2000.0).unwrap();
        let e = &pulse.epsilon;
        let n = e.len();
        prop_assert!((e[0] - pair.eps_ini()).abs() < 1e-12 * pair.eps_ini());
        prop_assert!((e[n - 1] - pair.eps_ini()).abs() < 1e-12 * pair.eps_ini());
        for k in 0..n {
            prop_assert!((e[k] - e[n - 1 - k]).abs() < 1e-6 * pair.eps_ini());
        }
    }

    #[test]
    fn analytic_leakage_obeys_time_scaling(nw in 1.5f64..3.5, td in 10.0f64..100.0, delta in 0.05f64..1.0, c in 0.2f64..5.0) {
        let traj = slepian(101, nw);
        let a = analytic_leakage(&traj, c * td, delta).pe;
        let b = analytic_leakage(&traj, td, c * delta).pe;
        // rounding of c * td * delta, against the uncancelled size of G
        let scale = traj.g().iter().map(|v| v.abs()).sum::<f64>().powi(2) / 4.0;
        prop_assert!((a - b).abs() <= 1e-12 * scale);
    }
}
