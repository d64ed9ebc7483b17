mod common;

use common::{harmonic_errors, table3};
use proptest::prelude::*;
use slewing_core::analysis::generate_errors;
use slewing_core::contact::{hertz_stiffness, series_stiffness};
use slewing_core::energy::{BearingModel, LoadCase, Phase, Problem};
use slewing_core::geometry::{
    deformed_centers_idle, deformed_centers_loaded, initial_centers, spring_length, ErrorMap, Kinematics,
    RigidBodyPose, Ring,
};
use slewing_core::ring::{ring_stiffness, RingSection};
use slewing_core::solver::{axial_stiffness_curve, solve_idle, solve_loaded, SolverConfig};

fn idle_pose() -> impl Strategy<Value = RigidBodyPose<f64>> {
    (-0.05f64..0.05, -0.05f64..0.05, -0.05f64..0.05, -1e-3f64..1e-3, -1e-3f64..1e-3).prop_map(
        |(x, y, z, alpha, beta)| RigidBodyPose {
            x,
            y,
            z,
            alpha,
            beta,
            ..RigidBodyPose::zero()
        },
    )
}

fn rigid_model(amplitude: f64, preload: f64) -> BearingModel<f64> {
    let g = table3(16);
    let e = generate_errors(&harmonic_errors(amplitude), &g).with_preload(preload);
    BearingModel::rigid(g, e, Kinematics::Linearized).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_load_motions_reproduce_the_idle_centers(pose in idle_pose(), amp in 0.0f64..0.02) {
        let g = table3(12);
        let init = initial_centers(&g, &generate_errors(&harmonic_errors(amp), &g));
        for kin in [Kinematics::Linearized, Kinematics::Exact] {
            let idle = deformed_centers_idle(&init, &pose, None, kin).unwrap();
            let loaded = deformed_centers_loaded(&init, &pose, None, kin).unwrap();
            prop_assert_eq!(idle, loaded);
        }
    }

    #[test]
    fn linearized_kinematics_agree_to_first_order(
        pose in idle_pose(),
        tilt in -1e-3f64..1e-3,
        dir in 0.0f64..std::f64::consts::TAU,
    ) {
        let g = table3(12);
        let init = initial_centers(&g, &ErrorMap::zero(12));
        let pose = RigidBodyPose { tilt, load_direction: dir, ..pose };
        let lin = deformed_centers_loaded(&init, &pose, None, Kinematics::Linearized).unwrap();
        let exact = deformed_centers_loaded(&init, &pose, None, Kinematics::Exact).unwrap();
        let rot = pose.alpha_eff().abs() + pose.beta_eff().abs();
        for b in 0..12 {
            for c in 0..4 {
                let scale = init.radial[b][c].abs().max(init.axial[b][c].abs());
                let d = (lin.radial[b][c] - exact.radial[b][c]).hypot(lin.axial[b][c] - exact.axial[b][c]);
                prop_assert!(d <= rot * rot * scale, "ball {} contact {}: {:e} > {:e}", b, c, d, rot * rot * scale);
            }
        }
    }

    #[test]
    fn common_translation_keeps_spring_lengths(dr in -1.0f64..1.0, dz in -1.0f64..1.0, amp in 0.0f64..0.02) {
        let g = table3(12);
        let init = initial_centers(&g, &generate_errors(&harmonic_errors(amp), &g));
        let mut moved = init.clone();
        for b in 0..12 {
            for c in 0..4 {
                moved.radial[b][c] += dr;
                moved.axial[b][c] += dz;
            }
        }
        for b in 0..12 {
            for d in 0..2 {
                let (l0, l1) = (spring_length(&init, b, d), spring_length(&moved, b, d));
                prop_assert!((l0 - l1).abs() <= 1e-12 * l0);
            }
        }
    }

    #[test]
    fn load_work_scales_linearly(
        fa in -1e6f64..1e6, fr in 0.0f64..1e6, mt in -1e8f64..1e8, lambda in -10.0f64..10.0,
        da in -0.1f64..0.1, dr in -0.1f64..0.1, th in -1e-3f64..1e-3,
    ) {
        let load = LoadCase { axial_force: fa, radial_force: fr, tilting_moment: mt, load_direction: 0.0 };
        let pose = RigidBodyPose { axial: da, radial: dr, tilt: th, ..RigidBodyPose::zero() };
        let w = load.work(&pose);
        let scaled = load.scaled(lambda).work(&pose);
        let size = (fa * da).abs() + (fr * dr).abs() + (mt * th).abs();
        prop_assert!((scaled - lambda * w).abs() <= 1e-14 * lambda.abs() * size);
    }

    /// Energy, gradient and Hessian vanish as the first contacts close: the
    /// energy is C² across activation.
    #[test]
    fn energy_is_smooth_at_contact_onset(eps in 1e-9f64..1e-5) {
        let b = 16;
        let g = table3(b);
        let model = BearingModel::rigid(g.clone(), ErrorMap::zero(b), Kinematics::Linearized).unwrap();
        let p = Problem::idle(&model);
        let k = series_stiffness(
            hertz_stiffness(g.ball_diameter, g.osculation(0), 1.0).unwrap(),
            hertz_stiffness(g.ball_diameter, g.osculation(2), 1.0).unwrap(),
        );
        let n = 2.0 * b as f64;
        for sign in [1.0, -1.0] {
            let mut x = vec![0.0; p.len()];
            x[2] = sign * eps;
            let e = p.energy(&x).unwrap();
            let grad = p.gradient(&x).unwrap().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let hess = p.hessian(&x).unwrap().amax();
            // every diagonal closes by at most eps
            prop_assert!(e >= 0.0 && e <= n * 0.4 * k * eps.powf(2.5));
            prop_assert!(grad <= n * k * eps.powf(1.5));
            prop_assert!(hess <= n * 1.5 * k * eps.sqrt());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unknown_count_follows_the_ball_count(b in 3usize..40) {
        let g = table3(b);
        let rings = [Ring::Outer, Ring::Inner].map(|r| {
            let mut s = RingSection::default_for(&g, r);
            s.elements_per_ball = 2;
            ring_stiffness(&s, r, b).unwrap()
        });
        let [o, i] = rings;
        let m = BearingModel::flexible(g, ErrorMap::zero(b), Kinematics::Linearized, o, i).unwrap();
        prop_assert_eq!(m.state_len(Phase::Idle), 5 + 8 * b);
        prop_assert_eq!(m.state_len(Phase::Loaded), 3 + 8 * b);
        prop_assert_eq!(m.state_len(Phase::Imposed), 8 * b);
    }

    /// Reported forces follow the contact law and are positive exactly on
    /// closed diagonals.
    #[test]
    fn solutions_are_consistent_with_the_contact_law(
        amp in 0.0f64..0.02, preload in -0.005f64..0.03,
        fa in -5e4f64..5e4, fr in 0.0f64..5e4, mt in -5e6f64..5e6,
    ) {
        let model = rigid_model(amp, preload);
        let cfg = SolverConfig::default();
        let idle = solve_idle(&model, &cfg).unwrap();
        prop_assume!(idle.active_balls() >= 3);
        let load = LoadCase { axial_force: fa, radial_force: fr, tilting_moment: mt, load_direction: 0.0 };
        let loaded = solve_loaded(&model, &idle, &load, &cfg).unwrap();
        for sol in [&idle, &loaded] {
            prop_assert!(sol.converged);
            for ball in &sol.balls {
                for d in &ball.diagonals {
                    prop_assert_eq!(d.force > 0.0, d.delta_total > 0.0);
                    prop_assert_eq!(d.active, d.delta_total > 0.0);
                    if d.active {
                        let q = d.k_total * d.delta_total.powf(1.5);
                        prop_assert!((d.force - q).abs() <= 1e-9 * q);
                        for (k, dd) in d.stiffness.iter().zip(d.delta) {
                            prop_assert!((k * dd.powf(1.5) - q).abs() <= 1e-9 * q);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn axial_reaction_is_monotone(amp in 0.0f64..0.02, preload in 0.0f64..0.03) {
        let model = rigid_model(amp, preload);
        let cfg = SolverConfig::default();
        let idle = solve_idle(&model, &cfg).unwrap();
        prop_assume!(idle.active_balls() >= 3);
        let grid: Vec<f64> = (-10..=10).map(|i| 0.01 * i as f64).collect();
        let curve = axial_stiffness_curve(&model, &idle, &grid, &cfg).unwrap();
        for w in curve.windows(2) {
            prop_assert!(w[1].axial_force >= w[0].axial_force);
        }
    }
}
