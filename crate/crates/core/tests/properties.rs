use nalgebra::{Rotation2, Vector2, Vector3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grasp_equilibrium::arrangement::{cell_labels, enumerate_cells, slip_states_from_cells, EnumerationOptions};
use grasp_equilibrium::baselines::{brute_force_verdict, gws_l1, linear_compliance_verdict, wrench_achievable};
use grasp_equilibrium::equilibrium::{assemble_state_system, check_solution, EquilibriumSolution};
use grasp_equilibrium::model::{build_maps, contact_motion, validate_model, world_force, Contact, ContactForce};
use grasp_equilibrium::random::{random_grasp, random_wrench, RandomGraspOptions};
use grasp_equilibrium::stability::{check_stability, check_stability_with, StabilityAnalyzer};
use grasp_equilibrium::{ContactLabel, GraspModel, Wrench};

fn grasp(seed: u64, m: usize, preload: bool) -> (GraspModel, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_grasp(&mut rng, &RandomGraspOptions::new(m).with_preload(preload));
    (g, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn contact_motion_is_rigid_velocity(
        px in -2.0..2.0f64, py in -2.0..2.0f64, a in 0.0..6.3f64,
        dx in -3.0..3.0f64, dy in -3.0..3.0f64, dr in -3.0..3.0f64,
    ) {
        let c = Contact { position: Vector2::new(px, py), normal: Vector2::new(a.cos(), a.sin()), mu: 0.5 };
        let model = GraspModel::new(vec![c.clone()]);
        let got = contact_motion(&build_maps(&model), &Vector3::new(dx, dy, dr))[0];
        let v = Vector2::new(dx, dy) + dr * Vector2::new(-py, px);
        let tangent = Vector2::new(c.normal.y, -c.normal.x);
        prop_assert!((got.normal - c.normal.dot(&v)).abs() < 1e-12);
        prop_assert!((got.tangential - tangent.dot(&v)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_preloads_balance(seed in any::<u64>(), m in 2usize..7) {
        let (g, _) = grasp(seed, m, true);
        prop_assert!(validate_model(&g).is_ok());
        let mut total = Vector3::zeros();
        for (c, p) in g.contacts.iter().zip(&g.preload) {
            total += world_force(c, p).as_wrench_vector();
        }
        prop_assert!(total.amax() < 1e-9);
    }

    #[test]
    fn flipped_tangent_gives_same_world_force(
        a in 0.0..6.3f64, px in -1.0..1.0f64, py in -1.0..1.0f64,
        cn in 0.0..2.0f64, ct in -1.0..1.0f64,
    ) {
        let c = Contact { position: Vector2::new(px, py), normal: Vector2::new(a.cos(), a.sin()), mu: 0.5 };
        let ours = world_force(&c, &ContactForce::new(cn, ct));
        // opposite tangent orientation with the mirrored tangential component
        let mirrored = -c.normal * cn + (-c.tangent()) * (-ct);
        prop_assert!((ours.force - mirrored).amax() < 1e-15);
    }

    #[test]
    fn systems_are_square(seed in any::<u64>(), m in 1usize..6, detach in any::<bool>(), pick in any::<u64>()) {
        let (g, _) = grasp(seed, m, false);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        use rand::Rng;
        let letters = if detach {
            vec![ContactLabel::Detached, ContactLabel::SlipNeg, ContactLabel::Stick, ContactLabel::SlipPos]
        } else {
            vec![ContactLabel::SlipNeg, ContactLabel::Stick, ContactLabel::SlipPos]
        };
        let labels: Vec<_> = (0..m).map(|_| letters[rng.random_range(0..letters.len())]).collect();
        let sys = assemble_state_system(&g, &Wrench::new(0.1, 0.2, 0.3), &labels).unwrap();
        prop_assert_eq!(sys.eq.nrows(), 3 + 2 * m);
        prop_assert_eq!(sys.eq.ncols(), 3 + 2 * m);
    }

    #[test]
    fn general_position_count_law(seed in any::<u64>(), m in 2usize..7) {
        let (g, _) = grasp(seed, m, false);
        let cells = enumerate_cells(&g, EnumerationOptions { detachment: false }).unwrap();
        prop_assert_eq!(cells.counts().cells(), 4 * m * m - 4 * m + 2);
    }

    #[test]
    fn every_sampled_motion_has_an_enumerated_state(seed in any::<u64>(), m in 1usize..6, detach in any::<bool>()) {
        let (g, mut rng) = grasp(seed, m, false);
        let opts = EnumerationOptions { detachment: detach };
        let cells = enumerate_cells(&g, opts).unwrap();
        let states = slip_states_from_cells(&cells, m, detach);
        let maps = build_maps(&g);
        use rand::Rng;
        for _ in 0..300 {
            let d = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let labels: Vec<ContactLabel> = contact_motion(&maps, &d)
                .iter()
                .map(|cm| {
                    if detach && cm.normal < 0.0 {
                        ContactLabel::Detached
                    } else if cm.tangential > 0.0 {
                        ContactLabel::SlipPos
                    } else {
                        ContactLabel::SlipNeg
                    }
                })
                .collect();
            prop_assert!(states.contains(&labels), "{labels:?}");
            let signs = cells.arrangement.sign_vector(&d, 0.0);
            prop_assert_eq!(cell_labels(&signs, &cells.arrangement, m), labels);
        }
    }
}

fn scaled(sol: &EquilibriumSolution, s: f64) -> EquilibriumSolution {
    let mut out = sol.clone();
    out.d *= s;
    for f in &mut out.forces {
        f.normal *= s;
        f.tangential *= s;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_match_brute_force(seed in any::<u64>(), m in 2usize..5, preload in any::<bool>()) {
        let (g, mut rng) = grasp(seed, m, preload);
        let w = random_wrench(&mut rng, 1.0);
        let fast = check_stability(&g, &w).unwrap();
        let slow = brute_force_verdict(&g, &w, true).unwrap();
        prop_assert_eq!(fast.stable, slow.stable);
        if let Some(sol) = &fast.witness {
            prop_assert!(check_solution(&g, &w, sol).max() < 1e-9);
        }
    }

    #[test]
    fn verdicts_scale_with_load(seed in any::<u64>(), m in 2usize..5, s in 0.1..10.0f64) {
        let (g, mut rng) = grasp(seed, m, true);
        let w = random_wrench(&mut rng, 1.0);
        let mut gs = g.clone();
        for p in &mut gs.preload {
            p.normal *= s;
            p.tangential *= s;
        }
        let ws = Wrench::new(w.fx * s, w.fy * s, w.torque * s);
        let a = check_stability(&g, &w).unwrap();
        let b = check_stability(&gs, &ws).unwrap();
        prop_assert_eq!(a.stable, b.stable);
        if let Some(sol) = &a.witness {
            prop_assert!(check_solution(&gs, &ws, &scaled(sol, s)).max() < 1e-8 * s.max(1.0));
        }
    }

    #[test]
    fn verdicts_are_frame_independent(seed in any::<u64>(), m in 2usize..5, angle in 0.0..6.3f64, tx in -1.0..1.0f64, ty in -1.0..1.0f64) {
        let (g, mut rng) = grasp(seed, m, true);
        let w = random_wrench(&mut rng, 1.0);
        let rot = Rotation2::new(angle);
        let shift = Vector2::new(tx, ty);
        let mut moved = g.clone();
        for c in &mut moved.contacts {
            c.position = rot * c.position + shift;
            c.normal = rot * c.normal;
        }
        // same physical wrench expressed in the new frame
        let f = rot * Vector2::new(w.fx, w.fy);
        let torque = w.torque + shift.x * f.y - shift.y * f.x;
        let wm = Wrench::new(f.x, f.y, torque);
        let a = check_stability(&g, &w).unwrap();
        let b = check_stability(&moved, &wm).unwrap();
        prop_assert_eq!(a.stable, b.stable);
    }

    #[test]
    fn cached_states_give_same_verdicts(seed in any::<u64>(), m in 2usize..5) {
        let (g, mut rng) = grasp(seed, m, true);
        let analyzer = StabilityAnalyzer::new(g.clone(), EnumerationOptions::default()).unwrap();
        for _ in 0..4 {
            let w = random_wrench(&mut rng, 1.0);
            prop_assert_eq!(analyzer.check(&w).unwrap(), check_stability(&g, &w).unwrap());
        }
    }

    #[test]
    fn linear_compliance_is_conservative(seed in any::<u64>(), m in 2usize..6, scale in 0.01..1.0f64) {
        let (g, mut rng) = grasp(seed, m, true);
        let w = random_wrench(&mut rng, scale);
        let lin = linear_compliance_verdict(&g, &w, &vec![1.0; m]).unwrap();
        if lin.stable {
            prop_assert!(check_stability(&g, &w).unwrap().stable);
        }
    }

    #[test]
    fn gws_vertices_are_achievable(seed in any::<u64>(), m in 1usize..6) {
        let (g, _) = grasp(seed, m, false);
        let poly = gws_l1(&g);
        for v in &poly.vertices {
            prop_assert!(wrench_achievable(&g, v));
        }
    }

    #[test]
    fn strict_mode_never_detaches(seed in any::<u64>(), m in 2usize..5) {
        let (g, mut rng) = grasp(seed, m, false);
        let w = random_wrench(&mut rng, 1.0);
        let v = check_stability_with(&g, &w, EnumerationOptions { detachment: false }).unwrap();
        if let Some(sol) = v.witness {
            prop_assert!(sol.labels.iter().all(|l| l.is_attached()));
        }
    }
}
