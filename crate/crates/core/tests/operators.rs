mod common;

use std::sync::Arc;

use common::*;
use multisplit::operators::*;
use multisplit::{build_grid, init_scaled, PotentialSpec, WaveField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn thomas_matches_dense_oracle_on_n3() {
    let a = c(0.0, 1.0);
    let sys =
        TridiagonalSystem::new(vec![-a; 2], vec![c(1.0, 0.0) + 2.0 * a; 3], vec![-a; 2]).unwrap();
    let rhs = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
    let x = thomas_solve(&sys, &rhs).unwrap();
    let oracle = dense_solve(&to_dense(&sys), &rhs);
    assert!(max_rel_diff(&x, &oracle) < 1e-14);
}

#[test]
fn thomas_matches_dense_oracle_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let n = 1 + trial % 64;
        let (sys, rhs) = random_dominant_system(&mut rng, n);
        let x = thomas_solve(&sys, &rhs).unwrap();
        let oracle = dense_solve(&to_dense(&sys), &rhs);
        assert!(max_rel_diff(&x, &oracle) <= 1e-12, "trial {trial}");
        // residual bound
        let r = sys.apply(&x).unwrap();
        let res = r
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(res <= 1e-12 * (max_abs(&rhs) + max_abs(&x)));
    }
}

#[test]
fn modulus_law_of_potential_substeps() {
    let g = Arc::new(build_grid(50, 1.0).unwrap());
    let f = init_scaled(&g).unwrap();
    let (dt, eps, m) = (1e-4, 1e-2, 37);
    let p = build_potential_propagator(&g, PotentialSpec::ExpSine, dt, eps).unwrap();
    let out = apply_potential_substeps(&f, &p, m).unwrap();
    for ((x, before), after) in g.interior().iter().zip(f.values()).zip(out.values()) {
        let v = PotentialSpec::ExpSine.eval(*x);
        let gain = (1.0 + (dt * v / eps).powi(2)).powf(m as f64 / 2.0);
        assert!((after.norm() - gain * before.norm()).abs() <= 1e-13 * gain * before.norm());
    }
}

#[test]
fn power_and_repeated_paths_agree_for_large_m() {
    let g = Arc::new(build_grid(20, 1.0).unwrap());
    let f = init_scaled(&g).unwrap();
    let p = build_potential_propagator(&g, PotentialSpec::Sine, 1e-6, 1e-2).unwrap();
    for m in [1, 2, 10, 999, 10_000] {
        let a = apply_potential_substeps(&f, &p, m).unwrap();
        let b = apply_potential_repeated(&f, &p, m).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-13 * y.norm().max(1e-300), "m = {m}");
        }
    }
}

fn field_from(g: &Arc<multisplit::Grid1D>, parts: &[(f64, f64)]) -> WaveField {
    WaveField::new(Arc::clone(g), parts.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diffusion_solve_is_nonexpansive(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15),
        eps in 1e-4f64..0.9,
        dt in 1e-6f64..1e-1,
    ) {
        let g = Arc::new(build_grid(16, 1.0).unwrap());
        let u = field_from(&g, &parts);
        let sys = assemble_diffusion(&g, eps, dt).unwrap();
        let out = solve_field(&sys, &u).unwrap();
        prop_assert!(out.norm_l2() <= u.norm_l2() * (1.0 + 1e-14));
    }

    #[test]
    fn solve_then_multiply_is_identity(
        parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 31),
        eps in 1e-3f64..0.5,
        dt in 1e-5f64..1e-2,
    ) {
        let g = Arc::new(build_grid(32, 1.0).unwrap());
        let rhs: Vec<_> = parts.iter().map(|&(r, i)| c(r, i)).collect();
        let sys = assemble_unsplit(&g, eps, dt, PotentialSpec::Sine).unwrap();
        let x = thomas_solve(&sys, &rhs).unwrap();
        let back = sys.apply(&x).unwrap();
        prop_assert!(max_rel_diff(&back, &rhs) <= 1e-12);
    }

    #[test]
    fn substeps_compose(
        m1 in 0usize..400,
        m2 in 0usize..400,
        dt in 1e-6f64..1e-3,
    ) {
        let g = Arc::new(build_grid(12, 1.0).unwrap());
        let f = init_scaled(&g).unwrap();
        let p = build_potential_propagator(&g, PotentialSpec::Quadratic, dt, 1e-2).unwrap();
        let once = apply_potential_substeps(&f, &p, m1 + m2).unwrap();
        let twice = apply_potential_substeps(&apply_potential_substeps(&f, &p, m1).unwrap(), &p, m2).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn factor_modulus_identity(v in -10.0f64..10.0, dt in 1e-6f64..1.0, eps in 1e-3f64..1.0) {
        let p = PotentialPropagator::from_samples(&[v], dt, eps);
        let f = p.factors()[0];
        let expected = 1.0 + (dt * v / eps).powi(2);
        prop_assert!((f.norm_sqr() - expected).abs() <= 4.0 * f64::EPSILON * expected);
    }
}
