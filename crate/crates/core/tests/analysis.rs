mod common;

use std::sync::Arc;

use common::*;
use multisplit::analysis::*;
use multisplit::splitting::{extrapolate_linear, extrapolate_quadratic};
use multisplit::{build_grid, MethodId, SolverConfig, WaveField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid() -> Arc<multisplit::Grid1D> {
    Arc::new(build_grid(40, 1.0).unwrap())
}

fn field(parts: &[(f64, f64)]) -> WaveField {
    WaveField::new(grid(), parts.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
}

fn parts() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 39)
}

#[test]
fn l1_matches_naive_loop() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let a = random_vec(&mut rng, 39);
        let b = random_vec(&mut rng, 39);
        let mut naive = 0.0;
        for j in 0..39 {
            let d = a[j] - b[j];
            naive += g.dx() * (d.re * d.re + d.im * d.im).sqrt();
        }
        let fa = WaveField::new(Arc::clone(&g), a).unwrap();
        let fb = WaveField::new(Arc::clone(&g), b).unwrap();
        let got = l1_error(&fa, &fb).unwrap();
        assert!((got - naive).abs() <= 1e-14 * naive);
    }
}

proptest! {
    #[test]
    fn l1_is_a_metric(a in parts(), b in parts(), cc in parts()) {
        let (a, b, cc) = (field(&a), field(&b), field(&cc));
        let ab = l1_error(&a, &b).unwrap();
        prop_assert_eq!(ab, l1_error(&b, &a).unwrap());
        prop_assert_eq!(l1_error(&a, &a).unwrap(), 0.0);
        let bc = l1_error(&b, &cc).unwrap();
        let ac = l1_error(&a, &cc).unwrap();
        prop_assert!(ac <= (ab + bc) * (1.0 + 1e-14));
    }

    #[test]
    fn l1_scales_with_the_difference(a in parts(), d in parts(), lambda in -5.0f64..5.0) {
        let fa = field(&a);
        let shifted = |l: f64| field(&a.iter().zip(&d).map(|(x, y)| (x.0 + l * y.0, x.1 + l * y.1)).collect::<Vec<_>>());
        let base = l1_error(&fa, &shifted(1.0)).unwrap();
        let scaled = l1_error(&fa, &shifted(lambda)).unwrap();
        prop_assert!((scaled - lambda.abs() * base).abs() <= 1e-12 * base.max(1e-300) * lambda.abs().max(1.0));
    }
}

fn g1() -> Arc<multisplit::Grid1D> {
    Arc::new(build_grid(2, 1.0).unwrap())
}

fn scalar(v: f64) -> WaveField {
    WaveField::new(g1(), vec![c(v, -0.5 * v)]).unwrap()
}

#[test]
fn linear_kernel_is_exact_on_linear_data() {
    let (a, b, dt) = (0.3, -1.7, 0.125);
    let u = |t: f64| a + b * t;
    for mt in [2usize, 5, 40] {
        let target = 50.0 * dt;
        let out = extrapolate_linear(
            &scalar(u((mt - 1) as f64 * dt)),
            &scalar(u(mt as f64 * dt)),
            dt,
            mt,
            target,
        )
        .unwrap();
        let want = scalar(u(target)).values()[0];
        assert!((out.values()[0] - want).norm() <= 1e-14 * want.norm());
    }
}

#[test]
fn linear_kernel_defect_on_quadratic_data() {
    let (cq, dt, mt, target) = (2.5, 0.1, 4usize, 1.0);
    let u = |t: f64| cq * t * t;
    let t1 = (mt - 1) as f64 * dt;
    let out =
        extrapolate_linear(&scalar(u(t1)), &scalar(u(mt as f64 * dt)), dt, mt, target).unwrap();
    let s = target - t1;
    let defect = u(target) - out.values()[0].re;
    assert!((defect - cq * s * (s - dt)).abs() <= 1e-12);
}

#[test]
fn quadratic_kernel_on_polynomial_data() {
    let dt = 1.0;
    let out = extrapolate_quadratic(&scalar(0.0), &scalar(1.0), &scalar(4.0), dt, 2, 2.0).unwrap();
    assert!((out.values()[0].re - 5.0).abs() <= 1e-12);

    for (cq, dt, mt, target) in [(1.0, 0.5, 3usize, 3.0), (-3.0, 1e-2, 7, 0.5)] {
        let u = |t: f64| cq * t * t;
        let k = |m: usize| scalar(u(m as f64 * dt));
        let out = extrapolate_quadratic(&k(mt - 2), &k(mt - 1), &k(mt), dt, mt, target).unwrap();
        let s = target - (mt - 1) as f64 * dt;
        let defect = out.values()[0].re - u(target);
        assert!((defect - cq * s * dt).abs() <= 1e-12 * cq.abs().max(1.0));

        let lin = |t: f64| 2.0 - 0.7 * t;
        let l = |m: usize| scalar(lin(m as f64 * dt));
        let out = extrapolate_quadratic(&l(mt - 2), &l(mt - 1), &l(mt), dt, mt, target).unwrap();
        assert!((out.values()[0].re - lin(target)).abs() <= 1e-12);
        let k0 = scalar(4.0);
        let out = extrapolate_quadratic(&k0, &k0, &k0, dt, mt, target).unwrap();
        assert_eq!(out.values()[0], k0.values()[0]);
    }
}

fn fast_settings() -> BenchSettings {
    BenchSettings {
        repetitions: 1,
        warm_up: false,
        ..BenchSettings::default()
    }
}

#[test]
fn bench_error_rows_are_method_major() {
    let base = SolverConfig::canonical(MethodId::AB);
    let methods = [MethodId::AB, MethodId::HmmAB, MethodId::ExtraAB];
    let grid = [(1, 1), (10, 5)];
    let rows = bench_errors(&base, &methods, &grid, &fast_settings()).unwrap();
    assert_eq!(rows.len(), 6);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.method, methods[i / 2]);
        assert_eq!(row.micro_m, grid[i % 2].0);
        assert_eq!(row.status, RowStatus::Ok);
        let e = row.error_l1.unwrap();
        assert!(e.is_finite() && e >= 0.0 && row.wall_seconds >= 0.0);
    }
    assert!(rows[0].micro_used.is_none());
    assert_eq!(rows[3].micro_used, Some(5));
}

#[test]
fn ab_errors_barely_depend_on_micro_steps() {
    let base = SolverConfig::canonical(MethodId::AB);
    let rows = bench_errors(
        &base,
        &[MethodId::AB],
        &[(1, 1), (10, 5), (100, 50)],
        &fast_settings(),
    )
    .unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.error_l1.unwrap()).collect();
    let (lo, hi) = errs
        .iter()
        .fold((f64::MAX, 0.0f64), |(l, h), &e| (l.min(e), h.max(e)));
    assert!(hi < 10.0 * lo, "{errs:?}");
}

#[test]
fn tiny_budget_records_timeouts() {
    let base = SolverConfig::canonical(MethodId::AB);
    let settings = BenchSettings {
        time_budget: std::time::Duration::ZERO,
        ..fast_settings()
    };
    let rows = bench_errors(&base, &[MethodId::FullAB], &[(100, 50)], &settings).unwrap();
    assert_eq!(rows[0].status, RowStatus::Timeout);
    assert!(rows[0].error_l1.is_none());
}

fn order_of(case: MethodCase, dt_coarse: f64, levels: usize) -> Vec<ConvergenceRow> {
    let base = SolverConfig::canonical(case.method);
    convergence_study(&base, &[case], dt_coarse, levels, 10).unwrap()
}

#[test]
fn ab_global_order_is_one() {
    let rows = order_of(MethodCase::new(MethodId::AB, 1, 1), 8e-4, 2);
    let p = rows[1].observed_order.unwrap();
    assert!((0.7..=1.3).contains(&p), "observed order {p}");
}

#[test]
fn extra_ab_order_in_micro_step() {
    let rows = order_of(MethodCase::new(MethodId::ExtraAB, 10, 5), 8e-4, 2);
    let p = rows[1].observed_order.unwrap();
    assert!(p >= 0.8, "observed order {p}");
}

#[test]
fn aba_global_order_is_two() {
    let rows = order_of(MethodCase::new(MethodId::ABA, 1, 1), 8e-4, 2);
    let p = rows[1].observed_order.unwrap();
    assert!((1.5..=2.5).contains(&p), "observed order {p}");
}

#[test]
fn convergence_rejects_single_level() {
    let base = SolverConfig::canonical(MethodId::AB);
    assert!(convergence_study(&base, &[MethodCase::new(MethodId::AB, 1, 1)], 8e-4, 1, 10).is_err());
}
