mod common;

use common::*;
use qpww_core::dynamics::*;
use qpww_core::lab::{random_state, random_undiff_state, trial_rng, RandomStateSpec};
use qpww_core::spectral::*;
use qpww_core::timestepper::{step_rk4, DiffFlow, UndiffFlow};
use std::sync::Arc;

const EPS: f64 = 1e-6;

fn golden(n: usize) -> Arc<Lattice<f64>> {
    validate_lattice(&golden_frequencies::<f64>(), n, 1e-12).unwrap()
}

fn xi_of(lat: &Lattice<f64>, j: &[i64]) -> f64 {
    lat.xi()[lat.index_of(j).unwrap()]
}

#[test]
fn y_of_zero_and_geometric_series() {
    let lat = golden(6);
    assert_eq!(
        compute_y(&QpFunction::zeros(&lat), EPS)
            .unwrap()
            .max_abs_coeff(),
        0.0
    );
    for eps in [1e-2, 1e-3] {
        let w = QpFunction::mode(&lat, &[-1, 0], C::new(eps, 0.0));
        let y = compute_y(&w, EPS).unwrap();
        let expect = &w - &QpFunction::mode(&lat, &[-2, 0], C::new(eps * eps, 0.0));
        assert!(max_diff(&y, &expect) < 2.0 * eps.powi(3));
    }
}

#[test]
fn b_examples() {
    let lat = golden(4);
    let z = QpFunction::zeros(&lat);
    assert_eq!(compute_b(&z, &z).max_abs_coeff(), 0.0);
    let eps = C::new(0.01, 0.02);
    let r = QpFunction::mode(&lat, &[-1, 0], eps);
    let b = compute_b(&r, &z);
    let expect = &r + &r.conj();
    assert!(max_diff(&b, &expect) < 1e-17);
    assert!(b.is_real(1e-17));
}

/// `a` at sample points from the double sum over mode pairs, with `P`
/// applied pair by pair according to the sign of `mu_m - mu_n`.
fn a_double_sum(modes: &[(Vec<i64>, f64, C)], x: &[f64]) -> f64 {
    let mut pu = C::new(0.0, 0.0);
    for (jm, mum, cm) in modes {
        for (jn, mun, cn) in modes {
            let diff = mum - mun;
            let weight = if diff.abs() < 1e-12 {
                0.5
            } else if diff < 0.0 {
                1.0
            } else {
                0.0
            };
            let phase: f64 = jm
                .iter()
                .zip(jn)
                .zip(x)
                .map(|((a, b), t)| (a - b) as f64 * t)
                .sum();
            pu += weight * cm * cn.conj() * C::new(0.0, -mun) * C::from_polar(1.0, phase);
        }
    }
    2.0 * pu.im
}

#[test]
fn a_single_mode_and_two_mode_double_sum() {
    let lat = golden(6);
    assert_eq!(compute_a(&QpFunction::zeros(&lat)).max_abs_coeff(), 0.0);
    let j = [-1i64, -1];
    let mu = xi_of(&lat, &j);
    let eps = C::new(0.003, -0.004);
    let a = compute_a(&QpFunction::mode(&lat, &j, eps));
    let expect = QpFunction::constant(&lat, C::new(mu.abs() * eps.norm_sqr(), 0.0));
    assert!(max_diff(&a, &expect) < 1e-18);

    let modes = vec![
        (vec![-1i64, 0], xi_of(&lat, &[-1, 0]), C::new(0.7, 0.2)),
        (vec![1i64, -2], xi_of(&lat, &[1, -2]), C::new(-0.3, 0.5)),
    ];
    let r = &QpFunction::mode(&lat, &modes[0].0, modes[0].2)
        + &QpFunction::mode(&lat, &modes[1].0, modes[1].2);
    let a = compute_a(&r);
    assert!(a.is_real(1e-15));
    let mut r2 = rng(2);
    use rand::Rng;
    for _ in 0..10 {
        let x = [r2.gen_range(0.0..6.3), r2.gen_range(0.0..6.3)];
        let direct = a_double_sum(&modes, &x);
        assert!((eval_series(&a, &x).re - direct).abs() < 1e-13, "{direct}");
    }
}

#[test]
fn a_is_nonnegative_on_random_holomorphic_r() {
    let lat = golden(8);
    for trial in 0..40 {
        let spec = RandomStateSpec::new(2.0, 0.5).with_band(Some(4));
        let s = random_state(&lat, &spec, &mut trial_rng(7, trial));
        let a = compute_a(&s.r);
        let bound = -1e-10 * s.r.norm2(1.0, 0.0);
        assert!(
            a.min_re_on_grid() >= bound,
            "trial {trial}: {}",
            a.min_re_on_grid()
        );
        assert!(a.is_real(1e-13));
    }
}

#[test]
fn m_vanishes_and_matches_rational_form() {
    let lat = golden(8);
    let z = QpFunction::zeros(&lat);
    let mut r = rng(4);
    let s = random_state(&lat, &RandomStateSpec::new(2.0, 0.2), &mut r);
    assert_eq!(
        compute_m(&z, &compute_y(&s.w, EPS).unwrap()).max_abs_coeff(),
        0.0
    );
    assert_eq!(compute_m(&s.r, &z).max_abs_coeff(), 0.0);

    // band-limited small data: every product stays inside the box
    for trial in 0..5 {
        let spec = RandomStateSpec::new(2.0, 1e-3).with_band(Some(2));
        let s = random_state(&lat, &spec, &mut trial_rng(5, trial));
        let y = compute_y(&s.w, EPS).unwrap();
        let m = compute_m(&s.r, &y);
        let m2 = compute_m_rational(&s.w, &s.r, EPS).unwrap();
        assert!(m.is_real(1e-17));
        assert!(
            max_diff(&m, &m2) <= 1e-11 * m.max_abs_coeff(),
            "{}",
            max_diff(&m, &m2) / m.max_abs_coeff()
        );
    }
    // moderate data: agreement up to truncation
    let s = random_state(
        &lat,
        &RandomStateSpec::new(2.0, 0.3).with_band(Some(4)),
        &mut trial_rng(5, 99),
    );
    let m = compute_m(&s.r, &compute_y(&s.w, EPS).unwrap());
    let m2 = compute_m_rational(&s.w, &s.r, EPS).unwrap();
    assert!(max_diff(&m, &m2) <= 1e-2 * m.max_abs_coeff());
}

#[test]
fn f_examples_and_relation_to_b() {
    let lat = golden(8);
    let z = WaveStateUndiff::zeros(&lat);
    assert_eq!(compute_f(&z, EPS).unwrap().max_abs_coeff(), 0.0);
    let q = QpFunction::mode(&lat, &[-1, 0], C::new(0.01, 0.0));
    let u = WaveStateUndiff::new(QpFunction::zeros(&lat), q.clone());
    let f = compute_f(&u, EPS).unwrap();
    assert!(max_diff(&f, &q.d_alpha()) < 1e-17);

    // the reciprocal is not band-limited; this size is resolved at N = 12
    let lat = golden(12);
    let u = random_undiff_state(&lat, 3.0, 0.01, Some(3), &mut rng(8));
    let v = differentiate_state(&u, EPS).unwrap();
    let y = compute_y(&v.w, EPS).unwrap();
    let b = compute_b(&v.r, &y);
    let f = compute_f(&u, EPS).unwrap();
    let f_diff = compute_f_diff(&v.r, &y);
    assert!(max_diff(&f, &f_diff) < 1e-9 * f.max_abs_coeff());
    // b - F = Qbar_alpha / J
    let wa = u.w.d_alpha();
    let qbar_over_j =
        u.q.d_alpha()
            .conj()
            .lift()
            .zip_with(&wa.lift(), |q, w| q / (C::new(1.0, 0.0) + w).norm_sqr())
            .analyze();
    assert!(max_diff(&(&b - &f), &qbar_over_j) < 1e-9 * b.max_abs_coeff());
}

#[test]
fn rhs_at_equilibrium_is_exactly_zero() {
    let lat = golden(4);
    let z = WaveStateDiff::zeros(&lat);
    assert_eq!(rhs_diff(&z, EPS).unwrap(), z);
    let u = WaveStateUndiff::zeros(&lat);
    assert_eq!(rhs_undiff(&u, EPS).unwrap(), u);
}

#[test]
fn rhs_small_amplitude_linearization() {
    let lat = golden(6);
    for eps in [1e-3, 1e-4] {
        let r = QpFunction::mode(&lat, &[-1, -1], C::new(eps, 0.0));
        let s = WaveStateDiff::new(QpFunction::zeros(&lat), r.clone());
        let out = rhs_diff(&s, EPS).unwrap();
        assert!(max_diff(&out.w, &(-&r.d_alpha())) < 10.0 * eps * eps);
        assert!(out.r.max_abs_coeff() < 10.0 * eps * eps);

        let q = QpFunction::mode(&lat, &[-1, 0], C::new(0.0, eps));
        let w = QpFunction::mode(&lat, &[0, -1], C::new(eps, 0.0));
        let u = WaveStateUndiff::new(w.clone(), q.clone());
        let out = rhs_undiff(&u, EPS).unwrap();
        assert!(max_diff(&out.w, &(-&q.d_alpha())) < 10.0 * eps * eps);
        assert!(max_diff(&out.q, &w.times_i()) < 10.0 * eps * eps);
    }
}

#[test]
fn differentiate_examples() {
    let lat = golden(6);
    let z = WaveStateUndiff::zeros(&lat);
    let v = differentiate_state(&z, EPS).unwrap();
    assert_eq!(v, WaveStateDiff::zeros(&lat));
    assert_eq!(reconstruct_check(&z, &v), 0.0);
    let w = QpFunction::mode(&lat, &[-2, 1], C::new(0.1, 0.0));
    let u = WaveStateUndiff::new(w.clone(), QpFunction::zeros(&lat));
    let v = differentiate_state(&u, EPS).unwrap();
    let xi = xi_of(&lat, &[-2, 1]);
    assert!((v.w.coeff(&[-2, 1]) - C::new(0.0, 0.1 * xi)).norm() < 1e-16);

    let lat = golden(16);
    let u = random_undiff_state(&lat, 3.0, 0.05, Some(3), &mut rng(10));
    let v = differentiate_state(&u, EPS).unwrap();
    assert!(
        reconstruct_check(&u, &v) <= 1e-12,
        "{}",
        reconstruct_check(&u, &v)
    );
}

#[test]
fn the_two_formulations_agree_after_one_step() {
    let lat = golden(8);
    let u = random_undiff_state(&lat, 3.0, 0.02, Some(3), &mut rng(12));
    let v = differentiate_state(&u, EPS).unwrap();
    let dt = 1e-4;
    let u1 = step_rk4(&UndiffFlow { eps_chord: EPS }, 0.0, &u, dt)
        .unwrap()
        .projected();
    let v1 = step_rk4(&DiffFlow { eps_chord: EPS }, 0.0, &v, dt)
        .unwrap()
        .projected();
    let from_u = differentiate_state(&u1, EPS).unwrap();
    let err = from_u.sub(&v1).hnorm(0.0);
    assert!(err < 1e-6, "{err}");
    assert!(reconstruct_check(&u1, &v1) < 1e-6);
}

#[test]
fn control_params_examples() {
    let lat = golden(4);
    assert_eq!(control_params(&WaveStateDiff::zeros(&lat), 2.0), (0.0, 0.0));
    let j = [-1i64, 2];
    let w = QpFunction::mode(&lat, &j, C::new(0.5, 0.0));
    let s = WaveStateDiff::new(w, QpFunction::zeros(&lat));
    let (a, b) = control_params(&s, 2.0);
    assert!((a - 0.5 * 6f64.powf(0.75)).abs() < 1e-14);
    assert!((b - 0.5 * 6.0).abs() < 1e-14);

    let r = QpFunction::mode(&lat, &j, C::new(0.5, 0.0));
    let xi = xi_of(&lat, &j);
    let s = WaveStateDiff::new(QpFunction::zeros(&lat), r);
    let (a, b) = control_params(&s, 2.0);
    assert!((a - 0.5 * (6f64.powf(1.5) * (1.0 + xi * xi).sqrt()).sqrt()).abs() < 1e-14);
    assert!(a <= b);
}

#[test]
fn sobolev_embedding_proxies_hold_across_a_suite() {
    let lat = golden(8);
    let mut worst_w: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for trial in 0..30 {
        let s = random_state(
            &lat,
            &RandomStateSpec::new(2.0, 0.3),
            &mut trial_rng(3, trial),
        );
        let (a, b) = control_params(&s, 2.0);
        worst_w = worst_w.max(s.w.linf() / a);
        worst_r = worst_r.max(s.r.d_alpha().linf() / b);
    }
    assert!(worst_w < 10.0 && worst_r < 10.0, "{worst_w} {worst_r}");
}

#[test]
fn energy_ek_single_mode_oracle() {
    let lat = golden(4);
    assert_eq!(energy_ek(&WaveStateDiff::zeros(&lat), 2, EPS).unwrap(), 0.0);
    let j = [-1i64, -2];
    let mu = xi_of(&lat, &j);
    let eps = 1e-3;
    let s = WaveStateDiff::new(
        QpFunction::zeros(&lat),
        QpFunction::mode(&lat, &j, C::new(eps, 0.0)),
    );
    for k in [1usize, 2] {
        let mut expect = 0.0;
        for kappa in multi_indices(2, k) {
            let weight: f64 = kappa
                .iter()
                .zip(j)
                .map(|(&n, ji)| (ji as f64).powi(2 * n as i32))
                .product();
            expect += weight * eps * eps * (mu.abs() + 1.0);
        }
        let got = energy_ek(&s, k, EPS).unwrap();
        assert!((got - expect).abs() < 1e-13 * expect, "{got} {expect}");
    }
}

#[test]
fn energy_ek_is_coercive_for_small_states() {
    let lat = golden(6);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for trial in 0..20 {
        let s = random_state(
            &lat,
            &RandomStateSpec::new(2.0, 0.05),
            &mut trial_rng(13, trial),
        );
        let e = energy_ek(&s, 1, EPS).unwrap();
        let norm2 = {
            let mut t = 0.0;
            for axis in 0..2 {
                let d = WaveStateDiff::new(s.w.d_coord(axis), s.r.d_coord(axis));
                t += d.hnorm(0.0).powi(2);
            }
            t
        };
        lo = lo.min(e / norm2);
        hi = hi.max(e / norm2);
    }
    assert!(lo > 0.1 && hi < 10.0, "{lo} {hi}");
}
