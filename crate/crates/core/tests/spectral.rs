mod common;

use common::*;
use proptest::prelude::*;
use qpww_core::spectral::*;

fn golden(n: usize) -> std::sync::Arc<Lattice<f64>> {
    validate_lattice(&golden_frequencies::<f64>(), n, 1e-12).unwrap()
}

#[test]
fn grid_of_constant_and_single_mode() {
    let lat = golden(3);
    let c = C::new(0.7, -0.2);
    let g = to_grid(&QpFunction::constant(&lat, c), 9).unwrap();
    assert!(g.values().iter().all(|v| (v - c).norm() < 1e-15));

    let j = [2i64, -1];
    let u = QpFunction::mode(&lat, &j, C::new(1.0, 0.0));
    let g = to_grid(&u, 11).unwrap();
    for (p, v) in g.values().iter().enumerate() {
        let x = g.point(p);
        let phase = j[0] as f64 * x[0] + j[1] as f64 * x[1];
        assert!((v - C::from_polar(1.0, phase)).norm() < 1e-13);
    }
}

#[test]
fn grid_matches_direct_series_and_round_trips() {
    let lat = golden(4);
    let mut r = rng(11);
    let u = random_function(&lat, &mut r);
    let g = to_grid(&u, 12).unwrap();
    for k in 0..10 {
        let p = (k * 37 + 5) % g.values().len();
        let x = g.point(p);
        let direct = eval_series(&u, &x);
        assert!((g.values()[p] - direct).norm() < 1e-12 * (1.0 + direct.norm()));
    }
    let back = to_coeffs(&g, &lat).unwrap();
    assert!(max_diff(&back, &u) <= 1e-13 * u.max_abs_coeff());
    // unpadded resolution is also exact for band-limited data
    let back9 = to_coeffs(&to_grid(&u, 9).unwrap(), &lat).unwrap();
    assert!(max_diff(&back9, &u) <= 1e-13 * u.max_abs_coeff());
}

#[test]
fn cosine_analysis_gives_half_weights() {
    let lat = golden(3);
    let j = [1i64, 2];
    let m = 8;
    let values = (0..m * m)
        .map(|p| {
            let x = [(p / m) as f64, (p % m) as f64].map(|v| v * std::f64::consts::TAU / m as f64);
            C::new((j[0] as f64 * x[0] + j[1] as f64 * x[1]).cos(), 0.0)
        })
        .collect();
    let u = to_coeffs(&Grid::new(m, 2, values).unwrap(), &lat).unwrap();
    assert!((u.coeff(&[1, 2]) - C::new(0.5, 0.0)).norm() < 1e-15);
    assert!((u.coeff(&[-1, -2]) - C::new(0.5, 0.0)).norm() < 1e-15);
    assert!(u.l2_norm() - (0.5f64).sqrt() < 1e-15);
}

#[test]
fn aliasing_witness_padded_vs_unpadded() {
    let lat = validate_lattice(&[1.0f64], 4, 1e-12).unwrap();
    let a = QpFunction::mode(&lat, &[3], C::new(1.0, 0.0));
    let b = QpFunction::mode(&lat, &[3], C::new(1.0, 0.0));
    // unpadded: product of the 9-point samples aliases mode 6 onto -3
    let ga = to_grid(&a, 9).unwrap();
    let gb = to_grid(&b, 9).unwrap();
    let prod: Vec<C> = ga
        .values()
        .iter()
        .zip(gb.values())
        .map(|(x, y)| x * y)
        .collect();
    let aliased = to_coeffs(&Grid::new(9, 1, prod).unwrap(), &lat).unwrap();
    assert!((aliased.coeff(&[-3]) - C::new(1.0, 0.0)).norm() < 1e-13);
    // padded product: the true mode 6 lies outside the box, nothing survives
    let padded = a.mul(&b);
    assert!(padded.max_abs_coeff() < 1e-14);
    assert!(max_diff(&padded, &direct_convolution(&a, &b)) < 1e-14);
    // in-box combination survives as a single mode
    let c = QpFunction::mode(&lat, &[-1], C::new(1.0, 0.0));
    let p = a.mul(&c);
    assert!((p.coeff(&[2]) - C::new(1.0, 0.0)).norm() < 1e-14);
    assert!((&p - &QpFunction::mode(&lat, &[2], C::new(1.0, 0.0))).max_abs_coeff() < 1e-14);
}

#[test]
fn derivative_symbols() {
    let lat = golden(3);
    let j = [1i64, -2];
    let xi = 1.0 - 2.0 * (1.0 + 5f64.sqrt()) / 2.0;
    let u = QpFunction::mode(&lat, &j, C::new(1.0, 0.0));
    let du = u.d_alpha();
    assert!((du.coeff(&j) - C::new(0.0, xi)).norm() < 1e-15);
    assert_eq!(
        QpFunction::constant(&lat, C::new(3.0, 1.0))
            .d_alpha()
            .max_abs_coeff(),
        0.0
    );

    let lat1 = validate_lattice(&[1.0f64], 4, 1e-12).unwrap();
    let v = QpFunction::mode(&lat1, &[3], C::new(1.0, 0.0));
    let w = v.derivative(DerivativeWeight::JapanesePow(0.5));
    assert!((w.coeff(&[3]).re - 10f64.powf(0.25)).abs() < 1e-15);
    let a = v.derivative(DerivativeWeight::AbsPow(0.5));
    assert!((a.coeff(&[3]).re - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn hilbert_examples() {
    let lat = golden(3);
    let j = [1i64, 1];
    let u = QpFunction::mode(&lat, &j, C::new(1.0, 0.0));
    assert!((u.hilbert().coeff(&j) - C::new(0.0, -1.0)).norm() < 1e-16);
    assert_eq!(
        QpFunction::constant(&lat, C::new(1.0, 0.0))
            .hilbert()
            .max_abs_coeff(),
        0.0
    );
    // cos -> sin
    let cos = &QpFunction::mode(&lat, &j, C::new(0.5, 0.0))
        + &QpFunction::mode(&lat, &[-1, -1], C::new(0.5, 0.0));
    let sin = &QpFunction::mode(&lat, &j, C::new(0.0, -0.5))
        + &QpFunction::mode(&lat, &[-1, -1], C::new(0.0, 0.5));
    assert!(max_diff(&cos.hilbert(), &sin) < 1e-16);
}

#[test]
fn projector_examples() {
    let lat = golden(3);
    let neg = QpFunction::mode(&lat, &[-1, 0], C::new(0.3, 0.4));
    assert_eq!(neg.project(Projector::P), neg);
    let c = QpFunction::constant(&lat, C::new(2.0, 1.0));
    assert_eq!(c.project(Projector::P), c.scale_re(0.5));
    let mut r = rng(3);
    let u = random_function(&lat, &mut r);
    let sum = &(&u.project(Projector::PSharp) + &u.project(Projector::PBarSharp))
        + &u.project(Projector::Mean);
    assert!(max_diff(&sum, &u) < 1e-15);
    assert!(
        u.project(Projector::PBarR)
            .project(Projector::PI)
            .max_abs_coeff()
            <= 1e-14
    );
    assert!(
        u.project(Projector::PBarI)
            .project(Projector::PR)
            .max_abs_coeff()
            <= 1e-14
    );
    // P^i = -i P^r i
    let lhs = u.project(Projector::PI);
    let rhs = u.times_i().project(Projector::PR).times_i().scale_re(-1.0);
    assert!(max_diff(&lhs, &rhs) < 1e-15);
}

#[test]
fn projector_algebra_and_hilbert_square() {
    let mut r = rng(5);
    for n in [2usize, 5] {
        let lat = golden(n);
        let u = random_function(&lat, &mut r);
        let hh = u.hilbert().hilbert();
        let expect = -&(&u - &u.project(Projector::Mean));
        assert!(max_diff(&hh, &expect) < 1e-14);
        let s = u.project(Projector::PSharp);
        assert!(max_diff(&s.project(Projector::PSharp), &s) == 0.0);
        assert_eq!(s.project(Projector::PBarSharp).max_abs_coeff(), 0.0);
        assert_eq!(
            u.project(Projector::PBarSharp)
                .project(Projector::PSharp)
                .max_abs_coeff(),
            0.0
        );
        assert_eq!(s.project(Projector::Mean).max_abs_coeff(), 0.0);
        let p = &u.project(Projector::P) + &u.project(Projector::PBar);
        assert!(max_diff(&p, &u) < 1e-15);
        // P = (I - iH)/2
        let alt = (&u - &u.hilbert().times_i()).scale_re(0.5);
        assert!(max_diff(&alt, &u.project(Projector::P)) < 1e-15);
    }
}

#[test]
fn hilbert_preserves_reality_and_real_part_of_p() {
    let lat = golden(4);
    let mut r = rng(8);
    let u = random_real_function(&lat, &mut r);
    assert!(u.is_real(1e-15));
    assert!(u.hilbert().is_real(1e-15));
    let twice_re = u.project(Projector::P).re().scale_re(2.0);
    assert!(max_diff(&twice_re, &u) < 1e-14);
}

#[test]
fn multiply_matches_direct_convolution() {
    let mut r = rng(21);
    for (dim, n) in [(1usize, 4usize), (2, 3), (2, 6)] {
        let k = &golden_frequencies::<f64>()[..dim];
        let lat = validate_lattice(k, n, 1e-12).unwrap();
        let u = random_real_function(&lat, &mut r);
        let v = random_real_function(&lat, &mut r);
        let prod = u.mul(&v);
        let direct = direct_convolution(&u, &v);
        assert!(max_diff(&prod, &direct) <= 1e-13 * direct.max_abs_coeff());
        assert!(prod.is_real(1e-13));
        let one = QpFunction::constant(&lat, C::new(1.0, 0.0));
        assert!(max_diff(&u.mul(&one), &u) <= 1e-14);
    }
}

#[test]
fn reciprocal_examples() {
    let lat = golden(6);
    let z = QpFunction::zeros(&lat);
    let one = QpFunction::constant(&lat, C::new(1.0, 0.0));
    assert!(max_diff(&z.reciprocal_one_plus(1e-6).unwrap(), &one) < 1e-15);
    let c = C::new(0.3, -0.4);
    let rc = QpFunction::constant(&lat, c)
        .reciprocal_one_plus(1e-6)
        .unwrap();
    assert!((rc.mean() - 1.0 / (1.0 + c)).norm() < 1e-15);
    assert!(rc.project(qpww_core::Projector::PSharp).max_abs_coeff() < 1e-15);

    // Neumann series 1 - w + w^2 to O(eps^3)
    for eps in [1e-2, 1e-3] {
        let w = QpFunction::mode(&lat, &[-1, 0], C::new(eps, 0.0));
        let rec = w.reciprocal_one_plus(1e-6).unwrap();
        let neumann = &(&one - &w) + &direct_convolution(&w, &w);
        assert!(max_diff(&rec, &neumann) < 2.0 * eps.powi(3));
    }
    let bad = QpFunction::constant(&lat, C::new(-1.0, 0.0));
    assert!(matches!(
        bad.reciprocal_one_plus(1e-6),
        Err(qpww_core::WaveError::SurfaceDegenerate { .. })
    ));
}

#[test]
fn lp_partition_and_constant() {
    let lat = golden(5);
    let mut r = rng(4);
    let u = random_function(&lat, &mut r);
    let total = lp_bands(&u)
        .iter()
        .fold(QpFunction::zeros(&lat), |acc, b| &acc + b);
    assert!(max_diff(&total, &u) < 1e-13);
    let c = QpFunction::constant(&lat, C::new(1.5, 0.0));
    assert_eq!(lp_lowpass(&c, 0), c);
}

#[test]
fn norm_examples_and_h1_oracle() {
    let lat = golden(4);
    assert_eq!(QpFunction::zeros(&lat).norm(1.0, 0.5), 0.0);
    let m = QpFunction::mode(&lat, &[2, -3], C::new(1.0, 0.0));
    assert_eq!(m.norm(0.0, 0.0), 1.0);
    let mut r = rng(9);
    let u = random_function(&lat, &mut r);
    let mut h1 = u.l2_norm().powi(2);
    for axis in 0..2 {
        h1 += u.d_coord(axis).l2_norm().powi(2);
    }
    assert!((u.norm(1.0, 0.0).powi(2) - h1).abs() <= 1e-12 * h1);
    // H^{s,theta} weight for a single mode
    let xi = m.lattice().xi()[m.lattice().index_of(&[2, -3]).unwrap()];
    let expect = (14.0f64).powf(1.5) * (1.0 + xi * xi).powf(0.5);
    assert!((m.norm2(1.5, 0.5) - expect).abs() < 1e-12 * expect);
}

#[test]
fn norm_equivalence_with_dyadic_sum() {
    let lat = golden(8);
    let mut r = rng(12);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for _ in 0..40 {
        let u = random_function(&lat, &mut r);
        for s in [0.0, 0.5, 1.0] {
            let ratio = dyadic_norm2(&u, s) / u.norm2(0.0, s);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    // constants depend only on the cutoff: bands overlap at most pairwise
    assert!(lo > 0.05 && hi < 20.0, "lo={lo} hi={hi}");
}

#[test]
fn paraproduct_examples() {
    let lat = validate_lattice(&[1.0f64], 300, 1e-12).unwrap();
    let f = QpFunction::mode(&lat, &[1], C::new(1.0, 0.0));
    let g = QpFunction::mode(&lat, &[-256], C::new(1.0, 0.0));
    let pp = paraproduct(&f, &g);
    let prod = f.mul(&g);
    assert!(max_diff(&pp.low_high, &prod) < 1e-13);
    assert!(pp.high_low.max_abs_coeff() < 1e-13);
    assert!(pp.diagonal.max_abs_coeff() < 1e-13);

    let small = golden(6);
    let mut r = rng(17);
    let c = QpFunction::constant(&small, C::new(2.0, 0.0));
    let g = random_function(&small, &mut r);
    let pp = paraproduct(&c, &g);
    assert!(max_diff(&pp.sum(), &c.mul(&g)) < 1e-12);
    // a constant has no high part to pair with low parts of g
    assert!(pp.high_low.max_abs_coeff() < 1e-14);
}

#[test]
fn paraproduct_sums_to_product_random() {
    let lat = golden(10);
    let mut r = rng(23);
    for _ in 0..3 {
        let f = random_function(&lat, &mut r);
        let g = random_function(&lat, &mut r);
        let pp = paraproduct(&f, &g);
        let prod = f.mul(&g);
        assert!(max_diff(&pp.sum(), &prod) <= 1e-12 * prod.max_abs_coeff());
    }
}

#[test]
fn f32_instantiation_works() {
    let lat = validate_lattice(&golden_frequencies::<f32>(), 3, 1e-5).unwrap();
    let u = QpFunction::mode(&lat, &[1, -1], num_complex::Complex::new(1.0f32, 0.0));
    let sq = u.mul(&u);
    assert!((sq.coeff(&[2, -2]).re - 1.0).abs() < 1e-5);
    assert!((u.hilbert().hilbert().coeff(&[1, -1]).re + 1.0).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grid_round_trip(seed in any::<u64>(), n in 1usize..5, m_extra in 0usize..4) {
        let lat = golden(n);
        let mut r = rng(seed);
        let u = random_function(&lat, &mut r);
        let back = to_coeffs(&to_grid(&u, lat.side() + m_extra).unwrap(), &lat).unwrap();
        prop_assert!(max_diff(&back, &u) <= 1e-13 * u.max_abs_coeff().max(1.0));
    }

    #[test]
    fn norm_monotone(seed in any::<u64>(), s in 0.0f64..3.0, ds in 0.0f64..1.0, th in 0.0f64..1.0) {
        let lat = golden(3);
        let mut r = rng(seed);
        let u = random_function(&lat, &mut r);
        prop_assert!(u.norm(s + ds, th) >= u.norm(s, th) * (1.0 - 1e-14));
        prop_assert!(u.norm(s, th + ds) >= u.norm(s, th) * (1.0 - 1e-14));
    }
}
