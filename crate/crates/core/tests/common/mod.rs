#![allow(dead_code)]

use num_complex::Complex;
use qpww_core::spectral::{Lattice, QpFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub type C = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_function(lat: &Arc<Lattice<f64>>, rng: &mut impl Rng) -> QpFunction<f64> {
    let coeffs = (0..lat.len())
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    QpFunction::from_coeffs(lat.clone(), coeffs)
}

pub fn random_real_function(lat: &Arc<Lattice<f64>>, rng: &mut impl Rng) -> QpFunction<f64> {
    random_function(lat, rng).re()
}

/// Direct evaluation of the Fourier series at a torus point.
pub fn eval_series(u: &QpFunction<f64>, x: &[f64]) -> C {
    let lat = u.lattice();
    let mut acc = C::new(0.0, 0.0);
    for (p, c) in u.coeffs().iter().enumerate() {
        let j = lat.multi_index(p);
        let phase: f64 = j.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
        acc += c * C::from_polar(1.0, phase);
    }
    acc
}

/// Brute-force lattice convolution truncated to the box.
pub fn direct_convolution(u: &QpFunction<f64>, v: &QpFunction<f64>) -> QpFunction<f64> {
    let lat = u.lattice();
    let mut out = vec![C::new(0.0, 0.0); lat.len()];
    let idx: Vec<Vec<i64>> = (0..lat.len()).map(|p| lat.multi_index(p)).collect();
    for (p1, a) in u.coeffs().iter().enumerate() {
        if *a == C::new(0.0, 0.0) {
            continue;
        }
        for (p2, b) in v.coeffs().iter().enumerate() {
            let j: Vec<i64> = idx[p1].iter().zip(&idx[p2]).map(|(x, y)| x + y).collect();
            if let Some(q) = lat.index_of(&j) {
                out[q] += a * b;
            }
        }
    }
    QpFunction::from_coeffs(lat.clone(), out)
}

pub fn max_diff(a: &QpFunction<f64>, b: &QpFunction<f64>) -> f64 {
    (a - b).max_abs_coeff()
}
