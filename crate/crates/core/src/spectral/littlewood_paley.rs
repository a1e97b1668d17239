//! Dyadic decomposition in the directional frequency `xi = <j,k>` and the
//! Bony paraproduct built on it.

use super::function::QpFunction;
use crate::scalar::Real;

/// Frequency gap separating low-high interactions from the diagonal part.
pub const PARAPRODUCT_GAP: usize = 4;

fn bump_tail<T: Real>(x: T) -> T {
    if x > T::zero() {
        (-T::one() / x).exp()
    } else {
        T::zero()
    }
}

/// Smooth even cutoff: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`.
pub fn chi<T: Real>(xi: T) -> T {
    let x = xi.abs();
    if x <= T::one() {
        return T::one();
    }
    let two = T::lit(2.0);
    if x >= two {
        return T::zero();
    }
    let a = bump_tail(two - x);
    let b = bump_tail(x - T::one());
    a / (a + b)
}

/// Low-pass symbol `chi(2^{-l} xi)`; identically zero for negative `l`.
pub fn lowpass_symbol<T: Real>(level: i64, xi: T) -> T {
    if level < 0 {
        return T::zero();
    }
    chi(xi / T::lit(2f64.powi(level as i32)))
}

/// Band symbol: `chi(xi)` at level 0 and `chi(2^{-l} xi) - chi(2^{1-l} xi)`
/// for `l >= 1`. Summed over all levels this is identically one.
pub fn band_symbol<T: Real>(level: usize, xi: T) -> T {
    let l = level as i64;
    lowpass_symbol(l, xi) - lowpass_symbol(l - 1, xi)
}

fn apply_symbol<T: Real>(u: &QpFunction<T>, symbol: impl Fn(T) -> T) -> QpFunction<T> {
    let xi = u.lattice().xi();
    let coeffs = u
        .coeffs()
        .iter()
        .zip(xi)
        .map(|(c, x)| *c * symbol(*x))
        .collect();
    QpFunction::from_coeffs(u.lattice().clone(), coeffs)
}

/// Band `l` of the decomposition (`P_l^alpha u`).
pub fn lp_project<T: Real>(u: &QpFunction<T>, level: usize) -> QpFunction<T> {
    apply_symbol(u, |x| band_symbol(level, x))
}

/// `P_{<= l}^alpha u`; zero for negative `l`.
pub fn lp_lowpass<T: Real>(u: &QpFunction<T>, level: i64) -> QpFunction<T> {
    apply_symbol(u, |x| lowpass_symbol(level, x))
}

/// All bands `0..=max_level`; they sum to `u`.
pub fn lp_bands<T: Real>(u: &QpFunction<T>) -> Vec<QpFunction<T>> {
    (0..=u.lattice().max_level())
        .map(|l| lp_project(u, l))
        .collect()
}

/// `sum_l 2^{2 l s} ||P_l u||^2`, the dyadic form of `||u||^2_{H^{0,s}}`.
pub fn dyadic_norm2<T: Real>(u: &QpFunction<T>, s: T) -> T {
    lp_bands(u)
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (l, b)| {
            let w = T::lit(2.0).powf(T::lit(2.0) * T::count(l) * s);
            acc + w * b.norm2(T::zero(), T::zero())
        })
}

/// `fg = T_f g + T_g f + Pi(f, g)`.
#[derive(Clone, Debug)]
pub struct Paraproduct<T: Real> {
    /// `T_f g`: low frequencies of `f` against high frequencies of `g`.
    pub low_high: QpFunction<T>,
    /// `T_g f`.
    pub high_low: QpFunction<T>,
    /// Interactions with comparable frequencies.
    pub diagonal: QpFunction<T>,
}

impl<T: Real> Paraproduct<T> {
    pub fn sum(&self) -> QpFunction<T> {
        &(&self.low_high + &self.high_low) + &self.diagonal
    }
}

/// `T_f g = sum_k P_{<= k-5} f * P_k g`.
pub fn para_low_high<T: Real>(f: &QpFunction<T>, g: &QpFunction<T>) -> QpFunction<T> {
    let gap = PARAPRODUCT_GAP as i64;
    let mut out = QpFunction::zeros(g.lattice());
    for k in (gap as usize + 1)..=g.lattice().max_level() {
        let fl = lp_lowpass(f, k as i64 - gap - 1);
        let gk = lp_project(g, k);
        if fl.max_abs_coeff() == T::zero() || gk.max_abs_coeff() == T::zero() {
            continue;
        }
        out += &fl.mul(&gk);
    }
    out
}

/// Precomputed low-pass pieces of a paraproduct coefficient, for repeated
/// application of `T_f` to many functions.
#[derive(Clone, Debug)]
pub struct ParaCoefficient<T: Real> {
    lows: Vec<(usize, QpFunction<T>)>,
}

impl<T: Real> ParaCoefficient<T> {
    pub fn new(f: &QpFunction<T>) -> Self {
        let gap = PARAPRODUCT_GAP as i64;
        let lows = ((gap as usize + 1)..=f.lattice().max_level())
            .map(|k| (k, lp_lowpass(f, k as i64 - gap - 1)))
            .collect();
        Self { lows }
    }

    /// `T_f g`.
    pub fn apply(&self, g: &QpFunction<T>) -> QpFunction<T> {
        let mut out = QpFunction::zeros(g.lattice());
        for (k, fl) in &self.lows {
            let gk = lp_project(g, *k);
            if gk.max_abs_coeff() == T::zero() {
                continue;
            }
            out += &fl.mul(&gk);
        }
        out
    }
}

/// Paraproduct decomposition with the diagonal part computed directly as
/// `sum_{|k-l| <= 4} f_k g_l`.
pub fn paraproduct<T: Real>(f: &QpFunction<T>, g: &QpFunction<T>) -> Paraproduct<T> {
    let gap = PARAPRODUCT_GAP as i64;
    let levels = f.lattice().max_level();
    let mut diagonal = QpFunction::zeros(f.lattice());
    for k in 0..=levels {
        let fk = lp_project(f, k);
        if fk.max_abs_coeff() == T::zero() {
            continue;
        }
        let near = &lp_lowpass(g, k as i64 + gap) - &lp_lowpass(g, k as i64 - gap - 1);
        diagonal += &fk.mul(&near);
    }
    Paraproduct {
        low_high: para_low_high(f, g),
        high_low: para_low_high(g, f),
        diagonal,
    }
}
