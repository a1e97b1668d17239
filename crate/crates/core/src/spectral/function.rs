//! Truncated Fourier coefficient arrays and the operators that act on
//! them diagonally.

use super::grid::Lifted;
use super::lattice::Lattice;
use crate::error::{Result, WaveError};
use crate::scalar::{ci, cplx, czero, Cplx, Real};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

/// Fourier multiplier applied by [`QpFunction::derivative`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeWeight<T> {
    /// `d_alpha`, symbol `i xi`.
    DAlpha,
    /// `|D_alpha|^theta`.
    AbsPow(T),
    /// `<D_alpha>^theta = (1 + xi^2)^(theta/2)`.
    JapanesePow(T),
}

/// Projections built from the Hilbert transform and the mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Projector {
    /// Mean value `P0`.
    Mean,
    /// `(I - iH)/2`: negative frequencies plus half the mean.
    P,
    /// `(I + iH)/2`.
    PBar,
    /// `P - P0/2`: strictly negative frequencies.
    PSharp,
    /// `PBar - P0/2`: strictly positive frequencies.
    PBarSharp,
    /// `P# + Re P0`.
    PR,
    /// `P# + i Im P0`.
    PI,
    /// `PBar# + Re P0`.
    PBarR,
    /// `PBar# + i Im P0`.
    PBarI,
}

/// A torus function represented by its coefficients on a truncation box.
#[derive(Clone, Debug)]
pub struct QpFunction<T: Real> {
    lattice: Arc<Lattice<T>>,
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> PartialEq for QpFunction<T> {
    fn eq(&self, other: &Self) -> bool {
        *self.lattice == *other.lattice && self.coeffs == other.coeffs
    }
}

impl<T: Real> QpFunction<T> {
    pub fn zeros(lattice: &Arc<Lattice<T>>) -> Self {
        Self {
            lattice: lattice.clone(),
            coeffs: vec![czero(); lattice.len()],
        }
    }

    pub fn constant(lattice: &Arc<Lattice<T>>, c: Cplx<T>) -> Self {
        let mut u = Self::zeros(lattice);
        u.coeffs[lattice.zero_index()] = c;
        u
    }

    /// `amp * e^{i<j, alpha>}`; panics if `j` lies outside the box.
    pub fn mode(lattice: &Arc<Lattice<T>>, j: &[i64], amp: Cplx<T>) -> Self {
        let mut u = Self::zeros(lattice);
        let p = lattice.index_of(j).expect("mode inside truncation box");
        u.coeffs[p] = amp;
        u
    }

    pub fn from_coeffs(lattice: Arc<Lattice<T>>, coeffs: Vec<Cplx<T>>) -> Self {
        assert_eq!(coeffs.len(), lattice.len(), "coefficient count");
        Self { lattice, coeffs }
    }

    pub fn lattice(&self) -> &Arc<Lattice<T>> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.coeffs
    }

    pub fn coeff(&self, j: &[i64]) -> Cplx<T> {
        self.lattice
            .index_of(j)
            .map(|p| self.coeffs[p])
            .unwrap_or_else(czero)
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) || *self.lattice == *other.lattice
    }

    fn map_modes(&self, f: impl Fn(usize, Cplx<T>) -> Cplx<T>) -> Self {
        Self {
            lattice: self.lattice.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| f(p, *c))
                .collect(),
        }
    }

    pub fn scale(&self, a: Cplx<T>) -> Self {
        self.map_modes(|_, c| c * a)
    }

    pub fn scale_re(&self, a: T) -> Self {
        self.map_modes(|_, c| c * a)
    }

    pub fn times_i(&self) -> Self {
        self.map_modes(|_, c| c * ci::<T>())
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: T, x: &Self) {
        debug_assert!(self.same_lattice(x));
        for (c, xc) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c = *c + *xc * a;
        }
    }

    pub fn add_constant(&self, c: Cplx<T>) -> Self {
        let mut out = self.clone();
        out.coeffs[self.lattice.zero_index()] = out.coeffs[self.lattice.zero_index()] + c;
        out
    }

    /// One plus this function.
    pub fn one_plus(&self) -> Self {
        self.add_constant(cplx(T::one(), T::zero()))
    }

    /// One minus this function.
    pub fn one_minus(&self) -> Self {
        (-self).add_constant(cplx(T::one(), T::zero()))
    }

    /// Complex conjugate: coefficients `conj(u_{-j})`.
    pub fn conj(&self) -> Self {
        let lat = &self.lattice;
        self.map_modes(|p, _| self.coeffs[lat.mirror(p)].conj())
    }

    pub fn re(&self) -> Self {
        (self + &self.conj()).scale_re(T::lit(0.5))
    }

    pub fn im(&self) -> Self {
        (self - &self.conj()).scale(cplx(T::zero(), -T::lit(0.5)))
    }

    pub fn mean(&self) -> Cplx<T> {
        self.coeffs[self.lattice.zero_index()]
    }

    pub fn derivative(&self, weight: DerivativeWeight<T>) -> Self {
        let xi = self.lattice.xi();
        match weight {
            DerivativeWeight::DAlpha => self.map_modes(|p, c| c * cplx(T::zero(), xi[p])),
            DerivativeWeight::AbsPow(theta) => self.map_modes(|p, c| {
                if theta == T::zero() {
                    c
                } else {
                    c * xi[p].abs().powf(theta)
                }
            }),
            DerivativeWeight::JapanesePow(theta) => {
                self.map_modes(|p, c| c * (T::one() + xi[p] * xi[p]).powf(theta * T::lit(0.5)))
            }
        }
    }

    /// `d_alpha = k_1 d_1 + ... + k_d d_d`.
    pub fn d_alpha(&self) -> Self {
        self.derivative(DerivativeWeight::DAlpha)
    }

    /// Torus coordinate derivative `d_i`, symbol `i j_i`.
    pub fn d_coord(&self, axis: usize) -> Self {
        let lat = &self.lattice;
        self.map_modes(|p, c| {
            let ji = lat.multi_index(p)[axis];
            c * cplx(T::zero(), T::lit(ji as f64))
        })
    }

    /// Quasiperiodic Hilbert transform, symbol `-i sgn <j,k>`.
    pub fn hilbert(&self) -> Self {
        let sign = self.lattice.sign();
        self.map_modes(|p, c| c * cplx(T::zero(), -T::lit(sign[p] as f64)))
    }

    pub fn project(&self, which: Projector) -> Self {
        let sign = self.lattice.sign();
        let half = T::lit(0.5);
        let zero = czero::<T>();
        self.map_modes(|p, c| match (which, sign[p]) {
            (Projector::Mean, 0) => c,
            (Projector::Mean, _) => zero,
            (Projector::P, -1) | (Projector::PBar, 1) => c,
            (Projector::P, 0) | (Projector::PBar, 0) => c * half,
            (Projector::P, _) | (Projector::PBar, _) => zero,
            (Projector::PSharp | Projector::PR | Projector::PI, -1) => c,
            (Projector::PBarSharp | Projector::PBarR | Projector::PBarI, 1) => c,
            (Projector::PR | Projector::PBarR, 0) => cplx(c.re, T::zero()),
            (Projector::PI | Projector::PBarI, 0) => cplx(T::zero(), c.im),
            _ => zero,
        })
    }

    /// `(sum (1+|j|^2)^s (1+xi^2)^theta |u_j|^2)^(1/2)`.
    pub fn norm(&self, s: T, theta: T) -> T {
        self.norm2(s, theta).sqrt()
    }

    pub fn norm2(&self, s: T, theta: T) -> T {
        let xi = self.lattice.xi();
        let jn = self.lattice.jnorm2();
        let mut acc = T::zero();
        for (p, c) in self.coeffs.iter().enumerate() {
            let a = c.norm_sqr();
            if a == T::zero() {
                continue;
            }
            let mut w = T::one();
            if s != T::zero() {
                w = w * (T::one() + jn[p]).powf(s);
            }
            if theta != T::zero() {
                w = w * (T::one() + xi[p] * xi[p]).powf(theta);
            }
            acc = acc + w * a;
        }
        acc
    }

    pub fn l2_norm(&self) -> T {
        self.norm(T::zero(), T::zero())
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest deviation from `u_{-j} = conj(u_j)`.
    pub fn reality_defect(&self) -> T {
        let lat = &self.lattice;
        self.coeffs.iter().enumerate().fold(T::zero(), |m, (p, c)| {
            m.max((*c - self.coeffs[lat.mirror(p)].conj()).norm())
        })
    }

    /// Largest coefficient on strictly positive frequencies.
    pub fn antiholomorphic_defect(&self) -> T {
        let sign = self.lattice.sign();
        self.coeffs
            .iter()
            .zip(sign)
            .filter(|(_, s)| **s > 0)
            .fold(T::zero(), |m, (c, _)| m.max(c.norm()))
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.reality_defect() <= tol
    }

    pub fn is_holomorphic(&self, tol: T) -> bool {
        self.antiholomorphic_defect() <= tol
    }

    pub fn lift(&self) -> Lifted<T> {
        Lifted::of(self)
    }

    /// Dealiased product on the padded grid, truncated to the box.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(self.same_lattice(other));
        self.lift().mul(&other.lift()).analyze()
    }

    /// Pointwise `1/(1+w)` on the padded grid.
    pub fn reciprocal_one_plus(&self, eps_chord: T) -> Result<Self> {
        let g = self.lift();
        let one = cplx(T::one(), T::zero());
        let min_chord = g
            .values()
            .iter()
            .fold(T::infinity(), |m, v| m.min((one + v).norm()));
        if !(min_chord > eps_chord) {
            return Err(WaveError::SurfaceDegenerate {
                min_chord: min_chord.as_f64(),
                eps_chord: eps_chord.as_f64(),
            });
        }
        Ok(g.map(|v| one / (one + v)).analyze())
    }

    /// Sup norm sampled on the padded grid.
    pub fn linf(&self) -> T {
        self.lift().max_abs()
    }

    /// Minimum of the real part sampled on the padded grid.
    pub fn min_re_on_grid(&self) -> T {
        self.lift().min_re()
    }

    /// Zero-padded embedding into (or truncation onto) another box with
    /// the same base frequencies.
    pub fn embed(&self, target: &Arc<Lattice<T>>) -> Result<Self> {
        if target.frequencies() != self.lattice.frequencies() {
            return Err(WaveError::LatticeMismatch);
        }
        let mut out = Self::zeros(target);
        for (p, c) in self.coeffs.iter().enumerate() {
            if let Some(q) = target.index_of(&self.lattice.multi_index(p)) {
                out.coeffs[q] = *c;
            }
        }
        Ok(out)
    }

    /// Keeps modes with `|j|_inf <= band`.
    pub fn band_limit(&self, band: usize) -> Self {
        let lat = &self.lattice;
        let b = band as i64;
        self.map_modes(|p, c| {
            if lat.multi_index(p).iter().all(|x| x.abs() <= b) {
                c
            } else {
                czero()
            }
        })
    }
}

impl<T: Real> Add for &QpFunction<T> {
    type Output = QpFunction<T>;
    fn add(self, rhs: Self) -> QpFunction<T> {
        debug_assert!(self.same_lattice(rhs));
        self.map_modes(|p, c| c + rhs.coeffs[p])
    }
}

impl<T: Real> Sub for &QpFunction<T> {
    type Output = QpFunction<T>;
    fn sub(self, rhs: Self) -> QpFunction<T> {
        debug_assert!(self.same_lattice(rhs));
        self.map_modes(|p, c| c - rhs.coeffs[p])
    }
}

impl<T: Real> Neg for &QpFunction<T> {
    type Output = QpFunction<T>;
    fn neg(self) -> QpFunction<T> {
        self.map_modes(|_, c| -c)
    }
}

impl<T: Real> Mul for &QpFunction<T> {
    type Output = QpFunction<T>;
    fn mul(self, rhs: Self) -> QpFunction<T> {
        QpFunction::mul(self, rhs)
    }
}

impl<T: Real> AddAssign<&QpFunction<T>> for QpFunction<T> {
    fn add_assign(&mut self, rhs: &QpFunction<T>) {
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c = *c + *r;
        }
    }
}

impl<T: Real> SubAssign<&QpFunction<T>> for QpFunction<T> {
    fn sub_assign(&mut self, rhs: &QpFunction<T>) {
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *c = *c - *r;
        }
    }
}
