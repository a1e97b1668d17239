//! Truncated frequency lattice `|j_i| <= N` in `Z^d` together with the
//! directional frequency map `j -> <j, k>`.

use crate::error::{Result, WaveError};
use crate::scalar::Real;
use rustfft::{Fft, FftPlanner};
use std::fmt;
use std::sync::Arc;

/// Default base wave numbers `(1, golden ratio)`.
pub fn golden_frequencies<T: Real>() -> Vec<T> {
    vec![T::one(), (T::one() + T::lit(5.0).sqrt()) / T::lit(2.0)]
}

/// Cubic truncation box of the Fourier lattice with cached transforms.
///
/// Coefficients are stored row-major with coordinate `j_i + N` along axis
/// `i`; with this layout the mirror `-j` of flat index `p` is `len - 1 - p`.
pub struct Lattice<T: Real> {
    dim: usize,
    k: Vec<T>,
    radius: usize,
    side: usize,
    len: usize,
    xi: Vec<T>,
    sign: Vec<i8>,
    jnorm2: Vec<T>,
    delta_min: T,
    padded: usize,
    padded_index: Vec<usize>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Lattice<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("dim", &self.dim)
            .field("k", &self.k)
            .field("radius", &self.radius)
            .field("delta_min", &self.delta_min)
            .field("padded", &self.padded)
            .finish()
    }
}

impl<T: Real> PartialEq for Lattice<T> {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius && self.k == other.k
    }
}

/// Smallest 2-3-5 smooth integer `>= n`.
pub(crate) fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Builds a lattice after checking numerical rational independence of `k`
/// over the whole box: every nonzero `j` must satisfy `|<j,k>| > tol`.
pub fn validate_lattice<T: Real>(k: &[T], radius: usize, tol: T) -> Result<Arc<Lattice<T>>> {
    if k.is_empty() {
        return Err(WaveError::InvalidArgument(
            "need at least one base frequency".into(),
        ));
    }
    if radius == 0 {
        return Err(WaveError::InvalidArgument(
            "truncation radius must be >= 1".into(),
        ));
    }
    if let Some(i) = k.iter().position(|ki| *ki == T::zero() || !ki.is_finite()) {
        return Err(WaveError::InvalidArgument(format!(
            "base frequency k[{i}] must be nonzero and finite"
        )));
    }
    let dim = k.len();
    let side = 2 * radius + 1;
    let len = side.pow(dim as u32);
    let n = radius as i64;

    let mut xi = vec![T::zero(); len];
    let mut sign = vec![0i8; len];
    let mut jnorm2 = vec![T::zero(); len];
    let mut delta_min = T::infinity();
    let center = (len - 1) / 2;
    let mut j = vec![0i64; dim];
    // Scan the half lattice p > center (first nonzero coordinate positive
    // in row-major order) and mirror, so xi(-j) = -xi(j) holds exactly.
    for p in (center + 1)..len {
        unflatten(p, side, n, &mut j);
        let v = j
            .iter()
            .zip(k)
            .fold(T::zero(), |acc, (ji, ki)| acc + T::lit(*ji as f64) * *ki);
        if v.abs() <= tol {
            return Err(WaveError::RationalDependence {
                index: j.clone(),
                value: v.as_f64(),
            });
        }
        delta_min = delta_min.min(v.abs());
        let m = len - 1 - p;
        xi[p] = v;
        xi[m] = -v;
        let s = if v > T::zero() { 1 } else { -1 };
        sign[p] = s;
        sign[m] = -s;
        let n2 = T::lit(j.iter().map(|x| x * x).sum::<i64>() as f64);
        jnorm2[p] = n2;
        jnorm2[m] = n2;
    }

    let padded = smooth_size(2 * side);
    let mut padded_index = vec![0usize; len];
    for (p, slot) in padded_index.iter_mut().enumerate() {
        unflatten(p, side, n, &mut j);
        *slot = grid_offset(&j, padded);
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(padded);
    let inv = planner.plan_fft_inverse(padded);

    Ok(Arc::new(Lattice {
        dim,
        k: k.to_vec(),
        radius,
        side,
        len,
        xi,
        sign,
        jnorm2,
        delta_min,
        padded,
        padded_index,
        fwd,
        inv,
    }))
}

#[inline]
fn unflatten(mut p: usize, side: usize, n: i64, out: &mut [i64]) {
    for slot in out.iter_mut().rev() {
        *slot = (p % side) as i64 - n;
        p /= side;
    }
}

/// Row-major offset of mode `j` on an `m^d` grid with wrap-around.
pub(crate) fn grid_offset(j: &[i64], m: usize) -> usize {
    j.iter()
        .fold(0usize, |acc, ji| acc * m + ji.rem_euclid(m as i64) as usize)
}

impl<T: Real> Lattice<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frequencies(&self) -> &[T] {
        &self.k
    }

    /// Truncation radius `N`.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of modes per dimension, `2N + 1`.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn delta_min(&self) -> T {
        self.delta_min
    }

    /// Directional frequency `<j,k>` for every flat index.
    pub fn xi(&self) -> &[T] {
        &self.xi
    }

    /// `sgn <j,k>` in `{-1, 0, 1}`; only the zero mode has sign 0.
    pub fn sign(&self) -> &[i8] {
        &self.sign
    }

    /// `|j|^2` for every flat index.
    pub fn jnorm2(&self) -> &[T] {
        &self.jnorm2
    }

    pub fn max_abs_xi(&self) -> T {
        self.xi.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn zero_index(&self) -> usize {
        (self.len - 1) / 2
    }

    #[inline]
    pub fn mirror(&self, p: usize) -> usize {
        self.len - 1 - p
    }

    /// Flat index of `j`, or `None` outside the box.
    pub fn index_of(&self, j: &[i64]) -> Option<usize> {
        if j.len() != self.dim {
            return None;
        }
        let n = self.radius as i64;
        let mut p = 0usize;
        for &ji in j {
            if ji.abs() > n {
                return None;
            }
            p = p * self.side + (ji + n) as usize;
        }
        Some(p)
    }

    pub fn multi_index(&self, p: usize) -> Vec<i64> {
        let mut j = vec![0i64; self.dim];
        unflatten(p, self.side, self.radius as i64, &mut j);
        j
    }

    /// Side length of the grid used for dealiased products.
    pub fn padded(&self) -> usize {
        self.padded
    }

    pub(crate) fn padded_index(&self) -> &[usize] {
        &self.padded_index
    }

    pub(crate) fn padded_plans(&self) -> (&Arc<dyn Fft<T>>, &Arc<dyn Fft<T>>) {
        (&self.fwd, &self.inv)
    }

    /// Same base frequencies at another truncation radius.
    pub fn with_radius(&self, radius: usize) -> Result<Arc<Lattice<T>>> {
        validate_lattice(&self.k, radius, T::epsilon() * T::lit(64.0))
    }

    /// Largest dyadic level needed so that the low-pass at that level is the
    /// identity on the box.
    pub fn max_level(&self) -> usize {
        let m = self.max_abs_xi().as_f64().max(1.0);
        (m.log2().ceil() as usize) + 1
    }
}
