//! Collocation grids on the torus and the transforms between grid values
//! and box coefficients.

use super::function::QpFunction;
use super::lattice::{grid_offset, Lattice};
use crate::error::{Result, WaveError};
use crate::scalar::{czero, Cplx, Real};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Values of a torus function on the equispaced grid `2 pi n / m`,
/// row-major over `m^d` points.
#[derive(Clone, Debug)]
pub struct Grid<T: Real> {
    pub(crate) m: usize,
    pub(crate) dim: usize,
    pub(crate) values: Vec<Cplx<T>>,
}

impl<T: Real> Grid<T> {
    pub fn new(m: usize, dim: usize, values: Vec<Cplx<T>>) -> Result<Self> {
        if values.len() != m.pow(dim as u32) {
            return Err(WaveError::InvalidArgument(format!(
                "grid of {} values is not {m}^{dim}",
                values.len()
            )));
        }
        Ok(Self { m, dim, values })
    }

    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Cplx<T>] {
        &self.values
    }

    /// Torus coordinates of grid point `p`.
    pub fn point(&self, mut p: usize) -> Vec<T> {
        let h = T::TAU() / T::count(self.m);
        let mut x = vec![T::zero(); self.dim];
        for slot in x.iter_mut().rev() {
            *slot = T::count(p % self.m) * h;
            p /= self.m;
        }
        x
    }
}

/// In-place d-dimensional transform, one axis at a time.
pub(crate) fn fft_nd<T: Real>(data: &mut [Cplx<T>], m: usize, dim: usize, plan: &dyn Fft<T>) {
    let mut line = vec![czero::<T>(); m];
    let mut scratch = vec![czero::<T>(); plan.get_inplace_scratch_len()];
    let total = data.len();
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(m) {
                plan.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * m;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (q, v) in line.iter_mut().enumerate() {
                    *v = data[start + q * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (q, v) in line.iter().enumerate() {
                    data[start + q * stride] = *v;
                }
            }
        }
    }
}

fn plans<T: Real>(lattice: &Lattice<T>, m: usize) -> (Arc<dyn Fft<T>>, Arc<dyn Fft<T>>) {
    if m == lattice.padded() {
        let (f, i) = lattice.padded_plans();
        (f.clone(), i.clone())
    } else {
        let mut planner = FftPlanner::new();
        (planner.plan_fft_forward(m), planner.plan_fft_inverse(m))
    }
}

fn offsets<T: Real>(lattice: &Lattice<T>, m: usize) -> Vec<usize> {
    if m == lattice.padded() {
        lattice.padded_index().to_vec()
    } else {
        (0..lattice.len())
            .map(|p| grid_offset(&lattice.multi_index(p), m))
            .collect()
    }
}

/// Synthesises the Fourier series on an `m^d` grid, `m >= 2N + 1`.
pub fn to_grid<T: Real>(u: &QpFunction<T>, m: usize) -> Result<Grid<T>> {
    let lat = u.lattice();
    if m < lat.side() {
        return Err(WaveError::InvalidArgument(format!(
            "grid resolution {m} below 2N+1 = {}",
            lat.side()
        )));
    }
    let dim = lat.dim();
    let mut values = vec![czero::<T>(); m.pow(dim as u32)];
    for (c, &o) in u.coeffs().iter().zip(offsets(lat, m).iter()) {
        values[o] = *c;
    }
    let (_, inv) = plans(lat, m);
    fft_nd(&mut values, m, dim, inv.as_ref());
    Ok(Grid { m, dim, values })
}

/// Discrete Fourier analysis of grid values; modes outside the box are
/// discarded.
pub fn to_coeffs<T: Real>(g: &Grid<T>, lattice: &Arc<Lattice<T>>) -> Result<QpFunction<T>> {
    if g.dim != lattice.dim() {
        return Err(WaveError::LatticeMismatch);
    }
    if g.m < lattice.side() {
        return Err(WaveError::InvalidArgument(format!(
            "grid resolution {} below 2N+1 = {}",
            g.m,
            lattice.side()
        )));
    }
    let mut values = g.values.clone();
    let (fwd, _) = plans(lattice, g.m);
    fft_nd(&mut values, g.m, g.dim, fwd.as_ref());
    let scale = T::one() / T::count(values.len());
    let coeffs = offsets(lattice, g.m)
        .iter()
        .map(|&o| values[o] * scale)
        .collect();
    Ok(QpFunction::from_coeffs(lattice.clone(), coeffs))
}

/// Function values on the padded product grid of its lattice.
#[derive(Clone, Debug)]
pub struct Lifted<T: Real> {
    lattice: Arc<Lattice<T>>,
    values: Vec<Cplx<T>>,
}

impl<T: Real> Lifted<T> {
    pub fn of(u: &QpFunction<T>) -> Self {
        let lat = u.lattice().clone();
        let m = lat.padded();
        let dim = lat.dim();
        let mut values = vec![czero::<T>(); m.pow(dim as u32)];
        for (c, &o) in u.coeffs().iter().zip(lat.padded_index()) {
            values[o] = *c;
        }
        let (_, inv) = lat.padded_plans();
        fft_nd(&mut values, m, dim, inv.as_ref());
        Self {
            lattice: lat,
            values,
        }
    }

    pub fn constant(lattice: &Arc<Lattice<T>>, c: Cplx<T>) -> Self {
        let n = lattice.padded().pow(lattice.dim() as u32);
        Self {
            lattice: lattice.clone(),
            values: vec![c; n],
        }
    }

    pub fn values(&self) -> &[Cplx<T>] {
        &self.values
    }

    pub fn lattice(&self) -> &Arc<Lattice<T>> {
        &self.lattice
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Cplx<T>, Cplx<T>) -> Cplx<T>) -> Self {
        debug_assert!(
            Arc::ptr_eq(&self.lattice, &other.lattice) || *self.lattice == *other.lattice
        );
        Self {
            lattice: self.lattice.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Cplx<T>) -> Cplx<T>) -> Self {
        Self {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|a| f(*a)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// Analysis back to box coefficients (truncation).
    pub fn analyze(&self) -> QpFunction<T> {
        let lat = &self.lattice;
        let m = lat.padded();
        let mut values = self.values.clone();
        let (fwd, _) = lat.padded_plans();
        fft_nd(&mut values, m, lat.dim(), fwd.as_ref());
        let scale = T::one() / T::count(values.len());
        let coeffs = lat
            .padded_index()
            .iter()
            .map(|&o| values[o] * scale)
            .collect();
        QpFunction::from_coeffs(lat.clone(), coeffs)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn min_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::infinity(), |m, v| m.min(v.norm()))
    }

    pub fn min_re(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, v| m.min(v.re))
    }

    /// Grid average, which is the exact torus mean for integrands whose
    /// modes stay below the padded resolution.
    pub fn mean(&self) -> Cplx<T> {
        let s = self.values.iter().fold(czero::<T>(), |acc, v| acc + v);
        s / T::count(self.values.len())
    }
}
