//! Pseudo-spectral simulator and estimate laboratory for spatially
//! quasiperiodic two-dimensional gravity water waves written in
//! holomorphic coordinates.
//!
//! Quasiperiodic functions `u(k alpha)` are handled through their parent
//! functions on the torus `T^d`, stored as truncated Fourier coefficient
//! arrays ([`QpFunction`]). All numerics are generic over the scalar type
//! ([`Real`]); the `*64` aliases below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod io;
pub mod lab;
pub mod linearized;
pub mod scalar;
pub mod spectral;
pub mod timestepper;

pub use error::{Result, WaveError};
pub use scalar::{Cplx, Real};
pub use spectral::{DerivativeWeight, Lattice, Projector, QpFunction};

pub type Lattice64 = Lattice<f64>;
pub type QpFunction64 = QpFunction<f64>;
pub type WaveStateDiff64 = dynamics::WaveStateDiff<f64>;
pub type WaveStateUndiff64 = dynamics::WaveStateUndiff<f64>;
pub type LinState64 = dynamics::LinState<f64>;
pub type RunConfig64 = timestepper::RunConfig<f64>;
