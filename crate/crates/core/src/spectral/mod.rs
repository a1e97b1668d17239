//! Coefficient-space representation of torus functions and the Fourier
//! multipliers acting on them.

pub mod function;
pub mod grid;
pub mod lattice;
pub mod littlewood_paley;

pub use function::{DerivativeWeight, Projector, QpFunction};
pub use grid::{to_coeffs, to_grid, Grid, Lifted};
pub use lattice::{golden_frequencies, validate_lattice, Lattice};
pub use littlewood_paley::{
    band_symbol, chi, dyadic_norm2, lowpass_symbol, lp_bands, lp_lowpass, lp_project,
    para_low_high, paraproduct, ParaCoefficient, Paraproduct, PARAPRODUCT_GAP,
};
