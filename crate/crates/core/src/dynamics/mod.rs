//! Water-wave states in holomorphic coordinates, the auxiliary fields
//! `Y, b, a, M, F, J` and the two evolution systems.

mod aux;
mod energy;
pub(crate) mod rhs;
mod state;

pub use aux::{
    compute_a, compute_b, compute_f, compute_f_diff, compute_j, compute_m, compute_m_rational,
    compute_y, AuxFields,
};
pub use energy::{control_params, energy_ek, multi_indices};
pub use rhs::{differentiate_state, reconstruct_check, rhs_diff, rhs_undiff, DEFAULT_EPS_CHORD};
pub use state::{LinState, WaveStateDiff, WaveStateUndiff};
