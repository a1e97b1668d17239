use super::aux::AuxFields;
use super::state::{LinState, WaveStateDiff};
use crate::error::Result;
use crate::linearized::energy_elin_with;
use crate::scalar::Real;
use crate::spectral::QpFunction;

/// Control parameters `(A, B)`: the `H^{s-1/2}` and `H^s` sizes of the
/// state in the `H^s x H^{s,1/2}` pairing.
pub fn control_params<T: Real>(state: &WaveStateDiff<T>, s: T) -> (T, T) {
    (state.hnorm(s - T::lit(0.5)), state.hnorm(s))
}

/// All `kappa` in `N^d` with `|kappa| = k`, in lexicographic order.
pub fn multi_indices(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == d - 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(d, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, k, &mut Vec::new(), &mut out);
    }
    out
}

fn d_kappa<T: Real>(u: &QpFunction<T>, kappa: &[usize]) -> QpFunction<T> {
    let mut v = u.clone();
    for (axis, &n) in kappa.iter().enumerate() {
        for _ in 0..n {
            v = v.d_coord(axis);
        }
    }
    v
}

/// `E^k = sum_{|kappa| = k} E_lin(d^kappa W, d^kappa R)` with the state
/// itself as background.
pub fn energy_ek<T: Real>(state: &WaveStateDiff<T>, k: usize, eps_chord: T) -> Result<T> {
    let aux = AuxFields::compute(state, eps_chord)?;
    let d = state.lattice().dim();
    let mut total = T::zero();
    for kappa in multi_indices(d, k) {
        let lin = LinState::new(d_kappa(&state.w, &kappa), d_kappa(&state.r, &kappa));
        total = total + energy_elin_with(&aux, &lin);
    }
    Ok(total)
}
