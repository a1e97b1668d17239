use super::aux::{compute_f, AuxFields};
use super::state::{WaveStateDiff, WaveStateUndiff};
use crate::error::Result;
use crate::scalar::{cplx, Real};
use crate::spectral::Projector;

/// Default lower bound on `|1 + W|` before a state counts as degenerate.
pub const DEFAULT_EPS_CHORD: f64 = 1e-6;

/// Time derivative of the differentiated system
///
/// ```text
/// W_t + b W_alpha + (1+W) R_alpha/(1+Wbar) = (1+W) M
/// R_t + b R_alpha = i (W - a)/(1+W)
/// ```
///
/// with both components projected by `P#`.
pub fn rhs_diff<T: Real>(state: &WaveStateDiff<T>, eps_chord: T) -> Result<WaveStateDiff<T>> {
    let aux = AuxFields::compute(state, eps_chord)?;
    Ok(rhs_diff_with(state, &aux))
}

pub(crate) fn rhs_diff_with<T: Real>(
    state: &WaveStateDiff<T>,
    aux: &AuxFields<T>,
) -> WaveStateDiff<T> {
    let one_w = state.w.one_plus();
    let wa = state.w.d_alpha();
    let ra = state.r.d_alpha();
    let coef = one_w.mul(&aux.y.conj().one_minus());
    let mut wt = &one_w.mul(&aux.m) - &aux.b.mul(&wa);
    wt -= &coef.mul(&ra);
    // (W - a)/(1+W) = (1+a) Y - a
    let forcing = &aux.a.one_plus().mul(&aux.y) - &aux.a;
    let rt = &forcing.times_i() - &aux.b.mul(&ra);
    WaveStateDiff::new(wt.project(Projector::PSharp), rt.project(Projector::PSharp))
}

/// Time derivative of the undifferentiated system
///
/// ```text
/// W_t = -F (1 + W_alpha)
/// Q_t = -F Q_alpha + i W - P[|Q_alpha|^2 / J]
/// ```
///
/// projected by `P^i` and `P^r` respectively.
pub fn rhs_undiff<T: Real>(u: &WaveStateUndiff<T>, eps_chord: T) -> Result<WaveStateUndiff<T>> {
    let f = compute_f(u, eps_chord)?;
    let wa = u.w.d_alpha();
    let qa = u.q.d_alpha();
    let one = cplx(T::one(), T::zero());
    let ratio = qa
        .lift()
        .zip_with(&wa.lift(), |q, w| {
            cplx(q.norm_sqr() / (one + w).norm_sqr(), T::zero())
        })
        .analyze()
        .project(Projector::P);
    let wt = -&f.mul(&wa.one_plus());
    let mut qt = u.w.times_i();
    qt -= &f.mul(&qa);
    qt -= &ratio;
    Ok(WaveStateUndiff::new(
        wt.project(Projector::PI),
        qt.project(Projector::PR),
    ))
}

/// `W = W_alpha`, `R = Q_alpha/(1 + W_alpha)`.
pub fn differentiate_state<T: Real>(
    u: &WaveStateUndiff<T>,
    eps_chord: T,
) -> Result<WaveStateDiff<T>> {
    let wa = u.w.d_alpha();
    let inv = wa.reciprocal_one_plus(eps_chord)?;
    let r = u.q.d_alpha().mul(&inv).project(Projector::PSharp);
    Ok(WaveStateDiff::new(wa, r))
}

/// `||v.W - W_alpha|| + ||v.R (1 + W_alpha) - Q_alpha||` in L2.
pub fn reconstruct_check<T: Real>(u: &WaveStateUndiff<T>, v: &WaveStateDiff<T>) -> T {
    let wa = u.w.d_alpha();
    let e1 = (&v.w - &wa).l2_norm();
    let e2 = (&v.r.mul(&wa.one_plus()) - &u.q.d_alpha()).l2_norm();
    e1 + e2
}
