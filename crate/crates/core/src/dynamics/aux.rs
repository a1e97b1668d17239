use super::state::{WaveStateDiff, WaveStateUndiff};
use crate::error::{Result, WaveError};
use crate::scalar::{cplx, Real};
use crate::spectral::{Projector, QpFunction};

/// `Y = W/(1+W)`.
pub fn compute_y<T: Real>(w: &QpFunction<T>, eps_chord: T) -> Result<QpFunction<T>> {
    Ok(w.mul(&w.reciprocal_one_plus(eps_chord)?))
}

/// `b = 2 Re P[R(1 - Ybar)]`.
pub fn compute_b<T: Real>(r: &QpFunction<T>, y: &QpFunction<T>) -> QpFunction<T> {
    two_re_p(&r.mul(&y.conj().one_minus()))
}

/// `a = 2 Im P[R Rbar_alpha]`.
pub fn compute_a<T: Real>(r: &QpFunction<T>) -> QpFunction<T> {
    r.mul(&r.d_alpha().conj())
        .project(Projector::P)
        .im()
        .scale_re(T::lit(2.0))
}

/// `M = 2 Re P[R Ybar_alpha - Rbar_alpha Y]`.
pub fn compute_m<T: Real>(r: &QpFunction<T>, y: &QpFunction<T>) -> QpFunction<T> {
    let t = &r.mul(&y.d_alpha().conj()) - &r.d_alpha().conj().mul(y);
    two_re_p(&t)
}

/// `M = R_alpha/(1+Wbar) + Rbar_alpha/(1+W) - b_alpha`, the rational form
/// used as a cross-check of [`compute_m`].
pub fn compute_m_rational<T: Real>(
    w: &QpFunction<T>,
    r: &QpFunction<T>,
    eps_chord: T,
) -> Result<QpFunction<T>> {
    let inv = w.reciprocal_one_plus(eps_chord)?;
    let y = w.mul(&inv);
    let ra = r.d_alpha();
    let b = compute_b(r, &y);
    let sum = &ra.mul(&inv.conj()) + &ra.conj().mul(&inv);
    Ok(&sum - &b.d_alpha())
}

/// `J = |1 + W_alpha|^2` from the slope `W_alpha`.
pub fn compute_j<T: Real>(w_alpha: &QpFunction<T>) -> QpFunction<T> {
    let z = w_alpha.one_plus();
    z.mul(&z.conj()).re()
}

/// `F = P[(Q_alpha - Qbar_alpha)/J]` evaluated pointwise on the padded grid.
pub fn compute_f<T: Real>(u: &WaveStateUndiff<T>, eps_chord: T) -> Result<QpFunction<T>> {
    let wa = u.w.d_alpha().lift();
    let qa = u.q.d_alpha().lift();
    let one = cplx(T::one(), T::zero());
    let min_chord = wa
        .values()
        .iter()
        .fold(T::infinity(), |m, v| m.min((one + v).norm()));
    if !(min_chord > eps_chord) {
        return Err(WaveError::SurfaceDegenerate {
            min_chord: min_chord.as_f64(),
            eps_chord: eps_chord.as_f64(),
        });
    }
    let f = qa.zip_with(&wa, |q, w| (q - q.conj()) / (one + w).norm_sqr());
    Ok(f.analyze().project(Projector::P))
}

/// `F = P[R(1 - Ybar) - Rbar(1 - Y)]`, the same field written in the
/// differentiated variables.
pub fn compute_f_diff<T: Real>(r: &QpFunction<T>, y: &QpFunction<T>) -> QpFunction<T> {
    let t = &r.mul(&y.conj().one_minus()) - &r.conj().mul(&y.one_minus());
    t.project(Projector::P)
}

fn two_re_p<T: Real>(u: &QpFunction<T>) -> QpFunction<T> {
    u.project(Projector::P).re().scale_re(T::lit(2.0))
}

/// Auxiliary fields of a differentiated state, computed once per
/// evaluation.
#[derive(Clone, Debug)]
pub struct AuxFields<T: Real> {
    pub y: QpFunction<T>,
    pub b: QpFunction<T>,
    pub a: QpFunction<T>,
    pub m: QpFunction<T>,
}

impl<T: Real> AuxFields<T> {
    pub fn compute(state: &WaveStateDiff<T>, eps_chord: T) -> Result<Self> {
        let y = compute_y(&state.w, eps_chord)?;
        let b = compute_b(&state.r, &y);
        let a = compute_a(&state.r);
        let m = compute_m(&state.r, &y);
        Ok(Self { y, b, a, m })
    }

    /// `F` from the differentiated variables.
    pub fn f(&self, state: &WaveStateDiff<T>) -> QpFunction<T> {
        compute_f_diff(&state.r, &self.y)
    }

    /// `J = |1+W|^2`.
    pub fn j(&self, state: &WaveStateDiff<T>) -> QpFunction<T> {
        compute_j(&state.w)
    }
}
