//! Linearization of the differentiated system around a background state,
//! its source terms and the associated energies.

use crate::dynamics::{AuxFields, LinState, WaveStateDiff};
use crate::error::Result;
use crate::scalar::{cplx, Real};
use crate::spectral::{Projector, QpFunction};

pub use crate::lab::refinement::{difference_experiment, DifferenceReport};

/// Which form of the linearized equations to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearizedMode {
    /// Unprojected equations with the source terms `(f, g)` included.
    Full,
    /// Every term projected by `P#`, sources supplied by the caller.
    Reduced,
}

/// Factor multiplying `(1 - Ybar) r_alpha` in the first equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PrincipalFactor {
    /// `1 + W`, the coefficient of the nonlinear system.
    #[default]
    OnePlusW,
    /// `1 + W_alpha`, kept for comparison only.
    OnePlusWAlpha,
}

/// Linearizations of `b`, `a` and `M`.
#[derive(Clone, Debug)]
pub struct DeltaFields<T: Real> {
    pub db: QpFunction<T>,
    pub da: QpFunction<T>,
    pub dm: QpFunction<T>,
}

/// Source terms of the full linearized equations together with the
/// delta-fields they are built from.
#[derive(Clone, Debug)]
pub struct SourceTerms<T: Real> {
    pub f: QpFunction<T>,
    pub g: QpFunction<T>,
    pub delta: DeltaFields<T>,
}

fn two_re_p<T: Real>(u: &QpFunction<T>) -> QpFunction<T> {
    u.project(Projector::P).re().scale_re(T::lit(2.0))
}

pub fn delta_fields<T: Real>(
    bg: &WaveStateDiff<T>,
    lin: &LinState<T>,
    eps_chord: T,
) -> Result<DeltaFields<T>> {
    let aux = AuxFields::compute(bg, eps_chord)?;
    Ok(delta_fields_with(bg, &aux, lin))
}

pub fn delta_fields_with<T: Real>(
    bg: &WaveStateDiff<T>,
    aux: &AuxFields<T>,
    lin: &LinState<T>,
) -> DeltaFields<T> {
    let r = &bg.r;
    let y = &aux.y;
    let one_ybar = y.conj().one_minus();
    let one_ybar2 = one_ybar.mul(&one_ybar);
    let one_y2 = y.one_minus().mul(&y.one_minus());
    let wbar = lin.w.conj();
    let ybar_a = y.d_alpha().conj();
    let rbar_a = r.d_alpha().conj();
    let lr_a = lin.r.d_alpha();

    let db = two_re_p(&(&one_ybar.mul(&lin.r) - &one_ybar2.mul(&r.mul(&wbar))));
    let da = (&rbar_a.mul(&lin.r) + &r.mul(&lr_a.conj()))
        .project(Projector::P)
        .im()
        .scale_re(T::lit(2.0));

    let r_one_ybar_wbar = r.mul(&one_ybar).mul(&wbar);
    let mut t = lin.r.mul(&ybar_a);
    t -= &r_one_ybar_wbar.mul(&ybar_a).scale_re(T::lit(2.0));
    t += &r.mul(&one_ybar2).mul(&lin.w.d_alpha().conj());
    t -= &lr_a.conj().mul(y);
    t -= &rbar_a.mul(&one_y2).mul(&lin.w);
    let dm = two_re_p(&t);
    DeltaFields { db, da, dm }
}

pub fn source_terms<T: Real>(
    bg: &WaveStateDiff<T>,
    lin: &LinState<T>,
    eps_chord: T,
) -> Result<SourceTerms<T>> {
    let aux = AuxFields::compute(bg, eps_chord)?;
    Ok(source_terms_with(bg, &aux, lin))
}

pub fn source_terms_with<T: Real>(
    bg: &WaveStateDiff<T>,
    aux: &AuxFields<T>,
    lin: &LinState<T>,
) -> SourceTerms<T> {
    let delta = delta_fields_with(bg, aux, lin);
    let y = &aux.y;
    let one_ybar = y.conj().one_minus();
    let one_w = bg.w.one_plus();
    let ra = bg.r.d_alpha();
    let one_ybar_ra = one_ybar.mul(&ra);

    let mut f = -&one_ybar_ra.mul(&lin.w);
    f += &one_ybar.mul(&one_w).mul(&one_ybar_ra).mul(&lin.w.conj());
    f += &aux.m.mul(&lin.w);
    f -= &bg.w.d_alpha().mul(&delta.db);
    f += &one_w.mul(&delta.dm);

    let mut g = -&ra.mul(&delta.db);
    g -= &y.one_minus().mul(&delta.da).times_i();
    SourceTerms { f, g, delta }
}

/// Precomputed background coefficients of the linearized operator.
#[derive(Clone, Debug)]
pub struct LinearizedOperator<T: Real> {
    bg: WaveStateDiff<T>,
    aux: AuxFields<T>,
    /// `(1 - Ybar)(1 + W)` or its comparison variant.
    coef_r: QpFunction<T>,
    /// `i (1 + a)(1 - Y)^2`.
    coef_w: QpFunction<T>,
}

impl<T: Real> LinearizedOperator<T> {
    pub fn new(bg: &WaveStateDiff<T>, eps_chord: T, factor: PrincipalFactor) -> Result<Self> {
        let aux = AuxFields::compute(bg, eps_chord)?;
        let one_ybar = aux.y.conj().one_minus();
        let principal = match factor {
            PrincipalFactor::OnePlusW => bg.w.one_plus(),
            PrincipalFactor::OnePlusWAlpha => bg.w.d_alpha().one_plus(),
        };
        let coef_r = one_ybar.mul(&principal);
        let one_y = aux.y.one_minus();
        let coef_w = aux.a.one_plus().mul(&one_y.mul(&one_y)).times_i();
        Ok(Self {
            bg: bg.clone(),
            aux,
            coef_r,
            coef_w,
        })
    }

    pub fn aux(&self) -> &AuxFields<T> {
        &self.aux
    }

    pub fn background(&self) -> &WaveStateDiff<T> {
        &self.bg
    }

    pub fn sources(&self, lin: &LinState<T>) -> SourceTerms<T> {
        source_terms_with(&self.bg, &self.aux, lin)
    }

    /// `(w_t, r_t)`. In [`LinearizedMode::Full`] the sources are computed
    /// from `lin` and `forcing` is ignored; in reduced mode `forcing`
    /// defaults to zero.
    pub fn apply(
        &self,
        lin: &LinState<T>,
        mode: LinearizedMode,
        forcing: Option<(&QpFunction<T>, &QpFunction<T>)>,
    ) -> LinState<T> {
        let b = &self.aux.b;
        let mut wt = -&b.mul(&lin.w.d_alpha());
        wt -= &self.coef_r.mul(&lin.r.d_alpha());
        let mut rt = -&b.mul(&lin.r.d_alpha());
        rt += &self.coef_w.mul(&lin.w);
        match mode {
            LinearizedMode::Full => {
                let src = self.sources(lin);
                wt += &src.f;
                rt += &src.g;
                LinState::new(wt, rt)
            }
            LinearizedMode::Reduced => {
                if let Some((f, g)) = forcing {
                    wt += f;
                    rt += g;
                }
                LinState::new(wt.project(Projector::PSharp), rt.project(Projector::PSharp))
            }
        }
    }
}

pub fn linearized_rhs<T: Real>(
    bg: &WaveStateDiff<T>,
    lin: &LinState<T>,
    mode: LinearizedMode,
    eps_chord: T,
) -> Result<LinState<T>> {
    Ok(LinearizedOperator::new(bg, eps_chord, PrincipalFactor::OnePlusW)?.apply(lin, mode, None))
}

/// `sum (-xi) |r_j|^2`, the torus mean of `(1/2i)(r rbar_alpha - rbar r_alpha)`.
pub fn half_derivative_form<T: Real>(r: &QpFunction<T>) -> T {
    r.coeffs()
        .iter()
        .zip(r.lattice().xi())
        .fold(T::zero(), |acc, (c, &xi)| acc - xi * c.norm_sqr())
}

/// `int 1/2 |w|^2 + (1/2i)(r rbar_alpha - rbar r_alpha) + |r|^2`.
pub fn energy_e0<T: Real>(lin: &LinState<T>) -> T {
    let w2 = lin.w.l2_norm().powi(2);
    let r2 = lin.r.l2_norm().powi(2);
    T::lit(0.5) * w2 + half_derivative_form(&lin.r) + r2
}

/// `int |w|^2 + (1/2i)(r rbar_alpha - rbar r_alpha)`, the exact invariant of
/// the zero-background flow `w_t = -r_alpha, r_t = i w`.
pub fn zero_background_invariant<T: Real>(lin: &LinState<T>) -> T {
    lin.w.l2_norm().powi(2) + half_derivative_form(&lin.r)
}

/// `int (1+a)|1-Y|^2 |w|^2 + (1/2i)(r rbar_alpha - rbar r_alpha) + |r|^2`.
pub fn energy_elin<T: Real>(bg: &WaveStateDiff<T>, lin: &LinState<T>, eps_chord: T) -> Result<T> {
    let aux = AuxFields::compute(bg, eps_chord)?;
    Ok(energy_elin_with(&aux, lin))
}

pub fn energy_elin_with<T: Real>(aux: &AuxFields<T>, lin: &LinState<T>) -> T {
    let one = cplx(T::one(), T::zero());
    let weight = aux.a.lift().zip_with(&aux.y.lift(), |a, y| {
        cplx((one + a).re * (one - y).norm_sqr(), T::zero())
    });
    let density = weight.zip_with(&lin.w.lift(), |c, w| c * w.norm_sqr());
    density.mean().re + half_derivative_form(&lin.r) + lin.r.l2_norm().powi(2)
}

/// `||(w, r)||^2` in `H^0 x H^{0,1/2}`.
pub fn h0_norm2<T: Real>(lin: &LinState<T>) -> T {
    lin.hnorm(T::zero()).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{golden_frequencies, validate_lattice};
    use num_complex::Complex;

    #[test]
    fn zero_background_reduces_to_free_flow() {
        let lat = validate_lattice(&golden_frequencies::<f64>(), 4, 1e-12).unwrap();
        let bg = WaveStateDiff::zeros(&lat);
        let w = QpFunction::mode(&lat, &[-1, 0], Complex::new(0.3, 0.1));
        let r = QpFunction::mode(&lat, &[-1, -1], Complex::new(-0.2, 0.5));
        let lin = LinState::new(w.clone(), r.clone());
        let out = linearized_rhs(&bg, &lin, LinearizedMode::Full, 1e-6).unwrap();
        assert!((&out.w + &r.d_alpha()).max_abs_coeff() < 1e-15);
        assert!((&out.r - &w.times_i()).max_abs_coeff() < 1e-15);
        let src = source_terms(&bg, &lin, 1e-6).unwrap();
        assert_eq!(src.f.max_abs_coeff(), 0.0);
        assert_eq!(src.g.max_abs_coeff(), 0.0);
        assert_eq!(src.delta.da.max_abs_coeff(), 0.0);
        assert_eq!(src.delta.dm.max_abs_coeff(), 0.0);
        let expect_db = r.project(Projector::P).re().scale_re(2.0);
        assert!((&src.delta.db - &expect_db).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn e0_single_mode() {
        let lat = validate_lattice(&golden_frequencies::<f64>(), 3, 1e-12).unwrap();
        let j = [-1i64, -1];
        let mu = lat.xi()[lat.index_of(&j).unwrap()];
        let r = QpFunction::mode(&lat, &j, Complex::new(0.0, 2.0));
        let lin = LinState::new(QpFunction::zeros(&lat), r);
        assert!((half_derivative_form(&lin.r) - (-mu) * 4.0).abs() < 1e-14);
        assert!((energy_e0(&lin) - (4.0 * -mu + 4.0)).abs() < 1e-13);
        assert_eq!(energy_e0(&LinState::zeros(&lat)), 0.0);
    }
}
