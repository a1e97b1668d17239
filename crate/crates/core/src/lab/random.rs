use crate::dynamics::{control_params, LinState, WaveStateDiff, WaveStateUndiff};
use crate::scalar::{Cplx, Real};
use crate::spectral::{Lattice, QpFunction};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Independent stream `trial` of the master seed.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng
}

/// Holomorphic zero-mean function with `|u_j| = <j>^{-p}` and uniform
/// phases on the modes with `<j,k> < 0`, optionally restricted to
/// `|j|_inf <= band`.
pub fn random_holomorphic<T: Real, R: Rng + ?Sized>(
    lattice: &Arc<Lattice<T>>,
    decay: T,
    band: Option<usize>,
    rng: &mut R,
) -> QpFunction<T> {
    let mut u = QpFunction::zeros(lattice);
    let limit = band.map(|b| b as i64).unwrap_or(i64::MAX);
    let sign = lattice.sign().to_vec();
    for (p, c) in u.coeffs_mut().iter_mut().enumerate() {
        // draw for every mode so that the stream does not depend on band
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        if sign[p] >= 0 || lattice.multi_index(p).iter().any(|x| x.abs() > limit) {
            continue;
        }
        let weight = (T::one() + lattice.jnorm2()[p]).powf(-decay * T::lit(0.5));
        *c = Cplx::from_polar(weight, T::lit(phase));
    }
    u
}

/// Shape of a random state.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomStateSpec<T> {
    /// Coefficient decay exponent `p`.
    pub decay: T,
    /// Regularity index used for the control parameters.
    pub s: T,
    /// Target value of `A`.
    pub target_a: T,
    /// Optional band limit `|j|_inf <= band`.
    pub band: Option<usize>,
}

impl<T: Real> RandomStateSpec<T> {
    /// Decay `p = s + 1`, as used for the estimate suites.
    pub fn new(s: T, target_a: T) -> Self {
        Self {
            decay: s + T::one(),
            s,
            target_a,
            band: None,
        }
    }

    pub fn with_band(mut self, band: Option<usize>) -> Self {
        self.band = band;
        self
    }

    pub fn with_decay(mut self, decay: T) -> Self {
        self.decay = decay;
        self
    }
}

/// Random differentiated state rescaled so that `A = target_a`.
pub fn random_state<T: Real, R: Rng + ?Sized>(
    lattice: &Arc<Lattice<T>>,
    spec: &RandomStateSpec<T>,
    rng: &mut R,
) -> WaveStateDiff<T> {
    let w = random_holomorphic(lattice, spec.decay, spec.band, rng);
    let r = random_holomorphic(lattice, spec.decay, spec.band, rng);
    let state = WaveStateDiff::new(w, r);
    let (a, _) = control_params(&state, spec.s);
    if a == T::zero() {
        return state;
    }
    state.scaled(spec.target_a / a)
}

/// Random linearized state with unit `H^0 x H^{0,1/2}` size.
pub fn random_lin_state<T: Real, R: Rng + ?Sized>(
    lattice: &Arc<Lattice<T>>,
    decay: T,
    band: Option<usize>,
    rng: &mut R,
) -> LinState<T> {
    let w = random_holomorphic(lattice, decay, band, rng);
    let r = random_holomorphic(lattice, decay, band, rng);
    let lin = LinState::new(w, r);
    let n = lin.hnorm(T::zero());
    if n == T::zero() {
        lin
    } else {
        lin.scaled(T::one() / n)
    }
}

/// Random undifferentiated state `(W, Q)` with `||W_alpha||_{L2}` and
/// `||Q_alpha||_{L2}` equal to `size`.
pub fn random_undiff_state<T: Real, R: Rng + ?Sized>(
    lattice: &Arc<Lattice<T>>,
    decay: T,
    size: T,
    band: Option<usize>,
    rng: &mut R,
) -> WaveStateUndiff<T> {
    let mut fields = [0, 1].map(|_| random_holomorphic(lattice, decay, band, rng));
    for f in fields.iter_mut() {
        let n = f.d_alpha().l2_norm();
        if n > T::zero() {
            *f = f.scale_re(size / n);
        }
    }
    let [w, q] = fields;
    WaveStateUndiff::new(w, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{golden_frequencies, validate_lattice};

    #[test]
    fn generator_is_holomorphic_and_scaled() {
        let lat = validate_lattice(&golden_frequencies::<f64>(), 6, 1e-12).unwrap();
        let spec = RandomStateSpec::new(2.0, 0.3).with_band(Some(3));
        let s = random_state(&lat, &spec, &mut trial_rng(1, 0));
        assert!((control_params(&s, 2.0).0 - 0.3).abs() < 1e-14);
        assert_eq!(s.w.antiholomorphic_defect(), 0.0);
        assert_eq!(s.w.mean().norm(), 0.0);
        assert_eq!(s.r.band_limit(3), s.r);
        let again = random_state(&lat, &spec, &mut trial_rng(1, 0));
        assert_eq!(s, again);
        let other = random_state(&lat, &spec, &mut trial_rng(1, 1));
        assert_ne!(s, other);
    }
}
