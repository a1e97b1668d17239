//! Randomized ratio checks of the multilinear, commutator and water-wave
//! estimates, and of the energy bounds.

use super::random::{random_lin_state, random_state, trial_rng, RandomStateSpec};
use super::report::{run_trials, SuiteParams, TrialReport};
use crate::dynamics::{compute_a, compute_y, control_params, energy_ek, AuxFields, WaveStateDiff};
use crate::error::Result;
use crate::linearized::{energy_elin, h0_norm2};
use crate::scalar::Cplx;
use crate::spectral::{
    golden_frequencies, lp_bands, para_low_high, validate_lattice, Lattice, Projector, QpFunction,
};
use crate::timestepper::{step_rk4, CoupledLinearFlow, CoupledState, DiffFlow};
use rand::Rng;
use std::sync::Arc;

/// Every lemma id the suite knows, in report order.
pub const LEMMA_IDS: &[&str] = &[
    "b1",
    "b2",
    "com1",
    "com2",
    "com3",
    "prod1",
    "prod2",
    "prod3",
    "para-err",
    "Y-moser-Hs",
    "Y-moser-Hs-half",
    "b-bound-A",
    "b-bound-B",
    "a-positivity",
    "a-bound-A",
    "a-bound-B",
    "a-material-derivative",
    "M-bound",
    "energy-growth-1",
    "energy-growth-2",
    "elin-coercivity-upper",
    "elin-coercivity-lower",
    "elin-growth",
];

/// A randomized suite: lattice size, regularity, `A`-ball radius, seed and
/// trial count.
#[derive(Clone, Debug)]
pub struct Suite {
    pub lattice: Arc<Lattice<f64>>,
    pub s: f64,
    pub radius: f64,
    pub seed: u64,
    pub trials: usize,
    pub decay: f64,
    /// Step used by the centered time differences.
    pub dt: f64,
    pub eps_chord: f64,
}

impl Suite {
    /// Golden-ratio lattice in dimension `d` (`d <= 2`: the first `d` of
    /// `(1, phi)`). Coefficients decay like `<j>^{-(s+1+d/2)}`, so every
    /// norm entering the ratios stays bounded as `N` grows.
    pub fn golden(
        d: usize,
        n: usize,
        s: f64,
        radius: f64,
        seed: u64,
        trials: usize,
    ) -> Result<Self> {
        let k = golden_frequencies::<f64>();
        let k = if d <= 2 {
            k[..d].to_vec()
        } else {
            vec![1.0, k[1], 2f64.sqrt()]
        };
        Ok(Self {
            lattice: validate_lattice(&k, n, 1e-10)?,
            s,
            radius,
            seed,
            trials,
            decay: s + 1.0 + d as f64 / 2.0,
            dt: 1e-3,
            eps_chord: crate::dynamics::DEFAULT_EPS_CHORD,
        })
    }

    pub fn params(&self) -> SuiteParams {
        SuiteParams {
            s: self.s,
            d: self.lattice.dim(),
            n: self.lattice.radius(),
            radius: self.radius,
            seed: self.seed,
            decay: self.decay,
        }
    }

    /// Random state with `A` uniform in `[radius/4, radius]`.
    fn state(&self, trial: u64, salt: u64) -> WaveStateDiff<f64> {
        let mut rng = trial_rng(self.seed ^ salt, trial);
        let a = self.radius * rng.gen_range(0.25..=1.0);
        random_state(
            &self.lattice,
            &RandomStateSpec::new(self.s, a).with_decay(self.decay),
            &mut rng,
        )
    }

    /// Random function with decaying coefficients on every mode.
    fn function(&self, trial: u64, salt: u64) -> QpFunction<f64> {
        let mut rng = trial_rng(self.seed ^ salt, trial);
        let lat = &self.lattice;
        let coeffs = (0..lat.len())
            .map(|p| {
                let w = (1.0 + lat.jnorm2()[p]).powf(-0.5 * self.decay);
                Cplx::from_polar(
                    w * rng.gen_range(0.0..1.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        QpFunction::from_coeffs(lat.clone(), coeffs)
    }

    fn report(&self, id: &str, f: impl Fn(u64) -> Result<f64> + Sync) -> Result<TrialReport> {
        Ok(TrialReport::from_ratios(
            id,
            self.params(),
            self.trials,
            run_trials(self.trials, f)?,
        ))
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `max_l ||P_l u||_inf / (2^{l exponent} norm)`.
pub fn bernstein_ratio(u: &QpFunction<f64>, exponent: f64, norm: f64) -> f64 {
    lp_bands(u)
        .iter()
        .enumerate()
        .map(|(l, band)| ratio(band.linf(), 2f64.powi(l as i32).powf(exponent) * norm))
        .fold(0.0, f64::max)
}

/// `[f, P] d_alpha u`.
pub fn commutator(f: &QpFunction<f64>, u: &QpFunction<f64>) -> QpFunction<f64> {
    let ua = u.d_alpha();
    &f.mul(&ua.project(Projector::P)) - &f.mul(&ua).project(Projector::P)
}

/// `D_t a = a_t + b a_alpha` in `L^inf`, with `a_t` from a centered
/// difference of two RK4 steps of size `h`.
pub fn material_derivative_a(state: &WaveStateDiff<f64>, h: f64, eps_chord: f64) -> Result<f64> {
    let flow = DiffFlow { eps_chord };
    let fwd = step_rk4(&flow, 0.0, state, h)?;
    let bwd = step_rk4(&flow, 0.0, state, -h)?;
    let at = (&compute_a(&fwd.r) - &compute_a(&bwd.r)).scale_re(0.5 / h);
    let aux = AuxFields::compute(state, eps_chord)?;
    Ok((&at + &aux.b.mul(&aux.a.d_alpha())).linf())
}

/// `dE^k/dt` by a centered difference of two RK4 steps of size `h`.
pub fn energy_rate(state: &WaveStateDiff<f64>, k: usize, h: f64, eps_chord: f64) -> Result<f64> {
    let flow = DiffFlow { eps_chord };
    let fwd = step_rk4(&flow, 0.0, state, h)?;
    let bwd = step_rk4(&flow, 0.0, state, -h)?;
    Ok((energy_ek(&fwd, k, eps_chord)? - energy_ek(&bwd, k, eps_chord)?) / (2.0 * h))
}

/// `dE_lin/dt` along the coupled background and linearized flow.
pub fn elin_rate(state: &CoupledState<f64>, h: f64, eps_chord: f64) -> Result<f64> {
    let flow = CoupledLinearFlow { eps_chord };
    let fwd = step_rk4(&flow, 0.0, state, h)?;
    let bwd = step_rk4(&flow, 0.0, state, -h)?;
    let ef = energy_elin(&fwd.bg, &fwd.lin, eps_chord)?;
    let eb = energy_elin(&bwd.bg, &bwd.lin, eps_chord)?;
    Ok((ef - eb) / (2.0 * h))
}

/// Runs the ratio check `id` over the suite.
pub fn lemma_check(id: &str, suite: &Suite) -> Result<TrialReport> {
    let s = suite.s;
    let d = suite.lattice.dim() as f64;
    let eps = suite.eps_chord;
    let half = 0.5;
    match id {
        "b1" => suite.report(id, |t| {
            let u = suite.function(t, 1);
            Ok(bernstein_ratio(&u, d / 2.0 - s, u.norm(s, 0.0)))
        }),
        "b2" => suite.report(id, |t| {
            let u = suite.function(t, 1);
            Ok(bernstein_ratio(&u, (d - 1.0) / 2.0 - s, u.norm(s, half)))
        }),
        "com1" => suite.report(id, |t| {
            let (f, u) = (suite.function(t, 2), suite.function(t, 3));
            Ok(ratio(
                commutator(&f, &u).l2_norm(),
                f.norm(s, half) * u.l2_norm(),
            ))
        }),
        "com2" => suite.report(id, |t| {
            let (f, u) = (suite.function(t, 2), suite.function(t, 3));
            Ok(ratio(
                commutator(&f, &u).l2_norm(),
                f.norm(s, 0.0) * u.norm(0.0, half),
            ))
        }),
        "com3" => suite.report(id, |t| {
            let (f, u) = (suite.function(t, 2), suite.function(t, 3));
            Ok(ratio(
                commutator(&f, &u).norm(0.0, half),
                f.norm(s, half) * u.norm(0.0, half),
            ))
        }),
        "prod1" => suite.report(id, |t| {
            let (f, u) = (suite.function(t, 4), suite.function(t, 5));
            Ok(ratio(
                f.mul(&u).norm(0.0, half),
                f.norm(s - half, 0.0) * u.norm(0.0, half),
            ))
        }),
        "prod2" => suite.report(id, |t| {
            let (f, u) = (suite.function(t, 4), suite.function(t, 5));
            Ok(ratio(
                f.mul(&u).l2_norm(),
                f.norm(s - 1.0, 0.0) * u.norm(0.0, half),
            ))
        }),
        "prod3" => suite.report(id, |t| {
            let (f, u) = (suite.function(t, 4), suite.function(t, 5));
            Ok(ratio(
                f.mul(&u).norm(0.0, half),
                f.norm(s - 1.0, half) * u.norm(0.0, half),
            ))
        }),
        "para-err" => suite.report(id, |t| {
            let (f, u) = (suite.function(t, 6), suite.function(t, 7));
            let err = &para_low_high(&f, &u) - &f.mul(&u);
            Ok(ratio(err.norm(0.0, half), f.norm(s, 0.0) * u.l2_norm()))
        }),
        "Y-moser-Hs" | "Y-moser-Hs-half" => {
            let level = if id == "Y-moser-Hs" { s } else { s - half };
            suite.report(id, move |t| {
                let st = suite.state(t, 8);
                let y = compute_y(&st.w, eps)?;
                Ok(ratio(y.norm(level, 0.0), st.w.norm(level, 0.0)))
            })
        }
        "b-bound-A" => suite.report(id, |t| {
            let st = suite.state(t, 9);
            let aux = AuxFields::compute(&st, eps)?;
            Ok(ratio(aux.b.norm(s - half, half), control_params(&st, s).0))
        }),
        "b-bound-B" => suite.report(id, |t| {
            let st = suite.state(t, 9);
            let aux = AuxFields::compute(&st, eps)?;
            Ok(ratio(aux.b.norm(s, half), control_params(&st, s).1))
        }),
        "a-positivity" => suite.report(id, |t| {
            let st = suite.state(t, 10);
            let a = compute_a(&st.r);
            Ok(ratio((-a.min_re_on_grid()).max(0.0), st.r.norm2(1.0, 0.0)))
        }),
        "a-bound-A" => suite.report(id, |t| {
            let st = suite.state(t, 10);
            let (a_ctl, _) = control_params(&st, s);
            Ok(ratio(compute_a(&st.r).norm(s - half, 0.0), a_ctl * a_ctl))
        }),
        "a-bound-B" => suite.report(id, |t| {
            let st = suite.state(t, 10);
            let (a_ctl, b_ctl) = control_params(&st, s);
            Ok(ratio(compute_a(&st.r).norm(s, 0.0), a_ctl * b_ctl))
        }),
        "a-material-derivative" => suite.report(id, |t| {
            let st = suite.state(t, 11);
            let (_, b_ctl) = control_params(&st, s);
            Ok(ratio(material_derivative_a(&st, suite.dt, eps)?, b_ctl))
        }),
        "M-bound" => suite.report(id, |t| {
            let st = suite.state(t, 12);
            let aux = AuxFields::compute(&st, eps)?;
            let (a_ctl, b_ctl) = control_params(&st, s);
            Ok(ratio(aux.m.norm(s - half, 0.0), a_ctl * b_ctl))
        }),
        "energy-growth-1" | "energy-growth-2" => {
            let k = if id == "energy-growth-1" { 1 } else { 2 };
            suite.report(id, move |t| {
                let st = suite.state(t, 13);
                let (_, b_ctl) = control_params(&st, s);
                let rate = energy_rate(&st, k, suite.dt, eps)?.abs();
                Ok(ratio(rate, b_ctl * st.hnorm(k as f64).powi(2)))
            })
        }
        "elin-coercivity-upper" | "elin-coercivity-lower" => {
            let upper = id == "elin-coercivity-upper";
            suite.report(id, move |t| {
                let st = suite.state(t, 14);
                let lin = random_lin_state(
                    &suite.lattice,
                    suite.decay,
                    None,
                    &mut trial_rng(suite.seed ^ 15, t),
                );
                let e = energy_elin(&st, &lin, eps)?;
                let n = h0_norm2(&lin);
                Ok(if upper { e / n } else { n / e })
            })
        }
        "elin-growth" => suite.report(id, |t| {
            let st = suite.state(t, 16);
            let lin = random_lin_state(
                &suite.lattice,
                suite.decay,
                None,
                &mut trial_rng(suite.seed ^ 17, t),
            );
            let (_, b_ctl) = control_params(&st, s);
            let n = h0_norm2(&lin);
            let rate = elin_rate(&CoupledState { bg: st, lin }, suite.dt, eps)?.abs();
            Ok(ratio(rate, b_ctl * n))
        }),
        other => Err(crate::error::WaveError::InvalidArgument(format!(
            "unknown lemma id `{other}`"
        ))),
    }
}

/// All checks in [`LEMMA_IDS`] order.
pub fn lemma_suite(suite: &Suite, ids: &[&str]) -> Result<Vec<TrialReport>> {
    ids.iter().map(|id| lemma_check(id, suite)).collect()
}
