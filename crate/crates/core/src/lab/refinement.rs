//! Resolution refinement of rough data and the difference of two nearby
//! solutions.

use super::random::{random_state, trial_rng, RandomStateSpec};
use crate::dynamics::{control_params, WaveStateDiff};
use crate::error::{Result, WaveError};
use crate::scalar::Real;
use crate::spectral::{golden_frequencies, lp_project, validate_lattice};
use crate::timestepper::{step_rk4, DiffFlow, Flow};
use serde::{Deserialize, Serialize};

/// Rough initial data for the refinement experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementSpec {
    pub dim: usize,
    pub s: f64,
    /// Coefficient decay exponent `p` in `|u_j| ~ <j>^{-p}`.
    pub decay: f64,
    pub target_a: f64,
    pub seed: u64,
    pub n_list: Vec<usize>,
    pub t_max: f64,
    pub dt: f64,
    pub eps_chord: f64,
}

impl RefinementSpec {
    pub fn new(s: f64, n_list: Vec<usize>) -> Self {
        Self {
            dim: 2,
            s,
            decay: s + 1.0,
            target_a: 0.1,
            seed: 7,
            n_list,
            t_max: 0.05,
            dt: 5e-3,
            eps_chord: crate::dynamics::DEFAULT_EPS_CHORD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub spec: RefinementSpec,
    /// `n_list`, each compared with the run at `2N`.
    pub n: Vec<usize>,
    pub distance_h0: Vec<f64>,
    pub distance_hs: Vec<f64>,
    /// `max_l ||P_l u(T)||_{H^s} / c_l` per run, where `c_l` is the
    /// frequency envelope of the data.
    pub envelope_ratio: Vec<f64>,
}

impl RefinementReport {
    pub fn monotone(&self) -> bool {
        self.distance_h0.windows(2).all(|w| w[1] < w[0])
    }
}

/// Decay rate of the frequency envelope across dyadic bands.
pub const ENVELOPE_DELTA: f64 = 0.5;

fn band_norms<T: Real>(u: &WaveStateDiff<T>, s: T) -> Vec<f64> {
    let half = T::lit(0.5);
    (0..=u.lattice().max_level())
        .map(|l| {
            let w = lp_project(&u.w, l).norm2(s, T::zero());
            let r = lp_project(&u.r, l).norm2(s, half);
            (w + r).sqrt().as_f64()
        })
        .collect()
}

/// `c_l = max_m 2^{-delta |l - m|} ||P_m u||`.
pub fn frequency_envelope(bands: &[f64], delta: f64) -> Vec<f64> {
    (0..bands.len())
        .map(|l| {
            bands
                .iter()
                .enumerate()
                .map(|(m, b)| b * 2f64.powf(-delta * (l as f64 - m as f64).abs()))
                .fold(0.0, f64::max)
        })
        .collect()
}

fn run<T: Real>(
    initial: WaveStateDiff<T>,
    dt: T,
    steps: usize,
    eps_chord: T,
) -> Result<WaveStateDiff<T>> {
    let flow = DiffFlow { eps_chord };
    let mut s = initial;
    for n in 0..steps {
        s = flow.project(&step_rk4(&flow, T::count(n) * dt, &s, dt)?).0;
        if let Some(field) = crate::timestepper::StateVector::<T>::nonfinite_field(&s) {
            return Err(WaveError::NonFinite {
                field: field.into(),
                time: (T::count(n + 1) * dt).as_f64(),
            });
        }
    }
    Ok(s)
}

/// Evolves the same rough data truncated to each `N` and to `2N`, and
/// compares the final states on the finer box.
pub fn refinement_experiment(spec: &RefinementSpec) -> Result<RefinementReport> {
    let mut ns = spec.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let n_top = 2 * *ns
        .last()
        .ok_or_else(|| WaveError::InvalidArgument("empty N list".into()))?;
    let freqs: Vec<f64> = golden_frequencies::<f64>()
        .into_iter()
        .take(spec.dim)
        .collect();
    if freqs.len() != spec.dim {
        return Err(WaveError::InvalidArgument(
            "refinement supports d <= 2".into(),
        ));
    }
    let top = validate_lattice(&freqs, n_top, 1e-10)?;
    let data = random_state(
        &top,
        &RandomStateSpec::new(spec.s, spec.target_a).with_decay(spec.decay),
        &mut trial_rng(spec.seed, 0),
    );
    let steps = (spec.t_max / spec.dt).round() as usize;
    let mut all: Vec<usize> = ns.iter().flat_map(|&n| [n, 2 * n]).collect();
    all.sort_unstable();
    all.dedup();
    let mut finals = std::collections::BTreeMap::new();
    let mut envelope = std::collections::BTreeMap::new();
    for &n in &all {
        let lat = top.with_radius(n)?;
        let u0 = data.embed(&lat)?;
        let c = frequency_envelope(&band_norms(&u0, spec.s), ENVELOPE_DELTA);
        let u = run(u0, spec.dt, steps, spec.eps_chord)?;
        let ratio = band_norms(&u, spec.s)
            .iter()
            .zip(&c)
            .map(|(b, c)| if *b == 0.0 { 0.0 } else { b / c })
            .fold(0.0, f64::max);
        envelope.insert(n, ratio);
        finals.insert(n, u);
    }
    let mut report = RefinementReport {
        spec: spec.clone(),
        n: ns.clone(),
        distance_h0: Vec::new(),
        distance_hs: Vec::new(),
        envelope_ratio: Vec::new(),
    };
    for &n in &ns {
        let fine = &finals[&(2 * n)];
        let diff = finals[&n].embed(fine.lattice())?.sub(fine);
        report.distance_h0.push(diff.hnorm(0.0));
        report.distance_hs.push(diff.hnorm(spec.s));
        report.envelope_ratio.push(envelope[&n]);
    }
    Ok(report)
}

/// Two solutions followed side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceReport {
    pub times: Vec<f64>,
    /// `||(W1 - W2, R1 - R2)(t)||_{H^0}`.
    pub distance: Vec<f64>,
    /// `int_0^t max(B1, B2)`.
    pub b_integral: Vec<f64>,
    /// Smallest `C` with `distance(t) <= distance(0) exp(C int_0^t B)`.
    pub fitted_c: f64,
    /// Set when the run stopped early.
    pub error: Option<String>,
}

impl DifferenceReport {
    /// `distance(0) exp(C int_0^t B)` at every sample.
    pub fn envelope(&self) -> Vec<f64> {
        let d0 = self.distance.first().copied().unwrap_or(0.0);
        self.b_integral
            .iter()
            .map(|i| d0 * (self.fitted_c * i).exp())
            .collect()
    }
}

/// Evolves `bg1` and `bg2` on `[0, t_max]` and fits the exponential
/// envelope of their distance against the accumulated control `B`.
pub fn difference_experiment<T: Real>(
    bg1: &WaveStateDiff<T>,
    bg2: &WaveStateDiff<T>,
    s: T,
    t_max: T,
    dt: T,
    eps_chord: T,
) -> Result<DifferenceReport> {
    if !bg1.w.same_lattice(&bg2.w) {
        return Err(WaveError::LatticeMismatch);
    }
    let steps = (t_max / dt).round().to_usize().unwrap_or(0);
    let flow = DiffFlow { eps_chord };
    let joint_b = |a: &WaveStateDiff<T>, b: &WaveStateDiff<T>| {
        control_params(a, s).1.max(control_params(b, s).1).as_f64()
    };
    let (mut u1, mut u2) = (bg1.clone(), bg2.clone());
    let mut report = DifferenceReport {
        times: vec![0.0],
        distance: vec![u1.sub(&u2).hnorm(T::zero()).as_f64()],
        b_integral: vec![0.0],
        fitted_c: 0.0,
        error: None,
    };
    let mut b_prev = joint_b(&u1, &u2);
    for n in 0..steps {
        let t = T::count(n) * dt;
        let next = step_rk4(&flow, t, &u1, dt).and_then(|a| Ok((a, step_rk4(&flow, t, &u2, dt)?)));
        match next {
            Ok((a, b)) => {
                u1 = flow.project(&a).0;
                u2 = flow.project(&b).0;
            }
            Err(e) => {
                report.error = Some(e.to_string());
                break;
            }
        }
        let b_now = joint_b(&u1, &u2);
        let integral = report.b_integral[n] + 0.5 * (b_prev + b_now) * dt.as_f64();
        b_prev = b_now;
        report.times.push((T::count(n + 1) * dt).as_f64());
        report.distance.push(u1.sub(&u2).hnorm(T::zero()).as_f64());
        report.b_integral.push(integral);
    }
    let d0 = report.distance[0];
    if d0 > 0.0 {
        report.fitted_c = report
            .distance
            .iter()
            .zip(&report.b_integral)
            .skip(1)
            .filter(|(_, i)| **i > 0.0)
            .map(|(d, i)| (d / d0).ln() / i)
            .fold(0.0, f64::max);
    }
    Ok(report)
}
