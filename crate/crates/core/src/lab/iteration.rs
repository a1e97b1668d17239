//! The iteration scheme for the differentiated system: each iterate solves
//! a linear nonautonomous problem whose coefficients come from the
//! previous iterate.

use crate::dynamics::{AuxFields, WaveStateDiff};
use crate::error::{Result, WaveError};
use crate::scalar::Real;
use crate::spectral::{ParaCoefficient, Projector, QpFunction};
use crate::timestepper::{evolve, step_rk4, DiffFlow, Flow};
use serde::{Deserialize, Serialize};

/// Frozen coefficients of one iterate at one time.
struct Coefficients<T: Real> {
    b: QpFunction<T>,
    /// `(1 + W)/(1 + Wbar) = (1 + W)(1 - Ybar)`.
    coef_r: QpFunction<T>,
    /// `i (1 + a)`.
    i_one_a: QpFunction<T>,
    /// `T_{(1-Y)^2}`.
    para: ParaCoefficient<T>,
    forcing_w: QpFunction<T>,
    forcing_r: QpFunction<T>,
}

impl<T: Real> Coefficients<T> {
    fn new(prev: &WaveStateDiff<T>, eps_chord: T) -> Result<Self> {
        let aux = AuxFields::compute(prev, eps_chord)?;
        let one_w = prev.w.one_plus();
        let coef_r = one_w.mul(&aux.y.conj().one_minus());
        let i_one_a = aux.a.one_plus().times_i();
        let one_y = aux.y.one_minus();
        let para = ParaCoefficient::new(&one_y.mul(&one_y));
        let forcing_w = one_w.mul(&aux.m).project(Projector::PSharp);
        let inner = &aux.y - &para.apply(&prev.w);
        let forcing_r = (&i_one_a.mul(&inner) - &aux.a.times_i()).project(Projector::PSharp);
        Ok(Self {
            b: aux.b,
            coef_r,
            i_one_a,
            para,
            forcing_w,
            forcing_r,
        })
    }

    fn rhs(&self, u: &WaveStateDiff<T>) -> WaveStateDiff<T> {
        let wa = u.w.d_alpha();
        let ra = u.r.d_alpha();
        let lw = &self.b.mul(&wa) + &self.coef_r.mul(&ra);
        let lr = &self.b.mul(&ra) - &self.i_one_a.mul(&self.para.apply(&u.w));
        WaveStateDiff::new(
            &self.forcing_w - &lw.project(Projector::PSharp),
            &self.forcing_r - &lr.project(Projector::PSharp),
        )
    }
}

/// Cubic Lagrange interpolation of the stored trajectory at `(n + 1/2) dt`.
fn midpoint<T: Real>(traj: &[WaveStateDiff<T>], n: usize) -> WaveStateDiff<T> {
    let last = traj.len() - 1;
    // four nodes around the midpoint, shifted inward at the ends
    let start = n.saturating_sub(1).min(last.saturating_sub(3));
    let nodes: Vec<usize> = (start..=(start + 3).min(last)).collect();
    let x = T::count(n) + T::lit(0.5);
    let mut out = WaveStateDiff::zeros(traj[0].lattice());
    for &i in &nodes {
        let mut weight = T::one();
        for &k in &nodes {
            if k != i {
                weight = weight * (x - T::count(k)) / (T::count(i) - T::count(k));
            }
        }
        out.w.axpy(weight, &traj[i].w);
        out.r.axpy(weight, &traj[i].r);
    }
    out
}

struct FrozenFlow<'a, T: Real> {
    /// Coefficients at `t = j dt / 2`.
    coeffs: &'a [Coefficients<T>],
    dt: T,
}

impl<T: Real> Flow<T> for FrozenFlow<'_, T> {
    type State = WaveStateDiff<T>;
    fn rhs(&self, t: T, s: &Self::State) -> Result<Self::State> {
        let idx = (t / self.dt * T::lit(2.0)).round().to_usize().unwrap_or(0);
        Ok(self.coeffs[idx.min(self.coeffs.len() - 1)].rhs(s))
    }
    fn project(&self, s: &Self::State) -> (Self::State, T) {
        (s.projected(), s.leakage())
    }
}

/// Outcome of the iteration experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationReport {
    pub t_max: f64,
    pub dt: f64,
    /// `Delta_m = sup_t ||iterate_{m+1} - iterate_m||` for `m = 0..`.
    pub deltas: Vec<f64>,
    /// `c_m = Delta_m / Delta_{m-1}` for `m = 1..`.
    pub factors: Vec<f64>,
    /// `sup_t` distance of each iterate to the direct solution.
    pub distance_to_direct: Vec<f64>,
    /// Richardson estimate of the time-discretization error of the direct
    /// solver, floored at roundoff.
    pub truncation_tolerance: f64,
    /// Coefficient interpolation in time.
    pub interpolation: String,
}

impl IterationReport {
    pub fn contracting_from(&self, m: usize) -> bool {
        self.factors
            .iter()
            .skip(m.saturating_sub(1))
            .all(|c| *c < 1.0 || !c.is_finite())
    }
}

fn trajectory<T: Real>(
    initial: &WaveStateDiff<T>,
    dt: T,
    steps: usize,
    eps_chord: T,
) -> Result<Vec<WaveStateDiff<T>>> {
    let flow = DiffFlow { eps_chord };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial.clone());
    for n in 0..steps {
        let next = flow
            .project(&step_rk4(&flow, T::count(n) * dt, &out[n], dt)?)
            .0;
        out.push(next);
    }
    Ok(out)
}

fn sup_distance<T: Real>(a: &[WaveStateDiff<T>], b: &[WaveStateDiff<T>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.sub(y).hnorm(T::zero()).as_f64())
        .fold(0.0, f64::max)
}

/// Builds iterates `0..=m_max` on `[0, t_max]` and compares them with each
/// other and with the direct solver.
pub fn iteration_experiment<T: Real>(
    initial: &WaveStateDiff<T>,
    m_max: usize,
    t_max: T,
    dt: T,
    eps_chord: T,
) -> Result<IterationReport> {
    let steps = (t_max / dt).round().to_usize().unwrap_or(0).max(1);
    let lat = initial.lattice().clone();
    let direct = trajectory(initial, dt, steps, eps_chord)?;
    // Richardson: the same run at twice the step
    let coarse = evolve(
        &DiffFlow { eps_chord },
        initial.clone(),
        dt + dt,
        (steps / 2) as u64,
    )?;
    let fine_end = &direct[2 * (steps / 2)];
    let scale = fine_end
        .hnorm(T::zero())
        .as_f64()
        .max(initial.hnorm(T::zero()).as_f64());
    let richardson = fine_end.sub(&coarse).hnorm(T::zero()).as_f64() / 15.0;
    let truncation_tolerance = richardson.max(1e-12 * scale);

    let mut prev: Vec<WaveStateDiff<T>> = vec![WaveStateDiff::zeros(&lat); steps + 1];
    let mut deltas = Vec::new();
    let mut distance_to_direct = vec![sup_distance(&prev, &direct)];
    for _ in 0..m_max {
        let mut coeffs = Vec::with_capacity(2 * steps + 1);
        for n in 0..=steps {
            coeffs.push(Coefficients::new(&prev[n], eps_chord)?);
            if n < steps {
                coeffs.push(Coefficients::new(&midpoint(&prev, n), eps_chord)?);
            }
        }
        let flow = FrozenFlow {
            coeffs: &coeffs,
            dt,
        };
        let mut next = Vec::with_capacity(steps + 1);
        next.push(initial.clone());
        for n in 0..steps {
            let s = flow
                .project(&step_rk4(&flow, T::count(n) * dt, &next[n], dt)?)
                .0;
            if s.w.is_finite() && s.r.is_finite() {
                next.push(s);
            } else {
                return Err(WaveError::NonFinite {
                    field: "iterate".into(),
                    time: (T::count(n + 1) * dt).as_f64(),
                });
            }
        }
        deltas.push(sup_distance(&next, &prev));
        distance_to_direct.push(sup_distance(&next, &direct));
        prev = next;
    }
    let factors = deltas.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(IterationReport {
        t_max: t_max.as_f64(),
        dt: dt.as_f64(),
        deltas,
        factors,
        distance_to_direct,
        truncation_tolerance,
        interpolation: "cubic Lagrange through four stored steps".into(),
    })
}

/// Error used when no contraction is observed.
pub fn non_contraction(report: &IterationReport) -> WaveError {
    WaveError::NonContraction {
        factors: report.factors.clone(),
    }
}
