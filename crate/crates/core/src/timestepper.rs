//! Fixed-step RK4 integration of the nonlinear, undifferentiated and
//! linearized flows, with monitoring and in-memory checkpoints.

use crate::dynamics::{
    control_params, differentiate_state, energy_ek, rhs_diff, rhs_undiff, AuxFields, LinState,
    WaveStateDiff, WaveStateUndiff,
};
use crate::error::{Result, WaveError};
use crate::linearized::{
    energy_e0, energy_elin_with, h0_norm2, zero_background_invariant, LinearizedMode,
    LinearizedOperator, PrincipalFactor,
};
use crate::scalar::Real;
use crate::spectral::QpFunction;

/// Vector-space operations the integrator needs from a state.
pub trait StateVector<T: Real>: Clone + Send + Sync {
    /// `self += a * x`.
    fn axpy(&mut self, a: T, x: &Self);
    /// Name of the first field holding a NaN or infinity.
    fn nonfinite_field(&self) -> Option<&'static str>;
}

/// An autonomous or nonautonomous evolution `u_t = rhs(t, u)`.
pub trait Flow<T: Real> {
    type State: StateVector<T>;
    fn rhs(&self, t: T, state: &Self::State) -> Result<Self::State>;
    /// Projection onto the admissible class, returning the projected state
    /// and the size of what was removed.
    fn project(&self, state: &Self::State) -> (Self::State, T);
}

/// Nonlinear differentiated system.
#[derive(Clone, Copy, Debug)]
pub struct DiffFlow<T> {
    pub eps_chord: T,
}

impl<T: Real> Flow<T> for DiffFlow<T> {
    type State = WaveStateDiff<T>;
    fn rhs(&self, _t: T, s: &Self::State) -> Result<Self::State> {
        rhs_diff(s, self.eps_chord)
    }
    fn project(&self, s: &Self::State) -> (Self::State, T) {
        (s.projected(), s.leakage())
    }
}

/// Nonlinear undifferentiated system.
#[derive(Clone, Copy, Debug)]
pub struct UndiffFlow<T> {
    pub eps_chord: T,
}

impl<T: Real> Flow<T> for UndiffFlow<T> {
    type State = WaveStateUndiff<T>;
    fn rhs(&self, _t: T, s: &Self::State) -> Result<Self::State> {
        rhs_undiff(s, self.eps_chord)
    }
    fn project(&self, s: &Self::State) -> (Self::State, T) {
        (s.projected(), s.leakage())
    }
}

/// Linearized equations around a background frozen in time.
#[derive(Clone, Debug)]
pub struct FrozenLinearFlow<T: Real> {
    pub op: LinearizedOperator<T>,
    pub mode: LinearizedMode,
}

impl<T: Real> FrozenLinearFlow<T> {
    pub fn new(bg: &WaveStateDiff<T>, eps_chord: T, mode: LinearizedMode) -> Result<Self> {
        Ok(Self {
            op: LinearizedOperator::new(bg, eps_chord, PrincipalFactor::OnePlusW)?,
            mode,
        })
    }
}

impl<T: Real> Flow<T> for FrozenLinearFlow<T> {
    type State = LinState<T>;
    fn rhs(&self, _t: T, s: &Self::State) -> Result<Self::State> {
        Ok(self.op.apply(s, self.mode, None).projected())
    }
    fn project(&self, s: &Self::State) -> (Self::State, T) {
        (s.projected(), s.leakage())
    }
}

/// A background solution together with a linearized perturbation riding
/// on it.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledState<T: Real> {
    pub bg: WaveStateDiff<T>,
    pub lin: LinState<T>,
}

impl<T: Real> StateVector<T> for CoupledState<T> {
    fn axpy(&mut self, a: T, x: &Self) {
        self.bg.axpy(a, &x.bg);
        self.lin.axpy(a, &x.lin);
    }
    fn nonfinite_field(&self) -> Option<&'static str> {
        self.bg
            .nonfinite_field()
            .or_else(|| self.lin.nonfinite_field())
    }
}

/// Background evolving under the nonlinear flow and the full linearized
/// equations around it.
#[derive(Clone, Copy, Debug)]
pub struct CoupledLinearFlow<T> {
    pub eps_chord: T,
}

impl<T: Real> Flow<T> for CoupledLinearFlow<T> {
    type State = CoupledState<T>;
    fn rhs(&self, _t: T, s: &Self::State) -> Result<Self::State> {
        let op = LinearizedOperator::new(&s.bg, self.eps_chord, PrincipalFactor::OnePlusW)?;
        let bg = crate::dynamics::rhs::rhs_diff_with(&s.bg, op.aux());
        let lin = op.apply(&s.lin, LinearizedMode::Full, None).projected();
        Ok(CoupledState { bg, lin })
    }
    fn project(&self, s: &Self::State) -> (Self::State, T) {
        let a = s.bg.leakage();
        let b = s.lin.leakage();
        (
            CoupledState {
                bg: s.bg.projected(),
                lin: s.lin.projected(),
            },
            (a * a + b * b).sqrt(),
        )
    }
}

/// Classical four-stage Runge-Kutta step.
pub fn step_rk4<F: Flow<T>, T: Real>(flow: &F, t: T, u: &F::State, dt: T) -> Result<F::State> {
    let half = dt * T::lit(0.5);
    let k1 = flow.rhs(t, u)?;
    let mut u2 = u.clone();
    u2.axpy(half, &k1);
    let k2 = flow.rhs(t + half, &u2)?;
    let mut u3 = u.clone();
    u3.axpy(half, &k2);
    let k3 = flow.rhs(t + half, &u3)?;
    let mut u4 = u.clone();
    u4.axpy(dt, &k3);
    let k4 = flow.rhs(t + dt, &u4)?;
    let sixth = dt / T::lit(6.0);
    let mut out = u.clone();
    out.axpy(sixth, &k1);
    out.axpy(sixth + sixth, &k2);
    out.axpy(sixth + sixth, &k3);
    out.axpy(sixth, &k4);
    Ok(out)
}

/// When to apply the admissible-class projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorPolicy {
    EveryStep,
    EveryKSteps(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Rk4,
}

/// Parameters of a fixed-step run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig<T> {
    pub dt: T,
    pub t_max: T,
    pub projector_policy: ProjectorPolicy,
    pub monitor_stride: u64,
    pub eps_chord: T,
    pub integrator: Integrator,
    /// Constant in the heuristic `dt <= c_stab / sqrt(max |xi|)`.
    pub c_stab: T,
    /// Times at which the state is kept as a checkpoint.
    pub checkpoint_times: Vec<T>,
}

impl<T: Real> RunConfig<T> {
    pub fn new(dt: T, t_max: T) -> Self {
        Self {
            dt,
            t_max,
            projector_policy: ProjectorPolicy::EveryStep,
            monitor_stride: 1,
            eps_chord: T::lit(crate::dynamics::DEFAULT_EPS_CHORD),
            integrator: Integrator::Rk4,
            c_stab: T::lit(2.0),
            checkpoint_times: Vec::new(),
        }
    }

    /// Number of steps covering `[0, t_max]`.
    pub fn steps(&self) -> u64 {
        (self.t_max / self.dt).round().to_u64().unwrap_or(0)
    }

    /// Largest step allowed by the dispersion heuristic on a box with the
    /// given `max |xi|`.
    pub fn dt_limit(&self, max_abs_xi: T) -> T {
        self.c_stab / max_abs_xi.max(T::one()).sqrt()
    }

    pub fn check(&self, max_abs_xi: T) -> Result<()> {
        if !(self.dt > T::zero()) || !(self.t_max >= T::zero()) || self.monitor_stride == 0 {
            return Err(WaveError::InvalidArgument(
                "dt must be positive, t_max nonnegative and monitor_stride >= 1".into(),
            ));
        }
        if let ProjectorPolicy::EveryKSteps(0) = self.projector_policy {
            return Err(WaveError::InvalidArgument(
                "projector period must be >= 1".into(),
            ));
        }
        let limit = self.dt_limit(max_abs_xi);
        if self.dt > limit {
            return Err(WaveError::InvalidArgument(format!(
                "dt = {} exceeds the stability limit {} for max |xi| = {}",
                self.dt, limit, max_abs_xi
            )));
        }
        Ok(())
    }

    fn checkpoint_steps(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .checkpoint_times
            .iter()
            .filter_map(|t| (*t / self.dt).round().to_u64())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Sampled diagnostics, one row per sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Produces one row of diagnostics for a state.
pub trait Monitor<S> {
    fn columns(&self) -> Vec<String>;
    fn sample(&self, step: u64, t: f64, state: &S, leakage: f64) -> Result<Vec<f64>>;
}

/// Diagnostics of a differentiated state: Sobolev sizes, control
/// parameters, higher energies, `min a`, `min |1+W|` and leakage.
#[derive(Clone, Debug)]
pub struct DiffMonitor<T> {
    pub s: T,
    pub energy_orders: Vec<usize>,
    pub eps_chord: T,
}

impl<T: Real> DiffMonitor<T> {
    fn columns_impl(&self) -> Vec<String> {
        let mut c: Vec<String> = [
            "step",
            "t",
            "W_Hs",
            "W_Hs_half",
            "R_Hs",
            "R_Hs_half",
            "A",
            "B",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        c.extend(self.energy_orders.iter().map(|k| format!("E{k}")));
        c.extend(
            ["min_a", "min_chord", "leakage"]
                .iter()
                .map(|s| s.to_string()),
        );
        c
    }

    fn sample_impl(
        &self,
        step: u64,
        t: f64,
        s: &WaveStateDiff<T>,
        leakage: f64,
    ) -> Result<Vec<f64>> {
        let half = T::lit(0.5);
        let (a, b) = control_params(s, self.s);
        let mut row = vec![
            step as f64,
            t,
            s.w.norm(self.s, T::zero()).as_f64(),
            s.w.norm(self.s, half).as_f64(),
            s.r.norm(self.s, T::zero()).as_f64(),
            s.r.norm(self.s, half).as_f64(),
            a.as_f64(),
            b.as_f64(),
        ];
        for &k in &self.energy_orders {
            row.push(energy_ek(s, k, self.eps_chord)?.as_f64());
        }
        let aux = AuxFields::compute(s, self.eps_chord)?;
        row.push(aux.a.min_re_on_grid().as_f64());
        row.push(s.w.one_plus().lift().min_abs().as_f64());
        row.push(leakage);
        Ok(row)
    }
}

impl<T: Real> Monitor<WaveStateDiff<T>> for DiffMonitor<T> {
    fn columns(&self) -> Vec<String> {
        self.columns_impl()
    }
    fn sample(&self, step: u64, t: f64, s: &WaveStateDiff<T>, leakage: f64) -> Result<Vec<f64>> {
        self.sample_impl(step, t, s, leakage)
    }
}

impl<T: Real> Monitor<WaveStateUndiff<T>> for DiffMonitor<T> {
    fn columns(&self) -> Vec<String> {
        self.columns_impl()
    }
    fn sample(&self, step: u64, t: f64, u: &WaveStateUndiff<T>, leakage: f64) -> Result<Vec<f64>> {
        let s = differentiate_state(u, self.eps_chord)?;
        self.sample_impl(step, t, &s, leakage)
    }
}

/// Energies of a linearized state around a frozen background.
#[derive(Clone, Debug)]
pub struct LinMonitor<T: Real> {
    pub aux: AuxFields<T>,
}

impl<T: Real> Monitor<LinState<T>> for LinMonitor<T> {
    fn columns(&self) -> Vec<String> {
        [
            "step",
            "t",
            "E0",
            "E0_invariant",
            "Elin",
            "H0_norm2",
            "leakage",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }
    fn sample(&self, step: u64, t: f64, s: &LinState<T>, leakage: f64) -> Result<Vec<f64>> {
        Ok(vec![
            step as f64,
            t,
            energy_e0(s).as_f64(),
            zero_background_invariant(s).as_f64(),
            energy_elin_with(&self.aux, s).as_f64(),
            h0_norm2(s).as_f64(),
            leakage,
        ])
    }
}

/// State kept at a configured time.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint<S> {
    pub step: u64,
    pub time: f64,
    pub state: S,
}

/// Result of [`integrate`]. On failure `state` is the last good state and
/// `error` says why the run stopped.
#[derive(Clone, Debug)]
pub struct Integration<S> {
    pub series: TimeSeries,
    pub state: S,
    pub step: u64,
    pub time: f64,
    pub checkpoints: Vec<Checkpoint<S>>,
    pub error: Option<WaveError>,
}

impl<S> Integration<S> {
    pub fn into_result(self) -> Result<Self> {
        match &self.error {
            Some(e) => Err(e.clone()),
            None => Ok(self),
        }
    }
}

/// Runs `flow` from `initial` on `[0, t_max]`.
pub fn integrate<F, M, T>(
    flow: &F,
    monitor: &M,
    initial: F::State,
    cfg: &RunConfig<T>,
) -> Result<Integration<F::State>>
where
    F: Flow<T>,
    M: Monitor<F::State>,
    T: Real,
{
    integrate_from(flow, monitor, initial, 0, cfg)
}

/// Resumes at `start_step`. Times are `step * dt`, so resuming from a
/// checkpoint reproduces an uninterrupted run exactly.
pub fn integrate_from<F, M, T>(
    flow: &F,
    monitor: &M,
    initial: F::State,
    start_step: u64,
    cfg: &RunConfig<T>,
) -> Result<Integration<F::State>>
where
    F: Flow<T>,
    M: Monitor<F::State>,
    T: Real,
{
    let Integrator::Rk4 = cfg.integrator;
    if !(cfg.dt > T::zero()) || cfg.monitor_stride == 0 {
        return Err(WaveError::InvalidArgument(
            "dt must be positive and monitor_stride >= 1".into(),
        ));
    }
    let total = cfg.steps();
    let checkpoint_steps = cfg.checkpoint_steps();
    let time_of = |step: u64| T::from_u64(step).expect("step count") * cfg.dt;
    let mut series = TimeSeries::new(monitor.columns());
    let mut checkpoints = Vec::new();
    let mut state = initial;
    let mut step = start_step;
    let mut leakage = T::zero();
    if let Some(field) = state.nonfinite_field() {
        return Err(WaveError::NonFinite {
            field: field.into(),
            time: time_of(step).as_f64(),
        });
    }
    series
        .rows
        .push(monitor.sample(step, time_of(step).as_f64(), &state, 0.0)?);
    if checkpoint_steps.binary_search(&step).is_ok() {
        checkpoints.push(Checkpoint {
            step,
            time: time_of(step).as_f64(),
            state: state.clone(),
        });
    }
    let mut error = None;
    while step < total {
        let t = time_of(step);
        let mut next = match step_rk4(flow, t, &state, cfg.dt) {
            Ok(n) => n,
            Err(e) => {
                error = Some(e);
                break;
            }
        };
        let project_now = match cfg.projector_policy {
            ProjectorPolicy::EveryStep => true,
            ProjectorPolicy::EveryKSteps(k) => (step + 1).is_multiple_of(k),
        };
        if project_now {
            let (p, l) = flow.project(&next);
            next = p;
            leakage = l;
        }
        let t_next = time_of(step + 1);
        if let Some(field) = next.nonfinite_field() {
            error = Some(WaveError::NonFinite {
                field: field.into(),
                time: t_next.as_f64(),
            });
            break;
        }
        step += 1;
        let last = step == total;
        if step.is_multiple_of(cfg.monitor_stride) || last {
            match monitor.sample(step, t_next.as_f64(), &next, leakage.as_f64()) {
                Ok(row) => series.rows.push(row),
                Err(e) => {
                    state = next;
                    error = Some(e);
                    break;
                }
            }
        }
        if checkpoint_steps.binary_search(&step).is_ok() {
            checkpoints.push(Checkpoint {
                step,
                time: t_next.as_f64(),
                state: next.clone(),
            });
        }
        state = next;
    }
    Ok(Integration {
        series,
        time: time_of(step).as_f64(),
        state,
        step,
        checkpoints,
        error,
    })
}

/// Runs a flow without monitoring and returns the final state.
pub fn evolve<F: Flow<T>, T: Real>(
    flow: &F,
    initial: F::State,
    dt: T,
    steps: u64,
) -> Result<F::State> {
    let mut s = initial;
    for n in 0..steps {
        let t = T::from_u64(n).expect("step count") * dt;
        s = flow.project(&step_rk4(flow, t, &s, dt)?).0;
    }
    Ok(s)
}

/// Measured oscillation frequency of the lattice mode `j` under the
/// nonlinear differentiated flow started from `W = amplitude e^{i<j,alpha>}`,
/// `R = 0`. Returns `None` when no oscillation can be measured (zero
/// amplitude).
///
/// With samples `x_n` of the mode spaced by `h`, every solution of
/// `x'' = -omega^2 x` obeys `x_{n+1} + x_{n-1} = 2 cos(omega h) x_n`; the
/// least-squares fit of that recurrence gives `omega`.
pub fn dispersion_probe<T: Real>(
    state_lattice: &std::sync::Arc<crate::spectral::Lattice<T>>,
    j: &[i64],
    amplitude: T,
    cfg: &RunConfig<T>,
) -> Result<Option<T>> {
    let p = state_lattice
        .index_of(j)
        .ok_or_else(|| WaveError::InvalidArgument(format!("mode {j:?} outside the box")))?;
    let mu = state_lattice.xi()[p];
    if !(mu < T::zero()) {
        return Err(WaveError::InvalidArgument(
            "dispersion probe needs <j,k> < 0".into(),
        ));
    }
    if amplitude == T::zero() {
        return Ok(None);
    }
    let omega_guess = (-mu).sqrt();
    let stride = ((T::lit(0.5) / omega_guess / cfg.dt)
        .round()
        .to_u64()
        .unwrap_or(1))
    .max(1);
    let h = T::from_u64(stride).expect("stride") * cfg.dt;
    let steps = cfg.steps().max(2 * stride);
    let flow = DiffFlow {
        eps_chord: cfg.eps_chord,
    };
    let mut s = WaveStateDiff::new(
        QpFunction::mode(state_lattice, j, crate::scalar::cplx(amplitude, T::zero())),
        QpFunction::zeros(state_lattice),
    );
    let mut samples = vec![s.w.coeffs()[p]];
    for n in 0..steps {
        let t = T::from_u64(n).expect("step count") * cfg.dt;
        s = flow.project(&step_rk4(&flow, t, &s, cfg.dt)?).0;
        if (n + 1) % stride == 0 {
            samples.push(s.w.coeffs()[p]);
        }
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for n in 1..samples.len() - 1 {
        let x = samples[n];
        num = num + (x.conj() * (samples[n + 1] + samples[n - 1])).re;
        den = den + x.norm_sqr();
    }
    if den == T::zero() {
        return Ok(None);
    }
    let c = (num / (den + den)).max(-T::one()).min(T::one());
    Ok(Some(c.acos() / h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{golden_frequencies, validate_lattice};
    use num_complex::Complex;

    #[test]
    fn zero_state_is_fixed() {
        let lat = validate_lattice(&golden_frequencies::<f64>(), 4, 1e-12).unwrap();
        let flow = DiffFlow { eps_chord: 1e-6 };
        let z = WaveStateDiff::zeros(&lat);
        assert_eq!(step_rk4(&flow, 0.0, &z, 0.01).unwrap(), z);
    }

    #[test]
    fn single_mode_matches_matrix_exponential() {
        // w_t = -i mu r, r_t = i w for one mode; exact propagator is a rotation
        let lat = validate_lattice(&golden_frequencies::<f64>(), 3, 1e-12).unwrap();
        let j = [-1i64, -1];
        let mu: f64 = lat.xi()[lat.index_of(&j).unwrap()];
        let om = (-mu).sqrt();
        let flow =
            FrozenLinearFlow::new(&WaveStateDiff::zeros(&lat), 1e-6, LinearizedMode::Full).unwrap();
        let (w0, r0) = (Complex::new(0.3, -0.1), Complex::new(0.2, 0.4));
        let lin = LinState::new(
            QpFunction::mode(&lat, &j, w0),
            QpFunction::mode(&lat, &j, r0),
        );
        for dt in [0.02, 0.01] {
            let out = step_rk4(&flow, 0.0, &lin, dt).unwrap();
            let (c, s) = ((om * dt).cos(), (om * dt).sin());
            // x'' = -om^2 x with w' = -i mu r, r' = i w
            let w = w0 * c + Complex::new(0.0, -mu) * r0 * (s / om);
            let r = r0 * c + Complex::new(0.0, 1.0) * w0 * (s / om);
            let ew = (out.w.coeff(&j) - w).norm();
            let er = (out.r.coeff(&j) - r).norm();
            assert!(ew < 0.2 * dt.powi(5) && er < 0.2 * dt.powi(5), "{ew} {er}");
        }
    }

    #[test]
    fn stability_limit() {
        let cfg = RunConfig::new(0.5f64, 1.0);
        assert!(cfg.check(100.0).is_err());
        assert!(RunConfig::new(0.1f64, 1.0).check(100.0).is_ok());
    }
}
