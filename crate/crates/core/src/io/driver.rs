use super::config::{
    InitialKind, InitialSection, LinearizedModeName, ModeSpec, OutputFormat, SimulationSpec, System,
};
use super::export::{format_float, write_json, write_series_csv, write_table_csv, Manifest};
use super::snapshot::{export_snapshot, load_snapshot_into, Snapshot};
use super::{serialize_spec, IoError, IoResult};
use crate::dynamics::{LinState, WaveStateDiff, WaveStateUndiff};
use crate::lab::{
    iteration_experiment, lemma_suite, random_lin_state, random_state, random_undiff_state,
    refinement_experiment, trial_rng, RandomStateSpec, RefinementSpec, Suite,
};
use crate::linearized::LinearizedMode;
use crate::scalar::Cplx;
use crate::spectral::{Lattice, QpFunction};
use crate::timestepper::{
    dispersion_probe, integrate, Checkpoint, DiffFlow, DiffMonitor, FrozenLinearFlow, Integration,
    LinMonitor, ProjectorPolicy, RunConfig, UndiffFlow,
};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

/// Environment variable overriding the output directory of the spec.
pub const OUTPUT_DIR_ENV: &str = "QPWW_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    LemmaSuite,
    Iterate,
    Refine,
    Dispersion,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::LemmaSuite => "lemma-suite",
            Self::Iterate => "iterate",
            Self::Refine => "refine",
            Self::Dispersion => "dispersion",
        }
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Output directory; takes precedence over [`OUTPUT_DIR_ENV`] and the
    /// spec.
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// Directory relative paths in the spec are resolved against.
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output_dir: PathBuf,
    pub error: Option<String>,
    pub artifacts: Vec<String>,
}

struct Sink {
    dir: PathBuf,
    artifacts: Vec<String>,
    formats: Vec<OutputFormat>,
}

impl Sink {
    fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
    fn path(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        self.dir.join(name)
    }
}

/// Runs `command` and writes its artifacts. Never panics on bad input:
/// failures become a nonzero exit code and an error in the manifest, and
/// whatever was computed before the failure is still written.
pub fn run(command: Command, spec: &SimulationSpec, opts: &RunOptions) -> RunOutcome {
    let start = Instant::now();
    let mut spec = spec.clone();
    match command {
        Command::LemmaSuite => drop(spec.lemma_suite.get_or_insert_with(Default::default)),
        Command::Iterate => drop(spec.iterate.get_or_insert_with(Default::default)),
        Command::Refine => drop(spec.refine.get_or_insert_with(Default::default)),
        Command::Dispersion => drop(spec.dispersion.get_or_insert_with(Default::default)),
        Command::Simulate => {}
    }
    if let Some(seed) = opts.seed {
        spec.override_seed(seed);
    }
    let dir = opts
        .output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(&spec.output.directory));
    let mut sink = Sink {
        dir: dir.clone(),
        artifacts: Vec::new(),
        formats: spec.output.formats.clone(),
    };
    let result = std::fs::create_dir_all(&dir)
        .map_err(IoError::from)
        .and_then(|_| spec.validate())
        .and_then(|_| with_threads(opts.threads, || dispatch(command, &spec, opts, &mut sink)));
    let (exit_code, error) = match &result {
        Ok(()) => (0, None),
        Err(e) => (e.exit_code(), Some(e.to_string())),
    };
    let text = serialize_spec(&spec);
    let manifest = Manifest {
        command: command.name().into(),
        spec_hash: Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect(),
        spec: text,
        code_version: env!("CARGO_PKG_VERSION").into(),
        seed: spec.seed(),
        threads: opts.threads,
        wall_time_s: start.elapsed().as_secs_f64(),
        exit_code,
        error: error.clone(),
        artifacts: sink.artifacts.clone(),
    };
    let mut artifacts = sink.artifacts.clone();
    let manifest_path = sink.path("manifest.json");
    if let Err(e) = write_json(&manifest_path, &manifest) {
        log::error!("could not write manifest: {e}");
    } else {
        artifacts.push("manifest.json".into());
    }
    if let Some(e) = &error {
        log::error!("{} failed: {e}", command.name());
    }
    RunOutcome {
        exit_code,
        output_dir: dir,
        error,
        artifacts,
    }
}

fn with_threads<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> IoResult<R> + Send,
) -> IoResult<R> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| IoError::validation("threads", e.to_string()))?
            .install(f),
        None => f(),
    }
}

fn dispatch(
    command: Command,
    spec: &SimulationSpec,
    opts: &RunOptions,
    sink: &mut Sink,
) -> IoResult<()> {
    match command {
        Command::Simulate => simulate(spec, opts, sink),
        Command::LemmaSuite => run_lemma_suite(spec, sink),
        Command::Iterate => run_iterate(spec, sink),
        Command::Refine => run_refine(spec, sink),
        Command::Dispersion => run_dispersion(spec, sink),
    }
}

fn require<'a, S>(section: &'a Option<S>, name: &str) -> IoResult<&'a S> {
    section
        .as_ref()
        .ok_or_else(|| IoError::validation(name, "section required by this command"))
}

fn modes_to_function(lat: &Arc<Lattice<f64>>, modes: &[ModeSpec]) -> QpFunction<f64> {
    let mut u = QpFunction::zeros(lat);
    for m in modes {
        let p = lat.index_of(&m.j).expect("validated mode index");
        u.coeffs_mut()[p] += Cplx::new(m.re, m.im);
    }
    u
}

fn warn_if_projected(leakage: f64) {
    if leakage > 0.0 {
        log::warn!(
            "initial data outside the admissible class; projected (removed L2 size {leakage:e})"
        );
    }
}

fn initial_pair(
    init: &InitialSection,
    lat: &Arc<Lattice<f64>>,
    second: &[ModeSpec],
) -> (QpFunction<f64>, QpFunction<f64>) {
    (
        modes_to_function(lat, &init.w),
        modes_to_function(lat, second),
    )
}

fn initial_diff(init: &InitialSection, lat: &Arc<Lattice<f64>>, s: f64) -> WaveStateDiff<f64> {
    let state = match init.kind {
        InitialKind::Modes => {
            let (w, r) = initial_pair(init, lat, &init.r);
            WaveStateDiff::new(w, r)
        }
        InitialKind::Random => {
            let spec = RandomStateSpec::new(s, init.target_a.unwrap_or(0.0))
                .with_decay(init.decay.unwrap_or(s + 1.0))
                .with_band(init.band);
            random_state(lat, &spec, &mut trial_rng(init.seed.unwrap_or(0), 0))
        }
    };
    warn_if_projected(state.leakage());
    state.projected()
}

fn initial_undiff(init: &InitialSection, lat: &Arc<Lattice<f64>>, s: f64) -> WaveStateUndiff<f64> {
    let state = match init.kind {
        InitialKind::Modes => {
            let (w, q) = initial_pair(init, lat, &init.q);
            WaveStateUndiff::new(w, q)
        }
        InitialKind::Random => random_undiff_state(
            lat,
            init.decay.unwrap_or(s + 1.0),
            init.target_a.unwrap_or(0.0),
            init.band,
            &mut trial_rng(init.seed.unwrap_or(0), 0),
        ),
    };
    warn_if_projected(state.leakage());
    state.projected()
}

fn initial_lin(init: &InitialSection, lat: &Arc<Lattice<f64>>, s: f64) -> LinState<f64> {
    let state = match init.kind {
        InitialKind::Modes => {
            let (w, r) = initial_pair(init, lat, &init.r);
            LinState::new(w, r)
        }
        InitialKind::Random => random_lin_state(
            lat,
            init.decay.unwrap_or(s + 1.0),
            init.band,
            &mut trial_rng(init.seed.unwrap_or(0), 0),
        )
        .scaled(init.target_a.unwrap_or(0.0)),
    };
    warn_if_projected(state.leakage());
    state.projected()
}

/// Writes the series, the checkpoints and the last good state, then
/// reports the integration error if there was one.
fn finish<S>(
    sink: &mut Sink,
    run: Integration<S>,
    to_snapshot: impl Fn(&S, u64, f64) -> Snapshot,
) -> IoResult<()> {
    if sink.wants(OutputFormat::Csv) {
        let p = sink.path("series.csv");
        write_series_csv(&p, &run.series)?;
    }
    if sink.wants(OutputFormat::Snapshot) {
        for Checkpoint { step, time, state } in &run.checkpoints {
            let p = sink.path(&format!("checkpoint_{step:08}.qpww"));
            export_snapshot(&to_snapshot(state, *step, *time), &p)?;
        }
        let p = sink.path("final.qpww");
        export_snapshot(&to_snapshot(&run.state, run.step, run.time), &p)?;
    }
    match run.error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn simulate(spec: &SimulationSpec, opts: &RunOptions, sink: &mut Sink) -> IoResult<()> {
    let lat = require(&spec.lattice, "lattice")?.build()?;
    let init = require(&spec.initial, "initial")?;
    let dy = require(&spec.dynamics, "dynamics")?;
    let mut cfg = RunConfig::new(dy.dt, dy.t_max);
    cfg.projector_policy = match dy.projector_period {
        1 => ProjectorPolicy::EveryStep,
        k => ProjectorPolicy::EveryKSteps(k),
    };
    cfg.monitor_stride = spec.output.stride;
    cfg.eps_chord = dy.eps_chord;
    cfg.c_stab = dy.c_stab;
    cfg.checkpoint_times = spec.output.checkpoint_times.clone();
    cfg.check(lat.max_abs_xi())
        .map_err(|e| IoError::validation("dynamics.dt", e.to_string()))?;
    let monitor = DiffMonitor {
        s: dy.s,
        energy_orders: dy.energy_orders.clone(),
        eps_chord: dy.eps_chord,
    };
    match dy.system {
        System::Diff => {
            let u0 = initial_diff(init, &lat, dy.s);
            let run = integrate(
                &DiffFlow {
                    eps_chord: dy.eps_chord,
                },
                &monitor,
                u0,
                &cfg,
            )?;
            finish(sink, run, Snapshot::from_diff)
        }
        System::Undiff => {
            let u0 = initial_undiff(init, &lat, dy.s);
            let run = integrate(
                &UndiffFlow {
                    eps_chord: dy.eps_chord,
                },
                &monitor,
                u0,
                &cfg,
            )?;
            finish(sink, run, Snapshot::from_undiff)
        }
        System::Linearized => {
            let path = opts
                .base_dir
                .join(dy.background.as_deref().unwrap_or_default());
            if !path.exists() {
                return Err(IoError::validation(
                    "dynamics.background",
                    format!("{} does not exist", path.display()),
                ));
            }
            let bg = load_snapshot_into(&path, &lat)?.into_diff()?;
            let mode = match dy.mode {
                LinearizedModeName::Full => LinearizedMode::Full,
                LinearizedModeName::Reduced => LinearizedMode::Reduced,
            };
            let flow = FrozenLinearFlow::new(&bg, dy.eps_chord, mode)?;
            let monitor = LinMonitor {
                aux: flow.op.aux().clone(),
            };
            let u0 = initial_lin(init, &lat, dy.s);
            let run = integrate(&flow, &monitor, u0, &cfg)?;
            finish(sink, run, Snapshot::from_lin)
        }
    }
}

fn run_lemma_suite(spec: &SimulationSpec, sink: &mut Sink) -> IoResult<()> {
    let default = Default::default();
    let ls = spec.lemma_suite.as_ref().unwrap_or(&default);
    let mut suite = Suite::golden(ls.d, ls.n, ls.s, ls.radius, ls.seed, ls.trials)?;
    suite.dt = ls.dt;
    if let Some(p) = ls.decay {
        suite.decay = p;
    }
    let ids: Vec<&str> = ls.ids.iter().map(|s| s.as_str()).collect();
    let reports = lemma_suite(&suite, &ids)?;
    if sink.wants(OutputFormat::Csv) {
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    r.lemma.clone(),
                    r.params.seed.to_string(),
                    r.params.d.to_string(),
                    r.params.n.to_string(),
                    format_float(r.params.s),
                    format_float(r.params.radius),
                    r.trials.to_string(),
                    r.discarded.to_string(),
                    format_float(r.max_ratio),
                ]
            })
            .collect();
        let p = sink.path("report.csv");
        write_table_csv(
            &p,
            &[
                "lemma",
                "seed",
                "d",
                "n",
                "s",
                "radius",
                "trials",
                "discarded",
                "max_ratio",
            ],
            &rows,
        )?;
        let rows: Vec<Vec<String>> = reports
            .iter()
            .flat_map(|r| {
                r.ratios
                    .iter()
                    .enumerate()
                    .map(move |(i, x)| vec![r.lemma.clone(), i.to_string(), format_float(*x)])
            })
            .collect();
        let p = sink.path("ratios.csv");
        write_table_csv(&p, &["lemma", "sample", "ratio"], &rows)?;
    }
    if sink.wants(OutputFormat::Json) {
        let p = sink.path("report.json");
        write_json(&p, &reports)?;
    }
    Ok(())
}

fn run_iterate(spec: &SimulationSpec, sink: &mut Sink) -> IoResult<()> {
    let default = Default::default();
    let it = spec.iterate.as_ref().unwrap_or(&default);
    let lat = SimulationSpec::experiment_lattice(it.d, it.n)?;
    if lat.index_of(&it.j).is_none() {
        return Err(IoError::validation("iterate.j", "outside the box"));
    }
    let w = QpFunction::mode(&lat, &it.j, Cplx::new(it.amplitude, 0.0));
    let r = QpFunction::mode(&lat, &it.j, Cplx::new(0.0, it.amplitude));
    let u0 = WaveStateDiff::new(w, r);
    warn_if_projected(u0.leakage());
    let report = iteration_experiment(
        &u0.projected(),
        it.m_max,
        it.t_max,
        it.dt,
        crate::dynamics::DEFAULT_EPS_CHORD,
    )?;
    if sink.wants(OutputFormat::Csv) {
        let rows: Vec<Vec<String>> = (0..report.distance_to_direct.len())
            .map(|m| {
                let opt = |v: Option<&f64>| v.map(|x| format_float(*x)).unwrap_or_default();
                vec![
                    m.to_string(),
                    opt(report.deltas.get(m)),
                    opt(m.checked_sub(1).and_then(|i| report.factors.get(i))),
                    format_float(report.distance_to_direct[m]),
                ]
            })
            .collect();
        let p = sink.path("report.csv");
        write_table_csv(&p, &["m", "delta", "factor", "distance_to_direct"], &rows)?;
    }
    if sink.wants(OutputFormat::Json) {
        let p = sink.path("report.json");
        write_json(&p, &report)?;
    }
    if !report.factors.is_empty() && report.factors.iter().all(|c| *c >= 1.0) {
        return Err(crate::lab::iteration::non_contraction(&report).into());
    }
    Ok(())
}

fn run_refine(spec: &SimulationSpec, sink: &mut Sink) -> IoResult<()> {
    let default = Default::default();
    let rs = spec.refine.as_ref().unwrap_or(&default);
    let mut rspec = RefinementSpec::new(rs.s, rs.n_list.clone());
    rspec.decay = rs.decay.unwrap_or(rs.s + 1.0);
    rspec.target_a = rs.target_a;
    rspec.seed = rs.seed;
    rspec.t_max = rs.t_max;
    rspec.dt = rs.dt;
    let report = refinement_experiment(&rspec)?;
    if sink.wants(OutputFormat::Csv) {
        let rows: Vec<Vec<String>> = (0..report.n.len())
            .map(|i| {
                vec![
                    report.n[i].to_string(),
                    format_float(report.distance_h0[i]),
                    format_float(report.distance_hs[i]),
                    format_float(report.envelope_ratio[i]),
                ]
            })
            .collect();
        let p = sink.path("report.csv");
        write_table_csv(
            &p,
            &["n", "distance_h0", "distance_hs", "envelope_ratio"],
            &rows,
        )?;
    }
    if sink.wants(OutputFormat::Json) {
        let p = sink.path("report.json");
        write_json(&p, &report)?;
    }
    Ok(())
}

fn run_dispersion(spec: &SimulationSpec, sink: &mut Sink) -> IoResult<()> {
    let default = Default::default();
    let ds = spec.dispersion.as_ref().unwrap_or(&default);
    let lat = SimulationSpec::experiment_lattice(ds.d, ds.n)?;
    let cfg = RunConfig::new(ds.dt, ds.t_max.unwrap_or(0.0));
    let mut rows = Vec::new();
    for (i, j) in ds.modes.iter().enumerate() {
        let p = lat.index_of(j).ok_or_else(|| {
            IoError::validation(&format!("dispersion.modes[{i}]"), "outside the box")
        })?;
        let xi = lat.xi()[p];
        let omega = dispersion_probe(&lat, j, ds.amplitude, &cfg)?.unwrap_or(f64::NAN);
        let expected = xi.abs().sqrt();
        let label: Vec<String> = j.iter().map(|x| x.to_string()).collect();
        rows.push(vec![
            label.join(";"),
            format_float(xi),
            format_float(omega),
            format_float(expected),
            format_float((omega - expected).abs() / expected),
        ]);
    }
    let p = sink.path("report.csv");
    write_table_csv(
        &p,
        &["j", "xi", "omega", "omega_expected", "rel_error"],
        &rows,
    )?;
    Ok(())
}
