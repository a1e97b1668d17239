//! TOML run specification.
//!
//! ```toml
//! [lattice]
//! k = [1.0, 1.618033988749895]   # base frequencies; d = len(k)
//! n = 8                          # box |j_i| <= n
//!
//! [initial]
//! kind = "modes"                 # or "random"
//! w = [{ j = [-1, 0], re = 0.01 }]
//! r = [{ j = [-1, 0], im = 0.01 }]
//!
//! [dynamics]
//! system = "diff"                # "diff", "undiff" or "linearized"
//! dt = 1e-3
//! t_max = 1.0
//!
//! [output]
//! directory = "out"
//! stride = 10
//! ```

use super::{IoError, IoResult};
use crate::lab::LEMMA_IDS;
use crate::spectral::{golden_frequencies, validate_lattice, Lattice};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    /// Redundant with `k.len()`; filled in when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub k: Vec<f64>,
    pub n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl LatticeSection {
    pub fn build(&self) -> IoResult<Arc<Lattice<f64>>> {
        validate_lattice(&self.k, self.n, self.tol)
            .map_err(|e| IoError::validation("lattice", e.to_string()))
    }
}

/// One Fourier mode of an initial field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub j: Vec<i64>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Modes,
    Random,
}

/// Initial data: explicit modes per unknown (`w`, `r` for the
/// differentiated and linearized systems, `w`, `q` for the
/// undifferentiated one) or a random draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<ModeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r: Vec<ModeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<ModeSpec>,
    /// Coefficient decay exponent; defaults to `s + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    /// Size of the random draw: `A` for the differentiated system,
    /// `||W_alpha||` and `||Q_alpha||` for the undifferentiated one and the
    /// `H^0` norm for the linearized one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    Diff,
    Undiff,
    Linearized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LinearizedModeName {
    #[default]
    Full,
    Reduced,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub system: System,
    #[serde(default = "default_s")]
    pub s: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Apply the admissible-class projection every this many steps.
    #[serde(default = "one")]
    pub projector_period: u64,
    #[serde(default = "default_eps_chord")]
    pub eps_chord: f64,
    #[serde(default = "default_c_stab")]
    pub c_stab: f64,
    /// Orders `k` of the monitored energies `E^k`.
    #[serde(default)]
    pub energy_orders: Vec<usize>,
    /// Background snapshot for the linearized system, relative to the
    /// spec file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<String>,
    #[serde(default)]
    pub mode: LinearizedModeName,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    Snapshot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "one")]
    pub stride: u64,
    #[serde(default)]
    pub checkpoint_times: Vec<f64>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            stride: 1,
            checkpoint_times: Vec::new(),
            formats: default_formats(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSuiteSection {
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default = "eight")]
    pub n: usize,
    #[serde(default = "default_s")]
    pub s: f64,
    /// Radius of the `A`-ball.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "one")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "all_lemmas")]
    pub ids: Vec<String>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Coefficient decay exponent; defaults to `s + 1 + d/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
}

impl Default for LemmaSuiteSection {
    fn default() -> Self {
        Self {
            d: 2,
            n: 8,
            s: default_s(),
            radius: default_radius(),
            seed: 1,
            trials: default_trials(),
            ids: all_lemmas(),
            dt: default_dt(),
            decay: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateSection {
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default = "eight")]
    pub n: usize,
    /// Mode carrying both `W` and `R`.
    #[serde(default = "default_iterate_mode")]
    pub j: Vec<i64>,
    #[serde(default = "default_iterate_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default = "default_iterate_t")]
    pub t_max: f64,
    #[serde(default = "default_iterate_dt")]
    pub dt: f64,
}

impl Default for IterateSection {
    fn default() -> Self {
        Self {
            d: 2,
            n: 8,
            j: default_iterate_mode(),
            amplitude: default_iterate_amplitude(),
            m_max: default_m_max(),
            t_max: default_iterate_t(),
            dt: default_iterate_dt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineSection {
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default = "default_refine_a")]
    pub target_a: f64,
    #[serde(default = "default_refine_seed")]
    pub seed: u64,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_iterate_t")]
    pub t_max: f64,
    #[serde(default = "default_iterate_dt")]
    pub dt: f64,
}

impl Default for RefineSection {
    fn default() -> Self {
        Self {
            s: default_s(),
            decay: None,
            target_a: default_refine_a(),
            seed: default_refine_seed(),
            n_list: default_n_list(),
            t_max: default_iterate_t(),
            dt: default_iterate_dt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default = "sixteen")]
    pub n: usize,
    #[serde(default = "default_dispersion_modes")]
    pub modes: Vec<Vec<i64>>,
    #[serde(default = "default_dispersion_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Observation window; defaults to two periods of the slowest mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

impl Default for DispersionSection {
    fn default() -> Self {
        Self {
            d: 2,
            n: 16,
            modes: default_dispersion_modes(),
            amplitude: default_dispersion_amplitude(),
            dt: default_dt(),
            t_max: None,
        }
    }
}

/// A complete run specification. Sections not used by a command may be
/// omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma_suite: Option<LemmaSuiteSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate: Option<IterateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<RefineSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionSection>,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_s() -> f64 {
    2.1
}
fn one() -> u64 {
    1
}
fn two() -> usize {
    2
}
fn eight() -> usize {
    8
}
fn sixteen() -> usize {
    16
}
fn default_eps_chord() -> f64 {
    crate::dynamics::DEFAULT_EPS_CHORD
}
fn default_c_stab() -> f64 {
    2.0
}
fn default_directory() -> String {
    "qpww-out".into()
}
fn default_formats() -> Vec<OutputFormat> {
    vec![
        OutputFormat::Csv,
        OutputFormat::Json,
        OutputFormat::Snapshot,
    ]
}
fn default_radius() -> f64 {
    0.3
}
fn default_trials() -> usize {
    100
}
fn all_lemmas() -> Vec<String> {
    LEMMA_IDS.iter().map(|s| s.to_string()).collect()
}
fn default_dt() -> f64 {
    1e-3
}
fn default_iterate_mode() -> Vec<i64> {
    vec![-1, 0]
}
fn default_iterate_amplitude() -> f64 {
    0.03
}
fn default_m_max() -> usize {
    7
}
fn default_iterate_t() -> f64 {
    0.1
}
fn default_iterate_dt() -> f64 {
    5e-3
}
fn default_refine_a() -> f64 {
    0.1
}
fn default_refine_seed() -> u64 {
    7
}
fn default_n_list() -> Vec<usize> {
    vec![8, 16, 32]
}
fn default_dispersion_modes() -> Vec<Vec<i64>> {
    vec![vec![-1, 0], vec![-1, -1], vec![-4, 0]]
}
fn default_dispersion_amplitude() -> f64 {
    1e-6
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a spec, filling defaults.
pub fn parse_spec(text: &str) -> IoResult<SimulationSpec> {
    let mut spec: SimulationSpec = toml::from_str(text).map_err(|e| IoError::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    spec.normalize();
    spec.validate()?;
    Ok(spec)
}

/// Canonical TOML form of a spec.
pub fn serialize_spec(spec: &SimulationSpec) -> String {
    toml::to_string(spec).expect("spec is representable in TOML")
}

fn check(ok: bool, field: &str, message: impl Into<String>) -> IoResult<()> {
    if ok {
        Ok(())
    } else {
        Err(IoError::validation(field, message))
    }
}

fn check_modes(modes: &[ModeSpec], d: usize, n: usize, field: &str) -> IoResult<()> {
    for (i, m) in modes.iter().enumerate() {
        let name = format!("{field}[{i}].j");
        check(m.j.len() == d, &name, format!("expected {d} indices"))?;
        check(
            m.j.iter().all(|x| x.unsigned_abs() as usize <= n),
            &name,
            format!("outside the box |j_i| <= {n}"),
        )?;
        check(
            m.re.is_finite() && m.im.is_finite(),
            &format!("{field}[{i}]"),
            "amplitude must be finite",
        )?;
    }
    Ok(())
}

impl SimulationSpec {
    /// Fills redundant fields so that equivalent inputs serialize alike.
    pub fn normalize(&mut self) {
        if let Some(l) = &mut self.lattice {
            l.d = Some(l.k.len());
        }
    }

    /// The golden-ratio lattice used by the experiment sections.
    pub fn experiment_lattice(d: usize, n: usize) -> IoResult<Arc<Lattice<f64>>> {
        check((1..=2).contains(&d), "d", "experiments support d = 1 or 2")?;
        let k: Vec<f64> = golden_frequencies::<f64>().into_iter().take(d).collect();
        validate_lattice(&k, n, 1e-10).map_err(|e| IoError::validation("lattice", e.to_string()))
    }

    /// Checks the sections that are present, including the lattice's
    /// rational independence.
    pub fn validate(&self) -> IoResult<()> {
        if let Some(l) = &self.lattice {
            check(
                l.d.is_none_or(|d| d == l.k.len()),
                "lattice.d",
                "does not match the length of k",
            )?;
            l.build()?;
            if let Some(init) = &self.initial {
                let d = l.k.len();
                check_modes(&init.w, d, l.n, "initial.w")?;
                check_modes(&init.r, d, l.n, "initial.r")?;
                check_modes(&init.q, d, l.n, "initial.q")?;
            }
        }
        if let Some(init) = &self.initial {
            if init.kind == InitialKind::Random {
                check(
                    init.target_a.is_some(),
                    "initial.target_a",
                    "required for random data",
                )?;
                check(
                    init.seed.is_some(),
                    "initial.seed",
                    "required for random data",
                )?;
            }
            if let Some(dy) = &self.dynamics {
                match dy.system {
                    System::Undiff => check(
                        init.r.is_empty(),
                        "initial.r",
                        "the undifferentiated system uses w and q",
                    )?,
                    _ => check(init.q.is_empty(), "initial.q", "this system uses w and r")?,
                }
            }
        }
        if let Some(dy) = &self.dynamics {
            check(
                dy.dt > 0.0 && dy.dt.is_finite(),
                "dynamics.dt",
                "must be positive",
            )?;
            check(
                dy.t_max >= 0.0 && dy.t_max.is_finite(),
                "dynamics.t_max",
                "must be nonnegative",
            )?;
            check(
                dy.projector_period >= 1,
                "dynamics.projector_period",
                "must be >= 1",
            )?;
            check(dy.eps_chord > 0.0, "dynamics.eps_chord", "must be positive")?;
            check(
                dy.system != System::Linearized || dy.background.is_some(),
                "dynamics.background",
                "required for the linearized system",
            )?;
        }
        check(self.output.stride >= 1, "output.stride", "must be >= 1")?;
        check(
            self.output
                .checkpoint_times
                .iter()
                .all(|t| *t >= 0.0 && t.is_finite()),
            "output.checkpoint_times",
            "must be nonnegative",
        )?;
        if let Some(ls) = &self.lemma_suite {
            check(ls.trials >= 1, "lemma_suite.trials", "must be >= 1")?;
            for id in &ls.ids {
                check(
                    LEMMA_IDS.contains(&id.as_str()),
                    "lemma_suite.ids",
                    format!("unknown lemma id `{id}`"),
                )?;
            }
        }
        if let Some(it) = &self.iterate {
            check(
                it.j.len() == it.d,
                "iterate.j",
                format!("expected {} indices", it.d),
            )?;
            check(
                it.dt > 0.0 && it.t_max > 0.0,
                "iterate.dt",
                "dt and t_max must be positive",
            )?;
        }
        if let Some(r) = &self.refine {
            check(!r.n_list.is_empty(), "refine.n_list", "must not be empty")?;
            check(r.dt > 0.0, "refine.dt", "must be positive")?;
        }
        if let Some(ds) = &self.dispersion {
            for (i, j) in ds.modes.iter().enumerate() {
                check(
                    j.len() == ds.d,
                    &format!("dispersion.modes[{i}]"),
                    format!("expected {} indices", ds.d),
                )?;
            }
            check(ds.dt > 0.0, "dispersion.dt", "must be positive")?;
        }
        Ok(())
    }

    /// Replaces every seed in the spec.
    pub fn override_seed(&mut self, seed: u64) {
        if let Some(init) = &mut self.initial {
            if init.kind == InitialKind::Random {
                init.seed = Some(seed);
            }
        }
        if let Some(ls) = &mut self.lemma_suite {
            ls.seed = seed;
        }
        if let Some(r) = &mut self.refine {
            r.seed = seed;
        }
    }

    /// Seed recorded in the manifest.
    pub fn seed(&self) -> Option<u64> {
        self.initial
            .as_ref()
            .and_then(|i| i.seed)
            .or(self.lemma_suite.as_ref().map(|l| l.seed))
            .or(self.refine.as_ref().map(|r| r.seed))
    }
}
