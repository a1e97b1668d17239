use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};

/// Parameters identifying a randomized suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub s: f64,
    pub d: usize,
    pub n: usize,
    /// Radius of the `A`-ball the random states are drawn from.
    pub radius: f64,
    pub seed: u64,
    pub decay: f64,
}

/// Ratios `LHS/RHS` of one estimate over a randomized suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub lemma: String,
    pub trials: usize,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Trials dropped because the random state was degenerate.
    pub discarded: usize,
    pub params: SuiteParams,
}

impl TrialReport {
    pub fn from_ratios(
        lemma: &str,
        params: SuiteParams,
        trials: usize,
        outcomes: Vec<Option<f64>>,
    ) -> Self {
        let discarded = outcomes.iter().filter(|o| o.is_none()).count();
        let ratios: Vec<f64> = outcomes.into_iter().flatten().collect();
        let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
        Self {
            lemma: lemma.to_string(),
            trials,
            ratios,
            max_ratio,
            discarded,
            params,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.max_ratio.is_finite() && self.ratios.iter().all(|r| r.is_finite() && *r >= 0.0)
    }
}

/// Runs `trial(i)` for `i in 0..trials` in parallel and returns the results
/// in trial order. Degenerate trials become `None`; other errors abort.
pub fn run_trials<F>(trials: usize, trial: F) -> Result<Vec<Option<f64>>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|i| match trial(i) {
            Ok(v) => Ok(Some(v)),
            Err(WaveError::SurfaceDegenerate { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Largest ratio between two maxima, `>= 1`.
pub fn stability_factor(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else {
        a.max(b) / a.min(b)
    }
}
