//! Randomized estimate checks, the iteration scheme and the resolution
//! refinement experiment.

pub mod iteration;
pub mod lemmas;
pub mod random;
pub mod refinement;
pub mod report;

pub use iteration::{iteration_experiment, IterationReport};
pub use lemmas::{lemma_check, lemma_suite, Suite, LEMMA_IDS};
pub use random::{
    random_holomorphic, random_lin_state, random_state, random_undiff_state, trial_rng,
    RandomStateSpec,
};
pub use refinement::{
    difference_experiment, refinement_experiment, DifferenceReport, RefinementReport,
    RefinementSpec,
};
pub use report::{run_trials, SuiteParams, TrialReport};
