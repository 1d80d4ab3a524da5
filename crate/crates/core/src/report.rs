//! Report types shared by testers and learners.
//!
//! Reports serialize to JSON with stable field order (struct declaration
//! order) and deterministic map ordering, so a fixed seed reproduces
//! byte-identical output.

use serde::{Deserialize, Serialize};

/// Stage at which a tester stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Rejected by the per-coordinate tail check.
    Tail,
    /// Rejected by the moment comparison.
    Moments,
    /// All stages passed.
    Ok,
}

/// A tester's decision with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accept: bool,
    /// `Ok` iff `accept`.
    pub stage: Stage,
    /// Worst coordinate (tail stage) or worst moment index (moment stage).
    pub worst_index: Option<String>,
    /// Magnitude of the worst violation, when rejecting.
    pub gap: Option<f64>,
    /// Total examples drawn across all stages.
    pub samples_used: usize,
    /// The parameter values actually used, serialized by the caller.
    pub effective_params: serde_json::Value,
    /// Every place the effective parameters differ from the defining
    /// formulas (caps, overrides); empty means formula-faithful.
    pub deviations: Vec<String>,
}

/// A learner's training summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnReport {
    /// Labeled examples drawn.
    pub samples_drawn: usize,
    /// Examples surviving truncation (= examples actually fitted).
    pub samples_fitted: usize,
    /// Fraction discarded by truncation.
    pub discard_fraction: f64,
    /// Feature-basis size.
    pub num_features: usize,
    /// Mean absolute deviation of the fitted polynomial on training data.
    pub train_l1: f64,
    /// Training 0/1 error of the thresholded predictor.
    pub train_01: f64,
    /// Chosen rounding threshold.
    pub threshold: f64,
    /// Holdout 0/1 error, when the caller measured one.
    pub holdout_error: Option<f64>,
    pub effective_params: serde_json::Value,
    pub deviations: Vec<String>,
}
