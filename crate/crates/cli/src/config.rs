//! Experiment configuration: JSON files with strict (unknown-key-rejecting)
//! parsing and per-mode parameter blocks.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use tlkit_core::fooling::FoolingConfig;
use tlkit_core::gauss::GaussOverrides;

/// Top-level configuration file shape.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mode: String,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Mode-specific parameters; parsed strictly per mode.
    #[serde(default)]
    pub params: serde_json::Value,
}

fn default_trials() -> usize {
    1
}

/// A fully parsed experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub mode: ModeConfig,
}

#[derive(Debug, Clone)]
pub enum ModeConfig {
    GaussPair(GaussModeParams),
    CubePair(CubeModeParams),
    DecisionList(DecisionListModeParams),
    Fooling(FoolingConfig),
    ApproxBench(ApproxBenchParams),
}

impl ModeConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GaussPair(_) => "gauss_pair",
            Self::CubePair(_) => "cube_pair",
            Self::DecisionList(_) => "decision_list",
            Self::Fooling(_) => "fooling",
            Self::ApproxBench(_) => "approx_bench",
        }
    }
}

/// Parameters for `mode = "gauss_pair"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussModeParams {
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_gauss_n")]
    pub n: usize,
    /// Example source: one of the generator distribution names.
    #[serde(default = "default_gaussian_dist")]
    pub distribution: String,
    /// Label-flip probability for the planted halfspace labels.
    #[serde(default)]
    pub label_noise: f64,
    /// Planted halfspace direction; a seeded random unit vector when absent.
    #[serde(default)]
    pub planted_direction: Option<Vec<f64>>,
    #[serde(default)]
    pub planted_threshold: f64,
    /// "desk" applies the recorded desk-scale overrides; "formula" uses the
    /// defining formulas plus any explicit overrides below.
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default)]
    pub overrides: GaussOverrides,
    /// Holdout points per trial for learner error measurement.
    #[serde(default = "default_holdout")]
    pub holdout: usize,
    /// Mean-holdout-error target for the exit code; defaults to
    /// `label_noise + 0.15`.
    #[serde(default)]
    pub error_target: Option<f64>,
    /// Optional CSV dataset consumed instead of the synthetic stream.
    #[serde(default)]
    pub dataset: Option<String>,
    /// Accept `{0,1}` labels in the dataset, mapping 0 to -1.
    #[serde(default)]
    pub zero_one_labels: bool,
}

fn default_eps() -> f64 {
    0.5
}
fn default_gauss_n() -> usize {
    3
}
fn default_gaussian_dist() -> String {
    "gaussian".into()
}
fn default_profile() -> String {
    "desk".into()
}
fn default_holdout() -> usize {
    2000
}

/// Parameters for `mode = "cube_pair"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeModeParams {
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_cube_n")]
    pub n: usize,
    #[serde(default = "default_cube_dist")]
    pub distribution: String,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub degree: Option<u32>,
    #[serde(default)]
    pub tv_tol: Option<f64>,
    #[serde(default)]
    pub tester_samples: Option<usize>,
    #[serde(default)]
    pub learner_samples: Option<usize>,
    #[serde(default)]
    pub label_noise: f64,
    #[serde(default)]
    pub planted_direction: Option<Vec<f64>>,
    #[serde(default)]
    pub planted_threshold: f64,
    #[serde(default = "default_holdout")]
    pub holdout: usize,
    #[serde(default)]
    pub error_target: Option<f64>,
}

fn default_cube_n() -> usize {
    8
}
fn default_cube_dist() -> String {
    "cube".into()
}

/// Parameters for `mode = "decision_list"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionListModeParams {
    #[serde(default = "default_dl_eps")]
    pub eps: f64,
    #[serde(default = "default_dl_n")]
    pub n: usize,
    #[serde(default)]
    pub label_noise: f64,
    /// Planted list; a seeded random 2-entry list when absent.
    #[serde(default)]
    pub planted: Option<tlkit_core::cube::DecisionList>,
    #[serde(default)]
    pub tv_tol: Option<f64>,
    #[serde(default = "default_holdout")]
    pub holdout: usize,
    #[serde(default)]
    pub error_target: Option<f64>,
}

fn default_dl_eps() -> f64 {
    0.25
}
fn default_dl_n() -> usize {
    10
}

/// Parameters for `mode = "approx_bench"`: projection error sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxBenchParams {
    /// "ramp" or "trapezoid".
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_bench_eps")]
    pub eps: f64,
    #[serde(default = "default_bench_w")]
    pub w: f64,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
}

fn default_target() -> String {
    "ramp".into()
}
fn default_bench_eps() -> f64 {
    0.2
}
fn default_bench_w() -> f64 {
    2.0
}
fn default_degrees() -> Vec<usize> {
    vec![10, 20, 40, 80]
}

/// Load and validate a configuration file.
///
/// Parse errors carry serde_json's line/column; validation errors name the
/// offending field.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let raw: RawConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    if raw.trials == 0 {
        bail!("validation error: trials must be >= 1");
    }
    // An omitted params block means "all defaults".
    let params = if raw.params.is_null() {
        serde_json::Value::Object(Default::default())
    } else {
        raw.params.clone()
    };
    let mode = match raw.mode.as_str() {
        "gauss_pair" => {
            let p: GaussModeParams =
                serde_json::from_value(params).context("parsing gauss_pair params")?;
            validate_profile(&p.profile)?;
            ModeConfig::GaussPair(p)
        }
        "cube_pair" => ModeConfig::CubePair(
            serde_json::from_value(params).context("parsing cube_pair params")?,
        ),
        "decision_list" => ModeConfig::DecisionList(
            serde_json::from_value(params).context("parsing decision_list params")?,
        ),
        "fooling" => {
            let p: FoolingConfig =
                serde_json::from_value(params).context("parsing fooling params")?;
            p.validate().map_err(|e| anyhow::anyhow!("validation error: {e}"))?;
            ModeConfig::Fooling(p)
        }
        "approx_bench" => {
            let p: ApproxBenchParams =
                serde_json::from_value(params).context("parsing approx_bench params")?;
            if p.target != "ramp" && p.target != "trapezoid" {
                bail!("validation error: target must be \"ramp\" or \"trapezoid\"");
            }
            ModeConfig::ApproxBench(p)
        }
        other => bail!("validation error: unknown mode {other:?}"),
    };
    Ok(ExperimentConfig { seed: raw.seed, trials: raw.trials, mode })
}

fn validate_profile(profile: &str) -> Result<()> {
    if profile != "desk" && profile != "formula" {
        bail!("validation error: profile must be \"desk\" or \"formula\"");
    }
    Ok(())
}
