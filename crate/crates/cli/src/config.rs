//! Declarative experiment configuration.
//!
//! One TOML file drives every subcommand. Unknown keys are rejected so a
//! typo in a check name fails loudly instead of silently running defaults.
//! Command-line flags override the corresponding leaf keys; the precedence
//! is flag > file > built-in default.

use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub metric_eval: Option<MetricEvalConfig>,
    pub solve: Option<SolveCmdConfig>,
    pub verify: Option<VerifySection>,
    pub bounds: Option<BoundsConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }
}

/// Which density to evaluate. `lambda_alpha_r` is the two-parameter family;
/// the other two are its endpoint specializations kept as named shortcuts.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    HyperbolicDisk,
    PuncturedDisk,
    LambdaAlphaR { alpha: f64, radius: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricEvalConfig {
    pub metric: MetricSpec,
    /// Radii of the sample circles, in evaluation order.
    pub radii: Vec<f64>,
    /// Equally spaced angles per circle.
    pub n_angles: usize,
    /// Optional step override for the curvature stencil.
    pub curvature_step: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveCmdConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub nr: usize,
    pub n_theta: usize,
    pub tol: Option<f64>,
    pub max_iter: Option<u32>,
    pub defect_correction: Option<bool>,
    pub kappa: Option<KappaSpec>,
    pub boundary: Option<BoundarySpec>,
    /// When set, the run compares against the exact catalog solution and
    /// appends a verdict record to the summary stream.
    pub manufactured: Option<ManufacturedSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KappaSpec {
    Constant { value: f64 },
    /// kappa(z) = value * (1 + slope * |z|); must stay negative on the grid.
    RadialAffine { value: f64, slope: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// Trace of log lambda_{alpha,R} on both grid circles.
    LambdaAlphaR { alpha: f64, radius: f64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManufacturedSpec {
    pub alpha: f64,
    pub radius: f64,
    pub sup_error_tol: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub seed: Option<u64>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

/// One verification check. Only `tag` is required; the remaining knobs have
/// per-tag defaults and any that a tag does not read are simply ignored.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub tag: String,
    pub metric: Option<MetricSpec>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub radius: Option<f64>,
    pub kappa0: Option<f64>,
    pub n: Option<usize>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub regime: Option<String>,
    pub scale: Option<f64>,
    pub expect: Option<String>,
    pub n_points: Option<usize>,
    pub r_inner: Option<f64>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default)]
    pub cases: Vec<BoundsCase>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsCase {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub const VALID_TAGS: [&str; 12] = [
    "thmF-rates",
    "thm3.1",
    "thm3.2",
    "cor3.3",
    "minda",
    "cusp-limits",
    "u-limits",
    "l-table",
    "corner-bound",
    "delta-bound",
    "ahlfors",
    "maximality",
];
