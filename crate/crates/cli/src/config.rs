//! One JSON config document shared by every subcommand; flags mirror the
//! fields and win on conflict.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dissim::instances::GeneratorSpec;
use dissim::oracle::OracleKind;
use dissim::protocol::NoiseMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Ls,
    Optimistic,
    OracleLs,
    OptimisticOracle,
    KarmedClosedForm,
    ScanBaseline,
}

impl std::str::FromStr for LearnerKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ls" => LearnerKind::Ls,
            "optimistic" => LearnerKind::Optimistic,
            "oracle_ls" => LearnerKind::OracleLs,
            "optimistic_oracle" => LearnerKind::OptimisticOracle,
            "karmed_closed_form" => LearnerKind::KarmedClosedForm,
            "scan_baseline" => LearnerKind::ScanBaseline,
            other => bail!("unknown learner kind {other:?}"),
        })
    }
}

/// A number, "alpha_star" (resolve from the instance), or "unknown"
/// (optimistic learners only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, rename_all = "snake_case")]
pub enum AlphaSpec {
    Value(f64),
    Named(AlphaName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaName {
    AlphaStar,
    Unknown,
}

impl std::str::FromStr for AlphaSpec {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "alpha_star" => AlphaSpec::Named(AlphaName::AlphaStar),
            "unknown" => AlphaSpec::Named(AlphaName::Unknown),
            v => AlphaSpec::Value(
                v.parse::<f64>()
                    .context("alpha must be a number, alpha_star, or unknown")?,
            ),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    /// Comparators use the formula constants.
    ConstantFaithful,
    /// Comparators use 1.1x the realized worst estimation error.
    Empirical,
}

impl std::str::FromStr for BoundsMode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "constant_faithful" => BoundsMode::ConstantFaithful,
            "empirical" => BoundsMode::Empirical,
            other => bail!("unknown bounds mode {other:?}"),
        })
    }
}

fn default_t() -> usize {
    100
}
fn default_seeds() -> Vec<u64> {
    vec![1]
}
fn default_noise() -> NoiseMode {
    NoiseMode::TwoPoint
}
fn default_delta() -> f64 {
    0.1
}
fn default_eta() -> f64 {
    0.125
}
fn default_eps_grid() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}
fn default_learner() -> LearnerKind {
    LearnerKind::Ls
}
fn default_alpha() -> AlphaSpec {
    AlphaSpec::Named(AlphaName::AlphaStar)
}
fn default_bounds_mode() -> BoundsMode {
    BoundsMode::ConstantFaithful
}
fn default_oracle_kind() -> OracleKind {
    OracleKind::Aggregating
}
fn default_auto_dim_cap() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    #[serde(default = "default_learner")]
    pub learner: LearnerKind,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaSpec,
    #[serde(default = "default_t")]
    pub t: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_noise")]
    pub noise: NoiseMode,
    #[serde(default = "default_bounds_mode")]
    pub bounds_mode: BoundsMode,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Confidence radius override for the optimistic learners.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_oracle_kind")]
    pub oracle_kind: OracleKind,
    /// Suboptimality gap for pac / dims.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default = "default_eps_grid")]
    pub eps_grid: Vec<f64>,
    /// Dimension to use in comparators; computed when absent and |Z| is
    /// within auto_dim_cap.
    #[serde(default)]
    pub dimension_hint: Option<u64>,
    #[serde(default = "default_auto_dim_cap")]
    pub auto_dim_cap: usize,
    /// PAC trial count (defaults to the number of seeds).
    #[serde(default)]
    pub trials: Option<usize>,
    /// Resample-count overrides for pac; derived from the formulas when
    /// absent.
    #[serde(default)]
    pub n1: Option<usize>,
    #[serde(default)]
    pub n2: Option<usize>,
    /// Output directory; the --out flag wins over it.
    #[serde(default)]
    pub out: Option<std::path::PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> std::result::Result<(), dissim::Error> {
        if self.t == 0 {
            return Err(dissim::Error::config("t must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(dissim::Error::config("seeds must be nonempty"));
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            return Err(dissim::Error::config("delta must lie in (0, 1)"));
        }
        if matches!(self.radius, Some(r) if r < 0.0) {
            return Err(dissim::Error::config("radius must be nonnegative"));
        }
        if self.alpha == AlphaSpec::Named(AlphaName::Unknown)
            && !matches!(
                self.learner,
                LearnerKind::Optimistic | LearnerKind::OptimisticOracle
            )
        {
            return Err(dissim::Error::config(format!(
                "alpha = \"unknown\" requires an optimistic learner; {:?} needs a numeric \
                 alpha or alpha_star",
                self.learner
            )));
        }
        Ok(())
    }

    /// The optimality level used for selection and regret accounting.
    /// "unknown" resolves to alpha_star for accounting only (the
    /// optimistic learners never see it).
    pub fn resolve_alpha(&self, alpha_star: f64) -> f64 {
        match self.alpha {
            AlphaSpec::Value(v) => v,
            AlphaSpec::Named(_) => alpha_star,
        }
    }
}

pub fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|s| s.trim().parse::<u64>().context("seeds must be integers"))
        .collect()
}
