//! Config file schemas. TOML is the primary format; `.json` files are
//! accepted with the same shape.

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use siglab::consistency::ExperimentConfig;
use siglab::pricing::{InstrumentBook, LearningConfig, PipelineConfig};
use siglab::sig::Convention;
use siglab::sim::{GridSpec, ProcessKind};
use std::path::Path;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if is_json {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn default_d() -> usize {
    1
}

fn default_t_end() -> f64 {
    1.0
}

fn default_steps() -> usize {
    100
}

/// Process description shared by several commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessConfig {
    #[serde(flatten)]
    pub kind: ProcessKind,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default)]
    pub rho: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

impl ProcessConfig {
    pub fn spec(&self) -> Result<siglab::sim::ProcessSpec> {
        let corr = siglab::sim::CorrelationSpec::uniform(self.d, self.rho, 1.0)?;
        Ok(siglab::sim::ProcessSpec::new(
            self.kind.clone(),
            corr,
            GridSpec::new(self.t_end, self.steps),
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub process: ProcessConfig,
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
}

fn default_n_paths() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrMethod {
    Analytic,
    Mc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrConfig {
    pub process: ProcessConfig,
    pub convention: Convention,
    pub max_order: usize,
    #[serde(default = "default_corr_method")]
    pub method: CorrMethod,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Emit the correlation normalization (default) or raw second moments.
    #[serde(default = "default_true")]
    pub normalize: bool,
}

fn default_corr_method() -> CorrMethod {
    CorrMethod::Analytic
}

fn default_trials() -> u64 {
    10_000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrrepConfig {
    pub corr: CorrConfig,
    /// Active words as letter arrays; `[]` is the 0-th order word.
    pub active: Vec<Vec<u32>>,
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum BoundsConfig {
    Ito(ItoBoundsConfig),
    General(GeneralBoundsConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ItoBoundsConfig {
    pub rho: f64,
    pub sigma_noise: f64,
    pub q_max: usize,
    pub p: usize,
    pub n_samples: f64,
    pub lambda_n: f64,
    #[serde(default = "default_one")]
    pub sigma_min: f64,
    #[serde(default = "default_one")]
    pub sigma_max: f64,
    #[serde(default = "default_one")]
    pub c1: f64,
    #[serde(default = "default_one")]
    pub c2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralBoundsConfig {
    pub alpha: f64,
    pub zeta: f64,
    pub c_min: f64,
    pub gamma: f64,
    pub sigma_noise: f64,
    pub p: usize,
    pub n_samples: f64,
    pub lambda_n: f64,
    #[serde(default = "default_one")]
    pub sigma_min: f64,
    #[serde(default = "default_one")]
    pub sigma_max: f64,
    #[serde(default)]
    pub rho: f64,
    #[serde(default = "default_one")]
    pub c1: f64,
    #[serde(default = "default_one")]
    pub c2: f64,
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniquenessConfig {
    pub process: ProcessConfig,
    pub convention: Convention,
    pub max_order: usize,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub theta: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Rho,
    Kappa,
    OneMinusPhi,
    Dimension,
    Samples,
    Arima,
    Augment,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub axis: SweepAxis,
    #[serde(default)]
    pub grid: Vec<f64>,
    #[serde(default)]
    pub qs: Vec<usize>,
    pub conventions: Vec<Convention>,
    #[serde(default)]
    pub arima: Option<ArimaAxes>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArimaAxes {
    pub i_orders: Vec<usize>,
    pub ar_lags: Vec<usize>,
    pub ma_lags: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "book", rename_all = "snake_case")]
pub enum BookConfig {
    Stock,
    Rate,
    Custom { instruments: Box<InstrumentBook> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceConfig {
    #[serde(flatten)]
    pub book: BookConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default = "default_price_reps")]
    pub reps: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_price_reps() -> u64 {
    20
}

pub type PayoffConfig = LearningConfig;

impl BookConfig {
    pub fn build(&self) -> Result<InstrumentBook> {
        Ok(match self {
            BookConfig::Stock => siglab::pricing::stock_book()?,
            BookConfig::Rate => siglab::pricing::rate_book()?,
            BookConfig::Custom { instruments } => {
                let book = (**instruments).clone();
                book.validate()?;
                book
            }
        })
    }
}

/// Kappa grid default for mean-reversion sweeps when none is given (not a
/// source-document value).
pub fn default_kappa_grid() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0]
}

pub fn validate_signs(active: &[Vec<u32>], signs: &[i8]) -> Result<()> {
    if active.len() != signs.len() {
        bail!(
            "field 'signs': length {} does not match {} active words",
            signs.len(),
            active.len()
        );
    }
    if signs.iter().any(|s| !(-1..=1).contains(s)) {
        bail!("field 'signs': entries must be -1, 0 or +1");
    }
    Ok(())
}
