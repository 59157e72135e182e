//! Experiment protocol: draw a sparse true model over signature components,
//! simulate paths, regress, and ask whether the Lasso path contains the
//! true sign pattern.
//!
//! One trial: (1) draw `q` true predictors uniformly without replacement
//! from all components of orders `0..=K`; (2) draw their coefficients from
//! the standard normal (redrawing magnitudes below 1e-8 so sign targets are
//! well posed at double precision); (3) simulate `n_train` paths and
//! compute their signatures; (4) build the response with Gaussian noise;
//! (5) run the full Lasso path on the standardized design and record
//! whether any point matches the true sign pattern. Rates aggregate over
//! trials; confidence intervals come from batch means.
//!
//! Every result is a pure function of the configuration (seed included):
//! trial `t` draws everything from substream `t`, so execution order and
//! thread count cannot change any number.

use crate::error::{Result, SigLabError};
use crate::lasso::{cv_lasso, lasso_path, sign_consistent, DesignMatrix, TrueModel};
use crate::sig::{enumerate_words, signature, word_count, Convention, Path};
use crate::sim::{simulate, CorrelationSpec, GridSpec, ProcessKind, ProcessSpec, SeededStream};
use nalgebra::DMatrix;
use rand::distributions::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Two-sided 90% normal quantile used for batch confidence intervals.
pub const Z_90: f64 = 1.6448536269514722;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub kind: ProcessKind,
    pub d: usize,
    /// Uniform inter-dimensional correlation; ignored when
    /// `wishart_mixing` is set.
    pub rho: f64,
    /// Draw the mixing covariance from Wishart(d, 2) per trial.
    pub wishart_mixing: bool,
    pub grid: GridSpec,
    pub convention: Convention,
    pub max_order: usize,
    /// Number of true predictors.
    pub q: usize,
    pub n_train: usize,
    /// Test-set size for out-of-sample runs (unused by rate experiments).
    pub n_test: usize,
    pub cv_folds: usize,
    pub noise_sd: f64,
    pub reps: u64,
    /// Batch count for confidence intervals; fewer than 2 disables them.
    pub batches: u64,
    pub seed: u64,
    pub time_augment: bool,
    /// Redraw ARIMA coefficients per trial (uniform, scaled by lag count).
    pub draw_arima_coeffs: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ProcessKind::Brownian,
            d: 2,
            rho: 0.0,
            wishart_mixing: false,
            grid: GridSpec::default(),
            convention: Convention::Ito,
            max_order: 4,
            q: 3,
            n_train: 100,
            n_test: 0,
            cv_folds: 5,
            noise_sd: 0.01,
            reps: 200,
            batches: 10,
            seed: 0,
            time_augment: false,
            draw_arima_coeffs: false,
        }
    }
}

impl ExperimentConfig {
    /// Predictor count after optional time augmentation.
    pub fn predictor_count(&self) -> usize {
        let d = if self.time_augment { self.d + 1 } else { self.d };
        word_count(d as u32, self.max_order)
    }

    fn validate(&self) -> Result<()> {
        if self.q > self.predictor_count() {
            return Err(SigLabError::InvalidArgument(format!(
                "q = {} exceeds the {} available predictors",
                self.q,
                self.predictor_count()
            )));
        }
        if self.reps == 0 {
            return Err(SigLabError::InvalidArgument("reps must be >= 1".into()));
        }
        if self.n_train < 2 {
            return Err(SigLabError::InvalidArgument("n_train must be >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RateSummary {
    pub rate: f64,
    pub consistent: u64,
    pub reps: u64,
    pub failed: u64,
    pub failure_reasons: Vec<String>,
    pub batch_rates: Vec<f64>,
    pub ci_half: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MseSummary {
    pub mean_mse: f64,
    pub sd_mse: f64,
    pub reps: u64,
    pub failed: u64,
}

/// One labeled point of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct RatePoint {
    pub axis: String,
    pub value: f64,
    pub convention: Convention,
    pub rate: f64,
    pub ci_half: Option<f64>,
    pub reps: u64,
    pub failed: u64,
}

/// A sweep outcome with its full provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub label: String,
    pub base_config: ExperimentConfig,
    pub points: Vec<RatePoint>,
}

impl ExperimentResult {
    /// CSV `axis,value,convention,rate,ci_half,reps,failed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,value,convention,rate,ci_half,reps,failed\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{:e},{},{:e},{},{},{}\n",
                p.axis,
                p.value,
                p.convention.label(),
                p.rate,
                p.ci_half.map(|c| format!("{:e}", c)).unwrap_or_default(),
                p.reps,
                p.failed
            ));
        }
        out
    }
}

fn build_spec(cfg: &ExperimentConfig, rng: &mut impl Rng) -> Result<ProcessSpec> {
    let correlation = if cfg.wishart_mixing {
        CorrelationSpec::wishart_draw(cfg.d, 2, rng)?
    } else {
        CorrelationSpec::uniform(cfg.d, cfg.rho, 1.0)?
    };
    let kind = match (&cfg.kind, cfg.draw_arima_coeffs) {
        (ProcessKind::Arima { i_order, ar, ma }, true) => {
            let p = ar.len();
            let q = ma.len();
            let ar = (0..p)
                .map(|_| rng.gen_range(-0.5..0.5) / p.max(1) as f64)
                .collect();
            let ma = (0..q)
                .map(|_| rng.gen_range(-0.5..0.5) / q.max(1) as f64)
                .collect();
            ProcessKind::Arima {
                i_order: *i_order,
                ar,
                ma,
            }
        }
        (kind, _) => kind.clone(),
    };
    Ok(ProcessSpec::new(kind, correlation, cfg.grid))
}

fn trial_paths(
    cfg: &ExperimentConfig,
    spec: &ProcessSpec,
    stream: &SeededStream,
    count: usize,
) -> Result<Vec<Path>> {
    (0..count)
        .map(|i| {
            let path = simulate(spec, stream.substream(i as u64))?;
            Ok(if cfg.time_augment {
                path.time_augment()
            } else {
                path
            })
        })
        .collect()
}

fn signature_design(
    cfg: &ExperimentConfig,
    paths: &[Path],
) -> Result<DMatrix<f64>> {
    let p = cfg.predictor_count();
    let mut raw = DMatrix::zeros(paths.len(), p);
    for (i, path) in paths.iter().enumerate() {
        let sig = signature(path, cfg.max_order, cfg.convention)?;
        for j in 0..p {
            raw[(i, j)] = sig.values[j];
        }
    }
    Ok(raw)
}

fn draw_model(cfg: &ExperimentConfig, rng: &mut impl Rng) -> TrueModel {
    let p = cfg.predictor_count();
    let chosen = rand::seq::index::sample(rng, p, cfg.q).into_vec();
    let mut beta = vec![0.0; p];
    for j in chosen {
        beta[j] = loop {
            let b: f64 = StandardNormal.sample(rng);
            if b.abs() >= 1e-8 {
                break b;
            }
        };
    }
    TrueModel {
        beta,
        noise_sd: cfg.noise_sd,
    }
}

fn response(
    raw: &DMatrix<f64>,
    model: &TrueModel,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let (n, p) = raw.shape();
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..p {
                let b = model.beta[j];
                if b != 0.0 {
                    acc += raw[(i, j)] * b;
                }
            }
            let e: f64 = StandardNormal.sample(rng);
            acc + model.noise_sd * e
        })
        .collect()
}

/// One sign-consistency trial; `Err` strings are recorded, not dropped.
fn consistency_trial(cfg: &ExperimentConfig, trial: u64) -> std::result::Result<bool, String> {
    let stream = SeededStream::new(cfg.seed, trial);
    let mut rng = stream.rng();
    let spec = build_spec(cfg, &mut rng).map_err(|e| e.to_string())?;
    let model = draw_model(cfg, &mut rng);
    let paths = trial_paths(cfg, &spec, &stream, cfg.n_train).map_err(|e| e.to_string())?;
    let raw = signature_design(cfg, &paths).map_err(|e| e.to_string())?;
    let y = response(&raw, &model, &mut rng);
    let labels = enumerate_words(
        if cfg.time_augment { cfg.d + 1 } else { cfg.d } as u32,
        cfg.max_order,
    )
    .map_err(|e| e.to_string())?
    .labels();
    let design = DesignMatrix::standardize(&raw, Some(&labels)).map_err(|e| e.to_string())?;
    let path = lasso_path(&design, &y).map_err(|e| e.to_string())?;
    sign_consistent(&path, &model).map_err(|e| e.to_string())
}

/// Proportion of trials whose Lasso path contains the true sign pattern.
pub fn consistency_rate(cfg: &ExperimentConfig) -> Result<RateSummary> {
    cfg.validate()?;
    let verdicts: Vec<std::result::Result<bool, String>> = (0..cfg.reps)
        .into_par_iter()
        .map(|t| consistency_trial(cfg, t))
        .collect();
    Ok(summarize(cfg, &verdicts))
}

fn summarize(
    cfg: &ExperimentConfig,
    verdicts: &[std::result::Result<bool, String>],
) -> RateSummary {
    let reps = verdicts.len() as u64;
    let consistent = verdicts.iter().filter(|v| matches!(v, Ok(true))).count() as u64;
    let failures: Vec<String> = verdicts
        .iter()
        .enumerate()
        .filter_map(|(t, v)| v.as_ref().err().map(|e| format!("trial {}: {}", t, e)))
        .collect();
    let rate = consistent as f64 / reps as f64;
    let (batch_rates, ci_half) = if cfg.batches >= 2 && reps >= cfg.batches {
        let m = (reps / cfg.batches) as usize;
        let rates: Vec<f64> = (0..cfg.batches as usize)
            .map(|b| {
                let lo = b * m;
                let hi = if b + 1 == cfg.batches as usize {
                    reps as usize
                } else {
                    (b + 1) * m
                };
                let ok = verdicts[lo..hi]
                    .iter()
                    .filter(|v| matches!(v, Ok(true)))
                    .count();
                ok as f64 / (hi - lo) as f64
            })
            .collect();
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        let var = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
            / (rates.len() - 1) as f64;
        let half = Z_90 * (var / rates.len() as f64).sqrt();
        (rates, Some(half))
    } else {
        (Vec::new(), None)
    };
    RateSummary {
        rate,
        consistent,
        reps,
        failed: failures.len() as u64,
        failure_reasons: failures,
        batch_rates,
        ci_half,
    }
}

/// Explicit batched estimation: `batches x per_batch` trials with a
/// normal-approximation CI from the batch means.
pub fn with_confidence(
    cfg: &ExperimentConfig,
    batches: u64,
    per_batch: u64,
) -> Result<RateSummary> {
    if batches < 2 {
        return Err(SigLabError::Precondition(
            "at least 2 batches are required".into(),
        ));
    }
    let mut cfg = cfg.clone();
    cfg.batches = batches;
    cfg.reps = batches * per_batch;
    consistency_rate(&cfg)
}

/// One out-of-sample trial: fit on the training half with CV-chosen
/// penalty, report test MSE.
fn mse_trial(cfg: &ExperimentConfig, trial: u64) -> std::result::Result<f64, String> {
    let stream = SeededStream::new(cfg.seed, trial);
    let mut rng = stream.rng();
    let spec = build_spec(cfg, &mut rng).map_err(|e| e.to_string())?;
    let model = draw_model(cfg, &mut rng);
    let total = cfg.n_train + cfg.n_test;
    let paths = trial_paths(cfg, &spec, &stream, total).map_err(|e| e.to_string())?;
    let raw = signature_design(cfg, &paths).map_err(|e| e.to_string())?;
    let y = response(&raw, &model, &mut rng);
    let train_raw = raw.rows(0, cfg.n_train).into_owned();
    let test_raw = raw.rows(cfg.n_train, cfg.n_test).into_owned();
    let fit = cv_lasso(&train_raw, &y[..cfg.n_train], cfg.cv_folds, &mut rng)
        .map_err(|e| e.to_string())?;
    let pred = fit.design.predict_raw(&test_raw, &fit.beta_std);
    let mse = pred
        .iter()
        .zip(&y[cfg.n_train..])
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / cfg.n_test as f64;
    Ok(mse)
}

/// Mean out-of-sample MSE over trials (train/test split per §-protocol:
/// CV on the training half, evaluation on the held-out half).
pub fn oos_mse(cfg: &ExperimentConfig) -> Result<MseSummary> {
    cfg.validate()?;
    if cfg.n_test == 0 {
        return Err(SigLabError::InvalidArgument(
            "n_test must be positive for out-of-sample runs".into(),
        ));
    }
    let results: Vec<std::result::Result<f64, String>> = (0..cfg.reps)
        .into_par_iter()
        .map(|t| mse_trial(cfg, t))
        .collect();
    let values: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok()).copied().collect();
    let failed = (results.len() - values.len()) as u64;
    if values.is_empty() {
        return Err(SigLabError::InvalidArgument(
            "every trial failed; see per-trial errors".into(),
        ));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (values.len().max(2) - 1) as f64;
    Ok(MseSummary {
        mean_mse: mean,
        sd_mse: var.sqrt(),
        reps: cfg.reps,
        failed,
    })
}

fn rate_point(
    cfg: &ExperimentConfig,
    axis: &str,
    value: f64,
) -> Result<RatePoint> {
    let summary = consistency_rate(cfg)?;
    Ok(RatePoint {
        axis: axis.to_string(),
        value,
        convention: cfg.convention,
        rate: summary.rate,
        ci_half: summary.ci_half,
        reps: summary.reps,
        failed: summary.failed,
    })
}

/// Consistency rates over an inter-dimensional correlation grid for each
/// (q, convention) pair.
pub fn rho_q_sweep(
    base: &ExperimentConfig,
    rhos: &[f64],
    qs: &[usize],
    conventions: &[Convention],
) -> Result<ExperimentResult> {
    let mut points = Vec::new();
    for &q in qs {
        for &conv in conventions {
            for &rho in rhos {
                let mut cfg = base.clone();
                cfg.q = q;
                cfg.convention = conv;
                cfg.rho = rho;
                points.push(rate_point(&cfg, &format!("rho(q={})", q), rho)?);
            }
        }
    }
    Ok(ExperimentResult {
        label: "rho_q_sweep".into(),
        base_config: base.clone(),
        points,
    })
}

/// Mean-reversion sweep: OU over a `kappa` grid or AR(1) over a `1 - phi`
/// grid, with Wishart-drawn inter-dimensional mixing per trial.
pub fn mean_reversion_sweep(
    base: &ExperimentConfig,
    grid: &[f64],
    conventions: &[Convention],
) -> Result<ExperimentResult> {
    let (is_ou, axis) = match base.kind {
        ProcessKind::Ou { .. } => (true, "kappa"),
        ProcessKind::Ar1 { .. } => (false, "one_minus_phi"),
        _ => {
            return Err(SigLabError::InvalidArgument(
                "mean-reversion sweeps need an OU or AR(1) process".into(),
            ))
        }
    };
    let mut points = Vec::new();
    for &conv in conventions {
        for &v in grid {
            let mut cfg = base.clone();
            cfg.wishart_mixing = true;
            cfg.convention = conv;
            cfg.kind = if is_ou {
                ProcessKind::Ou { kappas: vec![v] }
            } else {
                ProcessKind::Ar1 {
                    phis: vec![1.0 - v],
                }
            };
            points.push(rate_point(&cfg, axis, v)?);
        }
    }
    Ok(ExperimentResult {
        label: "mean_reversion_sweep".into(),
        base_config: base.clone(),
        points,
    })
}

/// Consistency rate against the process dimension.
pub fn dimension_sweep(
    base: &ExperimentConfig,
    dims: &[usize],
    conventions: &[Convention],
) -> Result<ExperimentResult> {
    let mut points = Vec::new();
    for &conv in conventions {
        for &d in dims {
            let mut cfg = base.clone();
            cfg.convention = conv;
            cfg.d = d;
            points.push(rate_point(&cfg, "d", d as f64)?);
        }
    }
    Ok(ExperimentResult {
        label: "dimension_sweep".into(),
        base_config: base.clone(),
        points,
    })
}

/// Consistency rate against the number of samples.
pub fn sample_sweep(
    base: &ExperimentConfig,
    ns: &[usize],
    conventions: &[Convention],
) -> Result<ExperimentResult> {
    let mut points = Vec::new();
    for &conv in conventions {
        for &n in ns {
            let mut cfg = base.clone();
            cfg.convention = conv;
            cfg.n_train = n;
            points.push(rate_point(&cfg, "n_samples", n as f64)?);
        }
    }
    Ok(ExperimentResult {
        label: "sample_sweep".into(),
        base_config: base.clone(),
        points,
    })
}

/// ARIMA sweep over the integration order with AR/MA lag counts; the
/// coefficients are redrawn uniformly per trial.
pub fn arima_sweep(
    base: &ExperimentConfig,
    i_orders: &[usize],
    ar_lags: &[usize],
    ma_lags: &[usize],
    conventions: &[Convention],
) -> Result<ExperimentResult> {
    let mut points = Vec::new();
    for &conv in conventions {
        for &p_lag in ar_lags {
            for &q_lag in ma_lags {
                for &i_ord in i_orders {
                    let mut cfg = base.clone();
                    cfg.convention = conv;
                    cfg.draw_arima_coeffs = true;
                    cfg.kind = ProcessKind::Arima {
                        i_order: i_ord,
                        ar: vec![0.0; p_lag],
                        ma: vec![0.0; q_lag],
                    };
                    points.push(rate_point(
                        &cfg,
                        &format!("arima(p={},q={})", p_lag, q_lag),
                        i_ord as f64,
                    )?);
                }
            }
        }
    }
    Ok(ExperimentResult {
        label: "arima_sweep".into(),
        base_config: base.clone(),
        points,
    })
}

/// Rates with and without time augmentation at otherwise equal settings.
pub fn augmentation_compare(
    base: &ExperimentConfig,
    conventions: &[Convention],
) -> Result<ExperimentResult> {
    let mut points = Vec::new();
    for &conv in conventions {
        for (augment, value) in [(false, 0.0), (true, 1.0)] {
            let mut cfg = base.clone();
            cfg.convention = conv;
            cfg.time_augment = augment;
            points.push(rate_point(&cfg, "time_augment", value)?);
        }
    }
    Ok(ExperimentResult {
        label: "augmentation_compare".into(),
        base_config: base.clone(),
        points,
    })
}
