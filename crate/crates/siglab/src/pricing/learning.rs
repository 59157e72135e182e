//! Payoff learning: regress option payoffs on signature components or
//! sampled path points and compare fits across penalty levels.
//!
//! The underlying pair follows unit-initial-value GBMs with per-step log
//! increments `N(0, vol^2)` and cross correlation `rho`. Per repetition,
//! fresh train/test paths are simulated, payoffs evaluated, and the full
//! Lasso path fitted per predictor family:
//!
//! * `Sig`  — signature components up to order `K` (p of them);
//! * `RSam` — p path points sampled uniformly without replacement from the
//!   (time, coordinate) grid, redrawn per repetition;
//! * `USam` — p equidistant points of the same grid, terminal included.
//!
//! R-squared curves are averaged over repetitions on a fixed penalty grid
//! (anchored at the first repetition's `lambda_max`).

use super::payoff::Payoff;
use crate::error::{Result, SigLabError};
use crate::lasso::{lambda_grid, lambda_max, lasso_path, DesignMatrix};
use crate::sig::{enumerate_words, signature, word_count, Convention, Path};
use crate::sim::{gbm_pair, simulate, GridSpec, ProcessKind, ProcessSpec, SeededStream};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictorKind {
    Sig { convention: Convention },
    RSam,
    USam,
}

impl PredictorKind {
    pub fn label(&self) -> String {
        match self {
            PredictorKind::Sig { convention } => format!("sig-{}", convention.label()),
            PredictorKind::RSam => "rsam".into(),
            PredictorKind::USam => "usam".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LearningConfig {
    pub payoffs: Vec<Payoff>,
    pub predictors: Vec<PredictorKind>,
    pub max_order: usize,
    pub rho: f64,
    pub vol_per_step: f64,
    pub steps: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub reps: u64,
    pub seed: u64,
    pub time_augment: bool,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            payoffs: super::payoff::standard_payoffs(),
            predictors: vec![
                PredictorKind::Sig {
                    convention: Convention::Stratonovich,
                },
                PredictorKind::RSam,
                PredictorKind::USam,
            ],
            max_order: 6,
            rho: 0.6,
            vol_per_step: 0.01,
            steps: 1000,
            n_train: 200,
            n_test: 100,
            reps: 200,
            seed: 0,
            time_augment: false,
        }
    }
}

/// Averaged fit quality of one (payoff, predictor-kind) cell.
#[derive(Debug, Clone, Serialize)]
pub struct R2Table {
    pub payoff: String,
    pub predictor: String,
    pub lambdas: Vec<f64>,
    pub r2_in: Vec<f64>,
    pub r2_out: Vec<f64>,
    pub best_lambda: f64,
    pub best_r2_out: f64,
    /// Mean standardized coefficient curves of the largest-coefficient
    /// predictors (signature kind only).
    pub coef_words: Vec<String>,
    pub coef_curves: Vec<Vec<f64>>,
}

impl R2Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,r2_in,r2_out\n");
        for ((l, a), b) in self.lambdas.iter().zip(&self.r2_in).zip(&self.r2_out) {
            out.push_str(&format!("{:e},{:e},{:e}\n", l, a, b));
        }
        out
    }
}

fn r_squared(y: &[f64], pred: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let ssr: f64 = y.iter().zip(pred).map(|(a, b)| (a - b) * (a - b)).sum();
    if sst <= 0.0 {
        if ssr <= 1e-24 {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ssr / sst
    }
}

/// Scalar pool of a path in time-major order, optionally with the time
/// coordinate prepended per row.
fn scalar_pool(path: &Path, use_dims: usize, with_time: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.len() * (use_dims + with_time as usize));
    for j in 0..path.len() {
        if with_time {
            out.push(path.times()[j]);
        }
        for d in 0..use_dims {
            out.push(path.value(j, d));
        }
    }
    out
}

fn predictor_row(
    kind: PredictorKind,
    path: &Path,
    use_dims: usize,
    with_time: bool,
    max_order: usize,
    indices: &[usize],
) -> Result<Vec<f64>> {
    match kind {
        PredictorKind::Sig { convention } => {
            let base = if use_dims == path.dim() {
                path.clone()
            } else {
                let rows: Vec<Vec<f64>> = (0..path.len())
                    .map(|j| (0..use_dims).map(|d| path.value(j, d)).collect())
                    .collect();
                Path::from_rows(*path.times().last().unwrap(), rows)?
            };
            let base = if with_time { base.time_augment() } else { base };
            Ok(signature(&base, max_order, convention)?.values)
        }
        PredictorKind::RSam | PredictorKind::USam => {
            let pool = scalar_pool(path, use_dims, with_time);
            Ok(indices.iter().map(|&i| pool[i]).collect())
        }
    }
}

/// Equidistant pool indices including the terminal scalar.
fn usam_indices(pool_len: usize, p: usize) -> Vec<usize> {
    if p == 1 {
        return vec![pool_len - 1];
    }
    (0..p)
        .map(|k| (k as f64 * (pool_len - 1) as f64 / (p - 1) as f64).round() as usize)
        .collect()
}

struct RepOutcome {
    r2_in: Vec<f64>,
    r2_out: Vec<f64>,
    coefs: Option<Vec<Vec<f64>>>,
}

#[allow(clippy::too_many_arguments)]
fn learning_rep(
    cfg: &LearningConfig,
    payoff: &Payoff,
    kind: PredictorKind,
    grid: &[f64],
    rep: u64,
    collect_coefs: bool,
) -> Result<RepOutcome> {
    let stream = SeededStream::new(cfg.seed, rep);
    let mut rng = stream.rng();
    let use_dims = payoff.dim();
    let p = word_count((use_dims + cfg.time_augment as usize) as u32, cfg.max_order);
    let total = cfg.n_train + cfg.n_test;

    let pool_len = (cfg.steps + 1) * (use_dims + cfg.time_augment as usize);
    let indices = match kind {
        PredictorKind::RSam => rand::seq::index::sample(&mut rng, pool_len, p).into_vec(),
        PredictorKind::USam => usam_indices(pool_len, p),
        PredictorKind::Sig { .. } => Vec::new(),
    };

    let mut raw = DMatrix::zeros(total, p);
    let mut y = vec![0.0; total];
    for i in 0..total {
        let path = gbm_pair(cfg.rho, cfg.vol_per_step, cfg.steps, stream.substream(i as u64))?;
        y[i] = payoff.evaluate(&path)?;
        let row = predictor_row(kind, &path, use_dims, cfg.time_augment, cfg.max_order, &indices)?;
        for j in 0..p {
            raw[(i, j)] = row[j];
        }
    }

    let train_raw = raw.rows(0, cfg.n_train).into_owned();
    let test_raw = raw.rows(cfg.n_train, cfg.n_test).into_owned();
    let design = DesignMatrix::standardize(&train_raw, None)?;
    let path = lasso_path(&design, &y[..cfg.n_train])?;

    let mut r2_in = Vec::with_capacity(grid.len());
    let mut r2_out = Vec::with_capacity(grid.len());
    let mut coefs = collect_coefs.then(|| Vec::with_capacity(grid.len()));
    for &lam in grid {
        let beta = path.coefficients_at(lam);
        let pred_in = design.predict_raw(&train_raw, &beta);
        let pred_out = design.predict_raw(&test_raw, &beta);
        r2_in.push(r_squared(&y[..cfg.n_train], &pred_in));
        r2_out.push(r_squared(&y[cfg.n_train..], &pred_out));
        if let Some(c) = coefs.as_mut() {
            c.push(beta);
        }
    }
    Ok(RepOutcome {
        r2_in,
        r2_out,
        coefs,
    })
}

/// In/out-of-sample R-squared curves per (payoff, predictor kind),
/// averaged over repetitions.
pub fn payoff_learning(cfg: &LearningConfig) -> Result<Vec<R2Table>> {
    if cfg.reps == 0 || cfg.n_train < 4 || cfg.n_test < 2 {
        return Err(SigLabError::InvalidArgument(
            "need reps >= 1, n_train >= 4, n_test >= 2".into(),
        ));
    }
    let mut tables = Vec::new();
    for payoff in &cfg.payoffs {
        for &kind in &cfg.predictors {
            tables.push(learning_cell(cfg, payoff, kind)?);
        }
    }
    Ok(tables)
}

fn learning_cell(cfg: &LearningConfig, payoff: &Payoff, kind: PredictorKind) -> Result<R2Table> {
    // Shared penalty grid anchored at repetition 0.
    let grid = {
        let stream = SeededStream::new(cfg.seed, 0);
        let mut rng = stream.rng();
        let use_dims = payoff.dim();
        let p = word_count((use_dims + cfg.time_augment as usize) as u32, cfg.max_order);
        let pool_len = (cfg.steps + 1) * (use_dims + cfg.time_augment as usize);
        let indices = match kind {
            PredictorKind::RSam => rand::seq::index::sample(&mut rng, pool_len, p).into_vec(),
            PredictorKind::USam => usam_indices(pool_len, p),
            PredictorKind::Sig { .. } => Vec::new(),
        };
        let mut raw = DMatrix::zeros(cfg.n_train, p);
        let mut y = vec![0.0; cfg.n_train];
        for i in 0..cfg.n_train {
            let path = gbm_pair(cfg.rho, cfg.vol_per_step, cfg.steps, stream.substream(i as u64))?;
            y[i] = payoff.evaluate(&path)?;
            let row =
                predictor_row(kind, &path, use_dims, cfg.time_augment, cfg.max_order, &indices)?;
            for j in 0..p {
                raw[(i, j)] = row[j];
            }
        }
        let design = DesignMatrix::standardize(&raw, None)?;
        lambda_grid(lambda_max(&design, &y))
    };

    let collect_coefs = matches!(kind, PredictorKind::Sig { .. });
    let reps: Vec<Result<RepOutcome>> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| learning_rep(cfg, payoff, kind, &grid, r, collect_coefs))
        .collect();

    let mut r2_in = vec![0.0; grid.len()];
    let mut r2_out = vec![0.0; grid.len()];
    let mut counts = vec![0u64; grid.len()];
    let mut coef_acc: Option<Vec<Vec<f64>>> = None;
    let mut ok_reps = 0u64;
    for rep in reps {
        let rep = rep?;
        ok_reps += 1;
        for (k, (&a, &b)) in rep.r2_in.iter().zip(&rep.r2_out).enumerate() {
            if a.is_finite() && b.is_finite() {
                r2_in[k] += a;
                r2_out[k] += b;
                counts[k] += 1;
            }
        }
        if let Some(c) = rep.coefs {
            match coef_acc.as_mut() {
                None => coef_acc = Some(c),
                Some(acc) => {
                    for (row, add) in acc.iter_mut().zip(c) {
                        for (x, v) in row.iter_mut().zip(add) {
                            *x += v;
                        }
                    }
                }
            }
        }
    }
    for k in 0..grid.len() {
        let c = counts[k].max(1) as f64;
        r2_in[k] /= c;
        r2_out[k] /= c;
    }
    let (best_idx, best_r2_out) = r2_out
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .unwrap_or((0, f64::NEG_INFINITY));

    // Keep the seven largest-mean-coefficient predictors (all of them when
    // fewer exist).
    let (coef_words, coef_curves) = match coef_acc {
        Some(mut acc) => {
            for row in acc.iter_mut() {
                for v in row.iter_mut() {
                    *v /= ok_reps as f64;
                }
            }
            let p = acc[0].len();
            let use_dims = payoff.dim() + cfg.time_augment as usize;
            let labels = enumerate_words(use_dims as u32, cfg.max_order)?.labels();
            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by(|&a, &b| acc[best_idx][b].abs().total_cmp(&acc[best_idx][a].abs()));
            let keep: Vec<usize> = order.into_iter().take(7).collect();
            let words = keep.iter().map(|&j| labels[j].clone()).collect();
            let curves = acc
                .iter()
                .map(|row| keep.iter().map(|&j| row[j]).collect())
                .collect();
            (words, curves)
        }
        None => (Vec::new(), Vec::new()),
    };

    Ok(R2Table {
        payoff: payoff.label(),
        predictor: kind.label(),
        best_lambda: grid[best_idx],
        lambdas: grid,
        r2_in,
        r2_out,
        best_r2_out,
        coef_words,
        coef_curves,
    })
}

/// Out-of-sample R-squared of `max(X_T, 0)` per signature convention for a
/// 1-d driving process, at each convention's best penalty.
pub fn compare_conventions(
    kind: &ProcessKind,
    steps: usize,
    max_order: usize,
    n_train: usize,
    n_test: usize,
    reps: u64,
    seed: u64,
) -> Result<Vec<(Convention, f64)>> {
    let spec = ProcessSpec::new(
        kind.clone(),
        crate::sim::CorrelationSpec::identity(1),
        GridSpec::new(1.0, steps),
    );
    let total = n_train + n_test;
    let conventions = [Convention::Ito, Convention::Stratonovich, Convention::Linear];
    let p = max_order + 1;

    // Shared grid per convention from repetition 0.
    let grids: Vec<Vec<f64>> = conventions
        .iter()
        .map(|&conv| {
            let stream = SeededStream::new(seed, 0);
            let mut raw = DMatrix::zeros(n_train, p);
            let mut y = vec![0.0; n_train];
            for i in 0..n_train {
                let path = simulate(&spec, stream.substream(i as u64))?;
                y[i] = path.terminal()[0].max(0.0);
                let sig = signature(&path, max_order, conv)?;
                for j in 0..p {
                    raw[(i, j)] = sig.values[j];
                }
            }
            let design = DesignMatrix::standardize(&raw, None)?;
            Ok(lambda_grid(lambda_max(&design, &y)))
        })
        .collect::<Result<_>>()?;

    let rep_r2: Vec<Result<Vec<Vec<f64>>>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let stream = SeededStream::new(seed, rep);
            let paths: Vec<Path> = (0..total)
                .map(|i| simulate(&spec, stream.substream(i as u64)))
                .collect::<Result<_>>()?;
            let y: Vec<f64> = paths.iter().map(|p| p.terminal()[0].max(0.0)).collect();
            let mut per_conv = Vec::with_capacity(conventions.len());
            for (ci, &conv) in conventions.iter().enumerate() {
                let mut raw = DMatrix::zeros(total, p);
                for (i, path) in paths.iter().enumerate() {
                    let sig = signature(path, max_order, conv)?;
                    for j in 0..p {
                        raw[(i, j)] = sig.values[j];
                    }
                }
                let train_raw = raw.rows(0, n_train).into_owned();
                let test_raw = raw.rows(n_train, n_test).into_owned();
                let design = DesignMatrix::standardize(&train_raw, None)?;
                let path = lasso_path(&design, &y[..n_train])?;
                let curve: Vec<f64> = grids[ci]
                    .iter()
                    .map(|&lam| {
                        let beta = path.coefficients_at(lam);
                        let pred = design.predict_raw(&test_raw, &beta);
                        r_squared(&y[n_train..], &pred)
                    })
                    .collect();
                per_conv.push(curve);
            }
            Ok(per_conv)
        })
        .collect();

    let mut sums: Vec<Vec<f64>> = grids.iter().map(|g| vec![0.0; g.len()]).collect();
    let mut n_ok = 0u64;
    for rep in rep_r2 {
        let rep = rep?;
        n_ok += 1;
        for (ci, curve) in rep.into_iter().enumerate() {
            for (k, v) in curve.into_iter().enumerate() {
                sums[ci][k] += v;
            }
        }
    }
    Ok(conventions
        .iter()
        .enumerate()
        .map(|(ci, &conv)| {
            let best = sums[ci]
                .iter()
                .map(|s| s / n_ok as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            (conv, best)
        })
        .collect())
}
