//! Fixed-grid coordinate descent and cross-validated penalty selection.
//!
//! The homotopy path is the primary solver; this module provides the
//! grid-based fallback used for cross-validation: 100 log-spaced penalties
//! from `lambda_max` down to `lambda_max * 1e-4`, cyclic coordinate descent
//! with warm starts along the grid, and `lambda = 0` handled as ordinary
//! least squares.

use super::design::DesignMatrix;
use crate::error::{Result, SigLabError};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

pub const GRID_SIZE: usize = 100;
pub const GRID_RATIO: f64 = 1e-4;

/// Descending log-spaced penalty grid from `lambda_max` to
/// `lambda_max * GRID_RATIO`.
pub fn lambda_grid(lambda_max: f64) -> Vec<f64> {
    if lambda_max <= 0.0 {
        return vec![0.0];
    }
    (0..GRID_SIZE)
        .map(|k| lambda_max * GRID_RATIO.powf(k as f64 / (GRID_SIZE - 1) as f64))
        .collect()
}

/// `2 max_j |x_j' y|`, the smallest penalty with an all-zero solution.
pub fn lambda_max(design: &DesignMatrix, y: &[f64]) -> f64 {
    let x = design.matrix();
    (0..design.p())
        .map(|j| 2.0 * x.column(j).iter().zip(y).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

fn soft(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Cyclic coordinate descent on `||y - X b||^2 + lambda ||b||_1`; at
/// `lambda = 0` it solves the least-squares normal equations directly.
pub fn coordinate_descent(
    design: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    warm: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let x = design.matrix();
    let (n, p) = x.shape();
    if lambda == 0.0 {
        let xt = x.transpose();
        let gram = &xt * x;
        let rhs = &xt * DVector::from_column_slice(y);
        let sol = gram.lu().solve(&rhs).ok_or_else(|| {
            SigLabError::RankDeficient("least-squares refit at lambda = 0".into())
        })?;
        return Ok(sol.iter().copied().collect());
    }
    let col_sq: Vec<f64> = (0..p)
        .map(|j| x.column(j).iter().map(|v| v * v).sum::<f64>())
        .collect();
    let mut beta = warm.map(|w| w.to_vec()).unwrap_or_else(|| vec![0.0; p]);
    let mut resid = y.to_vec();
    for j in 0..p {
        if beta[j] != 0.0 {
            for i in 0..n {
                resid[i] -= x[(i, j)] * beta[j];
            }
        }
    }
    for _ in 0..10_000 {
        let mut max_delta = 0.0f64;
        for j in 0..p {
            let old = beta[j];
            let mut rho: f64 = x.column(j).iter().zip(&resid).map(|(a, b)| a * b).sum();
            rho += col_sq[j] * old;
            let new = soft(rho, lambda / 2.0) / col_sq[j];
            if new != old {
                let delta = new - old;
                for i in 0..n {
                    resid[i] -= x[(i, j)] * delta;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < 1e-10 {
            break;
        }
    }
    Ok(beta)
}

/// Cross-validated fit: choose `lambda` from the documented grid by
/// `folds`-fold CV (contiguous blocks of a shuffled index vector), then
/// refit on the full data. Standardization is always done on the rows the
/// fit sees; validation rows are scaled with the training-fold factors.
pub struct CvFit {
    pub lambda: f64,
    /// Coefficients on the full-data standardized design.
    pub beta_std: Vec<f64>,
    pub design: DesignMatrix,
    /// `(lambda, mean validation MSE)` per grid point.
    pub cv_curve: Vec<(f64, f64)>,
}

pub fn cv_lasso<R: Rng + ?Sized>(
    raw: &DMatrix<f64>,
    y: &[f64],
    folds: usize,
    rng: &mut R,
) -> Result<CvFit> {
    let (n, p) = raw.shape();
    if folds < 2 || folds > n {
        return Err(SigLabError::InvalidArgument(format!(
            "fold count {} must be in 2..={}",
            folds, n
        )));
    }
    let full = DesignMatrix::standardize(raw, None)?;
    let grid = lambda_grid(lambda_max(&full, y));

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut bounds = Vec::with_capacity(folds + 1);
    for f in 0..=folds {
        bounds.push(f * n / folds);
    }

    let mut cv_mse = vec![0.0f64; grid.len()];
    for f in 0..folds {
        let val: Vec<usize> = order[bounds[f]..bounds[f + 1]].to_vec();
        let train: Vec<usize> = order[..bounds[f]]
            .iter()
            .chain(&order[bounds[f + 1]..])
            .copied()
            .collect();
        let train_raw = DMatrix::from_fn(train.len(), p, |i, j| raw[(train[i], j)]);
        let train_y: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let design = DesignMatrix::standardize(&train_raw, None)?;
        let val_raw = DMatrix::from_fn(val.len(), p, |i, j| raw[(val[i], j)]);
        let val_y: Vec<f64> = val.iter().map(|&i| y[i]).collect();

        let mut warm: Option<Vec<f64>> = None;
        for (k, &lam) in grid.iter().enumerate() {
            let beta = coordinate_descent(&design, &train_y, lam, warm.as_deref())?;
            let pred = design.predict_raw(&val_raw, &beta);
            let mse = pred
                .iter()
                .zip(&val_y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / val.len().max(1) as f64;
            cv_mse[k] += mse / folds as f64;
            warm = Some(beta);
        }
    }

    let best = cv_mse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let lambda = grid[best];
    let mut warm: Option<Vec<f64>> = None;
    let mut beta_std = vec![0.0; p];
    for &lam in grid.iter().take_while(|&&l| l >= lambda) {
        beta_std = coordinate_descent(&full, y, lam, warm.as_deref())?;
        warm = Some(beta_std.clone());
    }
    let cv_curve = grid.iter().copied().zip(cv_mse).collect();
    Ok(CvFit {
        lambda,
        beta_std,
        design: full,
        cv_curve,
    })
}
