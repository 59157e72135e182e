//! Sign-consistency verdicts against a known true model.

use super::path::{sign_of, LassoPath};
use crate::error::{Result, SigLabError};

/// The data-generating regression: raw-scale coefficients (one per
/// predictor, the 0-th order word included like any other) and the noise
/// standard deviation. The active set is the support of `beta`.
#[derive(Debug, Clone)]
pub struct TrueModel {
    pub beta: Vec<f64>,
    pub noise_sd: f64,
}

impl TrueModel {
    pub fn active_set(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn sign_pattern(&self) -> Vec<i8> {
        self.beta.iter().map(|&b| sign_of(b)).collect()
    }
}

/// True iff some point on the path (breakpoint or interior of a segment)
/// matches the true sign pattern componentwise. Standardization scales are
/// positive, so the standardized true coefficients have the same signs as
/// the raw ones and no scale argument is needed.
pub fn sign_consistent(path: &LassoPath, model: &TrueModel) -> Result<bool> {
    let p = path
        .points
        .first()
        .map(|pt| pt.beta.len())
        .ok_or_else(|| SigLabError::InvalidArgument("empty path".into()))?;
    if p != model.beta.len() {
        return Err(SigLabError::InvalidArgument(format!(
            "path has {} predictors, model {}",
            p,
            model.beta.len()
        )));
    }
    let target = model.sign_pattern();
    Ok(path.sign_patterns().iter().any(|pat| *pat == target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::design::DesignMatrix;
    use crate::lasso::path::lasso_path;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};

    #[test]
    fn empty_true_model_is_always_consistent() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2);
        let raw = DMatrix::from_fn(12, 3, |_, _| rng.gen_range(-1.0..1.0));
        let d = DesignMatrix::standardize(&raw, None).unwrap();
        let y: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let path = lasso_path(&d, &y).unwrap();
        let model = TrueModel {
            beta: vec![0.0; 3],
            noise_sd: 0.0,
        };
        assert!(sign_consistent(&path, &model).unwrap());
    }

    #[test]
    fn well_separated_orthogonalish_signal_is_consistent() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let n = 80;
        let p = 6;
        let raw = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
        let beta = vec![0.0, 3.0, 0.0, -2.0, 0.0, 0.0];
        let y: Vec<f64> = (0..n)
            .map(|i| {
                (0..p).map(|j| raw[(i, j)] * beta[j]).sum::<f64>()
                    + 1e-4 * rng.gen_range(-1.0..1.0)
            })
            .collect();
        let d = DesignMatrix::standardize(&raw, None).unwrap();
        let path = lasso_path(&d, &y).unwrap();
        let model = TrueModel {
            beta,
            noise_sd: 1e-4,
        };
        assert!(sign_consistent(&path, &model).unwrap());
    }

    #[test]
    fn collinear_pair_with_single_true_predictor_depends_on_activation() {
        // Two identical columns, truth uses the second: the path activates
        // the first (lowest index wins the tie), so the sign pattern of the
        // truth never appears.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let n = 30;
        let col: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut raw = DMatrix::zeros(n, 2);
        for i in 0..n {
            raw[(i, 0)] = col[i];
            raw[(i, 1)] = col[i];
        }
        let beta = vec![0.0, 1.0];
        let y: Vec<f64> = col.iter().map(|&v| v).collect();
        let d = DesignMatrix::standardize(&raw, None).unwrap();
        let path = lasso_path(&d, &y).unwrap();
        let model = TrueModel {
            beta,
            noise_sd: 0.0,
        };
        assert!(!sign_consistent(&path, &model).unwrap());
    }
}
