//! Regression designs standardized by root mean square.

use crate::error::{Result, SigLabError};
use nalgebra::DMatrix;

/// An `N x p` design whose columns have been divided by
/// `sqrt(sum_m x_mj^2 / N)`, so each column has mean square exactly 1 and
/// the sample uncentered covariance equals the sample correlation. The
/// scale factors map coefficients between the raw and standardized
/// parameterizations.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    x: DMatrix<f64>,
    scales: Vec<f64>,
}

impl DesignMatrix {
    /// Standardizes `raw` column by column. `labels`, when given, name the
    /// predictors in degenerate-column errors.
    pub fn standardize(raw: &DMatrix<f64>, labels: Option<&[String]>) -> Result<Self> {
        let (n, p) = raw.shape();
        if n == 0 || p == 0 {
            return Err(SigLabError::InvalidArgument("empty design".into()));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(SigLabError::NonFinite("design matrix".into()));
        }
        let mut x = raw.clone();
        let mut scales = vec![0.0; p];
        for j in 0..p {
            let ms = raw.column(j).iter().map(|v| v * v).sum::<f64>() / n as f64;
            if ms <= 0.0 {
                let word = labels
                    .and_then(|l| l.get(j).cloned())
                    .unwrap_or_else(|| format!("column {}", j));
                return Err(SigLabError::DegenerateColumn {
                    word,
                    reason: "all-zero predictor column".into(),
                });
            }
            let scale = ms.sqrt();
            scales[j] = scale;
            for i in 0..n {
                x[(i, j)] /= scale;
            }
        }
        Ok(Self { x, scales })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Maps standardized coefficients back to the raw-predictor scale.
    pub fn raw_coefficients(&self, beta_std: &[f64]) -> Vec<f64> {
        beta_std
            .iter()
            .zip(&self.scales)
            .map(|(b, s)| b / s)
            .collect()
    }

    /// Maps raw-model coefficients to the standardized scale
    /// (`beta_tilde_j = beta_j * scale_j`).
    pub fn standardized_coefficients(&self, beta_raw: &[f64]) -> Vec<f64> {
        beta_raw
            .iter()
            .zip(&self.scales)
            .map(|(b, s)| b * s)
            .collect()
    }

    /// Applies the stored training scales to new raw rows and predicts with
    /// standardized coefficients.
    pub fn predict_raw(&self, raw: &DMatrix<f64>, beta_std: &[f64]) -> Vec<f64> {
        let (n, p) = raw.shape();
        debug_assert_eq!(p, self.p());
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..p {
                acc += raw[(i, j)] / self.scales[j] * beta_std[j];
            }
            out[i] = acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_column_standardizes_to_signed_ones() {
        let raw = DMatrix::from_column_slice(3, 1, &[-2.0, -2.0, -2.0]);
        let d = DesignMatrix::standardize(&raw, None).unwrap();
        for i in 0..3 {
            assert!((d.matrix()[(i, 0)] + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_ones_column_is_unchanged() {
        let raw = DMatrix::from_column_slice(4, 1, &[1.0, 1.0, 1.0, 1.0]);
        let d = DesignMatrix::standardize(&raw, None).unwrap();
        assert_eq!(d.scales()[0], 1.0);
    }

    #[test]
    fn two_sample_column_hand_arithmetic() {
        // (3, 4): scale = sqrt((9 + 16)/2) = sqrt(12.5).
        let raw = DMatrix::from_column_slice(2, 1, &[3.0, 4.0]);
        let d = DesignMatrix::standardize(&raw, None).unwrap();
        let scale = 12.5f64.sqrt();
        assert!((d.scales()[0] - scale).abs() < 1e-15);
        assert!((d.matrix()[(0, 0)] - 3.0 / scale).abs() < 1e-15);
        assert!((d.matrix()[(1, 0)] - 4.0 / scale).abs() < 1e-15);
    }

    #[test]
    fn zero_column_errors_with_label() {
        let raw = DMatrix::from_column_slice(2, 1, &[0.0, 0.0]);
        let labels = vec!["(1,2)".to_string()];
        let err = DesignMatrix::standardize(&raw, Some(&labels)).unwrap_err();
        assert!(err.to_string().contains("(1,2)"));
    }
}
