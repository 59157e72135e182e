//! Inter-dimensional correlation specifications.
//!
//! Processes are simulated dimension by dimension from independent drivers
//! and then mixed by a matrix `G`, so the components of `X = G Z` carry the
//! covariance `G G^T`. A spec can be given either as the mixing matrix
//! itself or as a target `(sigma_i, rho_ij)` pair, in which case `G` is the
//! lower Cholesky factor of `[rho_ij sigma_i sigma_j]`.

use crate::error::{Result, SigLabError};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    d: usize,
    /// Mixing matrix applied to the vector of independent per-dimension
    /// drivers; row-major `d x d`.
    gamma: Vec<f64>,
}

impl CorrelationSpec {
    /// Identity mixing: independent unit-volatility dimensions.
    pub fn identity(d: usize) -> Self {
        let mut gamma = vec![0.0; d * d];
        for i in 0..d {
            gamma[i * d + i] = 1.0;
        }
        Self { d, gamma }
    }

    /// Directly supplied mixing matrix.
    pub fn from_mixing(d: usize, gamma: Vec<f64>) -> Result<Self> {
        if gamma.len() != d * d {
            return Err(SigLabError::InvalidArgument(format!(
                "mixing matrix needs {} entries, got {}",
                d * d,
                gamma.len()
            )));
        }
        if gamma.iter().any(|v| !v.is_finite()) {
            return Err(SigLabError::NonFinite("mixing matrix".into()));
        }
        Ok(Self { d, gamma })
    }

    /// Target covariance `rho_ij sigma_i sigma_j`; the mixing matrix is its
    /// lower Cholesky factor. Rejects non-PSD targets and off-unit implied
    /// correlation diagonals.
    pub fn from_target(sigmas: &[f64], rho: &DMatrix<f64>) -> Result<Self> {
        let d = sigmas.len();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(SigLabError::InvalidArgument(
                "correlation matrix shape does not match sigma count".into(),
            ));
        }
        if sigmas.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(SigLabError::InvalidArgument(
                "volatilities must be positive and finite".into(),
            ));
        }
        for i in 0..d {
            if (rho[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(SigLabError::InvalidArgument(format!(
                    "correlation diagonal entry ({i},{i}) = {} is not 1",
                    rho[(i, i)]
                )));
            }
            for j in 0..d {
                if (rho[(i, j)] - rho[(j, i)]).abs() > 1e-12 {
                    return Err(SigLabError::InvalidArgument(
                        "correlation matrix must be symmetric".into(),
                    ));
                }
            }
        }
        let cov = DMatrix::from_fn(d, d, |i, j| rho[(i, j)] * sigmas[i] * sigmas[j]);
        let chol = cholesky_psd(&cov)?;
        Ok(Self {
            d,
            gamma: row_major(&chol),
        })
    }

    /// Uniform pairwise correlation `rho` with common volatility `sigma`.
    pub fn uniform(d: usize, rho: f64, sigma: f64) -> Result<Self> {
        let rho_m = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { rho });
        Self::from_target(&vec![sigma; d], &rho_m)
    }

    /// Two dimensions with correlation `rho` and unit volatility.
    pub fn pair(rho: f64) -> Result<Self> {
        Self::uniform(2, rho, 1.0)
    }

    /// Draws the covariance `G G^T` from a Wishart distribution with `df`
    /// degrees of freedom and identity scale, returning its Cholesky mixing.
    pub fn wishart_draw<R: Rng + ?Sized>(d: usize, df: usize, rng: &mut R) -> Result<Self> {
        loop {
            let mut cov = DMatrix::zeros(d, d);
            for _ in 0..df {
                let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                for i in 0..d {
                    for j in 0..d {
                        cov[(i, j)] += g[i] * g[j];
                    }
                }
            }
            // A draw with df >= d is a.s. nonsingular; retry the measure-zero
            // numerically degenerate case instead of failing.
            if let Ok(chol) = cholesky_psd(&cov) {
                return Ok(Self {
                    d,
                    gamma: row_major(&chol),
                });
            }
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        self.gamma
            .iter()
            .enumerate()
            .all(|(idx, &v)| v == if idx / self.d == idx % self.d { 1.0 } else { 0.0 })
    }

    pub fn gamma(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.d, self.d, &self.gamma)
    }

    /// Implied covariance `G G^T`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let g = self.gamma();
        &g * g.transpose()
    }

    /// Entry `(i, j)` of the implied correlation matrix.
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        let cov = self.covariance();
        cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt()
    }

    /// Per-dimension volatilities `sqrt((G G^T)_ii)`.
    pub fn sigmas(&self) -> Vec<f64> {
        let cov = self.covariance();
        (0..self.d).map(|i| cov[(i, i)].sqrt()).collect()
    }

    /// Mixes independent driver values `z` in place into `x = G z`.
    pub fn mix_into(&self, z: &[f64], x: &mut [f64]) {
        debug_assert_eq!(z.len(), self.d);
        debug_assert_eq!(x.len(), self.d);
        for i in 0..self.d {
            let row = &self.gamma[i * self.d..(i + 1) * self.d];
            x[i] = row.iter().zip(z).map(|(g, zv)| g * zv).sum();
        }
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Lower Cholesky factor, accepting positive semidefinite input (zero pivots
/// allowed for exactly singular targets such as `rho = 1`).
fn cholesky_psd(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = cov.nrows();
    let mut l = DMatrix::zeros(d, d);
    let scale = cov.diagonal().amax().max(1.0);
    for j in 0..d {
        let mut diag = cov[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if diag < -1e-10 * scale {
            return Err(SigLabError::NotPositiveSemidefinite(format!(
                "pivot {} at column {}",
                diag, j
            )));
        }
        let pivot = diag.max(0.0).sqrt();
        l[(j, j)] = pivot;
        for i in (j + 1)..d {
            let mut v = cov[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            if pivot > 0.0 {
                l[(i, j)] = v / pivot;
            } else if v.abs() > 1e-8 * scale {
                return Err(SigLabError::NotPositiveSemidefinite(format!(
                    "zero pivot at column {} with nonzero below-diagonal {}",
                    j, v
                )));
            }
        }
    }
    Ok(l)
}
