//! Finite-sample consistency bound calculators.
//!
//! Two probability lower bounds share the envelope
//! `P = (1 - 8 p^4 smax^4 (smin^4 + c1) / (N xi^2 smin^4)) (1 - 4 e^{-c2 N lambda^2})`
//! and differ in how the deviation scale `xi` is produced from the monotone
//! map
//! `g(x) = 2 x smin^2 (p-1) rho / ((smin^2 - x)(2 smin^2 - x)) + (p-1) x / (smin^2 - x)`
//! on `(0, smin^2)`, inverted here by bisection. The Brownian/Ito variant
//! consumes `(rho, q_max)`; the general variant consumes the correlation
//! summary `(alpha, zeta, C_min, gamma)` of an explicit active set, which
//! `derive_general_params` extracts from a correlation matrix.

use super::irrepresentable::irrepresentable;
use crate::error::{Result, SigLabError};
use nalgebra::DMatrix;

/// Sufficient inter-dimensional correlation bound `1 / (2 q_max - 1)` for
/// the Ito signature of Brownian motion.
pub fn sufficient_bound(q_max: usize) -> Result<f64> {
    if q_max == 0 {
        return Err(SigLabError::Precondition(
            "q_max must be at least 1".into(),
        ));
    }
    Ok(1.0 / (2.0 * q_max as f64 - 1.0))
}

/// `g_Sigma` of the bound envelope; increasing on `(0, sigma_min^2)` for
/// `rho >= 0`.
pub fn g_sigma(x: f64, sigma_min: f64, p: usize, rho: f64) -> f64 {
    let s2 = sigma_min * sigma_min;
    let pm1 = (p - 1) as f64;
    2.0 * x * s2 * pm1 * rho / ((s2 - x) * (2.0 * s2 - x)) + pm1 * x / (s2 - x)
}

/// Inverse of `g_Sigma` by bisection to absolute tolerance 1e-12.
pub fn g_sigma_inverse(y: f64, sigma_min: f64, p: usize, rho: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(SigLabError::Precondition(format!(
            "g_Sigma inverse needs a positive target (got {})",
            y
        )));
    }
    if p < 2 {
        return Err(SigLabError::Precondition(
            "at least 2 predictors are required".into(),
        ));
    }
    if rho < 0.0 {
        return Err(SigLabError::Precondition(
            "rho must be nonnegative in g_Sigma".into(),
        ));
    }
    let s2 = sigma_min * sigma_min;
    let mut lo = 0.0f64;
    let mut hi = s2 * (1.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g_sigma(mid, sigma_min, p, rho) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn envelope(p: usize, sigma_min: f64, sigma_max: f64, n: f64, xi: f64, lambda: f64, c1: f64, c2: f64) -> f64 {
    let p4 = (p as f64).powi(4);
    let smin4 = sigma_min.powi(4);
    let smax4 = sigma_max.powi(4);
    let first = 1.0 - 8.0 * p4 * smax4 * (smin4 + c1) / (n * xi * xi * smin4);
    let second = 1.0 - 4.0 * (-c2 * n * lambda * lambda).exp();
    first * second
}

/// Inputs of the Brownian-motion/Ito bound. `rho` is the largest absolute
/// inter-dimensional correlation, `sigma_noise` the regression noise level,
/// and `c1`, `c2` the otherwise-unspecified envelope constants (defaults 1,
/// not a source value).
#[derive(Debug, Clone)]
pub struct ItoBoundParams {
    pub rho: f64,
    pub sigma_noise: f64,
    pub q_max: usize,
    pub p: usize,
    pub n_samples: f64,
    pub lambda_n: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOutputs {
    pub p_min: f64,
    pub h_lambda: f64,
    pub lambda_threshold: f64,
    pub xi: f64,
}

/// Probability lower bound and estimation-error envelope for the Ito
/// signature of Brownian motion.
pub fn finite_sample_ito_bounds(params: &ItoBoundParams) -> Result<BoundOutputs> {
    let q = params.q_max as f64;
    let rho = params.rho;
    if params.q_max == 0 {
        return Err(SigLabError::Precondition("q_max must be >= 1".into()));
    }
    if rho < 0.0 {
        return Err(SigLabError::Precondition("rho must be >= 0".into()));
    }
    let bound = 1.0 / (2.0 * q - 1.0);
    if !(rho < bound) {
        return Err(SigLabError::Precondition(format!(
            "violated: rho < 1/(2 q_max - 1), i.e. {} < {}",
            rho, bound
        )));
    }
    if params.p < 2 {
        return Err(SigLabError::Precondition("p must be >= 2".into()));
    }
    let sigma = params.sigma_noise;
    let lambda_threshold = 4.0 * sigma * (1.0 - (q - 1.0) * rho) / (1.0 - (2.0 * q - 1.0) * rho)
        * (2.0 * (params.p as f64).ln() / params.n_samples).sqrt();
    if !(params.lambda_n > lambda_threshold) {
        return Err(SigLabError::Precondition(format!(
            "violated: lambda_N > {} (got {})",
            lambda_threshold, params.lambda_n
        )));
    }
    let arg1 = (1.0 - (2.0 * q - 1.0) * rho) * (1.0 - (q - 1.0) * rho) / (3.0 - (2.0 * q - 3.0) * rho);
    let arg2 = (1.0 - (q - 1.0) * rho) / (2.0 * (params.p as f64 * q).sqrt());
    let xi = g_sigma_inverse(arg1, params.sigma_min, params.p, rho)?
        .min(g_sigma_inverse(arg2, params.sigma_min, params.p, rho)?);
    let p_min = envelope(
        params.p,
        params.sigma_min,
        params.sigma_max,
        params.n_samples,
        xi,
        params.lambda_n,
        params.c1,
        params.c2,
    );
    let h_lambda = params.lambda_n
        * ((3.0 - (2.0 * q - 3.0) * rho) / ((1.0 - (q - 1.0) * rho) * (2.0 + 2.0 * rho))
            + 4.0 * sigma * (2.0 * q.sqrt() / (1.0 - (q - 1.0) * rho)).sqrt());
    Ok(BoundOutputs {
        p_min,
        h_lambda,
        lambda_threshold,
        xi,
    })
}

/// Inputs of the general-predictor bound: correlation summaries of an
/// explicit active set plus the envelope parameters. `rho` enters only
/// through `g_Sigma`.
#[derive(Debug, Clone)]
pub struct GeneralBoundParams {
    pub alpha: f64,
    pub zeta: f64,
    pub c_min: f64,
    pub gamma: f64,
    pub sigma_noise: f64,
    pub p: usize,
    pub n_samples: f64,
    pub lambda_n: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rho: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Probability lower bound and error envelope for general predictors
/// (Stratonovich signature of Brownian motion, either signature of the OU
/// process, or any design with the stated correlation summaries).
pub fn finite_sample_general_bounds(params: &GeneralBoundParams) -> Result<BoundOutputs> {
    if !(params.gamma > 0.0 && params.gamma <= 1.0) {
        return Err(SigLabError::Precondition(format!(
            "violated: gamma in (0, 1] (got {})",
            params.gamma
        )));
    }
    if !(params.zeta > 0.0) || !(params.c_min > 0.0) || params.alpha < 0.0 {
        return Err(SigLabError::Precondition(
            "need zeta > 0, c_min > 0, alpha >= 0".into(),
        ));
    }
    if params.p < 2 {
        return Err(SigLabError::Precondition("p must be >= 2".into()));
    }
    let lambda_threshold = 4.0 * params.sigma_noise / params.gamma
        * (2.0 * (params.p as f64).ln() / params.n_samples).sqrt();
    if !(params.lambda_n > lambda_threshold) {
        return Err(SigLabError::Precondition(format!(
            "violated: lambda_N > {} (got {})",
            lambda_threshold, params.lambda_n
        )));
    }
    let arg1 = params.gamma / (params.zeta * (2.0 + 2.0 * params.alpha * params.zeta + params.gamma));
    let arg2 = params.c_min / (2.0 * (params.p as f64).sqrt());
    let xi = g_sigma_inverse(arg1, params.sigma_min, params.p, params.rho)?
        .min(g_sigma_inverse(arg2, params.sigma_min, params.p, params.rho)?);
    let p_min = envelope(
        params.p,
        params.sigma_min,
        params.sigma_max,
        params.n_samples,
        xi,
        params.lambda_n,
        params.c1,
        params.c2,
    );
    let az = params.alpha * params.zeta;
    let h_lambda = params.lambda_n
        * (params.zeta * (2.0 + 2.0 * az + params.gamma) / (2.0 + 2.0 * az)
            + 4.0 * params.sigma_noise / (0.5 * params.c_min).sqrt());
    Ok(BoundOutputs {
        p_min,
        h_lambda,
        lambda_threshold,
        xi,
    })
}

/// Correlation summaries `(alpha, zeta, c_min, gamma)` of an active set:
/// `alpha = ||D_{A^c,A}||_inf`, `zeta = ||D_{A,A}^{-1}||_inf`,
/// `c_min = lambda_min(D_{A,A})`, `gamma = 1 - ||D_{A^c,A} D_{A,A}^{-1}||_inf`.
pub fn derive_general_params(
    corr: &DMatrix<f64>,
    active: &[usize],
) -> Result<(f64, f64, f64, f64)> {
    let a = active.len();
    let p = corr.nrows();
    let signs = vec![1i8; a];
    let rep = irrepresentable(corr, active, &signs)?;
    let block_aa = DMatrix::from_fn(a, a, |i, j| corr[(active[i], active[j])]);
    let mut is_active = vec![false; p];
    for &j in active {
        is_active[j] = true;
    }
    let inactive: Vec<usize> = (0..p).filter(|&j| !is_active[j]).collect();
    let alpha = inactive
        .iter()
        .map(|&i| active.iter().map(|&j| corr[(i, j)].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let inv = block_aa.clone().try_inverse().ok_or_else(|| {
        SigLabError::SingularActiveBlock("active correlation block".into())
    })?;
    let zeta = (0..a)
        .map(|i| (0..a).map(|j| inv[(i, j)].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let eig = block_aa.symmetric_eigen();
    let c_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((alpha, zeta, c_min, rep.gamma_ii))
}
