//! Separation probability between two distinct linear combinations of
//! signature components.
//!
//! For coefficient vectors `a != b`, `c = a - b`, truncated signature `S`
//! with second-moment matrix `Sigma = E[S S']`, and a ball radius
//! `r = theta sqrt(p ||Sigma||_2)`, the probability that `|L_a - L_b|`
//! exceeds `eta` is bounded below by
//!
//! ```text
//! P*(eta) = (1 - 1/theta) (m2 / D - eta) / (D - eta),
//! D = theta ||c||_inf p sqrt(||Sigma||_2),
//! m2 = E[(c' S)^2 | ||S||_2 <= r],
//! ```
//!
//! positive for `eta` below `eta_bar = min(m2 / D, D)`. The conditional
//! second moment m2 is estimated by Monte Carlo over supplied signature
//! draws.

use crate::error::{Result, SigLabError};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct UniquenessBound {
    pub p_star: f64,
    pub eta_bar: f64,
    /// MC estimate of the conditional second moment.
    pub conditional_second_moment: f64,
    /// Fraction of draws inside the conditioning ball.
    pub kept_fraction: f64,
    pub ball_radius: f64,
}

/// Evaluates the bound from `draws` (one signature vector per row) and the
/// second-moment matrix `sigma`.
pub fn uniqueness_bound(
    sigma: &DMatrix<f64>,
    draws: &DMatrix<f64>,
    a: &[f64],
    b: &[f64],
    theta: f64,
    eta: f64,
) -> Result<UniquenessBound> {
    let p = sigma.nrows();
    if sigma.ncols() != p || a.len() != p || b.len() != p || draws.ncols() != p {
        return Err(SigLabError::InvalidArgument(
            "dimension mismatch between sigma, draws and coefficient vectors".into(),
        ));
    }
    if !(theta > 1.0) {
        return Err(SigLabError::Precondition(
            "theta must exceed 1 for a positive bound".into(),
        ));
    }
    let c: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let c_inf = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if c_inf == 0.0 {
        return Err(SigLabError::Precondition(
            "coefficient vectors must differ in at least one entry".into(),
        ));
    }
    let spectral = sigma
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let ball_radius = theta * ((p as f64) * spectral).sqrt();
    let mut kept = 0usize;
    let mut acc = 0.0f64;
    for row in 0..draws.nrows() {
        let mut norm_sq = 0.0;
        let mut proj = 0.0;
        for j in 0..p {
            let s = draws[(row, j)];
            norm_sq += s * s;
            proj += c[j] * s;
        }
        if norm_sq.sqrt() <= ball_radius {
            kept += 1;
            acc += proj * proj;
        }
    }
    if kept == 0 {
        return Err(SigLabError::EmptyConditioningEvent);
    }
    let m2 = acc / kept as f64;
    let denom = theta * c_inf * p as f64 * spectral.sqrt();
    let eta_bar = (m2 / denom).min(denom);
    if !(eta > 0.0 && eta < eta_bar) {
        return Err(SigLabError::Precondition(format!(
            "eta must lie in (0, {}) (got {})",
            eta_bar, eta
        )));
    }
    let p_star = (1.0 - 1.0 / theta) * (m2 / denom - eta) / (denom - eta);
    Ok(UniquenessBound {
        p_star,
        eta_bar,
        conditional_second_moment: m2,
        kept_fraction: kept as f64 / draws.nrows() as f64,
        ball_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::{signature, Convention};
    use crate::sim::{simulate, CorrelationSpec, GridSpec, ProcessKind, ProcessSpec, SeededStream};

    fn bm_draws(trials: u64, max_order: usize, seed: u64) -> DMatrix<f64> {
        let spec = ProcessSpec::new(
            ProcessKind::Brownian,
            CorrelationSpec::identity(1),
            GridSpec::default(),
        );
        let stream = SeededStream::new(seed, 0);
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(trials as usize);
        for t in 0..trials {
            let path = simulate(&spec, stream.substream(t)).unwrap();
            rows.push(signature(&path, max_order, Convention::Ito).unwrap().values);
        }
        let p = rows[0].len();
        DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j])
    }

    fn moment_matrix(draws: &DMatrix<f64>) -> DMatrix<f64> {
        let n = draws.nrows() as f64;
        draws.transpose() * draws / n
    }

    #[test]
    fn small_perturbation_has_positive_bound() {
        let draws = bm_draws(4000, 2, 5);
        let sigma = moment_matrix(&draws);
        let a = vec![0.5, 1.0, 0.25];
        let mut b = a.clone();
        b[1] += 0.01;
        let out = uniqueness_bound(&sigma, &draws, &a, &b, 3.0, 1e-4).unwrap();
        assert!(out.eta_bar > 0.0);
        assert!(out.p_star > 0.0);
        assert!(out.kept_fraction > 0.5);
    }

    #[test]
    fn prefactor_kills_bound_as_theta_approaches_one() {
        let draws = bm_draws(2000, 2, 6);
        let sigma = moment_matrix(&draws);
        let a = vec![1.0, 0.0, 0.0];
        let b = vec![0.0, 1.0, 0.0];
        let wide = uniqueness_bound(&sigma, &draws, &a, &b, 4.0, 1e-6).unwrap();
        let tight = uniqueness_bound(&sigma, &draws, &a, &b, 1.0 + 1e-6, 1e-6).unwrap();
        assert!(tight.p_star < wide.p_star);
        assert!(tight.p_star < 1e-5);
    }

    #[test]
    fn doubling_draws_is_stable() {
        let a = vec![1.0, -0.5, 0.2];
        let b = vec![0.9, -0.5, 0.2];
        let small = bm_draws(4000, 2, 7);
        let large = bm_draws(8000, 2, 7);
        let sigma = moment_matrix(&large);
        let x = uniqueness_bound(&sigma, &small, &a, &b, 3.0, 1e-5).unwrap();
        let y = uniqueness_bound(&sigma, &large, &a, &b, 3.0, 1e-5).unwrap();
        let rel = (x.conditional_second_moment - y.conditional_second_moment).abs()
            / y.conditional_second_moment;
        assert!(rel < 0.2, "rel = {}", rel);
        assert!((x.p_star - y.p_star).abs() / y.p_star < 0.5);
    }

    #[test]
    fn equal_vectors_and_empty_ball_are_rejected() {
        let draws = bm_draws(100, 2, 8);
        let sigma = moment_matrix(&draws);
        let a = vec![1.0, 0.0, 0.0];
        assert!(uniqueness_bound(&sigma, &draws, &a, &a, 2.0, 1e-6).is_err());
    }
}
