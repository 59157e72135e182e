//! Closed-form moment structure of the Ito signature of Brownian motion.
//!
//! For a mixed Brownian motion with inter-dimensional correlations
//! `rho_ij` and volatilities `sigma_i`, same-order components satisfy
//! `E[S_w S_v] = (t^n / n!) prod_k rho_{w_k v_k} sigma_{w_k} sigma_{v_k}`,
//! first moments of orders >= 1 vanish, and cross-order second moments are
//! exactly zero. In recursive order the correlation matrix is therefore
//! block diagonal, `diag{1, O, O x O, ...}` with `O = [rho_ij]` and `x` the
//! Kronecker product; the correlation of `(w . i, v . j)` equals
//! `rho_ij` times the correlation of `(w, v)`, which is how the entries are
//! built here so the Kronecker identity holds bit for bit.

use super::matrix::{MomentKind, MomentMatrix};
use crate::error::Result;
use crate::sig::{enumerate_words, WordIndexing};
use crate::sim::CorrelationSpec;
use nalgebra::DMatrix;

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// Analytic uncentered covariance matrix of the Ito signature of the mixed
/// Brownian motion at time `t_end`, truncated at `max_order`.
pub fn ito_bm_moments(
    corr: &CorrelationSpec,
    max_order: usize,
    t_end: f64,
) -> Result<MomentMatrix> {
    let indexing = enumerate_words(corr.d() as u32, max_order)?;
    let cov = corr.covariance();
    let fact = factorials(max_order);
    let p = indexing.len();
    let mut values = DMatrix::zeros(p, p);
    values[(0, 0)] = 1.0;
    for k in 1..=max_order {
        let range = indexing.order_range(k);
        let t_weight = t_end.powi(k as i32) / fact[k];
        for i in range.clone() {
            for j in range.clone() {
                values[(i, j)] = t_weight * product_entry(&indexing, &cov, i, j, k);
            }
        }
    }
    let mut first = vec![0.0; p];
    first[0] = 1.0;
    MomentMatrix::new(indexing, MomentKind::Covariance, values, first)
}

/// Analytic correlation matrix `diag{1, O, ..., O^(x K)}` in recursive
/// order; entries are built by the Kronecker recursion itself.
pub fn ito_bm_correlation(
    corr: &CorrelationSpec,
    max_order: usize,
) -> Result<MomentMatrix> {
    let indexing = enumerate_words(corr.d() as u32, max_order)?;
    let d = corr.d();
    let cov = corr.covariance();
    let rho = DMatrix::from_fn(d, d, |i, j| cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt());
    let p = indexing.len();
    let mut values = DMatrix::zeros(p, p);
    values[(0, 0)] = 1.0;
    for k in 1..=max_order {
        for i in indexing.order_range(k) {
            for j in indexing.order_range(k) {
                let (ip, il) = indexing.parent_and_last(i, k);
                let (jp, jl) = indexing.parent_and_last(j, k);
                values[(i, j)] = rho[(il, jl)] * values[(ip, jp)];
            }
        }
    }
    let mut first = vec![0.0; p];
    first[0] = 1.0;
    MomentMatrix::new(indexing, MomentKind::Correlation, values, first)
}

fn product_entry(
    indexing: &WordIndexing,
    cov: &DMatrix<f64>,
    i: usize,
    j: usize,
    k: usize,
) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (ip, il) = indexing.parent_and_last(i, k);
    let (jp, jl) = indexing.parent_and_last(j, k);
    cov[(il, jl)] * product_entry(indexing, cov, ip, jp, k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::SignatureWord;

    #[test]
    fn one_dim_pure_word_moments() {
        let corr = CorrelationSpec::identity(1);
        let m = ito_bm_moments(&corr, 3, 1.0).unwrap();
        let idx = &m.indexing;
        let w3 = idx
            .flat_index(&SignatureWord::new(vec![1, 1, 1], 1).unwrap())
            .unwrap();
        assert!((m.value(w3, w3) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn independent_dims_give_identity_correlation() {
        let corr = CorrelationSpec::pair(0.0).unwrap();
        let m = ito_bm_correlation(&corr, 4).unwrap();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(m.value(i, j), expect);
            }
        }
    }

    #[test]
    fn rho_entry_for_repeated_letters() {
        let corr = CorrelationSpec::pair(0.6).unwrap();
        let m = ito_bm_correlation(&corr, 4).unwrap();
        let idx = &m.indexing;
        let a = idx
            .flat_index(&SignatureWord::new(vec![1, 1], 2).unwrap())
            .unwrap();
        let b = idx
            .flat_index(&SignatureWord::new(vec![2, 2], 2).unwrap())
            .unwrap();
        assert!((m.value(a, b) - 0.36).abs() < 1e-15);
    }

    #[test]
    fn covariance_normalizes_to_kronecker_correlation() {
        let corr = CorrelationSpec::uniform(2, 0.3, 1.7).unwrap();
        let cov = ito_bm_moments(&corr, 3, 2.0).unwrap();
        let direct = ito_bm_correlation(&corr, 3).unwrap();
        let normalized = cov.correlation().unwrap();
        assert!(normalized.max_abs_diff(&direct) < 1e-12);
    }
}
