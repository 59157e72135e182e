//! Irrepresentable-condition diagnostics on a correlation matrix.
//!
//! For an active set `A` with true-coefficient signs `s`:
//!
//! * condition I bounds `|| D_{A^c,A} D_{A,A}^{-1} s ||_inf`,
//! * condition II bounds `|| D_{A^c,A} D_{A,A}^{-1} ||_inf`
//!
//! strictly below 1; `gamma = 1 - norm` is the compliance margin. Condition
//! II always dominates condition I for the same inputs.

use crate::error::{Result, SigLabError};
use crate::moments::MomentMatrix;
use crate::sig::SignatureWord;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct IrrepresentableReport {
    /// Inactive predictor indices, in input-matrix order.
    pub inactive: Vec<usize>,
    /// `D_{A^c,A} D_{A,A}^{-1} sign(beta_A)`, one entry per inactive
    /// predictor.
    pub condition_i_vector: Vec<f64>,
    pub norm_i: f64,
    pub norm_ii: f64,
    pub gamma_i: f64,
    pub gamma_ii: f64,
}

impl IrrepresentableReport {
    pub fn holds_i(&self) -> bool {
        self.norm_i < 1.0
    }

    pub fn holds_ii(&self) -> bool {
        self.norm_ii < 1.0
    }

    /// Joint verdict: both conditions hold.
    pub fn holds(&self) -> bool {
        self.holds_i() && self.holds_ii()
    }
}

/// Computes both condition norms from a (population, analytic or sample)
/// correlation matrix, active index set and sign vector.
pub fn irrepresentable(
    corr: &DMatrix<f64>,
    active: &[usize],
    signs: &[i8],
) -> Result<IrrepresentableReport> {
    let p = corr.nrows();
    if corr.ncols() != p {
        return Err(SigLabError::InvalidArgument("non-square matrix".into()));
    }
    if active.is_empty() {
        return Err(SigLabError::InvalidArgument("empty active set".into()));
    }
    if signs.len() != active.len() {
        return Err(SigLabError::InvalidArgument(
            "sign vector length must match the active set".into(),
        ));
    }
    if active.iter().any(|&j| j >= p) {
        return Err(SigLabError::InvalidArgument(
            "active index out of range".into(),
        ));
    }
    let mut is_active = vec![false; p];
    for &j in active {
        if is_active[j] {
            return Err(SigLabError::InvalidArgument(format!(
                "duplicate active index {}",
                j
            )));
        }
        is_active[j] = true;
    }
    let inactive: Vec<usize> = (0..p).filter(|&j| !is_active[j]).collect();
    let a = active.len();

    let block_aa = DMatrix::from_fn(a, a, |i, j| corr[(active[i], active[j])]);
    let block_ca = DMatrix::from_fn(inactive.len(), a, |i, j| corr[(inactive[i], active[j])]);

    let lu = block_aa.clone().lu();
    // M = D_{A^c,A} D_{A,A}^{-1}: solve D_{A,A} M^T = D_{A,A^c}.
    let rhs = block_ca.transpose();
    let m_t = lu.solve(&rhs).ok_or_else(|| {
        SigLabError::SingularActiveBlock(format!("{} x {} active block", a, a))
    })?;
    let residual = (&block_aa * &m_t - &rhs).abs().max();
    let scale = block_aa.abs().max().max(1.0);
    if !residual.is_finite() || residual > 1e-6 * scale {
        return Err(SigLabError::SingularActiveBlock(format!(
            "active block is numerically singular (solve residual {:.2e})",
            residual
        )));
    }
    let m = m_t.transpose();

    let sign_vec: Vec<f64> = signs.iter().map(|&s| s as f64).collect();
    let condition_i_vector: Vec<f64> = (0..inactive.len())
        .map(|i| (0..a).map(|j| m[(i, j)] * sign_vec[j]).sum())
        .collect();
    let norm_i = condition_i_vector
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let norm_ii = (0..inactive.len())
        .map(|i| (0..a).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);

    Ok(IrrepresentableReport {
        inactive,
        condition_i_vector,
        norm_i,
        norm_ii,
        gamma_i: 1.0 - norm_i,
        gamma_ii: 1.0 - norm_ii,
    })
}

/// Word-level wrapper over a `MomentMatrix`; the matrix is normalized to
/// correlation form first.
pub fn irrepresentable_for_words(
    moments: &MomentMatrix,
    active_words: &[SignatureWord],
    signs: &[i8],
) -> Result<IrrepresentableReport> {
    let corr = moments.correlation()?;
    let active: Vec<usize> = active_words
        .iter()
        .map(|w| corr.indexing.flat_index(w))
        .collect::<Result<_>>()?;
    irrepresentable(corr.matrix(), &active, signs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_correlation_gives_zero_norms() {
        let corr = DMatrix::<f64>::identity(6, 6);
        let rep = irrepresentable(&corr, &[1, 4], &[1, -1]).unwrap();
        assert_eq!(rep.norm_i, 0.0);
        assert_eq!(rep.norm_ii, 0.0);
        assert_eq!(rep.gamma_i, 1.0);
        assert!(rep.holds());
    }

    #[test]
    fn equal_correlation_first_order_closed_form() {
        // a active of d total, all-positive signs: the condition vector is
        // a rho / (1 + (a-1) rho) per inactive row.
        for (a, d, rho) in [(2usize, 3usize, -0.3f64), (3, 4, 0.5), (5, 6, -0.12)] {
            let corr = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { rho });
            let active: Vec<usize> = (0..a).collect();
            let signs = vec![1i8; a];
            let rep = irrepresentable(&corr, &active, &signs).unwrap();
            let expect = a as f64 * rho / (1.0 + (a as f64 - 1.0) * rho);
            for v in &rep.condition_i_vector {
                assert!((v - expect).abs() < 1e-12);
            }
            assert!((rep.norm_i - expect.abs()).abs() < 1e-12);
            // Same-norm identity for this configuration.
            assert!((rep.norm_ii - rep.norm_i).abs() < 1e-12);
        }
    }

    #[test]
    fn condition_ii_dominates_condition_i() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = rng.gen_range(3..10);
            let x: DMatrix<f64> = DMatrix::from_fn(p + 5, p, |_, _| rng.gen_range(-1.0..1.0));
            let gram = x.transpose() * &x;
            let corr = DMatrix::from_fn(p, p, |i, j| {
                gram[(i, j)] / (gram[(i, i)] * gram[(j, j)]).sqrt()
            });
            let a = rng.gen_range(1..p);
            let active: Vec<usize> = (0..a).collect();
            let signs: Vec<i8> = (0..a).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let rep = irrepresentable(&corr, &active, &signs).unwrap();
            assert!(rep.norm_ii >= rep.norm_i - 1e-12);
        }
    }

    #[test]
    fn singular_active_block_is_reported() {
        let mut corr = DMatrix::<f64>::identity(3, 3);
        corr[(0, 1)] = 1.0;
        corr[(1, 0)] = 1.0;
        let err = irrepresentable(&corr, &[0, 1], &[1, 1]).unwrap_err();
        assert!(matches!(err, SigLabError::SingularActiveBlock(_)));
    }

    #[test]
    fn block_diagonal_verdict_is_conjunction_of_blocks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..20 {
            let sizes = [rng.gen_range(2..5), rng.gen_range(2..5)];
            let blocks: Vec<DMatrix<f64>> = sizes
                .iter()
                .map(|&s| {
                    let x: DMatrix<f64> = DMatrix::from_fn(s + 4, s, |_, _| rng.gen_range(-1.0..1.0));
                    let g = x.transpose() * &x;
                    DMatrix::from_fn(s, s, |i, j| g[(i, j)] / (g[(i, i)] * g[(j, j)]).sqrt())
                })
                .collect();
            let p = sizes[0] + sizes[1];
            let mut corr = DMatrix::zeros(p, p);
            corr.view_mut((0, 0), (sizes[0], sizes[0]))
                .copy_from(&blocks[0]);
            corr.view_mut((sizes[0], sizes[0]), (sizes[1], sizes[1]))
                .copy_from(&blocks[1]);
            // One active predictor per block, random signs.
            let active = vec![0usize, sizes[0]];
            let signs: Vec<i8> = (0..2).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let joint = irrepresentable(&corr, &active, &signs).unwrap();
            let rep0 = irrepresentable(&blocks[0], &[0], &signs[..1]).unwrap();
            let rep1 = irrepresentable(&blocks[1], &[0], &signs[1..]).unwrap();
            assert_eq!(joint.holds(), rep0.holds() && rep1.holds());
            assert!((joint.norm_ii - rep0.norm_ii.max(rep1.norm_ii)).abs() < 1e-12);
        }
    }
}
