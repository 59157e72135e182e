//! Monte Carlo estimation of signature moment matrices.

use super::matrix::{MomentKind, MomentMatrix};
use crate::error::{Result, SigLabError};
use crate::sig::{enumerate_words, signature, Convention};
use crate::sim::{simulate, ProcessSpec, SeededStream};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Plain averages of `S` and `S S^T` over simulated paths (uncentered, no
/// bias correction). Trials are split into fixed-size chunks that are
/// reduced in index order, so the result is bit-identical for any thread
/// count.
pub fn mc_signature_moments(
    spec: &ProcessSpec,
    max_order: usize,
    convention: Convention,
    trials: u64,
    stream: SeededStream,
) -> Result<MomentMatrix> {
    if trials < 2 {
        return Err(SigLabError::Precondition(
            "at least 2 trials are required".into(),
        ));
    }
    let indexing = enumerate_words(spec.d() as u32, max_order)?;
    let p = indexing.len();

    const CHUNK: u64 = 512;
    let n_chunks = trials.div_ceil(CHUNK);
    let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(trials);
            let mut outer = vec![0.0f64; p * p];
            let mut first = vec![0.0f64; p];
            for trial in lo..hi {
                let path = simulate(spec, stream.substream(trial))
                    .expect("spec validated before dispatch");
                let sig = signature(&path, max_order, convention)
                    .expect("signature of a valid path");
                let s = &sig.values;
                for i in 0..p {
                    first[i] += s[i];
                    let row = &mut outer[i * p..(i + 1) * p];
                    let si = s[i];
                    for j in 0..p {
                        row[j] += si * s[j];
                    }
                }
            }
            (outer, first)
        })
        .collect();

    // Validate eagerly once so the parallel loop's expects cannot trip.
    simulate(spec, stream.substream(0))?;

    let mut outer = vec![0.0f64; p * p];
    let mut first = vec![0.0f64; p];
    for (o, f) in chunks {
        for (acc, v) in outer.iter_mut().zip(o) {
            *acc += v;
        }
        for (acc, v) in first.iter_mut().zip(f) {
            *acc += v;
        }
    }
    let scale = 1.0 / trials as f64;
    let values = DMatrix::from_fn(p, p, |i, j| outer[i * p + j] * scale);
    let first = first.into_iter().map(|v| v * scale).collect();
    MomentMatrix::new(indexing, MomentKind::Covariance, values, first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::ito_bm::ito_bm_correlation;
    use crate::sim::{CorrelationSpec, GridSpec, ProcessKind};

    fn bm_spec(rho: f64) -> ProcessSpec {
        ProcessSpec::new(
            ProcessKind::Brownian,
            CorrelationSpec::pair(rho).unwrap(),
            GridSpec::default(),
        )
    }

    #[test]
    fn two_trials_matrix_is_symmetric_low_rank() {
        let m = mc_signature_moments(
            &bm_spec(0.0),
            2,
            Convention::Ito,
            2,
            SeededStream::new(1, 0),
        )
        .unwrap();
        let a = m.matrix();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                assert!((a[(i, j)] - a[(j, i)]).abs() < 1e-14);
            }
        }
        let eig = a.clone().symmetric_eigen();
        let mut positive = 0;
        for v in eig.eigenvalues.iter() {
            assert!(*v > -1e-9);
            if *v > 1e-9 {
                positive += 1;
            }
        }
        assert!(positive <= 2);
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                mc_signature_moments(
                    &bm_spec(0.3),
                    3,
                    Convention::Stratonovich,
                    2_000,
                    SeededStream::new(7, 0),
                )
                .unwrap()
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(a.first_moments, b.first_moments);
    }

    #[test]
    fn ito_bm_correlation_mc_agrees_with_kronecker() {
        // Entry noise is chaos-order dependent; K = 2 keeps the classical
        // 1/sqrt(N) scale so a fixed tolerance is meaningful.
        let m = mc_signature_moments(
            &bm_spec(0.6),
            2,
            Convention::Ito,
            30_000,
            SeededStream::new(11, 0),
        )
        .unwrap()
        .correlation()
        .unwrap();
        let analytic = ito_bm_correlation(&CorrelationSpec::pair(0.6).unwrap(), 2).unwrap();
        let gap = m.max_abs_diff(&analytic);
        assert!(gap < 0.03, "gap = {}", gap);
    }

    #[test]
    fn rejects_single_trial() {
        assert!(mc_signature_moments(
            &bm_spec(0.0),
            2,
            Convention::Ito,
            1,
            SeededStream::new(0, 0)
        )
        .is_err());
    }
}
