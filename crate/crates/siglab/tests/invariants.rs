//! Property tests of structural identities.

use nalgebra::DMatrix;
use proptest::prelude::*;
use siglab::lasso::{
    irrepresentable, kkt_violation, lasso_path, sign_consistent, DesignMatrix, TrueModel,
};
use siglab::sig::{
    enumerate_words, linear_signature, signature, word_count, Convention, Path, SignatureWord,
};

fn arbitrary_path(d: usize, max_pts: usize) -> impl Strategy<Value = Path> {
    proptest::collection::vec(
        proptest::collection::vec(-2.0f64..2.0, d),
        2..max_pts,
    )
    .prop_map(move |rows| Path::from_rows(1.0, rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Shuffle identity for the interpolant signature:
    /// S^(i) S^(j) = S^(i,j) + S^(j,i).
    #[test]
    fn linear_signature_shuffle_identity(path in arbitrary_path(2, 24)) {
        let sig = linear_signature(&path, 2).unwrap();
        let v = |letters: &[u32]| {
            sig.value_of(&SignatureWord::new(letters.to_vec(), 2).unwrap()).unwrap()
        };
        let lhs = v(&[1]) * v(&[2]);
        let rhs = v(&[1, 2]) + v(&[2, 1]);
        prop_assert!((lhs - rhs).abs() < 1e-10, "{} vs {}", lhs, rhs);
        // Same-letter case: S^(i)^2 = 2 S^(i,i).
        for i in [1u32, 2] {
            prop_assert!((v(&[i]) * v(&[i]) - 2.0 * v(&[i, i])).abs() < 1e-10);
        }
    }

    /// All three conventions agree on order-1 components (telescoping).
    #[test]
    fn order_one_components_telescope(path in arbitrary_path(3, 16)) {
        for conv in [Convention::Ito, Convention::Stratonovich, Convention::Linear] {
            let sig = signature(&path, 1, conv).unwrap();
            for i in 0..3 {
                let expect = path.terminal()[i] - path.row(0)[i];
                prop_assert!((sig.values[1 + i] - expect).abs() < 1e-12);
            }
        }
    }

    /// Word counts follow the closed form for arbitrary alphabets/orders.
    #[test]
    fn word_count_closed_form(d in 1u32..6, k in 0usize..6) {
        let idx = enumerate_words(d, k).unwrap();
        prop_assert_eq!(idx.len(), word_count(d, k));
        let direct: usize = (0..=k).map(|o| (d as usize).pow(o as u32)).sum();
        prop_assert_eq!(idx.len(), direct);
    }

    /// KKT stationarity holds at every breakpoint of random designs.
    #[test]
    fn homotopy_path_satisfies_kkt(
        seed in 0u64..1_000,
        n in 8usize..40,
        p in 2usize..10,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
        let design = DesignMatrix::standardize(&raw, None).unwrap();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let path = lasso_path(&design, &y).unwrap();
        for pt in &path.points {
            prop_assert!(kkt_violation(&design, &y, pt.lambda, &pt.beta) < 1e-9);
        }
    }

    /// The sign-consistency verdict is invariant under positive rescaling
    /// of columns and of the response.
    #[test]
    fn sign_consistency_scale_invariance(
        seed in 0u64..500,
        col_scale in 0.1f64..10.0,
        y_scale in 0.1f64..10.0,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let (n, p) = (30, 5);
        let raw = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
        let beta = vec![1.4, 0.0, -0.8, 0.0, 0.0];
        let y: Vec<f64> = (0..n)
            .map(|i| (0..p).map(|j| raw[(i, j)] * beta[j]).sum::<f64>()
                + 0.01 * rng.gen_range(-1.0..1.0))
            .collect();
        let model = TrueModel { beta, noise_sd: 0.01 };

        let d1 = DesignMatrix::standardize(&raw, None).unwrap();
        let v1 = sign_consistent(&lasso_path(&d1, &y).unwrap(), &model).unwrap();

        let mut raw2 = raw.clone();
        for i in 0..n {
            raw2[(i, 2)] *= col_scale;
        }
        let y2: Vec<f64> = y.iter().map(|v| v * y_scale).collect();
        // Rescaling column 2 rescales its true raw coefficient; signs are
        // unchanged.
        let mut beta2 = model.beta.clone();
        beta2[2] = beta2[2] * y_scale / col_scale;
        for b in beta2.iter_mut() {
            *b *= 1.0; // signs preserved
        }
        let model2 = TrueModel { beta: beta2, noise_sd: 0.01 };
        let d2 = DesignMatrix::standardize(&raw2, None).unwrap();
        let v2 = sign_consistent(&lasso_path(&d2, &y2).unwrap(), &model2).unwrap();
        prop_assert_eq!(v1, v2);
    }

    /// Condition II dominates condition I on arbitrary PSD correlation
    /// matrices and sign vectors.
    #[test]
    fn condition_two_dominates_condition_one(
        seed in 0u64..1_000,
        p in 3usize..9,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let x: DMatrix<f64> = DMatrix::from_fn(p + 4, p, |_, _| rng.gen_range(-1.0..1.0));
        let gram = x.transpose() * &x;
        let corr = DMatrix::from_fn(p, p, |i, j| gram[(i, j)] / (gram[(i, i)] * gram[(j, j)]).sqrt());
        let a = rng.gen_range(1..p);
        let active: Vec<usize> = (0..a).collect();
        let signs: Vec<i8> = (0..a).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let rep = irrepresentable(&corr, &active, &signs).unwrap();
        prop_assert!(rep.norm_ii >= rep.norm_i - 1e-12);
    }
}
