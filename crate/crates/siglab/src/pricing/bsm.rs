//! Black--Scholes--Merton closed forms with continuous dividend yield.

use crate::error::{Result, SigLabError};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionSide {
    Call,
    Put,
}

/// European option price under geometric Brownian motion with risk-free
/// rate `r`, dividend yield `q_div` and volatility `vol`.
pub fn bsm_price(
    side: OptionSide,
    s0: f64,
    strike: f64,
    r: f64,
    q_div: f64,
    vol: f64,
    t: f64,
) -> Result<f64> {
    if !(s0 > 0.0) || !(strike > 0.0) {
        return Err(SigLabError::Precondition(
            "spot and strike must be positive".into(),
        ));
    }
    if !(vol > 0.0) || !(t > 0.0) {
        return Err(SigLabError::Precondition(
            "volatility and maturity must be positive".into(),
        ));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let sig_t = vol * t.sqrt();
    let d1 = ((s0 / strike).ln() + (r - q_div + 0.5 * vol * vol) * t) / sig_t;
    let d2 = d1 - sig_t;
    let df_s = (-q_div * t).exp();
    let df_k = (-r * t).exp();
    let price = match side {
        OptionSide::Call => s0 * df_s * normal.cdf(d1) - strike * df_k * normal.cdf(d2),
        OptionSide::Put => strike * df_k * normal.cdf(-d2) - s0 * df_s * normal.cdf(-d1),
    };
    Ok(price)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_call_parity_is_exact() {
        for (s0, k, r, q, vol, t) in [
            (100.0, 100.0, 0.02, 0.0, 0.2, 2.5),
            (100.0, 80.0, 0.05, 0.01, 0.35, 0.7),
            (50.0, 65.0, 0.0, 0.03, 0.1, 5.0),
        ] {
            let c = bsm_price(OptionSide::Call, s0, k, r, q, vol, t).unwrap();
            let p = bsm_price(OptionSide::Put, s0, k, r, q, vol, t).unwrap();
            let parity = s0 * (-q * t).exp() - k * (-r * t).exp();
            assert!((c - p - parity).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_vol_limit_is_discounted_forward_intrinsic() {
        let (s0, k, r, t) = (100.0, 90.0, 0.03, 1.0);
        let c = bsm_price(OptionSide::Call, s0, k, r, 0.0, 1e-8, t).unwrap();
        let intrinsic = (-r * t).exp() * (s0 * (r * t).exp() - k);
        assert!((c - intrinsic).abs() < 1e-8);
    }

    #[test]
    fn reference_value_and_mc_oracle() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let (s0, k, r, q, vol, t) = (100.0, 100.0, 0.02, 0.0, 0.2, 2.5);
        let price = bsm_price(OptionSide::Call, s0, k, r, q, vol, t).unwrap();
        // Hand check: d1 = 0.1 / (0.2 sqrt(2.5)) = 0.31623, d2 = 0, so
        // C = 100 Phi(0.31623) - 100 e^{-0.05} Phi(0) = 14.847.
        assert!((price - 14.847).abs() < 5e-3, "price = {}", price);
        // Exact terminal-lognormal Monte Carlo.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let n = 400_000;
        let drift = (r - q - 0.5 * vol * vol) * t;
        let diff = vol * t.sqrt();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            let payoff = (s0 * (drift + diff * z).exp() - k).max(0.0) * (-r * t).exp();
            sum += payoff;
            sumsq += payoff * payoff;
        }
        let mean = sum / n as f64;
        let se = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(
            (price - mean).abs() < 3.0 * se,
            "price {} vs mc {} (se {})",
            price,
            mean,
            se
        );
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(bsm_price(OptionSide::Call, 100.0, 100.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(bsm_price(OptionSide::Call, -1.0, 100.0, 0.0, 0.0, 0.2, 1.0).is_err());
    }
}
