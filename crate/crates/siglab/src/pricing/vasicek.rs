//! Vasicek short-rate model: bond prices, simple rates, and closed-form
//! caplets/floorlets via bond options.
//!
//! Zero-coupon bonds are exponential-affine, `P(t, T) =
//! A(tau) e^{-B(tau) r_t}` with `tau = T - t`, `B = (1 - e^{-gamma tau}) /
//! gamma` and `ln A = (r_bar - sigma^2/(2 gamma^2))(B - tau) - sigma^2 B^2
//! / (4 gamma)`. A caplet on the simple rate `L(T1, T2) = (1/P(T1,T2) - 1)
//! / tau` fixing at `T1` and paying `notional * max(L - K, 0)` at `T2`
//! prices as `(notional/tau)(1 + tau K)` zero-bond puts struck at
//! `1/(1 + tau K)`; floorlets are the corresponding bond calls. Small
//! `gamma` is handled by series so the Brownian (`gamma = 0`) limit is
//! usable directly.

use crate::error::{Result, SigLabError};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VasicekModel {
    pub gamma: f64,
    pub r_bar: f64,
    pub sigma: f64,
    pub r0: f64,
}

impl VasicekModel {
    pub fn new(gamma: f64, r_bar: f64, sigma: f64, r0: f64) -> Result<Self> {
        if gamma < 0.0 || !(sigma > 0.0) {
            return Err(SigLabError::Precondition(
                "need gamma >= 0 and sigma > 0".into(),
            ));
        }
        Ok(Self {
            gamma,
            r_bar,
            sigma,
            r0,
        })
    }

    /// `B(tau) = (1 - e^{-gamma tau}) / gamma`.
    pub fn b(&self, tau: f64) -> f64 {
        if self.gamma * tau < 1e-10 {
            tau * (1.0 - 0.5 * self.gamma * tau)
        } else {
            -(-self.gamma * tau).exp_m1() / self.gamma
        }
    }

    fn b_minus_tau(&self, tau: f64) -> f64 {
        let g = self.gamma;
        if g * tau < 1e-4 {
            -g * tau * tau / 2.0 + g * g * tau * tau * tau / 6.0 - g * g * g * tau.powi(4) / 24.0
        } else {
            self.b(tau) - tau
        }
    }

    /// `ln A(tau)`.
    pub fn ln_a(&self, tau: f64) -> f64 {
        let g = self.gamma;
        let s2 = self.sigma * self.sigma;
        let bmt = self.b_minus_tau(tau);
        let vol_part = if g * tau < 1e-4 {
            s2 * tau.powi(3) / 6.0 - s2 * g * tau.powi(4) / 8.0
        } else {
            let b = self.b(tau);
            -s2 / (2.0 * g * g) * bmt - s2 * b * b / (4.0 * g)
        };
        self.r_bar * bmt + vol_part
    }

    /// `P(t, T)` given the short rate at `t` (time homogeneous).
    pub fn bond_price(&self, r_t: f64, tau: f64) -> f64 {
        (self.ln_a(tau) - self.b(tau) * r_t).exp()
    }

    /// Simply compounded rate for `[t, t + tau]` implied by the bond price.
    pub fn simple_rate(&self, r_t: f64, tau: f64) -> f64 {
        (1.0 / self.bond_price(r_t, tau) - 1.0) / tau
    }

    /// Standard deviation of `ln P(T1, T2)` as seen from time 0.
    fn bond_log_vol(&self, t1: f64, t2: f64) -> f64 {
        let g = self.gamma;
        let var_r = if g * t1 < 1e-8 {
            t1
        } else {
            -(-2.0 * g * t1).exp_m1() / (2.0 * g)
        };
        self.sigma * self.b(t2 - t1) * var_r.sqrt()
    }

    /// Price of a European put on `P(., T2)` with expiry `T1` and strike
    /// `k_bond`.
    pub fn bond_put(&self, t1: f64, t2: f64, k_bond: f64) -> f64 {
        let p1 = self.bond_price(self.r0, t1);
        let p2 = self.bond_price(self.r0, t2);
        let vol = self.bond_log_vol(t1, t2);
        if vol < 1e-14 {
            return (k_bond * p1 - p2).max(0.0);
        }
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let d1 = (p2 / (k_bond * p1)).ln() / vol + 0.5 * vol;
        let d2 = d1 - vol;
        k_bond * p1 * normal.cdf(-d2) - p2 * normal.cdf(-d1)
    }

    /// Price of a European call on `P(., T2)`.
    pub fn bond_call(&self, t1: f64, t2: f64, k_bond: f64) -> f64 {
        let p1 = self.bond_price(self.r0, t1);
        let p2 = self.bond_price(self.r0, t2);
        let vol = self.bond_log_vol(t1, t2);
        if vol < 1e-14 {
            return (p2 - k_bond * p1).max(0.0);
        }
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let d1 = (p2 / (k_bond * p1)).ln() / vol + 0.5 * vol;
        let d2 = d1 - vol;
        p2 * normal.cdf(d1) - k_bond * p1 * normal.cdf(d2)
    }

    /// Caplet paying `notional * max(L(T1, T2) - strike, 0)` at `T2`.
    pub fn caplet(&self, strike: f64, fixing: f64, pay: f64, notional: f64) -> Result<f64> {
        self.check_times(fixing, pay)?;
        let tau = pay - fixing;
        let k_bond = 1.0 / (1.0 + tau * strike);
        Ok(notional / tau * (1.0 + tau * strike) * self.bond_put(fixing, pay, k_bond))
    }

    /// Floorlet paying `notional * max(strike - L(T1, T2), 0)` at `T2`.
    pub fn floorlet(&self, strike: f64, fixing: f64, pay: f64, notional: f64) -> Result<f64> {
        self.check_times(fixing, pay)?;
        let tau = pay - fixing;
        let k_bond = 1.0 / (1.0 + tau * strike);
        Ok(notional / tau * (1.0 + tau * strike) * self.bond_call(fixing, pay, k_bond))
    }

    fn check_times(&self, fixing: f64, pay: f64) -> Result<()> {
        if !(fixing > 0.0 && pay > fixing) {
            return Err(SigLabError::Precondition(
                "need 0 < fixing < pay".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> VasicekModel {
        VasicekModel::new(0.1, 0.03, 0.02, 0.03).unwrap()
    }

    #[test]
    fn cap_floor_parity() {
        let m = model();
        for strike in [0.025, 0.03, 0.035] {
            let c = m.caplet(strike, 0.5, 1.0, 100.0).unwrap();
            let f = m.floorlet(strike, 0.5, 1.0, 100.0).unwrap();
            let tau = 0.5;
            let p1 = m.bond_price(m.r0, 0.5);
            let p2 = m.bond_price(m.r0, 1.0);
            // caplet - floorlet = (N / tau)(P1 - (1 + tau K) P2), the
            // discounted forward-minus-strike payoff.
            let parity = 100.0 / tau * (p1 - (1.0 + tau * strike) * p2);
            assert!((c - f - parity).abs() < 1e-10, "gap {}", c - f - parity);
        }
    }

    #[test]
    fn zero_vol_limit_is_discounted_intrinsic() {
        let m = VasicekModel::new(0.1, 0.03, 1e-9, 0.03).unwrap();
        let strike = 0.028;
        let c = m.caplet(strike, 0.5, 1.0, 100.0).unwrap();
        let tau = 0.5;
        let p1 = m.bond_price(m.r0, 0.5);
        let p2 = m.bond_price(m.r0, 1.0);
        let fwd = (p1 / p2 - 1.0) / tau;
        let intrinsic = 100.0 * p2 * (fwd - strike).max(0.0);
        assert!((c - intrinsic).abs() < 1e-6, "{} vs {}", c, intrinsic);
    }

    #[test]
    fn small_gamma_branch_is_continuous() {
        // gamma values straddling the series/exact switch at
        // gamma * tau = 1e-4 for tau = 0.5. The genuine model sensitivity
        // is d(lnA)/d(gamma) ~ -r_bar tau^2 / 2 = -3.75e-3, so the pair
        // 2e-6 apart differs by ~7.5e-9; a branch mismatch would show as a
        // much larger jump.
        let lo = VasicekModel::new(1.99e-4, 0.03, 0.02, 0.03).unwrap();
        let hi = VasicekModel::new(2.01e-4, 0.03, 0.02, 0.03).unwrap();
        let tau = 0.5;
        assert!((lo.ln_a(tau) - hi.ln_a(tau)).abs() < 2e-8);
        // dB/d(gamma) ~ -tau^2/2, hence ~2.5e-7 of genuine movement here.
        assert!((lo.b(tau) - hi.b(tau)).abs() < 5e-7);
        let c_lo = lo.caplet(0.03, 0.5, 1.0, 100.0).unwrap();
        let c_hi = hi.caplet(0.03, 0.5, 1.0, 100.0).unwrap();
        assert!((c_lo - c_hi).abs() < 1e-4);
    }

    #[test]
    fn bond_price_decreases_in_rate_and_tenor() {
        let m = model();
        assert!(m.bond_price(0.02, 1.0) > m.bond_price(0.04, 1.0));
        assert!(m.bond_price(0.03, 0.5) > m.bond_price(0.03, 1.0));
        let l = m.simple_rate(0.03, 0.5);
        assert!(l > 0.0 && l < 0.05, "simple rate {}", l);
    }
}
