//! Closed-form correlation anchors for the 1-d Ornstein--Uhlenbeck process.

use crate::error::{Result, SigLabError};
use crate::sig::Convention;

/// Uncentered correlation between the 0-th order component and the
/// `(1,1)` component for a standard 1-d OU process with speed `kappa > 0`
/// at horizon `t_end`.
///
/// Ito convention:
/// `(-2 kT - e^{-2kT} + 1) / sqrt(4 kT e^{-2kT} + 3 e^{-4kT} - 6 e^{-2kT}
///  - 4 kT + 3 + 4 k^2 T^2)`; the radicand regroups exactly as
/// `3 u^2 + 4 kT u + 4 k^2 T^2` with `u = expm1(-2 kT)`, which is what is
/// evaluated here so the small-`kappa` regime does not cancel
/// catastrophically. Stratonovich convention: `sqrt(3)/3`, independent of
/// `kappa` and `t_end`.
pub fn ou_1d_order0_order2_corr(kappa: f64, t_end: f64, convention: Convention) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(SigLabError::Precondition(format!(
            "kappa must be > 0 (got {}); use the Brownian-motion formulas for kappa = 0",
            kappa
        )));
    }
    if !(t_end > 0.0) {
        return Err(SigLabError::Precondition("t_end must be > 0".into()));
    }
    match convention {
        Convention::Stratonovich => Ok(3f64.sqrt() / 3.0),
        Convention::Ito => {
            let kt = kappa * t_end;
            let u = (-2.0 * kt).exp_m1();
            let numerator = -(u + 2.0 * kt);
            let radicand = 3.0 * u * u + 4.0 * kt * u + 4.0 * kt * kt;
            Ok(numerator / radicand.sqrt())
        }
        Convention::Linear => Err(SigLabError::InvalidArgument(
            "no closed form for the linear convention; use the Monte Carlo estimator".into(),
        )),
    }
}

/// First moment `E[S^{(1,1)}]` of the 1-d OU process at `t_end`:
/// Ito `-T/2 + (1 - e^{-2kT})/(4k)`, Stratonovich `(1 - e^{-2kT})/(4k)`.
pub fn ou_1d_order2_mean(kappa: f64, t_end: f64, convention: Convention) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(SigLabError::Precondition("kappa must be > 0".into()));
    }
    let w = -(-2.0 * kappa * t_end).exp_m1() / (4.0 * kappa);
    match convention {
        Convention::Ito => Ok(w - t_end / 2.0),
        Convention::Stratonovich => Ok(w),
        Convention::Linear => Err(SigLabError::InvalidArgument(
            "no closed form for the linear convention".into(),
        )),
    }
}
