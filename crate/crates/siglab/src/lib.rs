//! siglab: a numerical laboratory for path-signature features.
//!
//! The crate computes truncated signatures of discrete multidimensional
//! time series under Ito, Stratonovich and piecewise-linear conventions,
//! derives analytic and Monte Carlo moment/correlation structure of those
//! signature components for Brownian and Ornstein--Uhlenbeck models, runs
//! Lasso feature selection with sign-consistency and irrepresentable
//! condition diagnostics, and drives the downstream experiment suites:
//! consistency-rate sweeps, option payoff learning, and signature-based
//! option pricing against Black--Scholes--Merton and Vasicek anchors.

pub mod consistency;
pub mod error;
pub mod pricing;
pub mod lasso;
pub mod moments;
pub mod sig;
pub mod sim;

pub use error::{Result, SigLabError};
