//! Analytic and Monte Carlo moment structure of signature components.

pub mod ito_bm;
pub mod matrix;
pub mod mc;
pub mod ou;
pub mod poly;
pub mod strat_bm;

pub use ito_bm::{ito_bm_correlation, ito_bm_moments};
pub use matrix::{MomentKind, MomentMatrix};
pub use mc::mc_signature_moments;
pub use ou::{ou_1d_order0_order2_corr, ou_1d_order2_mean};
pub use poly::{BiPoly, PiecewiseBiPoly};
pub use strat_bm::{strat_bm_moment_function, strat_bm_moments, StratMomentEngine};
