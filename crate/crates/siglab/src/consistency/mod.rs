//! Randomized feature-selection experiments: consistency rates,
//! out-of-sample error, and parameter sweeps.

pub mod experiments;

pub use experiments::{
    arima_sweep, augmentation_compare, consistency_rate, dimension_sweep, mean_reversion_sweep,
    oos_mse, rho_q_sweep, sample_sweep, with_confidence, ExperimentConfig, ExperimentResult,
    MseSummary, RatePoint, RateSummary, Z_90,
};
