//! Payoff learning and signature-based option pricing.

pub mod bsm;
pub mod learning;
pub mod payoff;
pub mod pipeline;
pub mod vasicek;

pub use bsm::{bsm_price, OptionSide};
pub use learning::{
    compare_conventions, payoff_learning, LearningConfig, PredictorKind, R2Table,
};
pub use payoff::{standard_payoffs, Payoff};
pub use pipeline::{
    price_targets, price_targets_repeated, rate_book, stock_book, BookEntry, Instrument,
    InstrumentBook, LambdaRule, PipelineConfig, PricingOutcome, Underlying,
};
pub use vasicek::VasicekModel;
