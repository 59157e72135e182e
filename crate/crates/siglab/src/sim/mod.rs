//! Seeded simulation of the model processes.

pub mod correlation;
pub mod process;
pub mod stream;

pub use correlation::CorrelationSpec;
pub use process::{gbm_pair, simulate, GridSpec, ProcessKind, ProcessSpec};
pub use stream::{mix_seed, SeededStream};
