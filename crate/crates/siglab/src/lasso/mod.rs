//! Lasso path solving, selection diagnostics, and consistency bounds.

pub mod bounds;
pub mod cd;
pub mod chol;
pub mod consistency;
pub mod design;
pub mod irrepresentable;
pub mod path;
pub mod uniqueness;

pub use bounds::{
    derive_general_params, finite_sample_general_bounds, finite_sample_ito_bounds, g_sigma,
    g_sigma_inverse, sufficient_bound, BoundOutputs, GeneralBoundParams, ItoBoundParams,
};
pub use cd::{coordinate_descent, cv_lasso, lambda_grid, lambda_max, CvFit};
pub use consistency::{sign_consistent, TrueModel};
pub use design::DesignMatrix;
pub use irrepresentable::{irrepresentable, irrepresentable_for_words, IrrepresentableReport};
pub use path::{kkt_violation, lasso_path, LassoPath, PathPoint};
pub use uniqueness::{uniqueness_bound, UniquenessBound};
