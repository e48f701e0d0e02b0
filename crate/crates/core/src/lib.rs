//! Higher-order Gini deviations GD_n and Gini coefficients GC_n.
//!
//! GD_n(X) = E[max(X_1..X_n) - min(X_1..X_n)] / n for iid copies of X. The
//! crate evaluates it exactly on step quantiles, in closed form or by
//! quadrature for parametric families, estimates it from samples with
//! asymptotic and bootstrap inference, and ships score functions, sharp
//! bounds and a grouped-data panel tool.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod distortion;
pub mod elicitability;
pub mod error;
pub mod estimation;
pub mod gini;
pub mod ingest;
pub mod numeric;
pub mod parametric;
pub mod quadrature;
pub mod quantile;
pub mod special;

pub use distortion::{DistortionFunction, GiniOrder};
pub use error::{GiniError, Result};
pub use gini::{gc_n, gd_combination, gd_n, GiniCombination};
pub use parametric::ParametricDistribution;
pub use quantile::{QuantileFunction, StepQuantile};
