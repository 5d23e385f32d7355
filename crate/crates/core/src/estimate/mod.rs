//! Estimators: logit maximum likelihood, Pearson correlation, inverse
//! Gaussian fitting, goodness of fit and tail slopes.

pub mod correlation;
pub mod invgauss;
pub mod ks;
mod linalg;
pub mod logit;
pub mod normal;
pub mod report;
pub mod tail;

pub use correlation::{pearson_correlation, CorrelationResult};
pub use invgauss::{fit_inverse_gaussian, InverseGaussianParams};
pub use ks::ks_distance;
pub use linalg::{Mat4, Vec4};
pub use logit::{fit_logit, significance_stars, LogitFit, LogitOptions, LogitProblem};
pub use tail::{integer_frequencies, log_log_slope, tail_slope};
