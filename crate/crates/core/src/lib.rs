//! Chernoff approximations to the one-dimensional heat equation `u_t = u_xx`
//! and empirical estimation of their convergence order.
//!
//! A shift-type operator `C(t)f(x) = Σ wᵢ f(x + cᵢ√t)` is iterated `n` times
//! with step `t/n`; the sup-norm distance to the heat semigroup on a fixed
//! grid is then fitted on a log-log scale.
//!
//! ```
//! use chernoff_core::{chernoff::ShiftChernoffOperator, functions, analysis};
//!
//! let s = ShiftChernoffOperator::s();
//! let curve = analysis::error_curve(&s, &functions::sine(), 0.5, &[1, 2, 3, 4]).unwrap();
//! let fit = curve.fit(&Default::default()).unwrap();
//! assert!(fit.slope < -1.5);
//! ```

pub mod analysis;
pub mod chernoff;
pub mod config;
pub mod error;
pub mod functions;
pub mod grid;
pub mod quadrature;

pub use analysis::{run_experiment, ErrorCurve, ExperimentReport, HolderFit, RegressionFit};
pub use chernoff::{ShiftChernoffOperator, TangencyReport};
pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use functions::ScalarFunction;
pub use grid::Grid;
