//! Reduction of weighted Dirac mixtures (point sets) to smaller, equally
//! weighted Dirac mixtures.
//!
//! The reduced locations minimize a modified Cramér–von Mises distance built
//! on the localized cumulative distribution (LCD) of each mixture. The
//! distance and its gradient are available in closed form, so the reduction
//! is a smooth unconstrained minimization solved with BFGS.
//!
//! ```
//! use lcd_reduce::{mixture::sample_standard_normal, reduce::{reduce, ReduceConfig}};
//!
//! let samples = sample_standard_normal(200, 2, 1).unwrap();
//! let (reduced, trace) = reduce(&samples, &ReduceConfig::new(5).with_seed(1)).unwrap();
//! assert_eq!(reduced.len(), 5);
//! assert!(trace.final_report.total.is_finite());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN.

pub mod baselines;
pub mod distance;
pub mod error;
pub mod experiment;
pub mod gradient;
pub mod io;
pub mod lcd;
pub mod metrics;
pub mod mixture;
pub mod optim;
pub mod reduce;
pub mod rng;
pub mod scenario;
pub mod svg;

pub use error::{Error, Result};
pub use mixture::DiracMixture;
