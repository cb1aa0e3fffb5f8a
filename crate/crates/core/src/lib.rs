//! Counterfactually consistent merging of Boolean cause-effect models.
//!
//! Two marginal causal models `X → Z` and `Y → Z` are each only identified up
//! to one free parameter (`λᴬ`, `λᴮ`). Asking that both arise from a single
//! joint model `{X, Y} → Z` carves a polytope out of the 16-dimensional
//! simplex of joint response-function distributions; its projection onto the
//! `(λᴬ, λᴮ)` plane tells which pairs of marginal models can coexist.
//!
//! All computation is exact: probabilities are [`Rational`]s and every
//! polytope, LP and hull is computed without floating point.
//!
//! ```
//! use scm_marginal::{merge, analysis, rational::q, scm::MarginalObservation};
//!
//! let obs_x = MarginalObservation::new(q(1, 2), q(2, 5), q(1, 2), "X").unwrap();
//! let obs_y = MarginalObservation::new(q(1, 12), q(1, 1), q(2, 5), "Y").unwrap();
//! let problem = merge::build_merge_problem(&obs_x, &obs_y).unwrap();
//! let report = analysis::bounds_report(&problem).unwrap();
//! assert_eq!(report.lambda_a_merged.lo, q(2, 5));
//! assert_eq!(report.lambda_a_merged.hi, q(2, 5));
//! ```

pub mod analysis;
pub mod confounded;
pub mod error;
pub mod experiment;
pub mod merge;
pub mod oracle;
pub mod polytope;
pub mod rational;
pub mod scm;

pub use error::{Error, Result};
pub use rational::Rational;
