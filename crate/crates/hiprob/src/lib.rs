//! A finite-outcome engine for second-order probability.
//!
//! The engine represents a set of candidate first-order distributions over
//! a shared outcome space together with a second-order distribution over
//! the candidates, and exercises the ways the pair collapses into ordinary
//! probability:
//!
//! - **hierarchy** — flatten the pair into a joint grid over candidate ×
//!   world, recover both marginals, detect product form, exhibit distinct
//!   joints with identical marginals, and check a quoted first-order
//!   distribution for coherence against the predictive (with a Dutch-book
//!   witness when it fails).
//! - **decision** — expected utility computed three ways (known
//!   distribution, candidate-wise, joint cells) with act selection; the
//!   three routes agree to rounding, so the representation never changes
//!   the decision.
//! - **kinematics** — Jeffrey's rule with its rigidity precondition, and
//!   the C3 constraint measured on joints.
//! - **sequence** — i.i.d. trials under competing loading hypotheses:
//!   Bayesian posterior over the hypotheses, next-trial predictive, and
//!   the even-money bet as a decision problem.
//!
//! Model files (TOML) and machine-readable reports live in [`model`] and
//! [`commands`]; the `hiprob` binary wires them to a command line.
//!
//! ```rust
//! use hiprob::{CandidateSet, Distribution, OutcomeSpace, SecondOrderDistribution};
//!
//! let coin = OutcomeSpace::new(["heads", "tails"])?;
//! let fair = Distribution::new(coin.clone(), vec![0.5, 0.5])?;
//! let biased = Distribution::new(coin, vec![0.8, 0.2])?;
//! let pp = SecondOrderDistribution::new(CandidateSet::new(vec![fair, biased])?, vec![0.5, 0.5])?;
//!
//! let predictive = pp.predictive();
//! assert!((predictive.weight(0) - 0.65).abs() < 1e-12);
//!
//! // Flattening loses nothing: both marginals come back.
//! let joint = pp.flatten();
//! assert_eq!(joint.marginal_world().weights(), predictive.weights());
//! # Ok::<(), hiprob::Error>(())
//! ```

pub mod commands;
pub mod decision;
pub mod error;
pub mod hierarchy;
pub mod kinematics;
pub mod model;
pub mod prob;
pub mod selftest;
pub mod sequence;

pub use decision::{Belief, DecisionProblem, UtilityMatrix};
pub use error::{Error, Result};
pub use hierarchy::{CandidateSet, JointDistribution, SecondOrderDistribution};
pub use kinematics::JeffreyShift;
pub use model::{Model, ModelFile};
pub use prob::{Distribution, Event, OutcomeSpace};
pub use sequence::IIDModel;
