//! Eliciting information with experiment-contingent payments over finite
//! parameter and outcome spaces.
//!
//! The numeric core is generic over [`Scalar`]; exact answers use
//! [`Rational`] (arbitrary-precision fractions) and the `Rational*` aliases
//! below, while `f64` instantiations are available for exploratory work.
//!
//! - [`algebra`]: matrices, Gauss-Jordan elimination, null spaces, phase-I simplex.
//! - [`model`]: experiments, beliefs, products, covariate mixtures, garblings.
//! - [`elicit`]: information partitions, unbiased weights, mode/median and
//!   full-belief elicitability.
//! - [`mechanisms`]: scoring mechanisms, payoff-equivalent transforms, an
//!   exhaustive incentive-compatibility checker.
//! - [`orders`]: elicitation, Blackwell, nonnegative-payoff and bounded-payoff
//!   dominance with witnesses.
//! - [`demos`]: worked examples that emit machine-checked reports.

pub mod algebra;
pub mod demos;
pub mod elicit;
mod error;
pub mod fixtures;
pub mod grid;
mod json;
pub mod mechanisms;
pub mod model;
pub mod orders;

pub use algebra::{Matrix, Scalar};
pub use error::Error;
pub use model::{Belief, CovariateMixture, Experiment};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type RationalMatrix = Matrix<Rational>;
pub type RationalExperiment = Experiment<Rational>;
pub type RationalBelief = Belief<Rational>;
pub type RationalMixture = CovariateMixture<Rational>;
pub type RationalMechanism = mechanisms::Mechanism<Rational>;
pub type RationalStatistics = elicit::StatisticFamily<Rational>;

pub type F64Matrix = Matrix<f64>;
pub type F64Experiment = Experiment<f64>;
pub type F64Belief = Belief<f64>;
