//! Finite statistical experiments, beliefs over parameters and the
//! experiment algebra (products, covariate mixtures, garblings).

mod belief;
mod document;
mod mixture;

use std::collections::HashSet;



pub use belief::Belief;
pub use document::{experiment_to_json, load_experiment, load_mixture, ExperimentDoc, MixtureDoc};
pub use mixture::CovariateMixture;

use crate::algebra::{lp_feasible, sum, Bound, Matrix, Scalar};
use crate::error::Error;

/// A finite parameter set, a finite outcome set and a Markov kernel with one
/// row per parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment<T: Scalar> {
    parameters: Vec<String>,
    outcomes: Vec<String>,
    kernel: Matrix<T>,
}

pub(crate) fn check_unique(labels: &[String]) -> Result<(), Error> {
    let mut seen = HashSet::new();
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(Error::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Validates that `m` is row-stochastic.
pub(crate) fn check_stochastic<T: Scalar>(m: &Matrix<T>) -> Result<(), Error> {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = &m[(r, c)];
            if v.is_strictly_negative() {
                return Err(Error::NegativeEntry { row: r, col: c, value: v.format_scalar() });
            }
        }
        let s = sum(m.row(r));
        if !s.approx_eq(&T::one()) {
            return Err(Error::RowSum { row: r, sum: s.format_scalar() });
        }
    }
    Ok(())
}

/// `(1-ε)·I + ε·P`, where every row of `P` equals `mu`.
pub fn garbling_channel<T: Scalar>(epsilon: &T, mu: &[T]) -> Matrix<T> {
    let n = mu.len();
    let keep = T::one() - epsilon.clone();
    let mut m = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut v = epsilon.clone() * mu[c].clone();
            if r == c {
                v = v + keep.clone();
            }
            m[(r, c)] = v;
        }
    }
    m
}

/// Channel of the uniform garbling on `n` outcomes.
pub fn uniform_garbling_channel<T: Scalar>(epsilon: &T, n: usize) -> Matrix<T> {
    let share = T::one() / T::from_count(n);
    garbling_channel(epsilon, &vec![share; n])
}

/// Splits a flat outcome index of an `copies`-fold power into coordinates,
/// first coordinate most significant.
pub fn power_coordinates(mut index: usize, base: usize, copies: usize) -> Vec<usize> {
    let mut coords = vec![0; copies];
    for slot in coords.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    coords
}

impl<T: Scalar> Experiment<T> {
    /// Validates labels and the kernel (nonnegative entries, unit row sums).
    pub fn new(parameters: Vec<String>, outcomes: Vec<String>, kernel: Matrix<T>) -> Result<Self, Error> {
        check_unique(&parameters)?;
        check_unique(&outcomes)?;
        if kernel.rows() != parameters.len() || kernel.cols() != outcomes.len() {
            return Err(Error::DimensionMismatch(format!(
                "kernel is {}x{} for {} parameters and {} outcomes",
                kernel.rows(),
                kernel.cols(),
                parameters.len(),
                outcomes.len()
            )));
        }
        if parameters.is_empty() {
            return Err(Error::Document("experiment needs at least one parameter".into()));
        }
        check_stochastic(&kernel)?;
        Ok(Experiment { parameters, outcomes, kernel })
    }

    /// Like [`Experiment::new`] with labels `t1..`, `y1..`.
    pub fn from_kernel(kernel: Matrix<T>) -> Result<Self, Error> {
        let parameters = (1..=kernel.rows()).map(|i| format!("t{i}")).collect();
        let outcomes = (1..=kernel.cols()).map(|i| format!("y{i}")).collect();
        Self::new(parameters, outcomes, kernel)
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn kernel(&self) -> &Matrix<T> {
        &self.kernel
    }

    pub fn num_parameters(&self) -> usize {
        self.parameters.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn prob(&self, parameter: usize, outcome: usize) -> &T {
        &self.kernel[(parameter, outcome)]
    }

    pub fn with_outcome_labels(mut self, outcomes: Vec<String>) -> Result<Self, Error> {
        if outcomes.len() != self.outcomes.len() {
            return Err(Error::DimensionMismatch("outcome label count".into()));
        }
        check_unique(&outcomes)?;
        self.outcomes = outcomes;
        Ok(self)
    }

    pub(crate) fn ensure_same_parameters(&self, other: &Experiment<T>) -> Result<(), Error> {
        if self.parameters != other.parameters {
            return Err(Error::ParameterMismatch);
        }
        Ok(())
    }

    /// Two conditionally independent observations.
    pub fn product(&self, other: &Experiment<T>) -> Result<Experiment<T>, Error> {
        self.ensure_same_parameters(other)?;
        let (n1, n2) = (self.num_outcomes(), other.num_outcomes());
        let mut kernel = Matrix::zeros(self.num_parameters(), n1 * n2);
        for t in 0..self.num_parameters() {
            for a in 0..n1 {
                for b in 0..n2 {
                    kernel[(t, a * n2 + b)] = self.kernel[(t, a)].clone() * other.kernel[(t, b)].clone();
                }
            }
        }
        let outcomes = self
            .outcomes
            .iter()
            .flat_map(|a| other.outcomes.iter().map(move |b| format!("({a},{b})")))
            .collect();
        Ok(Experiment { parameters: self.parameters.clone(), outcomes, kernel })
    }

    /// `copies` independent draws, outcomes as flat tuples indexed by
    /// [`power_coordinates`]. Zero copies gives the single-outcome experiment.
    pub fn power(&self, copies: usize) -> Experiment<T> {
        let base = self.num_outcomes();
        let count = base.pow(copies as u32);
        let mut kernel = Matrix::zeros(self.num_parameters(), count);
        let mut outcomes = Vec::with_capacity(count);
        for idx in 0..count {
            let coords = power_coordinates(idx, base, copies);
            let labels: Vec<&str> = coords.iter().map(|&c| self.outcomes[c].as_str()).collect();
            outcomes.push(format!("({})", labels.join(",")));
            for t in 0..self.num_parameters() {
                kernel[(t, idx)] = coords
                    .iter()
                    .fold(T::one(), |acc, &c| acc * self.kernel[(t, c)].clone());
            }
        }
        Experiment { parameters: self.parameters.clone(), outcomes, kernel }
    }

    /// Post-composes the kernel with a Markov `channel` whose rows are indexed
    /// by this experiment's outcomes. Square channels keep the outcome labels.
    pub fn garble(&self, channel: &Matrix<T>) -> Result<Experiment<T>, Error> {
        let labels = if channel.cols() == self.num_outcomes() {
            self.outcomes.clone()
        } else {
            (1..=channel.cols()).map(|i| format!("z{i}")).collect()
        };
        self.garble_labeled(channel, labels)
    }

    pub fn garble_labeled(&self, channel: &Matrix<T>, outcomes: Vec<String>) -> Result<Experiment<T>, Error> {
        if channel.rows() != self.num_outcomes() {
            return Err(Error::DimensionMismatch(format!(
                "channel has {} rows for {} outcomes",
                channel.rows(),
                self.num_outcomes()
            )));
        }
        check_stochastic(channel).map_err(|e| Error::NotMarkov(e.to_string()))?;
        let kernel = self.kernel.mul(channel)?;
        Experiment::new(self.parameters.clone(), outcomes, kernel)
    }

    /// With probability `epsilon` the outcome is replaced by a uniform draw.
    pub fn uniform_garble(&self, epsilon: &T) -> Result<Experiment<T>, Error> {
        if epsilon.is_strictly_negative() || !(epsilon.clone() - T::one()).is_strictly_negative() {
            return Err(Error::InvalidArgument(format!("epsilon {} outside [0,1)", epsilon.format_scalar())));
        }
        self.garble(&uniform_garbling_channel(epsilon, self.num_outcomes()))
    }

    /// `λ_p(y) = Σ_θ p(θ) π(y|θ)`.
    pub fn mean_outcome_distribution(&self, belief: &Belief<T>) -> Result<Vec<T>, Error> {
        if belief.len() != self.num_parameters() {
            return Err(Error::DimensionMismatch(format!(
                "belief over {} parameters for an experiment with {}",
                belief.len(),
                self.num_parameters()
            )));
        }
        self.kernel.vec_mul(belief.weights())
    }

    /// Distinct parameters give distinct outcome distributions.
    pub fn is_identified(&self) -> bool {
        let n = self.num_parameters();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                self.kernel
                    .row(i)
                    .iter()
                    .zip(self.kernel.row(j))
                    .any(|(a, b)| !a.approx_eq(b))
            })
        })
    }

    /// Every outcome vertex is a mixture of kernel rows (one LP per outcome).
    pub fn is_complete(&self) -> bool {
        (0..self.num_outcomes()).all(|y| self.belief_inducing(y).is_some())
    }

    /// A belief whose mean outcome distribution is the point mass on `outcome`.
    pub fn belief_inducing(&self, outcome: usize) -> Option<Belief<T>> {
        let kt = self.kernel.transpose();
        let mut target = vec![T::zero(); self.num_outcomes()];
        target[outcome] = T::one();
        let bounds = vec![Bound::nonnegative(); self.num_parameters()];
        let p = lp_feasible(&kt, &target, &bounds).ok()??;
        Belief::new(p).ok()
    }

    pub fn point_mass(&self, parameter: usize) -> Belief<T> {
        Belief::point_mass(self.num_parameters(), parameter)
    }

    pub fn cast<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<Experiment<U>, Error> {
        Experiment::new(self.parameters.clone(), self.outcomes.clone(), self.kernel.cast(f))
    }
}
