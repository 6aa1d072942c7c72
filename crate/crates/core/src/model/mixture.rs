use crate::algebra::{Matrix, Scalar};
use crate::error::Error;
use crate::model::{check_unique, Belief, Experiment};

/// Covariate `x` is drawn from `weights`, then the outcome from the
/// component experiment attached to `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariateMixture<T: Scalar> {
    covariates: Vec<String>,
    weights: Vec<T>,
    components: Vec<Experiment<T>>,
}

impl<T: Scalar> CovariateMixture<T> {
    pub fn new(covariates: Vec<String>, weights: Vec<T>, components: Vec<Experiment<T>>) -> Result<Self, Error> {
        check_unique(&covariates)?;
        if covariates.len() != weights.len() || covariates.len() != components.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} covariates, {} weights, {} components",
                covariates.len(),
                weights.len(),
                components.len()
            )));
        }
        Belief::new(weights.clone()).map_err(|e| Error::InvalidArgument(format!("covariate weights: {e}")))?;
        let first = components.first().ok_or_else(|| Error::Document("mixture without covariates".into()))?;
        for c in &components[1..] {
            first.ensure_same_parameters(c)?;
        }
        Ok(CovariateMixture { covariates, weights, components })
    }

    pub fn covariates(&self) -> &[String] {
        &self.covariates
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn components(&self) -> &[Experiment<T>] {
        &self.components
    }

    pub fn parameters(&self) -> &[String] {
        self.components[0].parameters()
    }

    /// Flat index of outcome `(x, y)` in [`CovariateMixture::experiment`].
    pub fn outcome_index(&self, covariate: usize, outcome: usize) -> usize {
        self.components[..covariate].iter().map(Experiment::num_outcomes).sum::<usize>() + outcome
    }

    /// Inverse of [`CovariateMixture::outcome_index`].
    pub fn split_outcome(&self, mut index: usize) -> Option<(usize, usize)> {
        for (x, c) in self.components.iter().enumerate() {
            if index < c.num_outcomes() {
                return Some((x, index));
            }
            index -= c.num_outcomes();
        }
        None
    }

    /// The experiment over `(covariate, outcome)` pairs with kernel `μ(x)·π_x(y|θ)`.
    pub fn experiment(&self) -> Experiment<T> {
        let total: usize = self.components.iter().map(Experiment::num_outcomes).sum();
        let n = self.parameters().len();
        let mut kernel = Matrix::zeros(n, total);
        let mut outcomes = Vec::with_capacity(total);
        for (x, (comp, w)) in self.components.iter().zip(&self.weights).enumerate() {
            for y in 0..comp.num_outcomes() {
                outcomes.push(format!("({},{})", self.covariates[x], comp.outcomes()[y]));
                let col = self.outcome_index(x, y);
                for t in 0..n {
                    kernel[(t, col)] = if w.is_zero() { T::zero() } else { w.clone() * comp.prob(t, y).clone() };
                }
            }
        }
        Experiment::new(self.parameters().to_vec(), outcomes, kernel).expect("mixture of valid components is valid")
    }
}
