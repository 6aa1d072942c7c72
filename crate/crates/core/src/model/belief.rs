use crate::algebra::{dot, sum, Scalar};
use crate::error::Error;

/// Probability vector over an experiment's parameters, in parameter order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Belief<T> {
    weights: Vec<T>,
}

impl<T: Scalar> Belief<T> {
    pub fn new(weights: Vec<T>) -> Result<Self, Error> {
        if weights.is_empty() {
            return Err(Error::InvalidBelief("empty weight vector".into()));
        }
        if let Some(bad) = weights.iter().find(|w| w.is_strictly_negative()) {
            return Err(Error::InvalidBelief(format!("negative weight {}", bad.format_scalar())));
        }
        let total = sum(&weights);
        if !total.approx_eq(&T::one()) {
            return Err(Error::InvalidBelief(format!("weights sum to {}", total.format_scalar())));
        }
        Ok(Belief { weights })
    }

    pub fn uniform(n: usize) -> Self {
        let share = T::one() / T::from_count(n);
        Belief { weights: vec![share; n] }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut weights = vec![T::zero(); n];
        weights[at] = T::one();
        Belief { weights }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `E_p[g(θ)]`.
    pub fn expectation(&self, g: &[T]) -> Result<T, Error> {
        if g.len() != self.weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "statistic over {} parameters, belief over {}",
                g.len(),
                self.weights.len()
            )));
        }
        Ok(dot(&self.weights, g))
    }

    /// `t·self + (1-t)·other`.
    pub fn mix(&self, other: &Belief<T>, t: &T) -> Result<Belief<T>, Error> {
        if other.len() != self.len() {
            return Err(Error::DimensionMismatch("beliefs over different parameter sets".into()));
        }
        let s = T::one() - t.clone();
        Belief::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| t.clone() * a.clone() + s.clone() * b.clone())
                .collect(),
        )
    }

    /// Indices attaining the largest weight.
    pub fn modes(&self) -> Vec<usize> {
        let max = self
            .weights
            .iter()
            .cloned()
            .fold(None::<T>, |m, w| match m {
                Some(best) if best >= w => Some(best),
                _ => Some(w),
            })
            .expect("nonempty belief");
        (0..self.len()).filter(|&i| self.weights[i].approx_eq(&max)).collect()
    }

    /// Smallest index whose cumulative mass reaches one half, for beliefs
    /// listed in increasing parameter order.
    pub fn lower_median(&self) -> usize {
        let half = T::half();
        let mut acc = T::zero();
        for (i, w) in self.weights.iter().enumerate() {
            acc = acc + w.clone();
            if !(acc.clone() - half.clone()).is_strictly_negative() {
                return i;
            }
        }
        self.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.weights.iter().filter(|w| !w.is_negligible()).count() == 1
    }

    pub fn format_weights(&self) -> Vec<String> {
        self.weights.iter().map(Scalar::format_scalar).collect()
    }
}
