use serde_json::{json, Value};

use crate::algebra::{Matrix, Scalar};
use crate::error::Error;
use crate::json;

/// Weights `N(y, A)` from outcomes of the dominating experiment to events
/// `A ⊆ Z` of the dominated one. Column `mask` is the event containing `z`
/// exactly when bit `z` of `mask` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct EventWeightMatrix<T: Scalar> {
    z_count: usize,
    weights: Matrix<T>,
}

impl<T: Scalar> EventWeightMatrix<T> {
    pub fn new(weights: Matrix<T>, z_count: usize) -> Result<Self, Error> {
        if z_count >= usize::BITS as usize || weights.cols() != 1usize << z_count {
            return Err(Error::DimensionMismatch(format!(
                "{} event columns for {} outcomes",
                weights.cols(),
                z_count
            )));
        }
        for r in 0..weights.rows() {
            for c in 0..weights.cols() {
                let v = &weights[(r, c)];
                if v.is_strictly_negative() || (v.clone() - T::one()).is_strictly_positive() {
                    return Err(Error::PayoffOutOfRange(v.format_scalar()));
                }
            }
        }
        Ok(EventWeightMatrix { z_count, weights })
    }

    pub fn z_count(&self) -> usize {
        self.z_count
    }

    pub fn y_count(&self) -> usize {
        self.weights.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.weights
    }

    pub fn get(&self, y: usize, event: usize) -> &T {
        &self.weights[(y, event)]
    }

    /// `N(·, {z})` for every `z`: a `Y`-by-`Z` matrix.
    pub fn singleton_columns(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.y_count(), self.z_count);
        for y in 0..self.y_count() {
            for z in 0..self.z_count {
                m[(y, z)] = self.weights[(y, 1 << z)].clone();
            }
        }
        m
    }

    pub fn to_json(&self, z_labels: &[String]) -> Value {
        json!({"events": event_labels(z_labels), "weights": json::matrix(&self.weights)})
    }
}

/// `"{}"`, `"{z1}"`, `"{z2}"`, `"{z1,z2}"`, ... in bitmask order.
pub fn event_labels(z_labels: &[String]) -> Vec<String> {
    (0..1usize << z_labels.len())
        .map(|mask| {
            let members: Vec<&str> = (0..z_labels.len())
                .filter(|z| mask >> z & 1 == 1)
                .map(|z| z_labels[z].as_str())
                .collect();
            format!("{{{}}}", members.join(","))
        })
        .collect()
}
