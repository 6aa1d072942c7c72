//! Shared helpers for rendering scalar data as JSON strings of the form
//! `"p/q"`.

use serde_json::Value;

use crate::algebra::{Matrix, Scalar};
use crate::model::Belief;

pub(crate) fn vector<T: Scalar>(values: &[T]) -> Value {
    Value::Array(values.iter().map(|v| Value::String(v.format_scalar())).collect())
}

pub(crate) fn matrix<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|r| vector(m.row(r))).collect())
}

pub(crate) fn belief<T: Scalar>(p: &Belief<T>) -> Value {
    vector(p.weights())
}

pub(crate) fn scalar<T: Scalar>(v: &T) -> Value {
    Value::String(v.format_scalar())
}
