//! Rational belief grids: every point of the probability simplex whose
//! coordinates share a common denominator of at most `d`.

use std::collections::BTreeSet;

use crate::algebra::{ratio, Scalar};
use crate::model::Belief;
use crate::Rational;

/// Compositions of `total` into `parts` nonnegative integers, lexicographic.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All beliefs over `n` parameters with coordinates `a_i / k`, `1 <= k <= d`,
/// without duplicates and sorted lexicographically by weight vector.
pub fn belief_grid<T: Scalar>(n: usize, d: usize) -> Vec<Belief<T>> {
    let mut points: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for k in 1..=d.max(1) {
        for c in compositions(k, n) {
            points.insert(c.iter().map(|&a| ratio(a as i64, k as i64)).collect());
        }
    }
    points
        .into_iter()
        .map(|w| Belief::new(w.iter().map(T::from_rational).collect()).expect("grid point is a belief"))
        .collect()
}

/// Scalar grid `{0, 1/d, ..., 1}` scaled onto `[lo, hi]`.
pub fn interval_grid<T: Scalar>(lo: &T, hi: &T, d: usize) -> Vec<T> {
    let d = d.max(1);
    (0..=d)
        .map(|i| lo.clone() + (hi.clone() - lo.clone()) * T::from_count(i) / T::from_count(d))
        .collect()
}
