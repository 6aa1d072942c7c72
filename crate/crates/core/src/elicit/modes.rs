//! Mode and median elicitability. Both reduce to whether the kernel
//! transpose has a nontrivial null space: if it does, moving along a null
//! direction changes the mode (or median) without changing any outcome
//! probability.

use serde_json::{json, Value};

use crate::algebra::{null_space_basis, sum, Scalar};
use crate::elicit::split_along;
use crate::error::Error;
use crate::json;
use crate::model::{Belief, Experiment};

/// Answer for the mode or the median. When not elicitable, `witness` holds
/// two beliefs with equal mean outcome distributions and `statistic` the
/// parameter indices realizing the functional under each (all argmax indices
/// for the mode, the lower median for the median).
#[derive(Clone, Debug, PartialEq)]
pub struct ModeReport<T: Scalar> {
    pub elicitable: bool,
    pub witness: Option<(Belief<T>, Belief<T>)>,
    pub statistic: Option<(Vec<usize>, Vec<usize>)>,
}

impl<T: Scalar> ModeReport<T> {
    fn elicitable() -> Self {
        ModeReport { elicitable: true, witness: None, statistic: None }
    }

    pub fn to_json(&self) -> Value {
        match (&self.witness, &self.statistic) {
            (Some((p, q)), Some((sp, sq))) => json!({
                "elicitable": self.elicitable,
                "witness": {"p": json::belief(p), "q": json::belief(q), "p_statistic": sp, "q_statistic": sq},
            }),
            _ => json!({"elicitable": self.elicitable}),
        }
    }
}

fn check_values<T: Scalar>(e: &Experiment<T>, values: &[T]) -> Result<(), Error> {
    if values.len() != e.num_parameters() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameter values for {} parameters",
            values.len(),
            e.num_parameters()
        )));
    }
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i].approx_eq(&values[j]) {
                return Err(Error::InvalidArgument(format!(
                    "parameters {:?} and {:?} share the value {}",
                    e.parameters()[i],
                    e.parameters()[j],
                    values[i].format_scalar()
                )));
            }
        }
    }
    Ok(())
}

fn null_direction<T: Scalar>(e: &Experiment<T>) -> Option<Vec<T>> {
    null_space_basis(&e.kernel().transpose()).into_iter().next()
}

/// The mode is elicitable exactly when the full belief is. Otherwise the
/// witness is `uniform ± α·v` for a null vector `v`: the first belief peaks
/// on `argmax v`, the second on `argmin v`, and these sets are disjoint.
pub fn mode_elicitable<T: Scalar>(e: &Experiment<T>, values: &[T]) -> Result<ModeReport<T>, Error> {
    check_values(e, values)?;
    let Some(v) = null_direction(e) else {
        return Ok(ModeReport::elicitable());
    };
    let (p, q) = split_along(Belief::<T>::uniform(e.num_parameters()).weights(), &v);
    let (mp, mq) = (p.modes(), q.modes());
    debug_assert!(mp.iter().all(|i| !mq.contains(i)));
    Ok(ModeReport { elicitable: false, witness: Some((p, q)), statistic: Some((mp, mq)) })
}

/// Median variant. Parameters are ordered by `values`; the base belief puts
/// half its mass evenly on the first `k + 1` parameters and half on the
/// rest, with `k` chosen so the null vector has nonzero partial sum there.
/// Moving along `±v` then pushes the cumulative mass at `k` above and below
/// one half, so the two lower medians differ.
pub fn median_elicitable<T: Scalar>(e: &Experiment<T>, values: &[T]) -> Result<ModeReport<T>, Error> {
    check_values(e, values)?;
    let Some(v) = null_direction(e) else {
        return Ok(ModeReport::elicitable());
    };
    let n = e.num_parameters();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("comparable parameter values"));
    let sorted_v: Vec<T> = order.iter().map(|&i| v[i].clone()).collect();
    let k = (0..n - 1)
        .find(|&k| !sum(&sorted_v[..=k]).is_negligible())
        .expect("a nonzero sum-zero vector has a nonzero proper partial sum");
    let half = T::half();
    let lower = half.clone() / T::from_count(k + 1);
    let upper = half / T::from_count(n - k - 1);
    let base_sorted: Vec<T> = (0..n).map(|i| if i <= k { lower.clone() } else { upper.clone() }).collect();
    let mut base = vec![T::zero(); n];
    for (pos, &i) in order.iter().enumerate() {
        base[i] = base_sorted[pos].clone();
    }
    let (p, q) = split_along(&base, &v);
    let median = |b: &Belief<T>| -> usize {
        let sorted = Belief::new(order.iter().map(|&i| b.weights()[i].clone()).collect()).expect("permuted belief");
        order[sorted.lower_median()]
    };
    let (mp, mq) = (median(&p), median(&q));
    debug_assert_ne!(mp, mq);
    Ok(ModeReport { elicitable: false, witness: Some((p, q)), statistic: Some((vec![mp], vec![mq])) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, Matrix};
    use crate::fixtures;
    use crate::Rational;

    fn grid_values() -> Vec<Rational> {
        vec![ratio(0, 1), ratio(1, 2), ratio(1, 1)]
    }

    #[test]
    fn bernoulli_mode_not_elicitable() {
        let e = fixtures::bernoulli_grid();
        let r = mode_elicitable(&e, &grid_values()).unwrap();
        assert!(!r.elicitable);
        let (p, q) = r.witness.clone().unwrap();
        assert_eq!(e.mean_outcome_distribution(&p).unwrap(), e.mean_outcome_distribution(&q).unwrap());
        assert_eq!(r.statistic, Some((vec![0, 2], vec![1])));
    }

    #[test]
    fn two_trials_elicit_the_mode() {
        let e = fixtures::bernoulli_grid().power(2);
        assert!(mode_elicitable(&e, &grid_values()).unwrap().elicitable);
        let square = Experiment::from_kernel(Matrix::from_rows(vec![vec![ratio(2, 3), ratio(1, 3)], vec![ratio(1, 4), ratio(3, 4)]]).unwrap()).unwrap();
        assert!(mode_elicitable(&square, &[ratio(0, 1), ratio(1, 1)]).unwrap().elicitable);
    }

    #[test]
    fn median_witness_separates() {
        let e = fixtures::bernoulli_grid();
        let r = median_elicitable(&e, &grid_values()).unwrap();
        let (p, q) = r.witness.clone().unwrap();
        assert_eq!(e.mean_outcome_distribution(&p).unwrap(), e.mean_outcome_distribution(&q).unwrap());
        let (mp, mq) = r.statistic.unwrap();
        assert_ne!(mp, mq);
        assert_eq!(p.lower_median(), mp[0]);
        assert_eq!(q.lower_median(), mq[0]);
    }

    #[test]
    fn median_respects_value_order() {
        // Same experiment with parameters listed out of value order.
        let e = fixtures::bernoulli(&[ratio(1, 1), ratio(0, 1), ratio(1, 2), ratio(1, 4)]);
        let values = vec![ratio(1, 1), ratio(0, 1), ratio(1, 2), ratio(1, 4)];
        let r = median_elicitable(&e, &values).unwrap();
        let (p, q) = r.witness.clone().unwrap();
        assert_eq!(e.mean_outcome_distribution(&p).unwrap(), e.mean_outcome_distribution(&q).unwrap());
        let (mp, mq) = r.statistic.unwrap();
        assert_ne!(mp, mq);
    }

    #[test]
    fn duplicate_values_rejected() {
        let e = fixtures::bernoulli_grid();
        assert!(mode_elicitable(&e, &[ratio(0, 1), ratio(0, 1), ratio(1, 1)]).is_err());
    }
}
