//! Information partitions represented by statistic families, and the
//! linear-algebra tests that decide which of them an experiment can elicit.

mod complete;
mod modes;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use complete::{complete_elicitation, copies_needed, CompletenessReport, VandermondeCertificate};
pub use modes::{median_elicitable, mode_elicitable, ModeReport};

use crate::algebra::{dot, in_span, null_space_basis, solve_linear, Scalar};
use crate::error::Error;
use crate::json;
use crate::model::{power_coordinates, Belief, Experiment};

/// A finite family of statistics `g: Θ → R`. Two beliefs fall in the same
/// cell of the induced partition when every member has the same mean under
/// both.
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticFamily<T: Scalar> {
    parameters: Vec<String>,
    labels: Vec<String>,
    functions: Vec<Vec<T>>,
}

impl<T: Scalar> StatisticFamily<T> {
    pub fn new(parameters: Vec<String>, labels: Vec<String>, functions: Vec<Vec<T>>) -> Result<Self, Error> {
        if labels.len() != functions.len() {
            return Err(Error::DimensionMismatch(format!("{} labels for {} functions", labels.len(), functions.len())));
        }
        if let Some((label, _)) = labels.iter().zip(&functions).find(|(_, g)| g.len() != parameters.len()) {
            return Err(Error::DimensionMismatch(format!(
                "statistic {label:?} is not indexed by the {} parameters",
                parameters.len()
            )));
        }
        Ok(StatisticFamily { parameters, labels, functions })
    }

    /// Members labelled `g1`, `g2`, ...
    pub fn unlabeled(parameters: Vec<String>, functions: Vec<Vec<T>>) -> Result<Self, Error> {
        let labels = (1..=functions.len()).map(|i| format!("g{i}")).collect();
        Self::new(parameters, labels, functions)
    }

    /// The empty family; its partition has a single cell.
    pub fn trivial(parameters: Vec<String>) -> Self {
        StatisticFamily { parameters, labels: vec![], functions: vec![] }
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn functions(&self) -> &[Vec<T>] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Means of every member under `p`.
    pub fn means(&self, p: &Belief<T>) -> Result<Vec<T>, Error> {
        self.functions.iter().map(|g| p.expectation(g)).collect()
    }

    fn ensure_compatible(&self, other: &StatisticFamily<T>) -> Result<(), Error> {
        if self.parameters != other.parameters {
            return Err(Error::ParameterMismatch);
        }
        Ok(())
    }
}

/// The kernel columns `θ ↦ π(y|θ)`, one per outcome. Their partition
/// identifies beliefs with the same mean outcome distribution and is the
/// finest one the experiment can elicit.
pub fn maximal_partition<T: Scalar>(e: &Experiment<T>) -> StatisticFamily<T> {
    StatisticFamily {
        parameters: e.parameters().to_vec(),
        labels: e.outcomes().to_vec(),
        functions: (0..e.num_outcomes()).map(|y| e.kernel().column(y)).collect(),
    }
}

/// True when no member of `family` separates `p` and `q`.
pub fn indistinguishable<T: Scalar>(family: &StatisticFamily<T>, p: &Belief<T>, q: &Belief<T>) -> Result<bool, Error> {
    if p.len() != family.parameters.len() || q.len() != family.parameters.len() {
        return Err(Error::DimensionMismatch("beliefs are not indexed by the family's parameters".into()));
    }
    let diff: Vec<T> = p.weights().iter().zip(q.weights()).map(|(a, b)| a.clone() - b.clone()).collect();
    Ok(family.functions.iter().all(|g| dot(g, &diff).is_negligible()))
}

/// Whether the partition of `coarse` is coarser than that of `fine`: every
/// member of `coarse` is an affine combination of members of `fine`.
pub fn is_coarser<T: Scalar>(coarse: &StatisticFamily<T>, fine: &StatisticFamily<T>) -> Result<bool, Error> {
    coarse.ensure_compatible(fine)?;
    let mut spanning = fine.functions.clone();
    spanning.push(vec![T::one(); fine.parameters.len()]);
    for g in &coarse.functions {
        if in_span(&spanning, g)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of asking whether the mean of a statistic is elicitable.
#[derive(Clone, Debug, PartialEq)]
pub enum Elicitability<T: Scalar> {
    /// `Σ_y w(y) π(y|θ) = g(θ)` for every parameter.
    Elicitable { weights: Vec<T> },
    /// Two beliefs with equal mean outcome distributions but different means of `g`.
    NotElicitable { witness: (Belief<T>, Belief<T>) },
}

impl<T: Scalar> Elicitability<T> {
    pub fn is_elicitable(&self) -> bool {
        matches!(self, Elicitability::Elicitable { .. })
    }

    pub fn weights(&self) -> Option<&[T]> {
        match self {
            Elicitability::Elicitable { weights } => Some(weights),
            Elicitability::NotElicitable { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&(Belief<T>, Belief<T>)> {
        match self {
            Elicitability::Elicitable { .. } => None,
            Elicitability::NotElicitable { witness } => Some(witness),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Elicitability::Elicitable { weights } => json!({"elicitable": true, "weights": json::vector(weights)}),
            Elicitability::NotElicitable { witness: (p, q) } => {
                json!({"elicitable": false, "witness": {"p": json::belief(p), "q": json::belief(q)}})
            }
        }
    }
}

/// Largest `α` with `base ± α·v` nonnegative, halved.
pub(crate) fn interior_step<T: Scalar>(base: &[T], v: &[T]) -> T {
    let limit = base
        .iter()
        .zip(v)
        .filter(|(_, vi)| !vi.is_negligible())
        .map(|(b, vi)| b.clone() / vi.abs())
        .fold(None::<T>, |m, r| match m {
            Some(best) if best <= r => Some(best),
            _ => Some(r),
        })
        .expect("direction is nonzero");
    limit * T::half()
}

/// `base ± α·v` for the halved maximal step.
pub(crate) fn split_along<T: Scalar>(base: &[T], v: &[T]) -> (Belief<T>, Belief<T>) {
    let alpha = interior_step(base, v);
    let shift = |sign: &T| -> Belief<T> {
        Belief::new(
            base.iter()
                .zip(v)
                .map(|(b, vi)| b.clone() + sign.clone() * alpha.clone() * vi.clone())
                .collect(),
        )
        .expect("step keeps beliefs in the simplex because null vectors sum to zero")
    };
    (shift(&T::one()), shift(&(-T::one())))
}

/// Weights making `w(y)` an unbiased estimate of `g(θ)`, or a pair of
/// beliefs showing that no outcome-contingent payment can elicit `E[g]`.
pub fn unbiased_weights<T: Scalar>(e: &Experiment<T>, g: &[T]) -> Result<Elicitability<T>, Error> {
    if g.len() != e.num_parameters() {
        return Err(Error::DimensionMismatch(format!(
            "statistic has {} values for {} parameters",
            g.len(),
            e.num_parameters()
        )));
    }
    if let Some(weights) = solve_linear(e.kernel(), g)? {
        return Ok(Elicitability::Elicitable { weights });
    }
    // g is outside the column space, so some v with v·π(y|·) = 0 for all y has v·g != 0.
    let v = null_space_basis(&e.kernel().transpose())
        .into_iter()
        .find(|v| !dot(v, g).is_negligible())
        .expect("a statistic outside the column space has a separating null vector");
    let uniform = Belief::<T>::uniform(e.num_parameters());
    Ok(Elicitability::NotElicitable { witness: split_along(uniform.weights(), &v) })
}

/// Weights on the `copies`-fold power of `e` that are unbiased for `g(θ)^power`:
/// the product of the single-copy weights over the first `power`
/// coordinates.
pub fn moment_weights<T: Scalar>(e: &Experiment<T>, copies: usize, g: &[T], power: usize) -> Result<Vec<T>, Error> {
    if power > copies {
        return Err(Error::InvalidArgument(format!("moment of order {power} needs at least {power} copies, got {copies}")));
    }
    let base = match unbiased_weights(e, g)? {
        Elicitability::Elicitable { weights } => weights,
        Elicitability::NotElicitable { .. } => return Err(Error::NotElicitable),
    };
    let n = e.num_outcomes();
    let count = n.pow(copies as u32);
    Ok((0..count)
        .map(|idx| {
            power_coordinates(idx, n, copies)[..power]
                .iter()
                .fold(T::one(), |acc, &c| acc * base[c].clone())
        })
        .collect())
}

/// Checks `Σ_y w(y) π(y|θ) = target(θ)` exactly for every parameter.
pub fn verify_unbiased<T: Scalar>(e: &Experiment<T>, weights: &[T], target: &[T]) -> Result<(), Error> {
    if weights.len() != e.num_outcomes() || target.len() != e.num_parameters() {
        return Err(Error::DimensionMismatch("weights or statistic have the wrong length".into()));
    }
    let means = e.kernel().mul_vec(weights)?;
    match means.iter().zip(target).position(|(m, t)| !m.approx_eq(t)) {
        Some(t) => Err(Error::NotUnbiased(e.parameters()[t].clone())),
        None => Ok(()),
    }
}

/// `E_p[g²] − E_p[g]²` assembled from the second- and first-moment weights
/// on the two-fold product, evaluated at `p`.
pub fn elicited_variance<T: Scalar>(e: &Experiment<T>, g: &[T], p: &Belief<T>) -> Result<T, Error> {
    let pair = e.power(2);
    let lambda = pair.mean_outcome_distribution(p)?;
    let first = dot(&moment_weights(e, 2, g, 1)?, &lambda);
    let second = dot(&moment_weights(e, 2, g, 2)?, &lambda);
    Ok(second - first.clone() * first)
}

/// JSON form `{"parameters": [...], "functions": {"name": ["0", "1/2"], ...}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StatisticFamilyDoc {
    pub parameters: Vec<String>,
    pub functions: IndexMap<String, Vec<String>>,
}

impl StatisticFamilyDoc {
    pub fn from_family<T: Scalar>(f: &StatisticFamily<T>) -> Self {
        StatisticFamilyDoc {
            parameters: f.parameters.clone(),
            functions: f
                .labels
                .iter()
                .zip(&f.functions)
                .map(|(l, g)| (l.clone(), g.iter().map(Scalar::format_scalar).collect()))
                .collect(),
        }
    }

    pub fn into_family<T: Scalar>(self) -> Result<StatisticFamily<T>, Error> {
        let labels = self.functions.keys().cloned().collect();
        let functions = self
            .functions
            .values()
            .map(|g| g.iter().map(|s| T::parse_scalar(s)).collect::<Result<Vec<T>, Error>>())
            .collect::<Result<_, _>>()?;
        StatisticFamily::new(self.parameters, labels, functions)
    }
}

pub fn load_statistics<T: Scalar>(json: &str) -> Result<StatisticFamily<T>, Error> {
    let doc: StatisticFamilyDoc = serde_json::from_str(json).map_err(|e| Error::Document(e.to_string()))?;
    doc.into_family()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, Matrix};
    use crate::fixtures;
    use crate::Rational;

    fn q(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| ratio(n, d)).collect()
    }

    fn belief(v: &[(i64, i64)]) -> Belief<Rational> {
        Belief::new(q(v)).unwrap()
    }

    #[test]
    fn bernoulli_maximal_partition() {
        let e = fixtures::bernoulli_grid();
        let f = maximal_partition(&e);
        assert_eq!(f.functions(), &[q(&[(1, 1), (1, 2), (0, 1)]), q(&[(0, 1), (1, 2), (1, 1)])]);
        let p = belief(&[(1, 2), (0, 1), (1, 2)]);
        let r = belief(&[(1, 6), (2, 3), (1, 6)]);
        assert!(indistinguishable(&f, &p, &p).unwrap());
        assert!(indistinguishable(&f, &p, &r).unwrap());
        let mode_indicators = StatisticFamily::unlabeled(
            e.parameters().to_vec(),
            vec![q(&[(1, 1), (0, 1), (0, 1)]), q(&[(0, 1), (1, 1), (0, 1)]), q(&[(0, 1), (0, 1), (1, 1)])],
        )
        .unwrap();
        assert!(!indistinguishable(&mode_indicators, &p, &r).unwrap());
    }

    #[test]
    fn degenerate_experiment_has_constant_partition() {
        let e = Experiment::from_kernel(Matrix::filled(3, 1, ratio(1, 1))).unwrap();
        let f = maximal_partition(&e);
        assert_eq!(f.functions(), &[vec![ratio(1, 1); 3]]);
        let theta = StatisticFamily::unlabeled(e.parameters().to_vec(), vec![q(&[(0, 1), (1, 2), (1, 1)])]).unwrap();
        assert!(!is_coarser(&theta, &f).unwrap());
        assert!(is_coarser(&StatisticFamily::trivial(e.parameters().to_vec()), &f).unwrap());
    }

    #[test]
    fn two_trials_span_quadratics() {
        let e = fixtures::bernoulli_grid().power(2);
        let f = maximal_partition(&e);
        assert_eq!(f.len(), 4);
        let monomials = StatisticFamily::unlabeled(
            e.parameters().to_vec(),
            vec![q(&[(1, 1), (1, 1), (1, 1)]), q(&[(0, 1), (1, 2), (1, 1)]), q(&[(0, 1), (1, 4), (1, 1)])],
        )
        .unwrap();
        assert!(is_coarser(&monomials, &f).unwrap());
        assert!(is_coarser(&f, &monomials).unwrap());
    }

    #[test]
    fn coarser_examples() {
        let e = fixtures::bernoulli_grid();
        let fine = maximal_partition(&e);
        let params = e.parameters().to_vec();
        let theta = StatisticFamily::unlabeled(params.clone(), vec![q(&[(0, 1), (1, 2), (1, 1)])]).unwrap();
        let theta2 = StatisticFamily::unlabeled(params.clone(), vec![q(&[(0, 1), (1, 4), (1, 1)])]).unwrap();
        assert!(is_coarser(&StatisticFamily::trivial(params), &fine).unwrap());
        assert!(is_coarser(&theta, &fine).unwrap());
        assert!(!is_coarser(&theta2, &fine).unwrap());
    }

    #[test]
    fn mean_of_theta_from_one_trial() {
        let e = fixtures::bernoulli_grid();
        let r = unbiased_weights(&e, &q(&[(0, 1), (1, 2), (1, 1)])).unwrap();
        assert_eq!(r.weights().unwrap(), q(&[(0, 1), (1, 1)]).as_slice());
    }

    #[test]
    fn theta_squared_witness() {
        let e = fixtures::bernoulli_grid();
        let g = q(&[(0, 1), (1, 4), (1, 1)]);
        let r = unbiased_weights(&e, &g).unwrap();
        let (p, pq) = r.witness().unwrap();
        assert_eq!(e.mean_outcome_distribution(p).unwrap(), e.mean_outcome_distribution(pq).unwrap());
        assert_ne!(p.expectation(&g).unwrap(), pq.expectation(&g).unwrap());
        // Null direction (1,-2,1) from the uniform belief, half the maximal step 1/6.
        assert_eq!(p, &belief(&[(5, 12), (1, 6), (5, 12)]));
        assert_eq!(pq, &belief(&[(1, 4), (1, 2), (1, 4)]));
    }

    #[test]
    fn german_tank_weights() {
        let e = fixtures::german_tank(5);
        let g3 = q(&[(1, 1), (1, 1), (1, 1), (0, 1), (0, 1)]);
        let r = unbiased_weights(&e, &g3).unwrap();
        assert_eq!(r.weights().unwrap(), q(&[(1, 1), (1, 1), (1, 1), (-3, 1), (0, 1)]).as_slice());
    }

    #[test]
    fn moments_of_two_trials() {
        let e = fixtures::bernoulli_grid();
        let theta = q(&[(0, 1), (1, 2), (1, 1)]);
        let pair = e.power(2);
        let w2 = moment_weights(&e, 2, &theta, 2).unwrap();
        // w(y1, y2) = y1 * y2 with outcomes ordered (0,0), (0,1), (1,0), (1,1).
        assert_eq!(w2, q(&[(0, 1), (0, 1), (0, 1), (1, 1)]));
        verify_unbiased(&pair, &w2, &q(&[(0, 1), (1, 4), (1, 1)])).unwrap();
        let w0 = moment_weights(&e, 2, &theta, 0).unwrap();
        assert_eq!(w0, vec![ratio(1, 1); 4]);
        assert!(moment_weights(&e, 1, &theta, 2).is_err());

        let p = Belief::uniform(3);
        let var = elicited_variance(&e, &theta, &p).unwrap();
        let direct = unbiased_weights(&pair, &q(&[(0, 1), (1, 4), (1, 1)])).unwrap();
        let lambda = pair.mean_outcome_distribution(&p).unwrap();
        let m1 = p.expectation(&theta).unwrap();
        assert_eq!(var, dot(direct.weights().unwrap(), &lambda) - m1.clone() * m1);
        assert_eq!(var, ratio(1, 6));
    }

    #[test]
    fn family_document_round_trip() {
        let json = r#"{"parameters": ["0", "1/2", "1"], "functions": {"theta": ["0", "1/2", "1"], "sq": ["0", "1/4", "1"]}}"#;
        let f: StatisticFamily<Rational> = load_statistics(json).unwrap();
        assert_eq!(f.labels(), &["theta".to_string(), "sq".to_string()]);
        let back: StatisticFamily<Rational> = StatisticFamilyDoc::from_family(&f).into_family().unwrap();
        assert_eq!(back, f);
        let bad = r#"{"parameters": ["a"], "functions": {"g": ["1", "2"]}}"#;
        assert!(load_statistics::<Rational>(bad).is_err());
    }
}
