use serde_json::{json, Value};

use crate::algebra::{dot, Scalar};
use crate::elicit::{indistinguishable, StatisticFamily};
use crate::error::Error;
use crate::grid::belief_grid;
use crate::json;
use crate::mechanisms::{Mechanism, Report};
use crate::model::Belief;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Misreporting pays strictly more than the truth.
    Profitable,
    /// The target separates the pair but misreporting costs nothing.
    NotStrict,
    /// The pair has equal mean outcome distributions but different payoffs.
    NotIndifferent,
}

impl ViolationKind {
    fn name(self) -> &'static str {
        match self {
            ViolationKind::Profitable => "profitable_deviation",
            ViolationKind::NotStrict => "not_strict",
            ViolationKind::NotIndifferent => "not_indifferent",
        }
    }
}

/// A belief `p`, a report `q` and `gap = E_p[φ(p,·)] − E_p[φ(q,·)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation<T: Scalar> {
    pub kind: ViolationKind,
    pub belief: Belief<T>,
    pub report: Belief<T>,
    pub gap: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ICReport<T: Scalar> {
    /// Truthful reporting is weakly optimal at every grid belief.
    pub incentive_compatible: bool,
    /// Additionally strictly optimal against every target-distinguishable report.
    pub elicits_target: bool,
    /// Reports with the same mean outcome distribution as the belief pay the same.
    pub indifferent_within_cells: bool,
    pub grid_denominator: usize,
    pub grid_size: usize,
    pub pairs_checked: usize,
    pub strict_pairs: usize,
    pub indifferent_pairs: usize,
    /// Lexicographically first failing pair, if any.
    pub violation: Option<Violation<T>>,
}

impl<T: Scalar> ICReport<T> {
    pub fn to_json(&self) -> Value {
        let violation = self.violation.as_ref().map(|v| {
            json!({
                "kind": v.kind.name(),
                "belief": json::belief(&v.belief),
                "report": json::belief(&v.report),
                "gap": json::scalar(&v.gap),
            })
        });
        json!({
            "incentive_compatible": self.incentive_compatible,
            "elicits_target": self.elicits_target,
            "indifferent_within_cells": self.indifferent_within_cells,
            "grid_denominator": self.grid_denominator,
            "grid_size": self.grid_size,
            "pairs_checked": self.pairs_checked,
            "strict_pairs": self.strict_pairs,
            "indifferent_pairs": self.indifferent_pairs,
            "violation": violation,
        })
    }
}

fn require_direct<T: Scalar>(m: &Mechanism<T>) -> Result<(), Error> {
    if m.is_direct() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{} mechanism does not accept belief reports", m.kind_name())))
    }
}

/// Exhaustive check over every pair of grid beliefs with denominators at
/// most `denominator`, in exact arithmetic.
pub fn ic_verify<T: Scalar>(m: &Mechanism<T>, target: &StatisticFamily<T>, denominator: usize) -> Result<ICReport<T>, Error> {
    require_direct(m)?;
    let e = m.experiment();
    if target.parameters() != e.parameters() {
        return Err(Error::ParameterMismatch);
    }
    let grid = belief_grid::<T>(e.num_parameters(), denominator);
    let lambdas: Vec<Vec<T>> = grid.iter().map(|p| e.mean_outcome_distribution(p)).collect::<Result<_, _>>()?;
    let payoffs: Vec<Vec<T>> =
        grid.iter().map(|q| m.payoff_vector(&Report::Belief(q.clone()))).collect::<Result<_, _>>()?;

    let mut report = ICReport {
        incentive_compatible: true,
        elicits_target: true,
        indifferent_within_cells: true,
        grid_denominator: denominator,
        grid_size: grid.len(),
        pairs_checked: 0,
        strict_pairs: 0,
        indifferent_pairs: 0,
        violation: None,
    };
    for (i, p) in grid.iter().enumerate() {
        let truthful = dot(&lambdas[i], &payoffs[i]);
        for (j, q) in grid.iter().enumerate() {
            report.pairs_checked += 1;
            let gap = truthful.clone() - dot(&lambdas[i], &payoffs[j]);
            let mut failed = None;
            if gap.is_strictly_negative() {
                report.incentive_compatible = false;
                report.elicits_target = false;
                failed = Some(ViolationKind::Profitable);
            }
            let same_cell = lambdas[i].iter().zip(&lambdas[j]).all(|(a, b)| a.approx_eq(b));
            if same_cell {
                if gap.is_negligible() {
                    report.indifferent_pairs += 1;
                } else {
                    report.indifferent_within_cells = false;
                    failed = failed.or(Some(ViolationKind::NotIndifferent));
                }
            }
            if !indistinguishable(target, p, q)? {
                if gap.is_strictly_positive() {
                    report.strict_pairs += 1;
                } else {
                    report.elicits_target = false;
                    failed = failed.or(Some(ViolationKind::NotStrict));
                }
            }
            if let (Some(kind), None) = (failed, &report.violation) {
                report.violation = Some(Violation { kind, belief: p.clone(), report: q.clone(), gap });
            }
        }
    }
    Ok(report)
}

/// `max_q E_p[φ(q,·)]` over `reports`, with the index of the first maximizer.
pub fn value_function<T: Scalar>(m: &Mechanism<T>, p: &Belief<T>, reports: &[Belief<T>]) -> Result<(T, usize), Error> {
    require_direct(m)?;
    let mut best: Option<(T, usize)> = None;
    for (i, q) in reports.iter().enumerate() {
        let v = m.expected_payoff(p, &Report::Belief(q.clone()))?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, i));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty report grid".into()))
}

/// First `(belief, report, difference)` where the two mechanisms' expected
/// payoffs differ, scanning `beliefs × reports`.
pub fn payoff_gap<T: Scalar>(
    m1: &Mechanism<T>,
    m2: &Mechanism<T>,
    beliefs: &[Belief<T>],
    reports: &[Report<T>],
) -> Result<Option<(usize, usize, T)>, Error> {
    if m1.experiment().parameters() != m2.experiment().parameters() {
        return Err(Error::ParameterMismatch);
    }
    for (i, p) in beliefs.iter().enumerate() {
        for (j, r) in reports.iter().enumerate() {
            let d = m1.expected_payoff(p, r)? - m2.expected_payoff(p, r)?;
            if !d.is_negligible() {
                return Ok(Some((i, j, d)));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeReport<T: Scalar> {
    /// The value functions agree at every grid belief, so the implication applies.
    pub applicable: bool,
    /// Every cross payoff `E_p[φ(q,·)]` agrees; `None` when not applicable.
    pub cross_payoffs_agree: Option<bool>,
    /// First `(p, q, difference)` where values or cross payoffs differ.
    pub mismatch: Option<(Belief<T>, Belief<T>, T)>,
}

impl<T: Scalar> EnvelopeReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "applicable": self.applicable,
            "cross_payoffs_agree": self.cross_payoffs_agree,
            "mismatch": self.mismatch.as_ref().map(|(p, q, d)| json!({
                "belief": json::belief(p), "report": json::belief(q), "difference": json::scalar(d)
            })),
        })
    }
}

/// If two mechanisms over the same parameters have the same value function
/// on `grid`, checks that all their cross payoffs on `grid` agree as well.
/// Continuity of the mechanisms is assumed, not verified.
pub fn envelope_check<T: Scalar>(m1: &Mechanism<T>, m2: &Mechanism<T>, grid: &[Belief<T>]) -> Result<EnvelopeReport<T>, Error> {
    if m1.experiment().parameters() != m2.experiment().parameters() {
        return Err(Error::ParameterMismatch);
    }
    for p in grid {
        let (v1, _) = value_function(m1, p, grid)?;
        let (v2, _) = value_function(m2, p, grid)?;
        if !v1.approx_eq(&v2) {
            return Ok(EnvelopeReport { applicable: false, cross_payoffs_agree: None, mismatch: Some((p.clone(), p.clone(), v1 - v2)) });
        }
    }
    for p in grid {
        for q in grid {
            let r = Report::Belief(q.clone());
            let d = m1.expected_payoff(p, &r)? - m2.expected_payoff(p, &r)?;
            if !d.is_negligible() {
                return Ok(EnvelopeReport { applicable: true, cross_payoffs_agree: Some(false), mismatch: Some((p.clone(), q.clone(), d)) });
            }
        }
    }
    Ok(EnvelopeReport { applicable: true, cross_payoffs_agree: Some(true), mismatch: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, Matrix};
    use crate::elicit::maximal_partition;
    use crate::fixtures;
    use crate::mechanisms::{mean_mechanism, mean_mechanism_unchecked, pushforward, quadratic_mechanism, table_mechanism, ScoreForm};
    use crate::Rational;

    fn theta() -> Vec<Rational> {
        vec![ratio(0, 1), ratio(1, 2), ratio(1, 1)]
    }

    #[test]
    fn quadratic_elicits_maximal_partition() {
        let e = fixtures::bernoulli_grid();
        let r = ic_verify(&quadratic_mechanism(&e), &maximal_partition(&e), 4).unwrap();
        assert!(r.incentive_compatible && r.elicits_target && r.indifferent_within_cells, "{r:?}");
        assert_eq!(r.pairs_checked, r.grid_size * r.grid_size);
        assert_eq!(r.strict_pairs + r.indifferent_pairs, r.pairs_checked);
    }

    #[test]
    fn constant_mechanism_elicits_nothing() {
        let e = fixtures::bernoulli_grid();
        let blind = crate::model::Experiment::new(e.parameters().to_vec(), vec!["*".into()], Matrix::filled(3, 1, ratio(1, 1))).unwrap();
        let constant = quadratic_mechanism(&blind);
        let target = StatisticFamily::new(e.parameters().to_vec(), vec!["theta".into()], vec![theta()]).unwrap();
        let r = ic_verify(&constant, &target, 2).unwrap();
        assert!(r.incentive_compatible);
        assert!(!r.elicits_target);
        let v = r.violation.unwrap();
        assert_eq!(v.kind, ViolationKind::NotStrict);
        assert_eq!(v.gap, ratio(0, 1));
    }

    #[test]
    fn biased_weights_are_caught() {
        let e = fixtures::bernoulli_grid();
        let good = mean_mechanism(&e, theta(), vec![ratio(0, 1), ratio(1, 1)], ScoreForm::Quadratic).unwrap();
        let target = StatisticFamily::new(e.parameters().to_vec(), vec!["theta".into()], vec![theta()]).unwrap();
        assert!(ic_verify(&good, &target, 4).unwrap().elicits_target);
        let bad = mean_mechanism_unchecked(&e, theta(), vec![ratio(1, 4), ratio(1, 1)], ScoreForm::Quadratic);
        let r = ic_verify(&bad, &target, 4).unwrap();
        assert!(!r.incentive_compatible);
        let v = r.violation.unwrap();
        assert_eq!(v.kind, ViolationKind::Profitable);
        assert!(v.gap < ratio(0, 1));
        // Recompute the gap by hand.
        let recomputed = bad.expected_payoff(&v.belief, &Report::Belief(v.belief.clone())).unwrap()
            - bad.expected_payoff(&v.belief, &Report::Belief(v.report.clone())).unwrap();
        assert_eq!(recomputed, v.gap);
    }

    #[test]
    fn linear_score_value_is_mean_squared() {
        let e = fixtures::bernoulli_grid();
        let m = mean_mechanism(&e, theta(), vec![ratio(0, 1), ratio(1, 1)], ScoreForm::Linear).unwrap();
        let grid = belief_grid::<Rational>(3, 6);
        for p in &grid {
            let mu = p.expectation(&theta()).unwrap();
            assert_eq!(value_function(&m, p, &grid).unwrap().0, mu.clone() * mu);
        }
    }

    #[test]
    fn shifted_mechanism_is_not_applicable() {
        let e = fixtures::bernoulli_grid();
        let m = mean_mechanism(&e, theta(), vec![ratio(0, 1), ratio(1, 1)], ScoreForm::Linear).unwrap();
        let grid = belief_grid::<Rational>(3, 3);
        let r = envelope_check(&m, &m.shifted(ratio(1, 5)), &grid).unwrap();
        assert!(!r.applicable);
        assert_eq!(r.cross_payoffs_agree, None);
        assert_eq!(r.mismatch.unwrap().2, ratio(-1, 5));
        assert_eq!(envelope_check(&m, &m, &grid).unwrap().cross_payoffs_agree, Some(true));
    }

    #[test]
    fn pushforward_twin_has_same_cross_payoffs() {
        let clean = fixtures::bernoulli_grid();
        let noisy = fixtures::noisy_bernoulli_grid();
        let m = mean_mechanism(&clean, theta(), vec![ratio(0, 1), ratio(1, 1)], ScoreForm::Linear).unwrap();
        let m_inv = Matrix::from_rows(vec![vec![ratio(19, 18), ratio(-1, 18)], vec![ratio(-1, 18), ratio(19, 18)]]).unwrap();
        let twin = pushforward(&m, &m_inv, &noisy).unwrap();
        let r = envelope_check(&m, &twin, &belief_grid(3, 4)).unwrap();
        assert!(r.applicable);
        assert_eq!(r.cross_payoffs_agree, Some(true));
    }

    #[test]
    fn table_mechanisms_are_not_direct() {
        let e = fixtures::bernoulli_grid();
        let t = table_mechanism(&e, vec!["a".into()], Matrix::filled(1, 2, ratio(1, 2))).unwrap();
        assert!(ic_verify(&t, &maximal_partition(&e), 2).is_err());
    }
}
