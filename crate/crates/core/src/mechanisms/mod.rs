//! Payment rules `φ(report, outcome)`, the transforms that carry a rule from
//! one experiment to another without changing expected payoffs, and an
//! exhaustive incentive-compatibility checker over rational belief grids.

mod document;
mod transform;
mod verify;

use serde::{Deserialize, Serialize};

pub use document::{load_mechanism, MechanismDoc};
pub use transform::{level_set_decomposition, level_set_transform, pushforward};
pub use verify::{
    envelope_check, ic_verify, payoff_gap, value_function, EnvelopeReport, ICReport, Violation, ViolationKind,
};

use crate::algebra::{dot, sum, Matrix, Scalar};
use crate::elicit::verify_unbiased;
use crate::error::Error;
use crate::model::{Belief, CovariateMixture, Experiment};

/// What an analyst submits.
#[derive(Clone, Debug, PartialEq)]
pub enum Report<T: Scalar> {
    /// A full belief over the parameters.
    Belief(Belief<T>),
    /// A point estimate, for mean-score mechanisms.
    Scalar(T),
    /// A row of a payoff table.
    Index(usize),
}

/// Payoff as a function of the announced mean `μ` and the weight `w(y)` of
/// the realized outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScoreForm {
    /// `1 − (μ − w(y))²`
    #[default]
    Quadratic,
    /// `2μ·w(y) − μ²`
    Linear,
}

impl ScoreForm {
    fn score<T: Scalar>(self, mu: &T, w: &T) -> T {
        match self {
            ScoreForm::Quadratic => {
                let d = mu.clone() - w.clone();
                T::one() - d.clone() * d
            }
            ScoreForm::Linear => (T::one() + T::one()) * mu.clone() * w.clone() - mu.clone() * mu.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind<T: Scalar> {
    QuadraticPanel { events: Vec<Vec<usize>>, weights: Vec<T> },
    MeanScore { statistic: Vec<T>, weights: Vec<T>, form: ScoreForm },
    Table { reports: Vec<String>, payoffs: Matrix<T> },
    Pushforward { base: Box<Mechanism<T>>, matrix: Matrix<T> },
    Compound { mixture: CovariateMixture<T>, components: Vec<Mechanism<T>> },
    Shift { base: Box<Mechanism<T>>, offset: T },
}

/// A payment rule attached to the experiment whose outcomes it pays on.
#[derive(Clone, Debug, PartialEq)]
pub struct Mechanism<T: Scalar> {
    experiment: Experiment<T>,
    kind: Kind<T>,
}

/// `1 − Σ_i a_i (λ_p(E_i) − 1{y ∈ E_i})²` with singleton events and equal
/// weights: the expected value of a randomized panel of event forecasts.
pub fn quadratic_mechanism<T: Scalar>(e: &Experiment<T>) -> Mechanism<T> {
    let n = e.num_outcomes();
    let share = T::one() / T::from_count(n.max(1));
    Mechanism {
        experiment: e.clone(),
        kind: Kind::QuadraticPanel { events: (0..n).map(|y| vec![y]).collect(), weights: vec![share; n] },
    }
}

/// Quadratic panel over arbitrary events with nonnegative weights summing to 1.
pub fn quadratic_panel<T: Scalar>(e: &Experiment<T>, events: Vec<Vec<usize>>, weights: Vec<T>) -> Result<Mechanism<T>, Error> {
    if events.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!("{} events, {} weights", events.len(), weights.len())));
    }
    if let Some(&y) = events.iter().flatten().find(|&&y| y >= e.num_outcomes()) {
        return Err(Error::UnknownOutcome(y));
    }
    Belief::new(weights.clone()).map_err(|err| Error::InvalidArgument(format!("panel weights: {err}")))?;
    Ok(Mechanism { experiment: e.clone(), kind: Kind::QuadraticPanel { events, weights } })
}

/// Scores a reported mean of `g` against `w(y)`; requires `w` unbiased for `g`.
pub fn mean_mechanism<T: Scalar>(e: &Experiment<T>, g: Vec<T>, w: Vec<T>, form: ScoreForm) -> Result<Mechanism<T>, Error> {
    verify_unbiased(e, &w, &g)?;
    Ok(mean_mechanism_unchecked(e, g, w, form))
}

/// Like [`mean_mechanism`] without the unbiasedness check, for studying
/// what goes wrong with biased weights.
pub fn mean_mechanism_unchecked<T: Scalar>(e: &Experiment<T>, g: Vec<T>, w: Vec<T>, form: ScoreForm) -> Mechanism<T> {
    Mechanism { experiment: e.clone(), kind: Kind::MeanScore { statistic: g, weights: w, form } }
}

/// Direct lookup `payoffs[report][outcome]`.
pub fn table_mechanism<T: Scalar>(e: &Experiment<T>, reports: Vec<String>, payoffs: Matrix<T>) -> Result<Mechanism<T>, Error> {
    if payoffs.rows() != reports.len() || payoffs.cols() != e.num_outcomes() {
        return Err(Error::DimensionMismatch(format!(
            "payoff table is {}x{} for {} reports and {} outcomes",
            payoffs.rows(),
            payoffs.cols(),
            reports.len(),
            e.num_outcomes()
        )));
    }
    Ok(Mechanism { experiment: e.clone(), kind: Kind::Table { reports, payoffs } })
}

/// Pays `ψ_x(report, y)` on outcome `(x, y)` of the mixture experiment.
/// Every sub-mechanism must pay within `[0, 1]`.
pub fn compound_mechanism<T: Scalar>(
    mixture: &CovariateMixture<T>,
    components: Vec<Mechanism<T>>,
) -> Result<Mechanism<T>, Error> {
    if components.len() != mixture.components().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} sub-mechanisms for {} covariates",
            components.len(),
            mixture.components().len()
        )));
    }
    for (x, (sub, comp)) in components.iter().zip(mixture.components()).enumerate() {
        if sub.experiment() != comp {
            return Err(Error::InvalidArgument(format!(
                "sub-mechanism for covariate {:?} is attached to a different experiment",
                mixture.covariates()[x]
            )));
        }
        match sub.payoff_range() {
            Some((lo, hi)) if !lo.is_strictly_negative() && !(hi.clone() - T::one()).is_strictly_positive() => {}
            Some((lo, hi)) => {
                return Err(Error::Unbounded(format!(
                    "covariate {:?} pays within [{}, {}]",
                    mixture.covariates()[x],
                    lo.format_scalar(),
                    hi.format_scalar()
                )))
            }
            None => {
                return Err(Error::Unbounded(format!("covariate {:?} has no finite payoff bound", mixture.covariates()[x])))
            }
        }
    }
    Ok(Mechanism { experiment: mixture.experiment(), kind: Kind::Compound { mixture: mixture.clone(), components } })
}

fn min_max<T: Scalar>(values: impl IntoIterator<Item = T>) -> Option<(T, T)> {
    values.into_iter().fold(None, |acc, v| match acc {
        None => Some((v.clone(), v)),
        Some((lo, hi)) => {
            let lo = if v < lo { v.clone() } else { lo };
            let hi = if v > hi { v } else { hi };
            Some((lo, hi))
        }
    })
}

impl<T: Scalar> Mechanism<T> {
    pub fn experiment(&self) -> &Experiment<T> {
        &self.experiment
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::QuadraticPanel { .. } => "quadratic_panel",
            Kind::MeanScore { .. } => "mean_score",
            Kind::Table { .. } => "table",
            Kind::Pushforward { .. } => "pushforward",
            Kind::Compound { .. } => "compound",
            Kind::Shift { .. } => "shift",
        }
    }

    /// Whether every belief is an admissible report.
    pub fn is_direct(&self) -> bool {
        match &self.kind {
            Kind::QuadraticPanel { .. } | Kind::MeanScore { .. } => true,
            Kind::Table { .. } => false,
            Kind::Pushforward { base, .. } | Kind::Shift { base, .. } => base.is_direct(),
            Kind::Compound { components, .. } => components.iter().all(Mechanism::is_direct),
        }
    }

    /// Number of table rows, for table-based mechanisms.
    pub fn table_reports(&self) -> Option<&[String]> {
        match &self.kind {
            Kind::Table { reports, .. } => Some(reports),
            Kind::Pushforward { base, .. } | Kind::Shift { base, .. } => base.table_reports(),
            _ => None,
        }
    }

    pub(crate) fn table(&self) -> Option<(&[String], &Matrix<T>)> {
        match &self.kind {
            Kind::Table { reports, payoffs } => Some((reports, payoffs)),
            _ => None,
        }
    }

    /// The same rule plus a constant.
    pub fn shifted(&self, offset: T) -> Mechanism<T> {
        Mechanism { experiment: self.experiment.clone(), kind: Kind::Shift { base: Box::new(self.clone()), offset } }
    }

    /// `φ(report, y)` for every outcome `y`.
    pub fn payoff_vector(&self, report: &Report<T>) -> Result<Vec<T>, Error> {
        let n = self.experiment.num_parameters();
        match (&self.kind, report) {
            (Kind::QuadraticPanel { events, weights }, Report::Belief(p)) => {
                check_belief(p, n)?;
                let lambda = self.experiment.mean_outcome_distribution(p)?;
                let forecasts: Vec<T> = events
                    .iter()
                    .map(|ev| ev.iter().fold(T::zero(), |acc, &y| acc + lambda[y].clone()))
                    .collect();
                Ok((0..self.experiment.num_outcomes())
                    .map(|y| {
                        let loss = events.iter().zip(weights).zip(&forecasts).fold(T::zero(), |acc, ((ev, a), f)| {
                            let hit = if ev.contains(&y) { T::one() } else { T::zero() };
                            let d = f.clone() - hit;
                            acc + a.clone() * d.clone() * d
                        });
                        T::one() - loss
                    })
                    .collect())
            }
            (Kind::MeanScore { statistic, weights, form }, Report::Belief(p)) => {
                check_belief(p, n)?;
                let mu = p.expectation(statistic)?;
                Ok(weights.iter().map(|w| form.score(&mu, w)).collect())
            }
            (Kind::MeanScore { weights, form, .. }, Report::Scalar(mu)) => Ok(weights.iter().map(|w| form.score(mu, w)).collect()),
            (Kind::Table { payoffs, .. }, Report::Index(r)) => {
                if *r >= payoffs.rows() {
                    return Err(Error::ReportMismatch(format!("table has {} reports, got index {r}", payoffs.rows())));
                }
                Ok(payoffs.row(*r).to_vec())
            }
            (Kind::Pushforward { base, matrix }, _) => matrix.mul_vec(&base.payoff_vector(report)?),
            (Kind::Compound { components, .. }, _) => {
                let mut out = Vec::with_capacity(self.experiment.num_outcomes());
                for sub in components {
                    out.extend(sub.payoff_vector(report)?);
                }
                Ok(out)
            }
            (Kind::Shift { base, offset }, _) => {
                Ok(base.payoff_vector(report)?.into_iter().map(|v| v + offset.clone()).collect())
            }
            (_, other) => Err(Error::ReportMismatch(format!("{} mechanism cannot score {other:?}", self.kind_name()))),
        }
    }

    /// Payoff `φ(report, outcome)`.
    pub fn evaluate(&self, report: &Report<T>, outcome: usize) -> Result<T, Error> {
        if outcome >= self.experiment.num_outcomes() {
            return Err(Error::UnknownOutcome(outcome));
        }
        Ok(self.payoff_vector(report)?.swap_remove(outcome))
    }

    /// `E_p[φ(report, y)]` where `y` is drawn from the mean outcome distribution of `p`.
    pub fn expected_payoff(&self, belief: &Belief<T>, report: &Report<T>) -> Result<T, Error> {
        let lambda = self.experiment.mean_outcome_distribution(belief)?;
        Ok(dot(&lambda, &self.payoff_vector(report)?))
    }

    /// Bounds on payoffs over all outcomes and all reports that are beliefs
    /// (or table rows). Interval arithmetic, so possibly loose for
    /// pushforwards through matrices with mixed signs.
    pub fn payoff_range(&self) -> Option<(T, T)> {
        match &self.kind {
            Kind::QuadraticPanel { weights, .. } => Some((T::one() - sum(weights), T::one())),
            Kind::MeanScore { statistic, weights, form } => {
                let (glo, ghi) = min_max(statistic.iter().cloned())?;
                let mut candidates = Vec::new();
                for w in weights {
                    candidates.push(form.score(&glo, w));
                    candidates.push(form.score(&ghi, w));
                    if *w >= glo && *w <= ghi {
                        candidates.push(form.score(w, w));
                    }
                }
                min_max(candidates)
            }
            Kind::Table { payoffs, .. } => min_max(payoffs.entries().iter().cloned()),
            Kind::Pushforward { base, matrix } => {
                let (lo, hi) = base.payoff_range()?;
                let rows = (0..matrix.rows()).map(|y| {
                    matrix.row(y).iter().fold((T::zero(), T::zero()), |(a, b), m| {
                        if m.is_strictly_negative() {
                            (a + m.clone() * hi.clone(), b + m.clone() * lo.clone())
                        } else {
                            (a + m.clone() * lo.clone(), b + m.clone() * hi.clone())
                        }
                    })
                });
                let bounds: Vec<(T, T)> = rows.collect();
                let lo = min_max(bounds.iter().map(|b| b.0.clone()))?.0;
                let hi = min_max(bounds.iter().map(|b| b.1.clone()))?.1;
                Some((lo, hi))
            }
            Kind::Compound { components, .. } => {
                let ranges: Vec<(T, T)> = components.iter().map(Mechanism::payoff_range).collect::<Option<_>>()?;
                let lo = min_max(ranges.iter().map(|r| r.0.clone()))?.0;
                let hi = min_max(ranges.iter().map(|r| r.1.clone()))?.1;
                Some((lo, hi))
            }
            Kind::Shift { base, offset } => base.payoff_range().map(|(lo, hi)| (lo + offset.clone(), hi + offset.clone())),
        }
    }
}

fn check_belief<T: Scalar>(p: &Belief<T>, n: usize) -> Result<(), Error> {
    if p.len() != n {
        return Err(Error::ReportMismatch(format!("belief over {} parameters, experiment has {n}", p.len())));
    }
    Ok(())
}
