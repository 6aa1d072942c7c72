//! Comparing experiments: which one lets a principal elicit more, under
//! unrestricted, Blackwell (garbling), nonnegative and bounded payments.
//!
//! Every relation asks for a matrix linking the two kernels, `π_Z = π_Y M`,
//! with a different constraint on `M`. Answers come with exact witnesses.

mod audit;
mod events;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

pub use audit::{order_consistency_audit, AuditReport, PairAudit};
pub use events::{event_labels, EventWeightMatrix};

use crate::algebra::{lp_feasible, solve_linear, sum, Bound, Matrix, Scalar};
use crate::error::Error;
use crate::json;
use crate::mechanisms::level_set_decomposition;
use crate::model::Experiment;

/// Default cap on `|Z|` for [`bounded_dominates`]; the LP has `|Y|·2^|Z|` variables.
pub const BOUNDED_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `π_Z = π_Y M` for some `M`, returned with unit row sums.
    Elicitation,
    /// `M` Markov.
    Blackwell,
    /// `M` nonnegative.
    Nonneg,
    /// Event weights `N(y, A) ∈ [0,1]`.
    Bounded,
    /// Elicitation dominance expressed as Blackwell dominance over a uniform garbling.
    Garbling,
}

impl Relation {
    pub const ALL: [Relation; 5] =
        [Relation::Elicitation, Relation::Blackwell, Relation::Nonneg, Relation::Bounded, Relation::Garbling];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Elicitation => "elicitation",
            Relation::Blackwell => "blackwell",
            Relation::Nonneg => "nonneg",
            Relation::Bounded => "bounded",
            Relation::Garbling => "garbling",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown relation {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness<T: Scalar> {
    Matrix(Matrix<T>),
    Events(EventWeightMatrix<T>),
    /// `π_Y · channel` is the kernel of the `epsilon` uniform garbling of `eZ`.
    Garbling { epsilon: T, channel: Matrix<T> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceResult<T: Scalar> {
    pub relation: Relation,
    pub holds: bool,
    pub witness: Option<Witness<T>>,
    /// Why no witness exists, when `holds` is false.
    pub certificate: Option<String>,
}

impl<T: Scalar> DominanceResult<T> {
    fn yes(relation: Relation, witness: Witness<T>) -> Self {
        DominanceResult { relation, holds: true, witness: Some(witness), certificate: None }
    }

    fn no(relation: Relation, why: String) -> Self {
        DominanceResult { relation, holds: false, witness: None, certificate: Some(why) }
    }

    pub fn matrix(&self) -> Option<&Matrix<T>> {
        match &self.witness {
            Some(Witness::Matrix(m)) => Some(m),
            _ => None,
        }
    }

    pub fn events(&self) -> Option<&EventWeightMatrix<T>> {
        match &self.witness {
            Some(Witness::Events(n)) => Some(n),
            _ => None,
        }
    }

    /// JSON `{"relation", "holds", "witness", "infeasibility_certificate"}`,
    /// with rows labelled by `eY`'s outcomes and columns by `eZ`'s.
    pub fn to_json(&self, e_y: &Experiment<T>, e_z: &Experiment<T>) -> Value {
        let witness = self.witness.as_ref().map(|w| match w {
            Witness::Matrix(m) => json!({
                "type": "matrix", "rows": e_y.outcomes(), "columns": e_z.outcomes(), "entries": json::matrix(m)
            }),
            Witness::Events(n) => {
                let mut v = n.to_json(e_z.outcomes());
                v["type"] = json!("event_weights");
                v["rows"] = json!(e_y.outcomes());
                v
            }
            Witness::Garbling { epsilon, channel } => json!({
                "type": "uniform_garbling", "epsilon": json::scalar(epsilon),
                "rows": e_y.outcomes(), "columns": e_z.outcomes(), "channel": json::matrix(channel)
            }),
        });
        json!({
            "relation": self.relation.name(),
            "holds": self.holds,
            "witness": witness,
            "infeasibility_certificate": self.certificate,
        })
    }
}

fn column_targets<T: Scalar>(e_z: &Experiment<T>) -> Vec<Vec<T>> {
    (0..e_z.num_outcomes()).map(|z| e_z.kernel().column(z)).collect()
}

fn assemble<T: Scalar>(columns: &[Vec<T>], rows: usize) -> Matrix<T> {
    Matrix::from_columns(columns, rows).expect("columns of equal length")
}

/// `π_Z = π_Y M` for some matrix `M`. On success `M` is rescaled to
/// `M(y,z) + (1 − Σ_z M(y,z)) / |Z|`, which has unit row sums and still
/// factors the kernel because `π_Y (1 − M·1) = 1 − π_Z·1 = 0`.
pub fn elicitation_dominates<T: Scalar>(e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<DominanceResult<T>, Error> {
    e_y.ensure_same_parameters(e_z)?;
    let mut columns = Vec::with_capacity(e_z.num_outcomes());
    for (z, target) in column_targets(e_z).iter().enumerate() {
        match solve_linear(e_y.kernel(), target)? {
            Some(m) => columns.push(m),
            None => {
                return Ok(DominanceResult::no(
                    Relation::Elicitation,
                    format!("column {:?} of the dominated kernel is outside the column space of the dominating one", e_z.outcomes()[z]),
                ))
            }
        }
    }
    let mut m = assemble(&columns, e_y.num_outcomes());
    let z_count = T::from_count(e_z.num_outcomes());
    for y in 0..m.rows() {
        let correction = (T::one() - sum(m.row(y))) / z_count.clone();
        for z in 0..m.cols() {
            m[(y, z)] = m[(y, z)].clone() + correction.clone();
        }
    }
    Ok(DominanceResult::yes(Relation::Elicitation, Witness::Matrix(m)))
}

/// `π_Z = π_Y M` for a Markov `M`: one LP over all entries of `M`.
pub fn blackwell_dominates<T: Scalar>(e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<DominanceResult<T>, Error> {
    e_y.ensure_same_parameters(e_z)?;
    let (ny, nz, nt) = (e_y.num_outcomes(), e_z.num_outcomes(), e_y.num_parameters());
    let mut a = Matrix::zeros(nt * nz + ny, ny * nz);
    let mut b = Vec::with_capacity(nt * nz + ny);
    for t in 0..nt {
        for z in 0..nz {
            let row = t * nz + z;
            for y in 0..ny {
                a[(row, y * nz + z)] = e_y.prob(t, y).clone();
            }
            b.push(e_z.prob(t, z).clone());
        }
    }
    for y in 0..ny {
        for z in 0..nz {
            a[(nt * nz + y, y * nz + z)] = T::one();
        }
        b.push(T::one());
    }
    match lp_feasible(&a, &b, &vec![Bound::nonnegative(); ny * nz])? {
        Some(x) => Ok(DominanceResult::yes(Relation::Blackwell, Witness::Matrix(Matrix::new(ny, nz, x)?))),
        None => Ok(DominanceResult::no(Relation::Blackwell, "no Markov matrix M satisfies π_Z = π_Y M".into())),
    }
}

/// `π_Z = π_Y M` for a nonnegative `M`. The columns of `M` are independent
/// problems, solved one LP each.
pub fn nonneg_dominates<T: Scalar>(e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<DominanceResult<T>, Error> {
    e_y.ensure_same_parameters(e_z)?;
    let bounds = vec![Bound::nonnegative(); e_y.num_outcomes()];
    let mut columns = Vec::with_capacity(e_z.num_outcomes());
    for (z, target) in column_targets(e_z).iter().enumerate() {
        match lp_feasible(e_y.kernel(), target, &bounds)? {
            Some(m) => columns.push(m),
            None => {
                return Ok(DominanceResult::no(
                    Relation::Nonneg,
                    format!("column {:?} is not a nonnegative combination of the dominating kernel's columns", e_z.outcomes()[z]),
                ))
            }
        }
    }
    Ok(DominanceResult::yes(Relation::Nonneg, Witness::Matrix(assemble(&columns, e_y.num_outcomes()))))
}

/// Event probabilities `θ ↦ π_Z(A|θ)` for the event with bitmask `mask`.
pub(crate) fn event_column<T: Scalar>(e_z: &Experiment<T>, mask: usize) -> Vec<T> {
    (0..e_z.num_parameters())
        .map(|t| {
            (0..e_z.num_outcomes())
                .filter(|z| mask >> z & 1 == 1)
                .fold(T::zero(), |acc, z| acc + e_z.prob(t, z).clone())
        })
        .collect()
}

/// `π_Z(A|θ) = Σ_y π_Y(y|θ) N(y, A)` for every event `A ⊆ Z` with
/// `N ∈ [0,1]`, using the default cap on `|Z|`.
pub fn bounded_dominates<T: Scalar>(e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<DominanceResult<T>, Error> {
    bounded_dominates_with_cap(e_y, e_z, BOUNDED_CAP)
}

/// [`bounded_dominates`] with an explicit cap. Each event is an independent
/// LP in `|Y|` unit-interval variables.
pub fn bounded_dominates_with_cap<T: Scalar>(
    e_y: &Experiment<T>,
    e_z: &Experiment<T>,
    cap: usize,
) -> Result<DominanceResult<T>, Error> {
    e_y.ensure_same_parameters(e_z)?;
    let nz = e_z.num_outcomes();
    if nz > cap {
        return Err(Error::TooManyOutcomes { size: nz, cap });
    }
    let labels = event_labels(e_z.outcomes());
    let bounds = vec![Bound::unit_interval(); e_y.num_outcomes()];
    let mut columns = Vec::with_capacity(1 << nz);
    for mask in 0..1usize << nz {
        match lp_feasible(e_y.kernel(), &event_column(e_z, mask), &bounds)? {
            Some(n) => columns.push(n),
            None => {
                return Ok(DominanceResult::no(
                    Relation::Bounded,
                    format!("no [0,1] weights reproduce the probability of event {}", labels[mask]),
                ))
            }
        }
    }
    let n = EventWeightMatrix::new(assemble(&columns, e_y.num_outcomes()), nz)?;
    Ok(DominanceResult::yes(Relation::Bounded, Witness::Events(n)))
}

/// Smallest `ε ∈ [0,1)` and the Markov channel `T = (1−ε)M + ε·1μᵀ`, where
/// `M` is the unit-row-sum elicitation witness. Then `π_Y T` is the kernel of
/// `eZ` garbled towards `μ` with probability `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct GarblingDecomposition<T: Scalar> {
    pub epsilon: T,
    pub channel: Matrix<T>,
}

/// Per-entry threshold: `(1−ε)m + ε·μ_z ≥ 0` needs `ε ≥ −m / (μ_z − m)`
/// for each negative `m`.
pub fn garbling_decomposition<T: Scalar>(
    e_y: &Experiment<T>,
    e_z: &Experiment<T>,
    mu: &[T],
) -> Result<GarblingDecomposition<T>, Error> {
    if mu.len() != e_z.num_outcomes() {
        return Err(Error::DimensionMismatch(format!("garbling target over {} outcomes, need {}", mu.len(), e_z.num_outcomes())));
    }
    let result = elicitation_dominates(e_y, e_z)?;
    let Some(m) = result.matrix() else {
        return Err(Error::NotDominated(result.certificate.unwrap_or_default()));
    };
    let mut epsilon = T::zero();
    for y in 0..m.rows() {
        for z in 0..m.cols() {
            let v = &m[(y, z)];
            if v.is_strictly_negative() {
                if !mu[z].is_strictly_positive() {
                    return Err(Error::InvalidArgument(format!(
                        "garbling target puts no mass on {:?}, where the witness is negative",
                        e_z.outcomes()[z]
                    )));
                }
                let threshold = -v.clone() / (mu[z].clone() - v.clone());
                if threshold > epsilon {
                    epsilon = threshold;
                }
            }
        }
    }
    let keep = T::one() - epsilon.clone();
    let mut t = Matrix::zeros(m.rows(), m.cols());
    for y in 0..m.rows() {
        for z in 0..m.cols() {
            t[(y, z)] = keep.clone() * m[(y, z)].clone() + epsilon.clone() * mu[z].clone();
        }
    }
    Ok(GarblingDecomposition { epsilon, channel: t })
}

/// [`garbling_decomposition`] towards the uniform distribution on `Z`.
pub fn uniform_garbling_decomposition<T: Scalar>(e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<GarblingDecomposition<T>, Error> {
    let share = T::one() / T::from_count(e_z.num_outcomes());
    garbling_decomposition(e_y, e_z, &vec![share; e_z.num_outcomes()])
}

/// The uniform garbling decomposition packaged as a dominance answer.
pub fn garbling_dominates<T: Scalar>(e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<DominanceResult<T>, Error> {
    match uniform_garbling_decomposition(e_y, e_z) {
        Ok(GarblingDecomposition { epsilon, channel }) => Ok(DominanceResult::yes(Relation::Garbling, Witness::Garbling { epsilon, channel })),
        Err(Error::NotDominated(why)) => Ok(DominanceResult::no(Relation::Garbling, why)),
        Err(e) => Err(e),
    }
}

pub fn compare<T: Scalar>(relation: Relation, e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<DominanceResult<T>, Error> {
    match relation {
        Relation::Elicitation => elicitation_dominates(e_y, e_z),
        Relation::Blackwell => blackwell_dominates(e_y, e_z),
        Relation::Nonneg => nonneg_dominates(e_y, e_z),
        Relation::Bounded => bounded_dominates(e_y, e_z),
        Relation::Garbling => garbling_dominates(e_y, e_z),
    }
}

/// Re-checks a witness against its defining equations, independently of
/// the solver that produced it.
pub fn verify_witness<T: Scalar>(relation: Relation, e_y: &Experiment<T>, e_z: &Experiment<T>, witness: &Witness<T>) -> bool {
    let factors = |m: &Matrix<T>| e_y.kernel().mul(m).is_ok_and(|k| k.approx_eq(e_z.kernel()));
    let unit_rows = |m: &Matrix<T>| m.row_sums().iter().all(|s| s.approx_eq(&T::one()));
    match (relation, witness) {
        (Relation::Elicitation, Witness::Matrix(m)) => factors(m) && unit_rows(m),
        (Relation::Blackwell, Witness::Matrix(m)) => factors(m) && m.is_markov(),
        (Relation::Nonneg, Witness::Matrix(m)) => factors(m) && m.is_nonnegative(),
        (Relation::Bounded, Witness::Events(n)) => {
            n.z_count() == e_z.num_outcomes()
                && n.y_count() == e_y.num_outcomes()
                && (0..1usize << n.z_count()).all(|mask| {
                    let col = n.matrix().column(mask);
                    e_y.kernel()
                        .mul_vec(&col)
                        .is_ok_and(|v| v.iter().zip(event_column(e_z, mask)).all(|(a, b)| a.approx_eq(&b)))
                })
        }
        (Relation::Garbling, Witness::Garbling { epsilon, channel }) => {
            channel.is_markov()
                && e_z.uniform_garble(epsilon).is_ok_and(|g| e_y.kernel().mul(channel).is_ok_and(|k| k.approx_eq(g.kernel())))
        }
        _ => false,
    }
}

/// Witness for `eX ≥ eZ` from witnesses for `eX ≥ eY` and `eY ≥ eZ` under
/// the same relation. Matrices multiply; event weights compose through the
/// level-set decomposition of each column of the second witness.
pub fn compose_witnesses<T: Scalar>(first: &Witness<T>, second: &Witness<T>) -> Result<Witness<T>, Error> {
    match (first, second) {
        (Witness::Matrix(a), Witness::Matrix(b)) => Ok(Witness::Matrix(a.mul(b)?)),
        (Witness::Events(a), Witness::Events(b)) => {
            if a.z_count() != b.y_count() {
                return Err(Error::DimensionMismatch("event witnesses do not chain".into()));
            }
            let events = 1usize << b.z_count();
            let mut out = Matrix::zeros(a.y_count(), events);
            for mask in 0..events {
                let eta = level_set_decomposition(&b.matrix().column(mask))?;
                for x in 0..a.y_count() {
                    out[(x, mask)] = eta
                        .iter()
                        .enumerate()
                        .fold(T::zero(), |acc, (set, w)| acc + w.clone() * a.get(x, set).clone());
                }
            }
            Ok(Witness::Events(EventWeightMatrix::new(out, b.z_count())?))
        }
        _ => Err(Error::InvalidArgument("witnesses of different relations do not compose".into())),
    }
}
