use crate::algebra::{Matrix, Scalar};
use crate::error::Error;
use crate::mechanisms::{table_mechanism, Kind, Mechanism};
use crate::model::Experiment;
use crate::orders::EventWeightMatrix;

/// Carries `ψ` on the `Z`-experiment to `φ(r, y) = Σ_z ψ(r, z) M(y, z)` on
/// `target`. When `π_Z = π_Y M` the two are payoff-equivalent. Table
/// mechanisms stay tables.
pub fn pushforward<T: Scalar>(psi: &Mechanism<T>, matrix: &Matrix<T>, target: &Experiment<T>) -> Result<Mechanism<T>, Error> {
    target.ensure_same_parameters(psi.experiment())?;
    if matrix.rows() != target.num_outcomes() || matrix.cols() != psi.experiment().num_outcomes() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, need {}x{}",
            matrix.rows(),
            matrix.cols(),
            target.num_outcomes(),
            psi.experiment().num_outcomes()
        )));
    }
    if let Some((reports, payoffs)) = psi.table() {
        return table_mechanism(target, reports.to_vec(), payoffs.mul(&matrix.transpose())?);
    }
    Ok(Mechanism {
        experiment: target.clone(),
        kind: Kind::Pushforward { base: Box::new(psi.clone()), matrix: matrix.clone() },
    })
}

/// Writes `values ∈ [0,1]^Z` as `Σ_A η(A) 1_A` over nested upper level
/// sets. Entry `mask` of the result is `η` of the event with bitmask `mask`;
/// the weights are nonnegative and sum to 1. Ties are broken by index.
pub fn level_set_decomposition<T: Scalar>(values: &[T]) -> Result<Vec<T>, Error> {
    if let Some(v) = values
        .iter()
        .find(|&v| v.is_strictly_negative() || (v.clone() - T::one()).is_strictly_positive())
    {
        return Err(Error::PayoffOutOfRange(v.format_scalar()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("comparable payoffs").then(a.cmp(&b)));
    let mut eta = vec![T::zero(); 1 << values.len()];
    match order.first() {
        Some(&top) => eta[0] = T::one() - values[top].clone(),
        None => eta[0] = T::one(),
    }
    let mut mask = 0usize;
    for (i, &z) in order.iter().enumerate() {
        mask |= 1 << z;
        let next = order.get(i + 1).map_or(T::zero(), |&n| values[n].clone());
        eta[mask] = values[z].clone() - next;
    }
    Ok(eta)
}

/// `φ(r, y) = Σ_A η_r(A) N(y, A)` for a table `ψ` with payoffs in `[0,1]`.
/// Each `φ(r, y)` is a convex combination of entries of `N`, so it stays in
/// `[0,1]`; payoff-equivalence holds whenever `N` satisfies the event
/// equations for the two experiments.
pub fn level_set_transform<T: Scalar>(
    psi: &Mechanism<T>,
    events: &EventWeightMatrix<T>,
    target: &Experiment<T>,
) -> Result<Mechanism<T>, Error> {
    let (reports, payoffs) = psi
        .table()
        .ok_or_else(|| Error::InvalidArgument("level-set transform needs a table mechanism".into()))?;
    target.ensure_same_parameters(psi.experiment())?;
    if events.z_count() != payoffs.cols() || events.y_count() != target.num_outcomes() {
        return Err(Error::DimensionMismatch(format!(
            "event weights cover {} and {} outcomes, need {} and {}",
            events.y_count(),
            events.z_count(),
            target.num_outcomes(),
            payoffs.cols()
        )));
    }
    let mut phi = Matrix::zeros(payoffs.rows(), target.num_outcomes());
    for r in 0..payoffs.rows() {
        let eta = level_set_decomposition(payoffs.row(r))?;
        for y in 0..target.num_outcomes() {
            phi[(r, y)] = eta
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_negligible())
                .fold(T::zero(), |acc, (mask, w)| acc + w.clone() * events.get(y, mask).clone());
        }
    }
    table_mechanism(target, reports.to_vec(), phi)
}
