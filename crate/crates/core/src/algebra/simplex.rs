//! Phase-I simplex for feasibility of `A x = b` under per-variable bounds.
//!
//! Bounded variables are shifted and split into nonnegative standard-form
//! columns, upper bounds become slack rows, and the auxiliary problem
//! `min Σ artificials` is solved on a dense tableau with Bland's
//! smallest-index rule, which cannot cycle.



use crate::algebra::matrix::Matrix;
use crate::algebra::scalar::Scalar;
use crate::error::Error;

/// Optional lower and upper bound on one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Bound<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
}

impl<T: Scalar> Bound<T> {
    pub fn free() -> Self {
        Bound { lower: None, upper: None }
    }

    pub fn nonnegative() -> Self {
        Bound { lower: Some(T::zero()), upper: None }
    }

    pub fn unit_interval() -> Self {
        Bound { lower: Some(T::zero()), upper: Some(T::one()) }
    }

    pub fn between(lower: T, upper: T) -> Self {
        Bound { lower: Some(lower), upper: Some(upper) }
    }

    fn contains(&self, x: &T) -> bool {
        let above = self.lower.as_ref().is_none_or(|l| !(x.clone() - l.clone()).is_strictly_negative());
        let below = self.upper.as_ref().is_none_or(|u| !(u.clone() - x.clone()).is_strictly_negative());
        above && below
    }
}

/// How an original variable is expressed through standard-form columns.
struct Embedding<T> {
    offset: T,
    terms: Vec<(usize, T)>,
}

/// Finds a point with `a · x = b` and every `x[j]` inside `bounds[j]`.
///
/// Returns `Ok(None)` when no such point exists.
pub fn lp_feasible<T: Scalar>(a: &Matrix<T>, b: &[T], bounds: &[Bound<T>]) -> Result<Option<Vec<T>>, Error> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} equality rows but {} right-hand sides",
            a.rows(),
            b.len()
        )));
    }
    if a.cols() != bounds.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} variables but {} bounds",
            a.cols(),
            bounds.len()
        )));
    }

    let mut std_cols = 0usize;
    let mut embeddings = Vec::with_capacity(bounds.len());
    // Upper-bound rows: (standard column of the shifted variable, capacity).
    let mut capacity_rows: Vec<(usize, T)> = Vec::new();
    for bound in bounds {
        let embedding = match (&bound.lower, &bound.upper) {
            (Some(l), upper) => {
                let col = std_cols;
                std_cols += 1;
                if let Some(u) = upper {
                    let width = u.clone() - l.clone();
                    if width.is_strictly_negative() {
                        return Ok(None);
                    }
                    capacity_rows.push((col, width));
                }
                Embedding { offset: l.clone(), terms: vec![(col, T::one())] }
            }
            (None, Some(u)) => {
                let col = std_cols;
                std_cols += 1;
                Embedding { offset: u.clone(), terms: vec![(col, -T::one())] }
            }
            (None, None) => {
                let plus = std_cols;
                std_cols += 2;
                Embedding { offset: T::zero(), terms: vec![(plus, T::one()), (plus + 1, -T::one())] }
            }
        };
        embeddings.push(embedding);
    }
    let slack_base = std_cols;
    std_cols += capacity_rows.len();

    let m = a.rows() + capacity_rows.len();
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut rhs: Vec<T> = Vec::with_capacity(m);
    for r in 0..a.rows() {
        let mut row = vec![T::zero(); std_cols];
        let mut value = b[r].clone();
        for (j, emb) in embeddings.iter().enumerate() {
            let coef = &a[(r, j)];
            if coef.is_zero() {
                continue;
            }
            value = value - coef.clone() * emb.offset.clone();
            for (col, sign) in &emb.terms {
                row[*col] = row[*col].clone() + coef.clone() * sign.clone();
            }
        }
        rows.push(row);
        rhs.push(value);
    }
    for (k, (col, width)) in capacity_rows.iter().enumerate() {
        let mut row = vec![T::zero(); std_cols];
        row[*col] = T::one();
        row[slack_base + k] = T::one();
        rows.push(row);
        rhs.push(width.clone());
    }

    let Some(y) = phase_one(rows, rhs, std_cols) else {
        return Ok(None);
    };

    let x: Vec<T> = embeddings
        .iter()
        .map(|emb| {
            emb.terms
                .iter()
                .fold(emb.offset.clone(), |acc, (col, sign)| acc + sign.clone() * y[*col].clone())
        })
        .collect();
    debug_assert!(x.iter().zip(bounds).all(|(v, bd)| bd.contains(v)));
    Ok(Some(x))
}

/// Solves `min Σ art` s.t. `rows · y + art = rhs`, `y, art ≥ 0`; returns `y` when the optimum is zero.
fn phase_one<T: Scalar>(mut rows: Vec<Vec<T>>, mut rhs: Vec<T>, n: usize) -> Option<Vec<T>> {
    let m = rows.len();
    for (row, value) in rows.iter_mut().zip(rhs.iter_mut()) {
        if value.is_strictly_negative() {
            for entry in row.iter_mut() {
                *entry = -entry.clone();
            }
            *value = -value.clone();
        }
    }
    let width = n + m;
    // Tableau rows: constraint coefficients for [y | art], then rhs.
    let mut tab: Vec<Vec<T>> = rows
        .into_iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (mut row, value))| {
            row.resize(width, T::zero());
            row[n + i] = T::one();
            row.push(value);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of the auxiliary objective; last entry is minus its value.
    let mut cost = vec![T::zero(); width + 1];
    for row in &tab {
        for j in 0..n {
            cost[j] = cost[j].clone() - row[j].clone();
        }
        cost[width] = cost[width].clone() - row[width].clone();
    }

    while let Some(enter) = (0..width).find(|&j| cost[j].is_strictly_negative()) {
        let mut leave: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_strictly_positive() {
                continue;
            }
            let ratio = row[width].clone() / row[enter].clone();
            leave = match leave {
                None => Some((i, ratio)),
                Some((best, best_ratio)) => {
                    let diff = ratio.clone() - best_ratio.clone();
                    if diff.is_strictly_negative() || (diff.is_negligible() && basis[i] < basis[best]) {
                        Some((i, ratio))
                    } else {
                        Some((best, best_ratio))
                    }
                }
            };
        }
        // The auxiliary objective is bounded below by zero.
        let (pivot_row, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut tab, &mut cost, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    if !cost[width].is_negligible() {
        return None;
    }
    let mut y = vec![T::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            y[var] = tab[i][width].clone();
        }
    }
    Some(y)
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], cost: &mut [T], pr: usize, pc: usize) {
    let inv = T::one() / tab[pr][pc].clone();
    for entry in tab[pr].iter_mut() {
        *entry = entry.clone() * inv.clone();
    }
    tab[pr][pc] = T::one();
    let pivot_row = tab[pr].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr {
            continue;
        }
        eliminate(row, &pivot_row, pc);
    }
    eliminate(cost, &pivot_row, pc);
}

fn eliminate<T: Scalar>(row: &mut [T], pivot_row: &[T], pc: usize) {
    let factor = row[pc].clone();
    if factor.is_zero() {
        return;
    }
    for (entry, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *entry = entry.clone() - factor.clone() * p.clone();
        }
    }
    row[pc] = T::zero();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, solve_linear};
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(v: i64) -> Q {
        ratio(v, 1)
    }

    #[test]
    fn negative_target_is_infeasible() {
        let a = Matrix::from_rows(vec![vec![q(1)]]).unwrap();
        assert_eq!(lp_feasible(&a, &[q(-1)], &[Bound::nonnegative()]).unwrap(), None);
    }

    #[test]
    fn simplex_point() {
        let a = Matrix::from_rows(vec![vec![q(1), q(1)]]).unwrap();
        let x = lp_feasible(&a, &[q(1)], &[Bound::nonnegative(), Bound::nonnegative()]).unwrap();
        assert_eq!(x, Some(vec![q(1), q(0)]));
    }

    #[test]
    fn mixed_bounds() {
        // x0 free, x1 <= -2, x2 in [1, 8];  x0 + x1 + x2 = 10, x0 - x2 = 0.
        let a = Matrix::from_rows(vec![vec![q(1), q(1), q(1)], vec![q(1), q(0), q(-1)]]).unwrap();
        let bounds = vec![Bound::free(), Bound { lower: None, upper: Some(q(-2)) }, Bound::between(q(1), q(8))];
        let x = lp_feasible(&a, &[q(10), q(0)], &bounds).unwrap().unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), vec![q(10), q(0)]);
        assert!(x.iter().zip(&bounds).all(|(v, b)| b.contains(v)));
        // 2*x2 + x1 = 10 with x1 <= -2 forces x2 >= 6.
        assert_eq!(lp_feasible(&a, &[q(10), q(0)], &[bounds[0].clone(), bounds[1].clone(), Bound::between(q(1), q(5))]).unwrap(), None);
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let a = Matrix::<Q>::zeros(0, 1);
        assert_eq!(lp_feasible(&a, &[], &[Bound::between(q(2), q(1))]).unwrap(), None);
    }

    #[test]
    fn dimension_errors() {
        let a = Matrix::<Q>::zeros(1, 2);
        assert!(lp_feasible(&a, &[], &[Bound::free(), Bound::free()]).is_err());
        assert!(lp_feasible(&a, &[q(0)], &[Bound::free()]).is_err());
    }

    #[test]
    fn degenerate_redundant_rows() {
        let a = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(2), q(2)], vec![q(0), q(0)]]).unwrap();
        let x = lp_feasible(&a, &[q(1), q(2), q(0)], &[Bound::unit_interval(), Bound::unit_interval()]).unwrap();
        assert!(x.is_some());
    }

    #[test]
    fn float_instance() {
        let a = Matrix::from_rows(vec![vec![0.5_f64, 0.5, 0.0], vec![0.0, 0.5, 0.5]]).unwrap();
        let x = lp_feasible(&a, &[0.25, 0.75], &vec![Bound::nonnegative(); 3]).unwrap().unwrap();
        let back = a.mul_vec(&x).unwrap();
        assert!((back[0] - 0.25).abs() < 1e-9 && (back[1] - 0.75).abs() < 1e-9);
        assert!(x.iter().all(|v| *v >= -1e-12));
    }

    /// Vertex-enumeration oracle for `a x = b, x >= 0`: feasible iff some column
    /// subset has a nonnegative basic solution.
    fn vertex_oracle(a: &Matrix<Q>, b: &[Q]) -> bool {
        let n = a.cols();
        (0u32..(1 << n)).any(|mask| {
            let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            let sub = Matrix::from_columns(&cols.iter().map(|&j| a.column(j)).collect::<Vec<_>>(), a.rows()).unwrap();
            match solve_linear(&sub, b).unwrap() {
                Some(x) => x.iter().all(|v| *v >= q(0)),
                None => false,
            }
        })
    }

    proptest! {
        #[test]
        fn agrees_with_vertex_enumeration(
            rows in 1usize..4,
            cols in 1usize..5,
            entries in prop::collection::vec(-2i64..3, 12),
            rhs in prop::collection::vec(-2i64..3, 3),
        ) {
            let data: Vec<Q> = (0..rows * cols).map(|k| q(entries[k])).collect();
            let a = Matrix::new(rows, cols, data).unwrap();
            let b: Vec<Q> = rhs[..rows].iter().map(|&v| q(v)).collect();
            let got = lp_feasible(&a, &b, &vec![Bound::nonnegative(); cols]).unwrap();
            prop_assert_eq!(got.is_some(), vertex_oracle(&a, &b));
            if let Some(x) = got {
                prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
                prop_assert!(x.iter().all(|v| *v >= q(0)));
            }
        }

        #[test]
        fn box_bounds_respected(
            entries in prop::collection::vec(-3i64..4, 6),
            rhs in prop::collection::vec(-3i64..4, 2),
        ) {
            let a = Matrix::new(2, 3, entries.into_iter().map(q).collect()).unwrap();
            let b: Vec<Q> = rhs.into_iter().map(q).collect();
            let bounds = vec![Bound::unit_interval(); 3];
            if let Some(x) = lp_feasible(&a, &b, &bounds).unwrap() {
                prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
                prop_assert!(x.iter().all(|v| *v >= q(0) && *v <= q(1)));
            } else {
                // Grid oracle: no vertex of the cube relaxation hits b, checked over multiples of 1/6.
                let grid: Vec<Q> = (0..=6).map(|k| ratio(k, 6)).collect();
                for x0 in &grid { for x1 in &grid { for x2 in &grid {
                    let x = vec![x0.clone(), x1.clone(), x2.clone()];
                    prop_assert_ne!(a.mul_vec(&x).unwrap(), b.clone());
                }}}
            }
        }
    }
}
