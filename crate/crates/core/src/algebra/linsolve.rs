//! Gauss-Jordan elimination and everything built on it.
//!
//! Pivot columns are chosen left to right. Within a column the row with the
//! largest magnitude is used; the reduced row echelon form is unique, so the
//! choice only matters for floating-point stability.

use crate::algebra::matrix::Matrix;
use crate::algebra::scalar::Scalar;
use crate::error::Error;

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<T: Scalar> {
    pub reduced: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: Scalar> Rref<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Row-reduces `a`, restricting pivots to the first `pivot_cols` columns.
fn reduce<T: Scalar>(mut a: Matrix<T>, pivot_cols: usize) -> Rref<T> {
    let rows = a.rows();
    let cols = a.cols();
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for c in 0..pivot_cols {
        if next_row == rows {
            break;
        }
        let mut best: Option<usize> = None;
        for r in next_row..rows {
            if a[(r, c)].is_negligible() {
                continue;
            }
            match best {
                Some(b) if a[(b, c)].abs() >= a[(r, c)].abs() => {}
                _ => best = Some(r),
            }
        }
        let Some(p) = best else {
            for r in next_row..rows {
                a[(r, c)] = T::zero();
            }
            continue;
        };
        if p != next_row {
            for k in 0..cols {
                let tmp = a[(p, k)].clone();
                a[(p, k)] = a[(next_row, k)].clone();
                a[(next_row, k)] = tmp;
            }
        }
        let inv = T::one() / a[(next_row, c)].clone();
        for k in 0..cols {
            a[(next_row, k)] = a[(next_row, k)].clone() * inv.clone();
        }
        a[(next_row, c)] = T::one();
        for r in 0..rows {
            if r == next_row {
                continue;
            }
            let factor = a[(r, c)].clone();
            if factor.is_zero() {
                continue;
            }
            for k in 0..cols {
                let delta = factor.clone() * a[(next_row, k)].clone();
                a[(r, k)] = a[(r, k)].clone() - delta;
            }
            a[(r, c)] = T::zero();
        }
        pivots.push(c);
        next_row += 1;
    }
    Rref { reduced: a, pivots }
}

pub fn rref<T: Scalar>(a: &Matrix<T>) -> Rref<T> {
    reduce(a.clone(), a.cols())
}

pub fn rank<T: Scalar>(a: &Matrix<T>) -> usize {
    rref(a).rank()
}

/// Solves `a · x = b`.
///
/// Returns `Ok(None)` when the system is inconsistent. Free variables of an
/// underdetermined system are set to zero.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Option<Vec<T>>, Error> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} equations but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    for r in 0..a.rows() {
        for c in 0..n {
            aug[(r, c)] = a[(r, c)].clone();
        }
        aug[(r, n)] = b[r].clone();
    }
    let Rref { reduced, pivots } = reduce(aug, n);
    let rank = pivots.len();
    if (rank..reduced.rows()).any(|r| !reduced[(r, n)].is_negligible()) {
        return Ok(None);
    }
    let mut x = vec![T::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = reduced[(r, n)].clone();
    }
    Ok(Some(x))
}

/// Basis of `{ v : a · v = 0 }`, one vector per free column.
pub fn null_space_basis<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<T>> {
    let Rref { reduced, pivots } = rref(a);
    let n = a.cols();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![T::zero(); n];
            v[free] = T::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(r, free)].clone();
            }
            v
        })
        .collect()
}

/// Determinant by elimination. Errors on non-square input.
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> Result<T, Error> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "determinant of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[(r, c)].is_negligible()) else {
            return Ok(T::zero());
        };
        if p != c {
            for k in 0..n {
                let tmp = m[(p, k)].clone();
                m[(p, k)] = m[(c, k)].clone();
                m[(c, k)] = tmp;
            }
            det = -det;
        }
        let pivot = m[(c, c)].clone();
        det = det * pivot.clone();
        for r in c + 1..n {
            let factor = m[(r, c)].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for k in c..n {
                let delta = factor.clone() * m[(c, k)].clone();
                m[(r, k)] = m[(r, k)].clone() - delta;
            }
        }
    }
    Ok(det)
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Option<Matrix<T>>, Error> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "inverse of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut aug = Matrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug[(r, c)] = a[(r, c)].clone();
        }
        aug[(r, n + r)] = T::one();
    }
    let Rref { reduced, pivots } = reduce(aug, n);
    if pivots.len() < n {
        return Ok(None);
    }
    let mut inv = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            inv[(r, c)] = reduced[(r, n + c)].clone();
        }
    }
    Ok(Some(inv))
}

/// Whether `target` lies in the span of `vectors` (all of the same length).
pub fn in_span<T: Scalar>(vectors: &[Vec<T>], target: &[T]) -> Result<Option<Vec<T>>, Error> {
    let a = Matrix::from_columns(vectors, target.len())?;
    solve_linear(&a, target)
}
