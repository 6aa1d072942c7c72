//! Full-belief elicitation from one or several independent copies.

use serde_json::{json, Value};

use crate::algebra::{determinant, rank, rref, solve_linear, Matrix, Scalar};
use crate::elicit::{moment_weights, verify_unbiased};
use crate::error::Error;
use crate::json;
use crate::model::Experiment;

/// Product experiments larger than this are not built explicitly; their
/// rank is still known from [`copies_needed`].
const MAX_PRODUCT_OUTCOMES: usize = 4096;

/// Evidence that `copies` draws identify the whole belief: an injective `g`
/// in the span of the kernel columns whose Vandermonde matrix
/// `V[i][j] = g(θ_i)^j` is invertible. The means of `g^0, ..., g^{n-1}` are
/// elicitable from `n - 1` copies, and `V` maps them back to the belief.
#[derive(Clone, Debug, PartialEq)]
pub struct VandermondeCertificate<T: Scalar> {
    pub g: Vec<T>,
    /// Single-copy weights with `Σ_y w(y) π(y|θ) = g(θ)`.
    pub weights: Vec<T>,
    pub copies: usize,
    pub determinant: T,
    /// Moment weights on the product were rebuilt and checked exactly.
    pub product_verified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessReport<T: Scalar> {
    /// The belief is elicitable from a single draw.
    pub full_belief_elicitable: bool,
    /// Fewest independent copies whose product elicits the full belief.
    pub min_copies: Option<usize>,
    /// Copy counts `c` ruled out because `|Y|^c < |Θ|`.
    pub ruled_out_by_dimension: Vec<usize>,
    pub vandermonde_certificate: Option<VandermondeCertificate<T>>,
}

impl<T: Scalar> CompletenessReport<T> {
    pub fn to_json(&self) -> Value {
        let cert = self.vandermonde_certificate.as_ref().map(|c| {
            json!({
                "g": json::vector(&c.g),
                "weights": json::vector(&c.weights),
                "copies": c.copies,
                "determinant": json::scalar(&c.determinant),
                "product_verified": c.product_verified,
            })
        });
        json!({
            "full_belief_elicitable": self.full_belief_elicitable,
            "min_copies": self.min_copies,
            "ruled_out_by_dimension": self.ruled_out_by_dimension,
            "vandermonde_certificate": cert,
        })
    }
}

/// Keeps a maximal linearly independent subset of `vectors`.
fn independent_subset<T: Scalar>(vectors: Vec<Vec<T>>, len: usize) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return vectors;
    }
    let m = Matrix::from_columns(&vectors, len).expect("equal-length vectors");
    let pivots = rref(&m).pivots;
    pivots.into_iter().map(|c| vectors[c].clone()).collect()
}

/// Smallest number of copies whose columns span all functions of `θ`.
/// The span for `c` copies is spanned by pointwise products of `c` kernel
/// columns, so it is grown one factor at a time without materializing the
/// product experiment.
pub fn copies_needed<T: Scalar>(e: &Experiment<T>) -> Option<usize> {
    let n = e.num_parameters();
    let columns: Vec<Vec<T>> = (0..e.num_outcomes()).map(|y| e.kernel().column(y)).collect();
    let mut basis = vec![vec![T::one(); n]];
    for copies in 0..n {
        if basis.len() == n {
            return Some(copies);
        }
        let mut candidates = basis.clone();
        for b in &basis {
            for col in &columns {
                candidates.push(b.iter().zip(col).map(|(x, y)| x.clone() * y.clone()).collect());
            }
        }
        let grown = independent_subset(candidates, n);
        if grown.len() == basis.len() {
            return None;
        }
        basis = grown;
    }
    (basis.len() == n).then_some(n)
}

fn is_injective<T: Scalar>(g: &[T]) -> bool {
    (0..g.len()).all(|i| (i + 1..g.len()).all(|j| !g[i].approx_eq(&g[j])))
}

/// An injective statistic in the column span together with its weights:
/// `g(θ_i) = i` when that is attainable, otherwise `g = K·(1, t, t², ...)`
/// for the first integer `t` that separates all rows.
fn injective_statistic<T: Scalar>(e: &Experiment<T>) -> Option<(Vec<T>, Vec<T>)> {
    let n = e.num_parameters();
    let ranks: Vec<T> = (1..=n).map(T::from_count).collect();
    if let Ok(Some(w)) = solve_linear(e.kernel(), &ranks) {
        return Some((ranks, w));
    }
    let m = e.num_outcomes();
    // Distinct rows give distinct polynomials in t of degree < m, and any two
    // agree at most at m - 1 points, so a small t always works.
    let attempts = m * n * n + 2;
    for t in 1..=attempts {
        let t = T::from_count(t);
        let mut w = Vec::with_capacity(m);
        let mut power = T::one();
        for _ in 0..m {
            w.push(power.clone());
            power = power * t.clone();
        }
        let g = e.kernel().mul_vec(&w).expect("weights match outcomes");
        if is_injective(&g) {
            return Some((g, w));
        }
    }
    None
}

fn vandermonde<T: Scalar>(g: &[T]) -> Matrix<T> {
    let n = g.len();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        let mut power = T::one();
        for j in 0..n {
            v[(i, j)] = power.clone();
            power = power * g[i].clone();
        }
    }
    v
}

fn certificate<T: Scalar>(e: &Experiment<T>) -> Result<Option<VandermondeCertificate<T>>, Error> {
    let n = e.num_parameters();
    if n < 2 || !e.is_identified() {
        return Ok(None);
    }
    let Some((g, weights)) = injective_statistic(e) else {
        return Ok(None);
    };
    let v = vandermonde(&g);
    let det = determinant(&v)?;
    if det.is_negligible() {
        return Ok(None);
    }
    let copies = n - 1;
    let size = e.num_outcomes().checked_pow(copies as u32).unwrap_or(usize::MAX);
    let mut product_verified = false;
    if size <= MAX_PRODUCT_OUTCOMES {
        let product = e.power(copies);
        let mut moments = Matrix::zeros(size, n);
        for j in 0..n {
            let w = moment_weights(e, copies, &g, j)?;
            let target = v.column(j);
            verify_unbiased(&product, &w, &target)?;
            for (r, val) in w.into_iter().enumerate() {
                moments[(r, j)] = val;
            }
        }
        // The product kernel reproduces V through the moment weights, so it has
        // rank n and every belief is recovered from the elicited moments.
        product_verified = product.kernel().mul(&moments)? == v && rank(product.kernel()) == n;
    }
    Ok(Some(VandermondeCertificate { g, weights, copies, determinant: det, product_verified }))
}

/// Whether one draw elicits the whole belief, how many independent copies
/// do, and a Vandermonde certificate for `|Θ| - 1` copies when the
/// experiment is identified.
pub fn complete_elicitation<T: Scalar>(e: &Experiment<T>) -> Result<CompletenessReport<T>, Error> {
    let n = e.num_parameters();
    let m = e.num_outcomes();
    let full_belief_elicitable = rank(e.kernel()) == n;
    let ruled_out_by_dimension = (0..n)
        .take_while(|&c| m.checked_pow(c as u32).is_some_and(|s| s < n))
        .collect();
    Ok(CompletenessReport {
        full_belief_elicitable,
        min_copies: copies_needed(e),
        ruled_out_by_dimension,
        vandermonde_certificate: certificate(e)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::fixtures;

    #[test]
    fn bernoulli_grid_needs_two_copies() {
        let e = fixtures::bernoulli_grid();
        let r = complete_elicitation(&e).unwrap();
        assert!(!r.full_belief_elicitable);
        assert_eq!(r.min_copies, Some(2));
        assert_eq!(r.ruled_out_by_dimension, vec![0, 1]);
        let c = r.vandermonde_certificate.unwrap();
        assert_eq!(c.g, vec![ratio(1, 1), ratio(2, 1), ratio(3, 1)]);
        assert_eq!(c.copies, 2);
        assert_eq!(c.determinant, ratio(2, 1));
        assert!(c.product_verified);
        assert!(complete_elicitation(&e.power(2)).unwrap().full_belief_elicitable);
    }

    #[test]
    fn single_parameter_needs_nothing() {
        let e = fixtures::bernoulli(&[ratio(1, 3)]);
        let r = complete_elicitation(&e).unwrap();
        assert!(r.full_belief_elicitable);
        assert_eq!(r.min_copies, Some(0));
        assert!(r.vandermonde_certificate.is_none());
    }

    #[test]
    fn unidentified_never_completes() {
        let rows = vec![vec![ratio(2, 3), ratio(1, 3)], vec![ratio(2, 3), ratio(1, 3)], vec![ratio(1, 2), ratio(1, 2)]];
        let e = Experiment::from_kernel(Matrix::from_rows(rows).unwrap()).unwrap();
        let r = complete_elicitation(&e).unwrap();
        assert_eq!(r.min_copies, None);
        assert!(r.vandermonde_certificate.is_none());
    }

    #[test]
    fn german_tank_is_complete_in_one_draw() {
        let r = complete_elicitation(&fixtures::german_tank(5)).unwrap();
        assert!(r.full_belief_elicitable);
        assert_eq!(r.min_copies, Some(1));
    }

    #[test]
    fn search_fallback_finds_injective_statistic() {
        // (1, 2, 3) is not in the span of (1, 0, 1/3) and (0, 1, 2/3).
        let rows = vec![vec![ratio(1, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1)], vec![ratio(1, 3), ratio(2, 3)]];
        let e = Experiment::from_kernel(Matrix::from_rows(rows).unwrap()).unwrap();
        let (g, w) = injective_statistic(&e).unwrap();
        assert_eq!(g, vec![ratio(1, 1), ratio(2, 1), ratio(5, 3)]);
        assert_eq!(e.kernel().mul_vec(&w).unwrap(), g);
        let r = complete_elicitation(&e).unwrap();
        assert_eq!(r.min_copies, Some(2));
        assert!(r.vandermonde_certificate.unwrap().product_verified);
    }
}
