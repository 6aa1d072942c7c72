use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::DemoReport;
use crate::algebra::{dot, rank, solve_linear, Matrix};
use crate::elicit::verify_unbiased;
use crate::error::Error;
use crate::model::{Belief, CovariateMixture, Experiment};
use crate::Rational;

/// Linear model `y = β_0 + Σ_k β_k x^(k) + ε` with β on a finite grid and
/// finitely supported mean-zero noise, so every outcome distribution is a
/// finite kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedRegression {
    coefficients: Vec<Vec<Rational>>,
    covariates: Vec<Vec<Rational>>,
    noise: Vec<Rational>,
    noise_probs: Vec<Rational>,
}

fn label(values: &[Rational]) -> String {
    format!("({})", values.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

impl DiscretizedRegression {
    pub fn new(
        coefficients: Vec<Vec<Rational>>,
        covariates: Vec<Vec<Rational>>,
        noise: Vec<Rational>,
        noise_probs: Vec<Rational>,
    ) -> Result<Self, Error> {
        let width = coefficients.first().map(Vec::len).ok_or_else(|| Error::InvalidArgument("empty coefficient grid".into()))?;
        if width == 0 || coefficients.iter().any(|b| b.len() != width) {
            return Err(Error::DimensionMismatch("every coefficient vector needs the same length K+1 >= 1".into()));
        }
        if let Some(x) = covariates.iter().find(|x| x.len() != width - 1) {
            return Err(Error::DimensionMismatch(format!("covariate {} has {} entries, expected {}", label(x), x.len(), width - 1)));
        }
        if noise.is_empty() || noise.len() != noise_probs.len() {
            return Err(Error::DimensionMismatch("noise values and probabilities differ in length".into()));
        }
        Belief::new(noise_probs.clone()).map_err(|e| Error::InvalidArgument(format!("noise distribution: {e}")))?;
        if !dot(&noise, &noise_probs).is_zero() {
            return Err(Error::InvalidArgument("noise must have mean zero".into()));
        }
        Ok(DiscretizedRegression { coefficients, covariates, noise, noise_probs })
    }

    /// Number of slopes `K`.
    pub fn slopes(&self) -> usize {
        self.coefficients[0].len() - 1
    }

    pub fn coefficients(&self) -> &[Vec<Rational>] {
        &self.coefficients
    }

    pub fn covariates(&self) -> &[Vec<Rational>] {
        &self.covariates
    }

    pub fn parameter_labels(&self) -> Vec<String> {
        self.coefficients.iter().map(|b| label(b)).collect()
    }

    /// Rows `(1, x^(1), ..., x^(K))`.
    pub fn design_matrix(&self) -> Matrix<Rational> {
        let rows = self
            .covariates
            .iter()
            .map(|x| std::iter::once(Rational::one()).chain(x.iter().cloned()).collect())
            .collect();
        Matrix::from_rows(rows).unwrap_or_else(|_| Matrix::zeros(0, self.slopes() + 1))
    }

    /// `h(x) = β_0 + Σ β_k x^(k)` at every grid point.
    pub fn regression_function(&self, covariate: usize) -> Vec<Rational> {
        let x = &self.covariates[covariate];
        self.coefficients
            .iter()
            .map(|b| b[0].clone() + b[1..].iter().zip(x).fold(Rational::zero(), |acc, (bk, xk)| acc + bk.clone() * xk.clone()))
            .collect()
    }

    /// Outcome distribution at one covariate; outcomes are the attainable `y` in increasing order.
    pub fn experiment(&self, covariate: usize) -> Result<Experiment<Rational>, Error> {
        let h = self.regression_function(covariate);
        let mut support = BTreeMap::new();
        for hv in &h {
            for eps in &self.noise {
                support.insert(hv.clone() + eps.clone(), ());
            }
        }
        let ys: Vec<Rational> = support.into_keys().collect();
        let mut kernel = Matrix::<Rational>::zeros(h.len(), ys.len());
        for (t, hv) in h.iter().enumerate() {
            for (eps, p) in self.noise.iter().zip(&self.noise_probs) {
                let y = ys.binary_search(&(hv.clone() + eps.clone())).expect("outcome in support");
                kernel[(t, y)] = kernel[(t, y)].clone() + p.clone();
            }
        }
        Experiment::new(self.parameter_labels(), ys.iter().map(ToString::to_string).collect(), kernel)
    }

    /// Outcome values of [`DiscretizedRegression::experiment`].
    pub fn outcome_values(&self, covariate: usize) -> Result<Vec<Rational>, Error> {
        let e = self.experiment(covariate)?;
        e.outcomes().iter().map(|s| crate::algebra::parse_rational(s)).collect()
    }

    /// The covariate drawn uniformly from the supplied list, then `y`.
    pub fn mixture(&self) -> Result<CovariateMixture<Rational>, Error> {
        let n = self.covariates.len();
        let components = (0..n).map(|i| self.experiment(i)).collect::<Result<Vec<_>, _>>()?;
        CovariateMixture::new(
            (0..n).map(|i| format!("x{}", i + 1)).collect(),
            vec![Rational::new(1.into(), n.into()); n],
            components,
        )
    }
}

/// Elicits `E_p[h(x_i)]` at each covariate with `w(y) = y` and solves the
/// design system for the mean coefficients.
pub fn demo_regression(r: &DiscretizedRegression, belief: &[Rational]) -> Result<DemoReport, Error> {
    let k = r.slopes();
    let p = Belief::new(belief.to_vec())?;
    if p.len() != r.coefficients().len() {
        return Err(Error::DimensionMismatch(format!("belief over {} points, grid has {}", p.len(), r.coefficients().len())));
    }
    if r.covariates().len() < k + 1 {
        return Err(Error::InvalidArgument(format!("{} covariate draws for {} coefficients", r.covariates().len(), k + 1)));
    }
    let design = r.design_matrix();
    let design_rank = rank(&design);
    if design_rank < k + 1 {
        return Err(Error::Domain(format!(
            "design matrix has rank {design_rank} < {}: the covariate draws are degenerate, a probability-zero event, so the means cannot be separated",
            k + 1
        )));
    }

    let mut report = DemoReport::new("regression");
    report.input("coefficient_grid", r.parameter_labels());
    report.input("covariates", r.covariates().iter().map(|x| label(x)).collect::<Vec<_>>());
    report.input("belief", p.format_weights());

    let mut unbiased = true;
    let mut elicited = Vec::new();
    for i in 0..r.covariates().len() {
        let e = r.experiment(i)?;
        let w = r.outcome_values(i)?;
        unbiased &= verify_unbiased(&e, &w, &r.regression_function(i)).is_ok();
        elicited.push(dot(&w, &e.mean_outcome_distribution(&p)?));
    }
    report.claim("w(y) = y is exactly unbiased for h(x) at every covariate", unbiased, "");

    // Under a random covariate, y/μ(x) on the draws at x is unbiased for h(x).
    let mix = r.mixture()?;
    let joint = mix.experiment();
    let mut mixed = true;
    for i in 0..r.covariates().len() {
        let ys = r.outcome_values(i)?;
        let mut w = vec![Rational::zero(); joint.num_outcomes()];
        for (y, v) in ys.iter().enumerate() {
            w[mix.outcome_index(i, y)] = v.clone() / mix.weights()[i].clone();
        }
        mixed &= verify_unbiased(&joint, &w, &r.regression_function(i)).is_ok();
    }
    report.claim("reweighted outcomes are unbiased for h(x) under a random covariate", mixed, "");

    let solved = solve_linear(&design, &elicited)?
        .ok_or_else(|| Error::Domain("elicited means are inconsistent with the design".into()))?;
    let truth: Vec<Rational> = (0..=k)
        .map(|c| r.coefficients().iter().zip(p.weights()).fold(Rational::zero(), |acc, (b, q)| acc + b[c].clone() * q.clone()))
        .collect();
    report.claim(
        "solving the design system recovers E_p[β] exactly",
        solved == truth,
        format!("recovered {}", label(&solved)),
    );
    report.claim(
        "design matrix has full column rank",
        design_rank == k + 1,
        format!("rank {design_rank}"),
    );
    report.artifact("elicited_means", elicited.iter().map(ToString::to_string).collect::<Vec<_>>());
    report.artifact("recovered_coefficients", solved.iter().map(ToString::to_string).collect::<Vec<_>>());
    report.artifact("true_coefficient_means", truth.iter().map(ToString::to_string).collect::<Vec<_>>());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use serde_json::json;

    fn noise() -> (Vec<Rational>, Vec<Rational>) {
        (vec![ratio(-1, 1), ratio(0, 1), ratio(1, 1)], vec![ratio(1, 4), ratio(1, 2), ratio(1, 4)])
    }

    #[test]
    fn two_covariates_recover_means() {
        let (n, q) = noise();
        let r = DiscretizedRegression::new(
            vec![vec![ratio(0, 1), ratio(0, 1)], vec![ratio(2, 1), ratio(1, 1)]],
            vec![vec![ratio(2, 1)], vec![ratio(3, 1)]],
            n,
            q,
        )
        .unwrap();
        let rep = demo_regression(&r, &[ratio(1, 2), ratio(1, 2)]).unwrap();
        assert!(rep.passed(), "{}", rep.summary());
        assert_eq!(rep.artifacts["recovered_coefficients"], json!(["1", "1/2"]));
    }

    #[test]
    fn duplicated_covariate_is_rank_deficient() {
        let (n, q) = noise();
        let r = DiscretizedRegression::new(
            vec![vec![ratio(0, 1), ratio(0, 1)], vec![ratio(2, 1), ratio(1, 1)]],
            vec![vec![ratio(2, 1)], vec![ratio(2, 1)]],
            n,
            q,
        )
        .unwrap();
        assert!(matches!(demo_regression(&r, &[ratio(1, 2), ratio(1, 2)]), Err(Error::Domain(_))));
    }

    #[test]
    fn intercept_only() {
        let (n, q) = noise();
        let r = DiscretizedRegression::new(vec![vec![ratio(1, 1)], vec![ratio(3, 1)]], vec![vec![]], n, q).unwrap();
        let rep = demo_regression(&r, &[ratio(1, 4), ratio(3, 4)]).unwrap();
        assert!(rep.passed(), "{}", rep.summary());
        assert_eq!(rep.artifacts["elicited_means"], json!(["5/2"]));
        assert_eq!(rep.artifacts["recovered_coefficients"], json!(["5/2"]));
    }

    #[test]
    fn rejects_biased_noise() {
        assert!(DiscretizedRegression::new(vec![vec![ratio(1, 1)]], vec![vec![]], vec![ratio(1, 1)], vec![ratio(1, 1)]).is_err());
        let (n, q) = noise();
        assert!(DiscretizedRegression::new(vec![], vec![], n, q).is_err());
    }
}
