use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use super::{DemoReport, GaussLegendre};
use crate::elicit::{moment_weights, verify_unbiased};
use crate::error::Error;
use crate::fixtures;
use crate::Rational;

/// Increase between consecutive MISE values still read as non-increasing.
/// Polynomial projections are exact, so their MISE sits at rounding level.
const MISE_SLACK: f64 = 1e-14;

/// Above this many draws the joint outcome space is not built.
const MAX_DRAWS_CHECKED: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Density {
    /// `6θ(1-θ)`.
    Poly,
    /// `e^{-θ} / (1 - e^{-1})`.
    Exp,
}

impl Density {
    pub fn name(self) -> &'static str {
        match self {
            Density::Poly => "poly",
            Density::Exp => "exp",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Density::Poly => "6θ(1-θ)",
            Density::Exp => "e^(-θ)/(1-e^(-1))",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Density::Poly => 6.0 * x * (1.0 - x),
            Density::Exp => (-x).exp() / (1.0 - (-1.0f64).exp()),
        }
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "poly" => Ok(Density::Poly),
            "exp" => Ok(Density::Exp),
            other => Err(Error::InvalidArgument(format!("unknown density {other:?}; expected poly or exp"))),
        }
    }
}

/// Polynomials orthogonal on `[0, 1]`, built by Gram–Schmidt over monomials
/// with the exact inner products `<x^i, x^j> = 1/(i+j+1)`. Each `Q_k` is
/// monic; `P_k = Q_k / sqrt(<Q_k, Q_k>)` is the orthonormal version.
#[derive(Clone, Debug, PartialEq)]
pub struct LegendreBasis {
    /// Monomial coefficients of `Q_k`, lowest degree first.
    pub coefficients: Vec<Vec<Rational>>,
    /// `<Q_k, Q_k>`.
    pub norms: Vec<Rational>,
}

fn inner(a: &[Rational], b: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            total += x.clone() * y.clone() / Rational::from_integer((i + j + 1).into());
        }
    }
    total
}

impl LegendreBasis {
    pub fn new(degree: usize) -> Self {
        let mut coefficients: Vec<Vec<Rational>> = Vec::with_capacity(degree + 1);
        let mut norms: Vec<Rational> = Vec::with_capacity(degree + 1);
        for k in 0..=degree {
            let mut q = vec![Rational::zero(); k + 1];
            q[k] = Rational::one();
            let monomial = q.clone();
            for (prev, norm) in coefficients.iter().zip(&norms) {
                let c = inner(&monomial, prev) / norm.clone();
                for (i, a) in prev.iter().enumerate() {
                    q[i] = q[i].clone() - c.clone() * a.clone();
                }
            }
            norms.push(inner(&q, &q));
            coefficients.push(q);
        }
        LegendreBasis { coefficients, norms }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Exact `<Q_i, Q_j>` for all `i != j` vanish.
    pub fn exactly_orthogonal(&self) -> bool {
        (0..self.coefficients.len())
            .all(|i| (0..i).all(|j| inner(&self.coefficients[i], &self.coefficients[j]).is_zero()))
    }

    /// `P_k(x)`: `Q_k` evaluated exactly at the binary value of `x`, then scaled.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        let x = BigRational::from_float(x).expect("finite node");
        let q = self.coefficients[k].iter().rev().fold(Rational::zero(), |acc, a| acc * x.clone() + a.clone());
        q.to_f64().unwrap_or(f64::NAN) / self.scale(k)
    }

    fn scale(&self, k: usize) -> f64 {
        self.norms[k].to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

/// Projection of one density onto `P_0..P_n` for every `n` up to the basis degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityFit {
    pub density: Density,
    /// `c_k = ∫ P_k f`, by quadrature.
    pub coefficients: Vec<f64>,
    /// The same coefficients assembled from raw moments `∫ θ^j f`.
    pub from_moments: Vec<f64>,
    /// `mise[n-1] = ∫ (f - Σ_{k<=n} c_k P_k)^2` for `n = 1..=degree`.
    pub mise: Vec<f64>,
    /// Largest deviation of the quadrature Gram matrix from the identity.
    pub orthonormality_error: f64,
}

impl DensityFit {
    pub fn new(density: Density, basis: &LegendreBasis, rule: &GaussLegendre) -> Self {
        let n = basis.degree();
        let values: Vec<Vec<f64>> = (0..=n).map(|k| rule.nodes.iter().map(|&x| basis.eval(k, x)).collect()).collect();
        let f: Vec<f64> = rule.nodes.iter().map(|&x| density.eval(x)).collect();
        let integral = |a: &dyn Fn(usize) -> f64| -> f64 { rule.weights.iter().enumerate().map(|(i, w)| w * a(i)).sum() };

        let mut orthonormality_error: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=i {
                let g = integral(&|t| values[i][t] * values[j][t]);
                let target = if i == j { 1.0 } else { 0.0 };
                orthonormality_error = orthonormality_error.max((g - target).abs());
            }
        }

        let coefficients: Vec<f64> = (0..=n).map(|k| integral(&|t| values[k][t] * f[t])).collect();
        let raw: Vec<f64> = (0..=n).map(|j| integral(&|t| rule.nodes[t].powi(j as i32) * f[t])).collect();
        let from_moments = (0..=n)
            .map(|k| {
                let s: f64 = basis.coefficients[k].iter().zip(&raw).map(|(a, m)| a.to_f64().unwrap_or(f64::NAN) * m).sum();
                s / basis.scale(k)
            })
            .collect();

        let mise = (1..=n)
            .map(|m| {
                integral(&|t| {
                    let fit: f64 = (0..=m).map(|k| coefficients[k] * values[k][t]).sum();
                    (f[t] - fit).powi(2)
                })
            })
            .collect();
        DensityFit { density, coefficients, from_moments, mise, orthonormality_error }
    }

    /// `n·MISE(n)` over the sweep.
    pub fn scaled_mise(&self) -> Vec<f64> {
        self.mise.iter().enumerate().map(|(i, m)| (i + 1) as f64 * m).collect()
    }

    /// Largest factor by which `n·MISE(n)` departs from its median, either way.
    pub fn scaled_mise_spread(&self) -> f64 {
        let scaled = self.scaled_mise();
        let mut sorted = scaled.clone();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) { 0.5 * (sorted[mid - 1] + sorted[mid]) } else { sorted[mid] };
        scaled.iter().map(|v| (v / median).max(median / v)).fold(1.0, f64::max)
    }
}

/// Builds weights for every `Q_k` on `n` Bernoulli draws from the moment
/// weights and checks them exactly on the rates `0, 1/n, ..., 1`.
fn basis_is_elicitable(basis: &LegendreBasis, n: usize) -> Result<bool, Error> {
    let thetas: Vec<Rational> = (0..=n).map(|i| Rational::new(i.into(), n.into())).collect();
    let e = fixtures::bernoulli(&thetas);
    let draws = e.power(n);
    let moments = (0..=n).map(|j| moment_weights(&e, n, &thetas, j)).collect::<Result<Vec<_>, _>>()?;
    for q in &basis.coefficients {
        let mut w = vec![Rational::zero(); draws.num_outcomes()];
        for (a, m) in q.iter().zip(&moments) {
            for (wi, mi) in w.iter_mut().zip(m) {
                *wi = wi.clone() + a.clone() * mi.clone();
            }
        }
        let target: Vec<Rational> =
            thetas.iter().map(|t| q.iter().rev().fold(Rational::zero(), |acc, a| acc * t.clone() + a.clone())).collect();
        if verify_unbiased(&draws, &w, &target).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn sci(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| format!("{v:.6e}")).collect()
}

/// Density estimation on `[0, 1]` by projecting onto orthonormal polynomials.
/// Each coefficient is a linear combination of raw moments `E[θ^j]`, and those
/// are elicitable from `n` Bernoulli draws.
pub fn demo_density(densities: &[Density], n_max: usize, nodes: usize) -> Result<DemoReport, Error> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if densities.is_empty() {
        return Err(Error::InvalidArgument("no densities requested".into()));
    }
    let rule = GaussLegendre::new(nodes)?;
    if 2 * nodes < 2 * n_max + 1 {
        return Err(Error::Domain(format!("{nodes} nodes cannot integrate degree-{} products exactly", 2 * n_max)));
    }
    let mut report = DemoReport::new("density");
    report.input("densities", densities.iter().map(|d| d.name()).collect::<Vec<_>>());
    report.input("n_max", n_max);
    report.input("quadrature_nodes", nodes);

    let basis = LegendreBasis::new(n_max);
    report.claim("Gram–Schmidt polynomials are exactly orthogonal", basis.exactly_orthogonal(), "");

    // Raw moments from n draws: on a rational grid of success rates, the
    // product weights are exactly unbiased for θ^j and for every Q_k.
    if n_max <= MAX_DRAWS_CHECKED {
        let unbiased = basis_is_elicitable(&basis, n_max)?;
        report.claim(
            format!("basis polynomials are elicitable without bias from {n_max} Bernoulli draws"),
            unbiased,
            format!("checked on {} grid rates", n_max + 1),
        );
    } else {
        report.artifact("elicitability_check", format!("skipped: 2^{n_max} joint outcomes"));
    }

    let mut fits = serde_json::Map::new();
    for &density in densities {
        let fit = DensityFit::new(density, &basis, &rule);
        let tag = density.name();
        report.claim(
            format!("[{tag}] basis is orthonormal under quadrature to 1e-12"),
            fit.orthonormality_error <= 1e-12,
            format!("max deviation {:.3e}", fit.orthonormality_error),
        );
        let c0 = (fit.coefficients[0] - 1.0).abs();
        report.claim(format!("[{tag}] c_0 = 1"), c0 <= 1e-12, format!("|c_0 - 1| = {c0:.3e}"));
        let route = fit.coefficients.iter().zip(&fit.from_moments).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        report.claim(
            format!("[{tag}] coefficients from raw moments agree with direct quadrature"),
            route <= 1e-8,
            format!("max difference {route:.3e}"),
        );
        let monotone = fit.mise.windows(2).all(|w| w[1] <= w[0] + MISE_SLACK);
        report.claim(format!("[{tag}] MISE is non-increasing in n"), monotone, "");
        match density {
            Density::Poly => {
                let worst = fit.mise.iter().skip(1).cloned().fold(0.0, f64::max);
                report.claim(
                    format!("[{tag}] MISE vanishes for n >= 2"),
                    n_max < 2 || worst <= 1e-10,
                    format!("largest {worst:.3e}"),
                );
            }
            Density::Exp => {
                let strict = fit.mise.windows(2).all(|w| w[1] < w[0]);
                report.claim(format!("[{tag}] MISE strictly decreases over n = 1..{n_max}"), strict, "");
                let spread = fit.scaled_mise_spread();
                report.claim(
                    format!("[{tag}] n·MISE stays within a factor 10 of its median"),
                    spread <= 10.0,
                    format!("largest factor {spread:.3e}"),
                );
            }
        }
        fits.insert(
            tag.to_string(),
            json!({
                "formula": density.formula(),
                "coefficients": sci(&fit.coefficients),
                "mise": sci(&fit.mise),
                "n_times_mise": sci(&fit.scaled_mise()),
            }),
        );
    }
    report.artifact(
        "basis",
        basis
            .coefficients
            .iter()
            .map(|q| q.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    );
    report.artifact("fits", serde_json::Value::Object(fits));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    #[test]
    fn first_polynomials() {
        let b = LegendreBasis::new(2);
        assert_eq!(b.coefficients[1], vec![ratio(-1, 2), ratio(1, 1)]);
        assert_eq!(b.coefficients[2], vec![ratio(1, 6), ratio(-1, 1), ratio(1, 1)]);
        assert_eq!(b.norms, vec![ratio(1, 1), ratio(1, 12), ratio(1, 180)]);
        assert!((b.eval(1, 1.0) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn polynomial_density_is_reproduced() {
        let rule = GaussLegendre::new(64).unwrap();
        let fit = DensityFit::new(Density::Poly, &LegendreBasis::new(4), &rule);
        // 6θ(1-θ) = 1 - sqrt(1/5)·P_2.
        assert!((fit.coefficients[2] + 0.2f64.sqrt()).abs() < 1e-13);
        assert!(fit.coefficients[1].abs() < 1e-14);
        assert!((fit.mise[0] - 0.2).abs() < 1e-13);
        assert!(fit.mise[1] < 1e-20);
    }

    #[test]
    fn exponential_decays() {
        let rule = GaussLegendre::new(64).unwrap();
        let fit = DensityFit::new(Density::Exp, &LegendreBasis::new(8), &rule);
        assert!(fit.mise.windows(2).all(|w| w[1] < w[0]));
        assert!(fit.orthonormality_error < 1e-12);
    }

    #[test]
    fn parses_names() {
        assert_eq!("exp".parse::<Density>().unwrap(), Density::Exp);
        assert!("gauss".parse::<Density>().is_err());
    }
}
