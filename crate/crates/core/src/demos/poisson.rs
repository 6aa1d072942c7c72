use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use super::DemoReport;
use crate::algebra::{dot, Matrix};
use crate::elicit::verify_unbiased;
use crate::error::Error;
use crate::model::Experiment;
use crate::Rational;

/// `Σ_{k=0}^{n} θ^k / k!`.
fn partial_exp(theta: &Rational, n: usize) -> Rational {
    let mut term = Rational::one();
    let mut total = Rational::one();
    for k in 1..=n {
        term = term * theta.clone() / Rational::from_integer(k.into());
        total += term.clone();
    }
    total
}

/// Upper bound on `Σ_{k>n} θ^k / k!`: the first omitted term times the
/// geometric series of ratios `θ/(n+2), θ/(n+3), ...`. Needs `θ < n+2`.
fn tail_bound(theta: &Rational, n: usize) -> Option<Rational> {
    let next = Rational::from_integer((n + 2).into());
    if *theta >= next {
        return None;
    }
    let mut first = Rational::one();
    for k in 1..=n + 1 {
        first = first * theta.clone() / Rational::from_integer(k.into());
    }
    Some(first / (Rational::one() - theta.clone() / next))
}

fn falling(k: usize, j: usize) -> Rational {
    (0..j).fold(Rational::one(), |acc, i| {
        if k < i {
            Rational::zero()
        } else {
            acc * Rational::from_integer((k - i).into())
        }
    })
}

fn sci(x: &Rational) -> String {
    format!("{:.3e}", x.to_f64().unwrap_or(f64::NAN))
}

/// The Poisson kernel on `{0..k_max}`, renormalized row by row.
pub fn truncated_poisson(k_max: usize, thetas: &[Rational]) -> Result<Experiment<Rational>, Error> {
    let mut rows = Vec::with_capacity(thetas.len());
    for theta in thetas {
        if !theta.is_positive() {
            return Err(Error::InvalidArgument(format!("Poisson rate must be positive, got {theta}")));
        }
        let s = partial_exp(theta, k_max);
        let mut term = Rational::one();
        let mut row = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            if k > 0 {
                term = term * theta.clone() / Rational::from_integer(k.into());
            }
            row.push(term.clone() / s.clone());
        }
        rows.push(row);
    }
    Experiment::new(
        thetas.iter().map(ToString::to_string).collect(),
        (0..=k_max).map(|k| k.to_string()).collect(),
        Matrix::from_rows(rows)?,
    )
}

/// Factorial-moment weights `k(k-1)...(k-j+1)` on a truncated Poisson draw.
/// Their mean is `θ^j S_{K-j}(θ)/S_K(θ)` exactly, where `S_n` is the order-`n`
/// partial sum of `e^θ`; the shortfall from `θ^j` is bounded by the tail.
pub fn demo_poisson(k_max: usize, thetas: &[Rational], j_max: usize, max_tail: &Rational) -> Result<DemoReport, Error> {
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("empty rate grid".into()));
    }
    if j_max > k_max {
        return Err(Error::InvalidArgument(format!("j_max = {j_max} exceeds k_max = {k_max}")));
    }
    let mut report = DemoReport::new("poisson");
    report.input("k_max", k_max);
    report.input("thetas", thetas.iter().map(ToString::to_string).collect::<Vec<_>>());
    report.input("j_max", j_max);
    report.input("max_tail", max_tail.to_string());
    report.input("weights", "factorial moments on the truncated kernel in place of characteristic-function weights");

    let mut tails = Vec::new();
    for theta in thetas {
        match tail_bound(theta, k_max) {
            Some(t) if t <= *max_tail => tails.push(t),
            Some(t) => {
                return Err(Error::Domain(format!(
                    "tail mass beyond k = {k_max} at θ = {theta} may reach {}, above the bound {max_tail}",
                    sci(&t)
                )))
            }
            None => return Err(Error::Domain(format!("θ = {theta} is too large for truncation at k = {k_max}"))),
        }
    }
    report.claim(
        "residual tail mass is below the stated bound on the whole grid",
        true,
        format!("largest bound {}", sci(tails.iter().max().expect("nonempty"))),
    );

    let e = truncated_poisson(k_max, thetas)?;
    let mut closed_ok = true;
    let mut bound_ok = true;
    let mut zero_ok = true;
    let mut table = Vec::new();
    for j in 0..=j_max {
        let w: Vec<Rational> = (0..=k_max).map(|k| falling(k, j)).collect();
        let mut rows = Vec::new();
        for (t, theta) in thetas.iter().enumerate() {
            let mean = dot(&w, e.kernel().row(t));
            let power = (0..j).fold(Rational::one(), |acc, _| acc * theta.clone());
            let error = mean.clone() - power.clone();
            let closed = -(power.clone() * (Rational::one() - partial_exp(theta, k_max - j) / partial_exp(theta, k_max)));
            closed_ok &= error == closed;
            // The shortfall is at most θ^j times the tail beyond K-j.
            let bound = power.clone() * tail_bound(theta, k_max - j).unwrap_or_else(Rational::one);
            bound_ok &= error.abs() <= bound;
            if j == 0 {
                zero_ok &= error.is_zero();
            }
            rows.push(json!({
                "theta": theta.to_string(),
                "mean": sci(&mean),
                "error": sci(&error),
                "error_bound": sci(&bound),
            }));
        }
        table.push(json!({"j": j, "rows": rows}));
    }
    report.claim("truncation error equals -θ^j (1 - S_{K-j}/S_K) exactly", closed_ok, "");
    report.claim("truncation error is within the analytic tail bound", bound_ok, "");
    report.claim("j = 0 weights recover 1 exactly after renormalization", zero_ok, "");

    // The spot check at θ = 1 needs a first moment and the rate on the grid.
    if let Some(t) = thetas.iter().position(|th| th.is_one()) {
        if j_max >= 1 {
            let w: Vec<Rational> = (0..=k_max).map(|k| Rational::from_integer(k.into())).collect();
            let err = (dot(&w, e.kernel().row(t)) - Rational::one()).abs();
            let tol = Rational::new(1.into(), 10_000_000_000u64.into());
            report.claim("first moment at θ = 1 is within 1e-10 of 1", err <= tol, format!("error {}", sci(&err)));
        }
    }

    // Unbiased weights exist exactly when the target is truncated the same way.
    if j_max >= 1 {
        let w: Vec<Rational> = (0..=k_max).map(|k| falling(k, 1)).collect();
        let target: Vec<Rational> = (0..thetas.len()).map(|t| dot(&w, e.kernel().row(t))).collect();
        report.claim(
            "factorial weights are exactly unbiased for their truncated means",
            verify_unbiased(&e, &w, &target).is_ok(),
            "",
        );
    }
    report.artifact("moments", table);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    #[test]
    fn default_grid_passes() {
        let r = demo_poisson(20, &[ratio(1, 2), ratio(1, 1), ratio(2, 1)], 3, &ratio(1, 10_000_000_000)).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert!(r.find("first moment at θ = 1").is_some());
    }

    #[test]
    fn heavy_tail_is_rejected() {
        assert!(demo_poisson(5, &[ratio(4, 1)], 1, &ratio(1, 1000)).is_err());
        assert!(demo_poisson(5, &[ratio(9, 1)], 1, &ratio(1, 1)).is_err());
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let theta = ratio(3, 2);
        let s_long = partial_exp(&theta, 60);
        let true_tail = s_long - partial_exp(&theta, 8);
        assert!(true_tail <= tail_bound(&theta, 8).unwrap());
    }
}
