use num_traits::Zero;
use serde_json::json;

use super::DemoReport;
use crate::algebra::dot;
use crate::elicit::{moment_weights, verify_unbiased};
use crate::error::Error;
use crate::grid::belief_grid;
use crate::model::{Belief, Experiment};
use crate::Rational;

/// Two draws let a principal elicit both the mean and the variance of every
/// column statistic `g_y(θ) = π(y|θ)`. An expert who knows θ has zero
/// variance everywhere; anyone else shows a positive variance somewhere.
pub fn demo_expertise(e: &Experiment<Rational>, d: usize) -> Result<DemoReport, Error> {
    if !e.is_identified() {
        return Err(Error::InvalidArgument("experiment is not identified: two parameters share a kernel row".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("grid denominator must be positive".into()));
    }
    let mut report = DemoReport::new("expertise");
    report.input("parameters", e.parameters().to_vec());
    report.input("outcomes", e.outcomes().to_vec());
    report.input("d", d);

    let pair = e.power(2);
    let columns: Vec<Vec<Rational>> = (0..e.num_outcomes()).map(|y| e.kernel().column(y)).collect();
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut unbiased = true;
    for g in &columns {
        let w1 = moment_weights(e, 2, g, 1)?;
        let w2 = moment_weights(e, 2, g, 2)?;
        let squares: Vec<Rational> = g.iter().map(|v| v.clone() * v.clone()).collect();
        unbiased &= verify_unbiased(&pair, &w1, g).is_ok() && verify_unbiased(&pair, &w2, &squares).is_ok();
        first.push(w1);
        second.push(w2);
    }
    report.claim("first- and second-moment weights on two draws are exactly unbiased", unbiased, "");

    let moments = |p: &Belief<Rational>| -> Result<(Vec<Rational>, Vec<Rational>), Error> {
        let lambda = pair.mean_outcome_distribution(p)?;
        let means: Vec<Rational> = first.iter().map(|w| dot(w, &lambda)).collect();
        let vars = second.iter().zip(&means).map(|(w, m)| dot(w, &lambda) - m.clone() * m.clone()).collect();
        Ok((means, vars))
    };

    let mut recovered = true;
    let mut point_rows = Vec::new();
    for t in 0..e.num_parameters() {
        let (means, vars) = moments(&e.point_mass(t))?;
        let matches: Vec<usize> = (0..e.num_parameters()).filter(|&s| e.kernel().row(s) == means.as_slice()).collect();
        recovered &= vars.iter().all(Zero::is_zero) && matches == [t];
        point_rows.push(json!({
            "parameter": e.parameters()[t],
            "variances": vars.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "recovered": matches.iter().map(|&s| e.parameters()[s].clone()).collect::<Vec<_>>(),
        }));
    }
    report.claim("point masses show zero variance and the means recover the parameter", recovered, "");

    let grid = belief_grid::<Rational>(e.num_parameters(), d);
    let mut positive = true;
    let mut direct = true;
    let mut counted = 0;
    for p in &grid {
        let (means, vars) = moments(p)?;
        for (g, (m, v)) in columns.iter().zip(means.iter().zip(&vars)) {
            let hand_mean = p.expectation(g)?;
            let squares: Vec<Rational> = g.iter().map(|x| x.clone() * x.clone()).collect();
            direct &= *m == hand_mean && *v == p.expectation(&squares)? - hand_mean.clone() * hand_mean;
        }
        if !p.is_degenerate() {
            counted += 1;
            positive &= vars.iter().any(|v| *v > Rational::zero());
        }
    }
    report.claim(
        "every non-degenerate grid belief has a strictly positive variance",
        positive,
        format!("{counted} non-degenerate beliefs of {}", grid.len()),
    );
    report.claim("elicited moments equal E_p[g] and E_p[g^2] - E_p[g]^2 on the grid", direct, "");

    let (_, uniform_vars) = moments(&Belief::uniform(e.num_parameters()))?;
    report.artifact("point_masses", point_rows);
    report.artifact(
        "uniform_variances",
        e.outcomes()
            .iter()
            .zip(&uniform_vars)
            .map(|(y, v)| (y.clone(), json!(v.to_string())))
            .collect::<serde_json::Map<_, _>>(),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, Matrix};
    use crate::fixtures;

    #[test]
    fn bernoulli_grid() {
        let r = demo_expertise(&fixtures::bernoulli_grid(), 4).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert_eq!(r.artifacts["uniform_variances"]["1"], json!("1/6"));
        assert_eq!(r.artifacts["point_masses"][1]["variances"], json!(["0", "0"]));
        assert_eq!(r.artifacts["point_masses"][1]["recovered"], json!(["1/2"]));
    }

    #[test]
    fn unidentified_is_rejected() {
        let e = Experiment::from_kernel(Matrix::from_rows(vec![vec![ratio(1, 2), ratio(1, 2)]; 2]).unwrap()).unwrap();
        assert!(demo_expertise(&e, 4).is_err());
    }
}
