use serde_json::json;

use super::DemoReport;
use crate::algebra::{ratio, Matrix};
use crate::error::Error;
use crate::fixtures;
use crate::grid::belief_grid;
use crate::mechanisms::{payoff_gap, pushforward, quadratic_mechanism, table_mechanism, Mechanism, Report};
use crate::model::{Belief, Experiment};
use crate::orders::{compare, uniform_garbling_decomposition, verify_witness, Relation};
use crate::Rational;

fn equivalent(
    psi: &Mechanism<Rational>,
    matrix: &Matrix<Rational>,
    target: &Experiment<Rational>,
    beliefs: &[Belief<Rational>],
    reports: &[Report<Rational>],
) -> Result<(bool, String), Error> {
    let phi = pushforward(psi, matrix, target)?;
    Ok(match payoff_gap(psi, &phi, beliefs, reports)? {
        None => (true, format!("{} beliefs x {} reports", beliefs.len(), reports.len())),
        Some((i, j, d)) => (false, format!("belief {:?}, report {j}: difference {d}", beliefs[i].format_weights())),
    })
}

/// A Bernoulli trial on `{0, 1/2, 1}` against the same trial seen through
/// 10% uniform noise, run through every order query.
pub fn demo_bernoulli_orders(d: usize) -> Result<DemoReport, Error> {
    if d == 0 {
        return Err(Error::InvalidArgument("grid denominator must be positive".into()));
    }
    let clean = fixtures::bernoulli_grid();
    let noisy = fixtures::noisy_bernoulli_grid();
    let mut report = DemoReport::new("bernoulli_orders");
    report.input("clean", "π(1|θ) = θ on {0, 1/2, 1}");
    report.input("noisy", "π(1|θ) = 1/20 + 9θ/10 on {0, 1/2, 1}");
    report.input("d", d);

    // Expected answers: (relation, clean over noisy, noisy over clean).
    let expected = [
        (Relation::Elicitation, true, true),
        (Relation::Blackwell, true, false),
        (Relation::Nonneg, true, false),
        (Relation::Bounded, true, false),
        (Relation::Garbling, true, true),
    ];
    let mut answers = Vec::new();
    let mut blackwell_witness = None;
    let mut elicitation_witness = None;
    for (relation, forward, backward) in expected {
        for (ey, ez, want, direction) in [(&clean, &noisy, forward, "clean over noisy"), (&noisy, &clean, backward, "noisy over clean")] {
            let r = compare(relation, ey, ez)?;
            let verified = r.witness.as_ref().is_none_or(|w| verify_witness(relation, ey, ez, w));
            report.claim(
                format!("{relation} dominance, {direction}: {want}"),
                r.holds == want && verified,
                if r.holds { "witness verified".to_string() } else { r.certificate.clone().unwrap_or_default() },
            );
            if relation == Relation::Blackwell && r.holds {
                blackwell_witness = r.matrix().cloned();
            }
            if relation == Relation::Elicitation && direction == "noisy over clean" {
                elicitation_witness = r.matrix().cloned();
            }
            answers.push(r.to_json(ey, ez));
        }
    }

    let dec = uniform_garbling_decomposition(&noisy, &clean)?;
    let identity = dec.channel == Matrix::identity(2);
    report.claim(
        "garbling decomposition of noisy over clean has ε = 1/10 and T = I",
        dec.epsilon == ratio(1, 10) && identity,
        format!("ε = {}", dec.epsilon),
    );
    let round_trip = clean.uniform_garble(&dec.epsilon)?.kernel() == noisy.kernel();
    report.claim("garbling the clean trial by ε reproduces the noisy kernel", round_trip, "");

    let beliefs = belief_grid::<Rational>(3, d);
    let reports: Vec<Report<Rational>> = beliefs.iter().cloned().map(Report::Belief).collect();
    let table_reports: Vec<Report<Rational>> = (0..3).map(Report::Index).collect();
    let payoffs = Matrix::from_rows(vec![
        vec![ratio(1, 1), ratio(0, 1)],
        vec![ratio(1, 2), ratio(1, 2)],
        vec![ratio(1, 4), ratio(3, 4)],
    ])?;
    for (name, psi_exp, target, m) in [
        ("Blackwell", &noisy, &clean, &blackwell_witness),
        ("elicitation", &clean, &noisy, &elicitation_witness),
    ] {
        let Some(m) = m else {
            report.claim(format!("pushforward through the {name} witness is payoff-equivalent"), false, "no witness");
            continue;
        };
        let (ok, detail) = equivalent(&quadratic_mechanism(psi_exp), m, target, &beliefs, &reports)?;
        report.claim(format!("quadratic score pushed through the {name} witness is payoff-equivalent"), ok, detail);
        let table = table_mechanism(psi_exp, vec!["a".into(), "b".into(), "c".into()], payoffs.clone())?;
        let (ok, detail) = equivalent(&table, m, target, &beliefs, &table_reports)?;
        report.claim(format!("3-report table pushed through the {name} witness is payoff-equivalent"), ok, detail);
    }

    report.artifact("answers", answers);
    report.artifact(
        "garbling",
        json!({"epsilon": dec.epsilon.to_string(), "channel": dec.channel.to_string_rows()}),
    );
    Ok(report)
}
