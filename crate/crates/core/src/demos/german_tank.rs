use num_traits::{One, Zero};
use serde_json::json;

use super::DemoReport;
use crate::algebra::{dot, ratio};
use crate::elicit::{complete_elicitation, unbiased_weights, Elicitability};
use crate::error::Error;
use crate::fixtures;
use crate::Rational;

/// `w_m(k)`: 1 up to `m`, `-m` at `m+1`, 0 above.
fn closed_form(n_max: usize, m: usize) -> Vec<Rational> {
    (1..=n_max)
        .map(|k| match k {
            k if k <= m => Rational::one(),
            k if k == m + 1 => ratio(-(m as i64), 1),
            _ => Rational::zero(),
        })
        .collect()
}

/// Serial-number sampling with one draw. `g_m(θ) = 1{θ <= m}` for each level
/// `m`, so the elicitable levels trace the c.d.f. of θ.
pub fn demo_german_tank(n_max: usize) -> Result<DemoReport, Error> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {n_max}")));
    }
    let mut report = DemoReport::new("german_tank");
    report.input("n_max", n_max);
    let e = fixtures::german_tank(n_max);

    let mut weights_out = serde_json::Map::new();
    let mut all_match = true;
    let mut mismatch = String::new();
    let mut root_zero = true;
    for m in 1..n_max {
        let g: Vec<Rational> = (1..=n_max).map(|t| if t <= m { Rational::one() } else { Rational::zero() }).collect();
        let expected = closed_form(n_max, m);
        let found = match unbiased_weights(&e, &g)? {
            Elicitability::Elicitable { weights } => weights,
            Elicitability::NotElicitable { .. } => {
                all_match = false;
                mismatch = format!("level m={m} reported not elicitable");
                continue;
            }
        };
        if found != expected && all_match {
            all_match = false;
            mismatch = format!("m={m}: got {:?}", found.iter().map(ToString::to_string).collect::<Vec<_>>());
        }
        weights_out.insert(format!("m={m}"), json!(found.iter().map(ToString::to_string).collect::<Vec<_>>()));
        // Under θ = m+1 the level statistic is 0.
        if dot(&found, e.kernel().row(m)) != Rational::zero() {
            root_zero = false;
        }
    }
    report.claim(
        "unbiased weights equal the closed form for every level m",
        all_match,
        if all_match { format!("{} levels", n_max - 1) } else { mismatch },
    );
    report.claim("expected weight under the point mass at m+1 is 0", root_zero, "");

    let complete = complete_elicitation(&e)?;
    let one_draw = complete.full_belief_elicitable && complete.min_copies == Some(1);
    report.claim(
        "the full belief is elicitable from one observation",
        one_draw,
        format!("min_copies = {:?}", complete.min_copies),
    );
    report.artifact("weights", serde_json::Value::Object(weights_out));
    report.artifact("completeness", complete.to_json());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_serials() {
        let r = demo_german_tank(5).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert_eq!(r.artifacts["weights"]["m=3"], json!(["1", "1", "1", "-3", "0"]));
    }

    #[test]
    fn too_small() {
        assert!(demo_german_tank(1).is_err());
    }
}
