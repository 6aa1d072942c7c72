//! Kind-tagged JSON documents for mechanisms.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Scalar};
use crate::error::Error;
use crate::mechanisms::{
    compound_mechanism, mean_mechanism, pushforward, quadratic_mechanism, quadratic_panel, table_mechanism, Kind, Mechanism,
    ScoreForm,
};
use crate::model::{ExperimentDoc, MixtureDoc};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismDoc {
    /// Without `events`, singleton events with equal weights.
    QuadraticPanel {
        experiment: ExperimentDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        events: Option<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<String>>,
    },
    MeanScore {
        experiment: ExperimentDoc,
        statistic: Vec<String>,
        weights: Vec<String>,
        #[serde(default)]
        form: ScoreForm,
    },
    Table {
        experiment: ExperimentDoc,
        reports: Vec<String>,
        payoffs: Vec<Vec<String>>,
    },
    Pushforward {
        experiment: ExperimentDoc,
        base: Box<MechanismDoc>,
        matrix: Vec<Vec<String>>,
    },
    Compound {
        mixture: MixtureDoc,
        components: IndexMap<String, MechanismDoc>,
    },
    Shift {
        base: Box<MechanismDoc>,
        offset: String,
    },
}

fn parse_vec<T: Scalar>(values: &[String]) -> Result<Vec<T>, Error> {
    values.iter().map(|s| T::parse_scalar(s)).collect()
}

fn strings<T: Scalar>(values: &[T]) -> Vec<String> {
    values.iter().map(Scalar::format_scalar).collect()
}

impl MechanismDoc {
    pub fn from_mechanism<T: Scalar>(m: &Mechanism<T>) -> Self {
        let experiment = ExperimentDoc::from_experiment(&m.experiment);
        match &m.kind {
            Kind::QuadraticPanel { events, weights } => MechanismDoc::QuadraticPanel {
                experiment,
                events: Some(
                    events
                        .iter()
                        .map(|ev| ev.iter().map(|&y| m.experiment.outcomes()[y].clone()).collect())
                        .collect(),
                ),
                weights: Some(strings(weights)),
            },
            Kind::MeanScore { statistic, weights, form } => {
                MechanismDoc::MeanScore { experiment, statistic: strings(statistic), weights: strings(weights), form: *form }
            }
            Kind::Table { reports, payoffs } => {
                MechanismDoc::Table { experiment, reports: reports.clone(), payoffs: payoffs.to_string_rows() }
            }
            Kind::Pushforward { base, matrix } => MechanismDoc::Pushforward {
                experiment,
                base: Box::new(MechanismDoc::from_mechanism(base)),
                matrix: matrix.to_string_rows(),
            },
            Kind::Compound { mixture, components } => MechanismDoc::Compound {
                mixture: MixtureDoc::from_mixture(mixture),
                components: mixture
                    .covariates()
                    .iter()
                    .zip(components)
                    .map(|(x, c)| (x.clone(), MechanismDoc::from_mechanism(c)))
                    .collect(),
            },
            Kind::Shift { base, offset } => {
                MechanismDoc::Shift { base: Box::new(MechanismDoc::from_mechanism(base)), offset: offset.format_scalar() }
            }
        }
    }

    pub fn into_mechanism<T: Scalar>(self) -> Result<Mechanism<T>, Error> {
        match self {
            MechanismDoc::QuadraticPanel { experiment, events, weights } => {
                let e = experiment.into_experiment::<T>(None)?;
                match (events, weights) {
                    (None, None) => Ok(quadratic_mechanism(&e)),
                    (Some(events), Some(weights)) => {
                        let index = |label: &String| {
                            e.outcomes()
                                .iter()
                                .position(|o| o == label)
                                .ok_or_else(|| Error::Document(format!("unknown outcome {label:?} in event")))
                        };
                        let events = events
                            .iter()
                            .map(|ev| ev.iter().map(index).collect::<Result<Vec<_>, _>>())
                            .collect::<Result<Vec<_>, _>>()?;
                        quadratic_panel(&e, events, parse_vec(&weights)?)
                    }
                    _ => Err(Error::Document("\"events\" and \"weights\" go together".into())),
                }
            }
            MechanismDoc::MeanScore { experiment, statistic, weights, form } => {
                let e = experiment.into_experiment::<T>(None)?;
                mean_mechanism(&e, parse_vec(&statistic)?, parse_vec(&weights)?, form)
            }
            MechanismDoc::Table { experiment, reports, payoffs } => {
                let e = experiment.into_experiment::<T>(None)?;
                table_mechanism(&e, reports, Matrix::from_string_rows(&payoffs)?)
            }
            MechanismDoc::Pushforward { experiment, base, matrix } => {
                let e = experiment.into_experiment::<T>(None)?;
                pushforward(&base.into_mechanism()?, &Matrix::from_string_rows(&matrix)?, &e)
            }
            MechanismDoc::Compound { mixture, mut components } => {
                let mixture = mixture.into_mixture::<T>()?;
                let mut subs = Vec::new();
                for x in mixture.covariates() {
                    let doc = components
                        .shift_remove(x)
                        .ok_or_else(|| Error::Document(format!("no sub-mechanism for covariate {x:?}")))?;
                    subs.push(doc.into_mechanism()?);
                }
                if let Some(extra) = components.keys().next() {
                    return Err(Error::Document(format!("sub-mechanism {extra:?} has no covariate")));
                }
                compound_mechanism(&mixture, subs)
            }
            MechanismDoc::Shift { base, offset } => Ok(base.into_mechanism::<T>()?.shifted(T::parse_scalar(&offset)?)),
        }
    }
}

pub fn load_mechanism<T: Scalar>(json: &str) -> Result<Mechanism<T>, Error> {
    let doc: MechanismDoc = serde_json::from_str(json).map_err(|e| Error::Document(e.to_string()))?;
    doc.into_mechanism()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::fixtures;
    use crate::model::CovariateMixture;
    use crate::Rational;

    fn round_trip(m: &Mechanism<Rational>) {
        let json = serde_json::to_string(&MechanismDoc::from_mechanism(m)).unwrap();
        let back: Mechanism<Rational> = load_mechanism(&json).unwrap();
        assert_eq!(&back, m);
    }

    #[test]
    fn every_kind_round_trips() {
        let e = fixtures::bernoulli_grid();
        let theta = vec![ratio(0, 1), ratio(1, 2), ratio(1, 1)];
        round_trip(&quadratic_mechanism(&e));
        round_trip(&mean_mechanism(&e, theta, vec![ratio(0, 1), ratio(1, 1)], ScoreForm::Linear).unwrap());
        round_trip(&table_mechanism(&e, vec!["x".into()], Matrix::filled(1, 2, ratio(1, 3))).unwrap());
        let noisy = fixtures::noisy_bernoulli_grid();
        let d = Matrix::from_rows(vec![vec![ratio(19, 20), ratio(1, 20)], vec![ratio(1, 20), ratio(19, 20)]]).unwrap();
        round_trip(&pushforward(&quadratic_mechanism(&noisy), &d, &e).unwrap());
        let mix = CovariateMixture::new(vec!["a".into(), "b".into()], vec![ratio(1, 2), ratio(1, 2)], vec![e.clone(), noisy.clone()]).unwrap();
        round_trip(&compound_mechanism(&mix, vec![quadratic_mechanism(&e), quadratic_mechanism(&noisy)]).unwrap());
        round_trip(&quadratic_mechanism(&e).shifted(ratio(-1, 2)));
    }

    #[test]
    fn hand_written_documents() {
        let doc = r#"{"kind": "mean_score",
            "experiment": {"parameters": ["0", "1/2", "1"], "outcomes": ["0", "1"], "kernel": [["1","0"],["1/2","1/2"],["0","1"]]},
            "statistic": ["0", "1/2", "1"], "weights": ["0", "1"]}"#;
        let m: Mechanism<Rational> = load_mechanism(doc).unwrap();
        assert_eq!(m.kind_name(), "mean_score");
        let biased = doc.replace(r#""weights": ["0", "1"]"#, r#""weights": ["1", "1"]"#);
        assert!(matches!(load_mechanism::<Rational>(&biased), Err(Error::NotUnbiased(_))));
        assert!(load_mechanism::<Rational>(r#"{"kind": "lottery"}"#).is_err());
    }
}
