//! JSON documents for experiments and covariate mixtures. Every number is a
//! string such as `"1/2"`, `"3"` or `"0.05"`.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Scalar};
use crate::error::Error;
use crate::model::{CovariateMixture, Experiment};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Vec<String>>,
    pub outcomes: Vec<String>,
    pub kernel: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MixtureDoc {
    pub parameters: Vec<String>,
    pub weights: IndexMap<String, String>,
    pub components: IndexMap<String, ExperimentDoc>,
}

impl ExperimentDoc {
    pub fn from_experiment<T: Scalar>(e: &Experiment<T>) -> Self {
        ExperimentDoc {
            parameters: Some(e.parameters().to_vec()),
            outcomes: e.outcomes().to_vec(),
            kernel: e.kernel().to_string_rows(),
        }
    }

    pub fn into_experiment<T: Scalar>(self, default_parameters: Option<&[String]>) -> Result<Experiment<T>, Error> {
        let parameters = match (self.parameters, default_parameters) {
            (Some(p), Some(d)) if p != d => return Err(Error::ParameterMismatch),
            (Some(p), _) => p,
            (None, Some(d)) => d.to_vec(),
            (None, None) => return Err(Error::Document("missing \"parameters\"".into())),
        };
        if self.kernel.len() != parameters.len() {
            return Err(Error::Document(format!(
                "kernel has {} rows for {} parameters",
                self.kernel.len(),
                parameters.len()
            )));
        }
        if let Some((i, row)) = self.kernel.iter().enumerate().find(|(_, r)| r.len() != self.outcomes.len()) {
            return Err(Error::Document(format!(
                "kernel row {i} has {} entries for {} outcomes",
                row.len(),
                self.outcomes.len()
            )));
        }
        let kernel = Matrix::from_string_rows(&self.kernel)?;
        Experiment::new(parameters, self.outcomes, kernel)
    }
}

/// Parses and validates an experiment document.
pub fn load_experiment<T: Scalar>(json: &str) -> Result<Experiment<T>, Error> {
    let doc: ExperimentDoc = serde_json::from_str(json).map_err(|e| Error::Document(e.to_string()))?;
    doc.into_experiment(None)
}

pub fn experiment_to_json<T: Scalar>(e: &Experiment<T>) -> String {
    serde_json::to_string_pretty(&ExperimentDoc::from_experiment(e)).expect("document serializes")
}

impl MixtureDoc {
    pub fn from_mixture<T: Scalar>(m: &CovariateMixture<T>) -> Self {
        let weights = m
            .covariates()
            .iter()
            .zip(m.weights())
            .map(|(x, w)| (x.clone(), w.format_scalar()))
            .collect();
        let components = m
            .covariates()
            .iter()
            .zip(m.components())
            .map(|(x, c)| {
                let mut doc = ExperimentDoc::from_experiment(c);
                doc.parameters = None;
                (x.clone(), doc)
            })
            .collect();
        MixtureDoc { parameters: m.parameters().to_vec(), weights, components }
    }

    pub fn into_mixture<T: Scalar>(mut self) -> Result<CovariateMixture<T>, Error> {
        let covariates: Vec<String> = self.weights.keys().cloned().collect();
        let mut weights = Vec::with_capacity(covariates.len());
        let mut components = Vec::with_capacity(covariates.len());
        for x in &covariates {
            weights.push(T::parse_scalar(&self.weights[x])?);
            let doc = self
                .components
                .shift_remove(x)
                .ok_or_else(|| Error::Document(format!("no component for covariate {x:?}")))?;
            components.push(doc.into_experiment(Some(&self.parameters))?);
        }
        if let Some(extra) = self.components.keys().next() {
            return Err(Error::Document(format!("component {extra:?} has no weight")));
        }
        CovariateMixture::new(covariates, weights, components)
    }
}

pub fn load_mixture<T: Scalar>(json: &str) -> Result<CovariateMixture<T>, Error> {
    let doc: MixtureDoc = serde_json::from_str(json).map_err(|e| Error::Document(e.to_string()))?;
    doc.into_mixture()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::fixtures;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn loads_bernoulli_grid() {
        let json = r#"{"parameters": ["0", "1/2", "1"], "outcomes": ["0", "1"],
                       "kernel": [["1", "0"], ["1/2", "1/2"], ["0", "1"]]}"#;
        let e: Experiment<Q> = load_experiment(json).unwrap();
        assert_eq!(e, fixtures::bernoulli_grid());
        let again: Experiment<Q> = load_experiment(&experiment_to_json(&e)).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn rejects_bad_documents() {
        let row_sum = r#"{"parameters": ["a"], "outcomes": ["0", "1"], "kernel": [["1/2", "1/3"]]}"#;
        assert!(matches!(load_experiment::<Q>(row_sum), Err(Error::RowSum { .. })));
        let negative = r#"{"parameters": ["a"], "outcomes": ["0", "1"], "kernel": [["-1/2", "3/2"]]}"#;
        assert!(matches!(load_experiment::<Q>(negative), Err(Error::NegativeEntry { .. })));
        let dup = r#"{"parameters": ["a", "a"], "outcomes": ["0"], "kernel": [["1"], ["1"]]}"#;
        assert!(matches!(load_experiment::<Q>(dup), Err(Error::DuplicateLabel(_))));
        let ragged = r#"{"parameters": ["a"], "outcomes": ["0", "1"], "kernel": [["1"]]}"#;
        assert!(matches!(load_experiment::<Q>(ragged), Err(Error::Document(_))));
        assert!(matches!(load_experiment::<Q>("{"), Err(Error::Document(_))));
        let not_number = r#"{"parameters": ["a"], "outcomes": ["0"], "kernel": [["one"]]}"#;
        assert!(matches!(load_experiment::<Q>(not_number), Err(Error::Parse(_))));
    }

    #[test]
    fn decimal_entries_are_exact() {
        let json = r#"{"parameters": ["a"], "outcomes": ["0", "1"], "kernel": [["0.95", "0.05"]]}"#;
        let e: Experiment<Q> = load_experiment(json).unwrap();
        assert_eq!(e.prob(0, 1), &ratio(1, 20));
    }

    #[test]
    fn mixture_round_trip() {
        let clean = fixtures::bernoulli_grid();
        let noisy = clean.uniform_garble(&ratio(1, 10)).unwrap();
        let m = CovariateMixture::new(vec!["lab".into(), "field".into()], vec![ratio(1, 3), ratio(2, 3)], vec![clean, noisy])
            .unwrap();
        let json = serde_json::to_string(&MixtureDoc::from_mixture(&m)).unwrap();
        let back: CovariateMixture<Q> = load_mixture(&json).unwrap();
        assert_eq!(back, m);
        let missing = r#"{"parameters": ["a"], "weights": {"x": "1"}, "components": {}}"#;
        assert!(load_mixture::<Q>(missing).is_err());
    }
}
