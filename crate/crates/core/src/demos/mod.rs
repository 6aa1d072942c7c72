//! Worked examples that rebuild classic elicitation problems at desk scale.
//! Each demo returns a [`DemoReport`] whose claims are checked by code.

mod bernoulli_orders;
mod density;
mod expertise;
mod german_tank;
mod poisson;
mod quadrature;
mod regression;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::Value;

pub use bernoulli_orders::demo_bernoulli_orders;
pub use density::{demo_density, Density, DensityFit, LegendreBasis};
pub use expertise::demo_expertise;
pub use german_tank::demo_german_tank;
pub use poisson::demo_poisson;
pub use quadrature::GaussLegendre;
pub use regression::{demo_regression, DiscretizedRegression};

use crate::algebra::parse_rational;
use crate::error::Error;
use crate::model::load_experiment;
use crate::Rational;

pub const DEMOS: [&str; 6] = ["german_tank", "poisson", "expertise", "density", "regression", "bernoulli_orders"];

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Claim {
    pub description: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DemoReport {
    pub demo: String,
    pub inputs: IndexMap<String, Value>,
    pub claims: Vec<Claim>,
    pub artifacts: IndexMap<String, Value>,
}

impl DemoReport {
    pub fn new(demo: &str) -> Self {
        DemoReport { demo: demo.to_string(), inputs: IndexMap::new(), claims: Vec::new(), artifacts: IndexMap::new() }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn artifact(&mut self, key: &str, value: impl Into<Value>) {
        self.artifacts.insert(key.to_string(), value.into());
    }

    pub fn claim(&mut self, description: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.claims.push(Claim { description: description.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn find(&self, prefix: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.description.starts_with(prefix))
    }

    /// One line per claim, for terminals.
    pub fn summary(&self) -> String {
        let mut out = format!("demo {}\n", self.demo);
        for c in &self.claims {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("  [{mark}] {}\n", c.description));
            } else {
                out.push_str(&format!("  [{mark}] {} ({})\n", c.description, c.detail));
            }
        }
        let failed = self.claims.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("  {} claims, {} failed\n", self.claims.len(), failed));
        out
    }
}

/// `key=value` parameters with typed accessors.
#[derive(Clone, Debug, Default)]
pub struct DemoParams {
    values: IndexMap<String, String>,
}

impl DemoParams {
    pub fn parse<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Self, Error> {
        let mut values = IndexMap::new();
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("parameter {pair:?} is not of the form key=value")))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(DemoParams { values })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.values.shift_remove(key)
    }

    pub(crate) fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, Error> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::InvalidArgument(format!("{key} must be a count, got {v:?}"))),
        }
    }

    pub(crate) fn string_or(&mut self, key: &str, default: &str) -> String {
        self.take(key).unwrap_or_else(|| default.to_string())
    }

    pub(crate) fn rationals_or(&mut self, key: &str, default: &str) -> Result<Vec<Rational>, Error> {
        parse_list(&self.string_or(key, default))
    }

    pub(crate) fn rational_or(&mut self, key: &str, default: &str) -> Result<Rational, Error> {
        parse_rational(&self.string_or(key, default))
    }

    pub(crate) fn optional(&mut self, key: &str) -> Option<String> {
        self.take(key)
    }

    /// Fails on parameters no demo consumed.
    pub(crate) fn finish(self, demo: &str) -> Result<(), Error> {
        match self.values.keys().next() {
            Some(k) => Err(Error::InvalidArgument(format!("demo {demo} has no parameter {k:?}"))),
            None => Ok(()),
        }
    }
}

/// Comma-separated rationals.
pub(crate) fn parse_list(text: &str) -> Result<Vec<Rational>, Error> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(parse_rational).collect()
}

/// Semicolon-separated rows of comma-separated rationals.
pub(crate) fn parse_rows(text: &str) -> Result<Vec<Vec<Rational>>, Error> {
    text.split(';').map(parse_list).collect()
}

/// Runs a demo by name. `experiment` parameters name JSON files.
pub fn run_demo(name: &str, mut params: DemoParams) -> Result<DemoReport, Error> {
    let report = match name {
        "german_tank" => {
            let n = params.usize_or("n_max", 5)?;
            params.finish(name)?;
            demo_german_tank(n)?
        }
        "poisson" => {
            let k = params.usize_or("k_max", 20)?;
            let thetas = params.rationals_or("thetas", "1/2,1,2")?;
            let j = params.usize_or("j_max", 3)?;
            let tail = params.rational_or("max_tail", "1/10000000000")?;
            params.finish(name)?;
            demo_poisson(k, &thetas, j, &tail)?
        }
        "expertise" => {
            let e = match params.optional("experiment") {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|err| Error::Document(format!("{path}: {err}")))?;
                    load_experiment(&text)?
                }
                None => crate::fixtures::bernoulli_grid(),
            };
            let d = params.usize_or("d", 4)?;
            params.finish(name)?;
            demo_expertise(&e, d)?
        }
        "density" => {
            let n = params.usize_or("n_max", 8)?;
            let nodes = params.usize_or("nodes", 64)?;
            let which = params.string_or("densities", "poly,exp");
            params.finish(name)?;
            let densities = which
                .split(',')
                .map(|s| s.trim().parse::<Density>())
                .collect::<Result<Vec<_>, _>>()?;
            demo_density(&densities, n, nodes)?
        }
        "regression" => {
            let r = DiscretizedRegression::new(
                parse_rows(&params.string_or("coefficients", "0,0;2,1"))?,
                parse_rows(&params.string_or("covariates", "2;3"))?,
                params.rationals_or("noise", "-1,0,1")?,
                params.rationals_or("noise_probs", "1/4,1/2,1/4")?,
            )?;
            let belief = params.rationals_or("belief", "1/2,1/2")?;
            params.finish(name)?;
            demo_regression(&r, &belief)?
        }
        "bernoulli_orders" => {
            let d = params.usize_or("d", 4)?;
            params.finish(name)?;
            demo_bernoulli_orders(d)?
        }
        other => return Err(Error::InvalidArgument(format!("unknown demo {other:?}; expected one of {}", DEMOS.join(", ")))),
    };
    Ok(report)
}
