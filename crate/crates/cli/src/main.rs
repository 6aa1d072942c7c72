use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use infoelicit::demos::{run_demo, DemoParams, DEMOS};
use infoelicit::elicit::{complete_elicitation, load_statistics, maximal_partition, unbiased_weights};
use infoelicit::mechanisms::{ic_verify, load_mechanism};
use infoelicit::model::load_experiment;
use infoelicit::orders::{compare, Relation};
use infoelicit::{RationalExperiment, RationalMechanism, RationalStatistics};

#[derive(Parser)]
#[command(name = "infoelicit", version, about = "Exact elicitation and experiment comparison over finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the first experiment dominates the second.
    Compare {
        /// elicitation, blackwell, nonneg, bounded or garbling
        relation: Relation,
        exp_y: PathBuf,
        exp_z: PathBuf,
    },
    /// Unbiased weights (or an indistinguishable pair) for each statistic.
    Unbiased { experiment: PathBuf, statistics: PathBuf },
    /// How many independent copies elicit the whole belief.
    Complete { experiment: PathBuf },
    /// Exhaustive incentive-compatibility check on a rational belief grid.
    IcVerify {
        mechanism: PathBuf,
        /// Target statistics; the experiment's own partition when omitted.
        statistics: Option<PathBuf>,
        #[arg(short, long, default_value_t = 6)]
        d: usize,
    },
    /// Run a worked example and check its claims.
    Demo {
        /// One of german_tank, poisson, expertise, density, regression, bernoulli_orders.
        name: String,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn experiment(path: &Path) -> Result<RationalExperiment> {
    load_experiment(&read(path)?).with_context(|| format!("loading experiment {}", path.display()))
}

fn statistics(path: &Path) -> Result<RationalStatistics> {
    load_statistics(&read(path)?).with_context(|| format!("loading statistics {}", path.display()))
}

fn print(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compare { relation, exp_y, exp_z } => {
            let (ey, ez) = (experiment(&exp_y)?, experiment(&exp_z)?);
            print(&compare(relation, &ey, &ez)?.to_json(&ey, &ez));
        }
        Command::Unbiased { experiment: e, statistics: s } => {
            let e = experiment(&e)?;
            let family = statistics(&s)?;
            if family.parameters() != e.parameters() {
                anyhow::bail!("statistics and experiment list different parameters");
            }
            let mut out = serde_json::Map::new();
            for (label, g) in family.labels().iter().zip(family.functions()) {
                out.insert(label.clone(), unbiased_weights(&e, g)?.to_json());
            }
            print(&Value::Object(out));
        }
        Command::Complete { experiment: e } => print(&complete_elicitation(&experiment(&e)?)?.to_json()),
        Command::IcVerify { mechanism, statistics: s, d } => {
            let m: RationalMechanism = load_mechanism(&read(&mechanism)?)
                .with_context(|| format!("loading mechanism {}", mechanism.display()))?;
            let target = match s {
                Some(path) => statistics(&path)?,
                None => maximal_partition(m.experiment()),
            };
            print(&ic_verify(&m, &target, d)?.to_json());
        }
        Command::Demo { name, params } => {
            if !DEMOS.contains(&name.as_str()) {
                anyhow::bail!("unknown demo {name:?}; expected one of {}", DEMOS.join(", "));
            }
            let report = run_demo(&name, DemoParams::parse(params.iter().map(String::as_str))?)?;
            print(&json!(report));
            eprint!("{}", report.summary());
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
