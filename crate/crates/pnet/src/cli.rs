//! The `pnet` command line.
//!
//! Exit codes: 0 on success, 2 for usage and input errors, 1 when results
//! cannot be written.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pnet_core::distribution::Semantics;
use pnet_core::estimator::{learn_parameters, possibilistic_loglik, Estimator, ImprecisionBudget, LearnedModel};
use pnet_core::evaluation::{run_experiment, BudgetChoice, ExperimentConfig};
use pnet_core::network::NetworkStructure;
use pnet_core::sampler::{sample_dataset, SamplerConfig, SamplingMode};
use pnet_core::{ImpreciseDataset, DEFAULT_OMEGA_CAP};

use crate::dataset_file::{parse_dataset, write_dataset, write_manifest, Manifest};
use crate::error::{Error, Result};
use crate::network_file::{parse_network, parse_structure, write_network, write_random_set};
use crate::report::write_report;

/// Environment variable overriding the joint-enumeration cap.
pub const OMEGA_CAP_ENV: &str = "PNET_OMEGA_CAP";

#[derive(Parser, Debug)]
#[command(name = "pnet", version, about = "Sample, learn, score and evaluate possibilistic networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward-sample an imprecise dataset from a network.
    Sample(SampleArgs),
    /// Learn the tables of a structure from a dataset.
    Learn(LearnArgs),
    /// Print the possibilistic log-likelihood of a dataset under a network.
    Score(ScoreArgs),
    /// Sample from a gold network, learn it back and report the gap.
    Evaluate(EvaluateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Imprecise,
    Precise,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Imprecise => SamplingMode::ImpreciseCut,
            ModeArg::Precise => SamplingMode::PreciseUniform,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EstimatorArg {
    Pml,
    Histogram,
    Rset,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Pml => Estimator::PossibilisticMle,
            EstimatorArg::Histogram => Estimator::Histogram,
            EstimatorArg::Rset => Estimator::RandomSetMle,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SemanticsArg {
    Min,
    Product,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    theta: f64,
    #[arg(long, value_enum, default_value = "imprecise")]
    mode: ModeArg,
    #[arg(long)]
    seed: u64,
    /// Dataset CSV; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct LearnArgs {
    /// Network or structure JSON; tables, if present, are ignored.
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "pml")]
    estimator: EstimatorArg,
    /// `default` (S_i = 1), `mean-card`, or a JSON file mapping variables to S_i.
    #[arg(long, default_value = "default")]
    budget: String,
    #[arg(long, value_enum, default_value = "product")]
    semantics: SemanticsArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "imprecise")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "pml")]
    estimator: EstimatorArg,
    /// Fraction of records held out for scoring, in [0, 1).
    #[arg(long, default_value_t = 0.2)]
    holdout: f64,
    /// `default` (S_i = 1), `mean-card`, or a JSON file mapping variables to S_i.
    #[arg(long, default_value = "default")]
    budget: String,
    /// Key-value report; JSON goes to `<report>.json`.
    #[arg(long)]
    report: PathBuf,
}

fn omega_cap() -> Result<usize> {
    match std::env::var(OMEGA_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("{OMEGA_CAP_ENV}={v:?} is not a non-negative integer"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_OMEGA_CAP),
        Err(e) => Err(Error::Argument(format!("{OMEGA_CAP_ENV}: {e}"))),
    }
}

fn budget_file(path: &Path, structure: &NetworkStructure) -> Result<ImprecisionBudget> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    let map: BTreeMap<String, f64> =
        serde_json::from_str(&text).map_err(|e| Error::Budget { file: file.clone(), reason: e.to_string() })?;
    let mut values = vec![1.0; structure.len()];
    for (name, s) in map {
        let v = structure
            .index_of(&name)
            .ok_or_else(|| Error::Budget { file: file.clone(), reason: format!("unknown variable {name}") })?;
        values[v] = s;
    }
    ImprecisionBudget::new(values).map_err(|e| Error::Budget { file, reason: e.to_string() })
}

fn budget_choice(arg: &str, structure: &NetworkStructure) -> Result<BudgetChoice> {
    Ok(match arg {
        "default" => BudgetChoice::Unit,
        "mean-card" => BudgetChoice::MeanCardinality,
        path => BudgetChoice::Fixed(budget_file(Path::new(path), structure)?),
    })
}

fn resolve_budget(choice: BudgetChoice, data: &ImpreciseDataset) -> ImprecisionBudget {
    match choice {
        BudgetChoice::Unit => ImprecisionBudget::unit(data.schema().len()),
        BudgetChoice::MeanCardinality => ImprecisionBudget::mean_cardinality(data),
        BudgetChoice::Fixed(b) => b,
    }
}

fn sample(args: SampleArgs) -> Result<()> {
    let net = parse_network(&args.net)?;
    let config = SamplerConfig::new(args.theta, args.mode.into(), args.seed, args.n)?;
    let data = sample_dataset(&net, &config)?;
    write_dataset(&args.out, &data)?;
    write_manifest(&args.out, &Manifest::new(config.mode(), config.record_count(), config.seed(), config.theta_imp()))
}

fn learn(args: LearnArgs) -> Result<()> {
    let (structure, _) = parse_structure(&args.structure)?;
    let data = parse_dataset(&args.data, structure.variables())?;
    let budget = resolve_budget(budget_choice(&args.budget, &structure)?, &data);
    let semantics = match args.semantics {
        SemanticsArg::Min => Semantics::Min,
        SemanticsArg::Product => Semantics::Product,
    };
    match learn_parameters(&data, &structure, &budget, args.estimator.into())? {
        LearnedModel::Network(net) => write_network(&args.out, &net.with_semantics(semantics)),
        LearnedModel::RandomSet(model) => write_random_set(&args.out, &model),
    }
}

fn score(args: ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let net = parse_network(&args.net)?;
    let data = parse_dataset(&args.data, net.variables())?;
    let ll = possibilistic_loglik(&net, &data)?;
    writeln!(out, "{ll}").map_err(|e| Error::Internal(e.to_string()))
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let gold = parse_network(&args.gold)?;
    let sampler = SamplerConfig::new(args.theta, args.mode.into(), args.seed, args.n)?;
    let config = ExperimentConfig::new(sampler, args.estimator.into())
        .with_holdout(args.holdout)
        .with_budget(budget_choice(&args.budget, gold.structure())?)
        .with_omega_cap(omega_cap()?);
    let report = run_experiment(&gold, &config)?;
    write_report(&args.report, &report, &args.gold.display().to_string())
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Sample(a) => sample(a),
        Command::Learn(a) => learn(a),
        Command::Score(a) => score(a, out),
        Command::Evaluate(a) => evaluate(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
