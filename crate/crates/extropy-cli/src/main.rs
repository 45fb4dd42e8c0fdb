use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use extropy_cli::dataset::Dataset;
use extropy_cli::fixtures::{load_fixture, FixtureError, FIXTURES};
use extropy_cli::report::{experiment_csv, table_csv, write_atomic, ReportDocument};
use extropy_core::complete::{estimate_measure, Measure};
use extropy_core::censored::{estimate_ce_censored, estimate_cre_censored};
use extropy_core::harness::{
    reproduce_table, run_experiment, EstimatorId, ExperimentSpec, TableId,
};
use extropy_core::inference::{bootstrap_censored, variance_complete};
use extropy_core::oracles::Distribution;
use extropy_core::Error as CoreError;

const DEFAULT_SEED: u64 = 1729;

#[derive(Parser)]
#[command(
    name = "extropy",
    version,
    about = "U-statistic estimation of cumulative (residual) extropy for complete and right-censored lifetime data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate extropy measures from a CSV dataset or a vendored fixture
    Estimate(EstimateArgs),
    /// Run Monte Carlo bias/MSE experiments, or rerun a published table design
    Simulate(SimulateArgs),
    /// List vendored fixtures, their status and regression targets
    Fixtures,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CiMethod {
    None,
    Projection,
    Bootstrap,
}

#[derive(Args)]
struct EstimateArgs {
    /// CSV input with a `time` column and optional `status` column
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Name of a vendored fixture (see `extropy fixtures`)
    #[arg(long)]
    fixture: Option<String>,
    /// Comma-separated measures: cre, ce, cre-plugin, ce-plugin, dyn-surv,
    /// dyn-cum, w-surv, w-cum, w-dyn-surv, w-dyn-cum
    #[arg(long, value_delimiter = ',', required = true)]
    measures: Vec<String>,
    /// Threshold for the dynamic measures
    #[arg(long)]
    t: Option<f64>,
    /// Treat the dataset as right-censored (requires a status column)
    #[arg(long)]
    censored: bool,
    /// Confidence-interval method
    #[arg(long, value_enum, default_value_t = CiMethod::None)]
    ci: CiMethod,
    /// Confidence level for intervals
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Bootstrap replicates
    #[arg(long, default_value_t = 1000)]
    boot: usize,
    /// RNG seed; EXTROPY_SEED applies when the flag is absent
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON lines here (atomically) instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Rerun a published table design (1-4) instead of a custom spec
    #[arg(long, conflicts_with_all = ["dist", "params", "n", "censor_frac", "estimators"])]
    table: Option<String>,
    /// Distribution family: exp, gamma, weibull, lognormal
    #[arg(long)]
    dist: Option<String>,
    /// Family parameters (exp: rate; gamma: shape,rate; weibull:
    /// shape,scale; lognormal: mu,sigma)
    #[arg(long, value_delimiter = ',')]
    params: Vec<f64>,
    /// Sample sizes to run
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Monte Carlo replications (minimum 100; published tables use 10000)
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    /// Target censored fraction; censoring times are exponential with a
    /// calibrated rate
    #[arg(long)]
    censor_frac: Option<f64>,
    /// Comma-separated estimators: cre, ce, cre-plugin, ce-plugin,
    /// cre-ipcw, ce-ipcw, cre-ipcw-oracle, ce-ipcw-oracle
    #[arg(long, value_delimiter = ',')]
    estimators: Vec<String>,
    /// Master seed; EXTROPY_SEED applies when the flag is absent
    #[arg(long)]
    seed: Option<u64>,
    /// Write the CSV report here (atomically) instead of stdout
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Also write the full JSON report here (atomically)
    #[arg(long)]
    out_json: Option<PathBuf>,
}

enum CliError {
    /// Bad input or flags: exit code 2.
    Usage(String),
    /// Estimator failure on valid input: exit code 3.
    Estimation(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

fn classify(err: CoreError) -> CliError {
    match err {
        CoreError::InvalidSample(_) | CoreError::InvalidSpec(_) | CoreError::Calibration(_) => {
            CliError::Usage(err.to_string())
        }
        _ => CliError::Estimation(err.to_string()),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("EXTROPY_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::usage(format!("EXTROPY_SEED=`{raw}` is not a valid u64 seed"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn load_input(args: &EstimateArgs) -> Result<Dataset, CliError> {
    match (&args.input, &args.fixture) {
        (Some(path), None) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            extropy_cli::dataset::parse_dataset_bytes(&bytes)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        }
        (None, Some(name)) => load_fixture(name).map_err(|e| match e {
            FixtureError::Disabled { .. } => {
                CliError::usage(format!("transcription warning: {e}"))
            }
            other => CliError::usage(other.to_string()),
        }),
        (None, None) => Err(CliError::usage("pass either --input PATH or --fixture NAME")),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn emit(lines: Vec<String>, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let mut body = lines.join("\n");
            body.push('\n');
            write_atomic(path, &body)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            for line in lines {
                println!("{line}");
            }
            Ok(())
        }
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let measures: Vec<Measure> = args
        .measures
        .iter()
        .map(|m| Measure::from_str(m).map_err(CliError::Usage))
        .collect::<Result<_, _>>()?;
    if !(0.0 < args.level && args.level < 1.0) {
        return Err(CliError::usage(format!(
            "--level {} must lie strictly between 0 and 1",
            args.level
        )));
    }
    let dataset = load_input(&args)?;
    let seed = resolve_seed(args.seed)?;
    let mut lines = Vec::with_capacity(measures.len());

    if args.censored {
        let censored = dataset
            .to_censored()
            .ok_or_else(|| CliError::usage("--censored requires a `status` column"))?
            .map_err(classify)?;
        if args.ci == CiMethod::Projection {
            return Err(CliError::usage(
                "--ci projection applies to complete data; use --ci bootstrap with --censored",
            ));
        }
        for measure in &measures {
            let estimate = match measure {
                Measure::Cre => estimate_cre_censored(&censored).map_err(classify)?,
                Measure::Ce => estimate_ce_censored(&censored).map_err(classify)?,
                other => {
                    return Err(CliError::usage(format!(
                        "measure {other} has no censored-data estimator; censored measures are cre and ce"
                    )))
                }
            };
            let inference = match args.ci {
                CiMethod::Bootstrap => Some(
                    bootstrap_censored(&censored, *measure, args.boot, args.level, seed)
                        .map_err(classify)?,
                ),
                _ => None,
            };
            let mut doc = ReportDocument::from_estimate(&estimate, inference.as_ref());
            if inference.is_some() {
                doc.seed = Some(seed);
            }
            lines.push(doc.to_json_line());
        }
    } else {
        if dataset.statuses.is_some() {
            return Err(CliError::usage(
                "dataset has a `status` column; pass --censored, or remove the column to treat \
                 the times as complete",
            ));
        }
        let sample = dataset.to_sample().map_err(classify)?;
        if args.ci == CiMethod::Bootstrap {
            return Err(CliError::usage(
                "--ci bootstrap applies to censored data; use --ci projection for complete data",
            ));
        }
        for measure in &measures {
            let estimate = estimate_measure(&sample, *measure, args.t).map_err(classify)?;
            let inference = match args.ci {
                CiMethod::Projection => match measure {
                    Measure::Cre | Measure::Ce => Some(
                        variance_complete(&sample, *measure, args.level).map_err(classify)?,
                    ),
                    other => {
                        return Err(CliError::usage(format!(
                            "--ci projection covers cre and ce, not {other}"
                        )))
                    }
                },
                _ => None,
            };
            lines.push(ReportDocument::from_estimate(&estimate, inference.as_ref()).to_json_line());
        }
    }
    emit(lines, args.output.as_ref())
}

fn parse_distribution(name: &str, params: &[f64]) -> Result<Distribution, CliError> {
    let arity = |k: usize, what: &str| {
        if params.len() == k {
            Ok(())
        } else {
            Err(CliError::usage(format!(
                "--dist {name} needs {k} parameter(s) ({what}); got {}",
                params.len()
            )))
        }
    };
    let d = match name {
        "exp" | "exponential" => {
            arity(1, "rate")?;
            Distribution::exponential(params[0])
        }
        "gamma" => {
            arity(2, "shape,rate")?;
            Distribution::gamma(params[0], params[1])
        }
        "weibull" => {
            arity(2, "shape,scale")?;
            Distribution::weibull(params[0], params[1])
        }
        "lognormal" | "lnorm" => {
            arity(2, "mu,sigma")?;
            Distribution::lognormal(params[0], params[1])
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown distribution `{other}` (expected exp, gamma, weibull or lognormal)"
            )))
        }
    };
    d.map_err(classify)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;

    if let Some(table) = &args.table {
        let table = TableId::from_str(table).map_err(CliError::Usage)?;
        if args.reps < 100 {
            return Err(CliError::usage(format!(
                "--reps {} is below the minimum of 100",
                args.reps
            )));
        }
        let repro = reproduce_table(table, args.reps, seed).map_err(classify)?;
        if let Some(path) = &args.out_json {
            let json = serde_json::to_string_pretty(&repro).expect("report serializes");
            write_atomic(path, &json)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        }
        let csv = table_csv(&repro);
        return match &args.out_csv {
            Some(path) => write_atomic(path, &csv)
                .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{csv}");
                Ok(())
            }
        };
    }

    let dist_name = args
        .dist
        .as_deref()
        .ok_or_else(|| CliError::usage("pass --table N or --dist NAME"))?;
    let distribution = parse_distribution(dist_name, &args.params)?;
    if args.n.is_empty() {
        return Err(CliError::usage("--n requires at least one sample size"));
    }
    if args.estimators.is_empty() {
        return Err(CliError::usage("--estimators requires at least one name"));
    }
    let estimators: Vec<EstimatorId> = args
        .estimators
        .iter()
        .map(|e| EstimatorId::from_str(e).map_err(CliError::Usage))
        .collect::<Result<_, _>>()?;
    let spec = ExperimentSpec {
        distribution,
        n_values: args.n.clone(),
        replications: args.reps,
        estimators,
        censoring: args.censor_frac,
        master_seed: seed,
    };
    spec.validate().map_err(classify)?;
    let report = run_experiment(&spec).map_err(classify)?;

    if let Some(path) = &args.out_json {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_atomic(path, &json)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let csv = experiment_csv(&report);
    match &args.out_csv {
        Some(path) => write_atomic(path, &csv)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_fixtures() {
    for f in FIXTURES {
        let status = match f.disabled_reason {
            None => "enabled".to_string(),
            Some(reason) => format!("disabled ({reason})"),
        };
        println!("{}\trows={}\t{}", f.name, f.n, status);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fixtures => {
            cmd_fixtures();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Estimation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
