//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 data validation, 4 numerical failure,
//! 5 I/O, 6 response value invalid for the family. The result artifact goes
//! to stdout (or `--output`); warnings and errors go to stderr.

mod commands;
mod ingest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_compare, cmd_fit, cmd_mlset, cmd_select, cmd_simulate, parse_model, Coefficient, CompareOutput, CompareRow,
    FitOutput, MlSetOutput, Output, OutputFormat, SelectOutput, SizeRow,
};
pub use ingest::{ingest_bytes, ingest_csv};

use crate::error::{Error, Result};
use crate::glm::Family;
use crate::model_space::SearchBudget;
use crate::selection::{AlphaMode, CriterionSpec};
use crate::sim::SimConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_IO: i32 = 5;
pub const EXIT_RESPONSE: i32 = 6;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "CMC_THREADS";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::SearchTooLarge { .. } => EXIT_USAGE,
        Error::Validation(_) => EXIT_DATA,
        Error::InvalidResponse { .. } => EXIT_RESPONSE,
        Error::Io(_) => EXIT_IO,
        Error::Candidate { source, .. } => exit_code(source),
        Error::Domain(_)
        | Error::SingularDesign { .. }
        | Error::DegenerateFit { .. }
        | Error::Overflow(_)
        | Error::EmptyRegion { .. }
        | Error::Internal(_)
        | Error::TooManyFailures { .. } => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "cmc", version, about = "Sparse maximum-likelihood model selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a model with CMC or an information criterion.
    Select(SelectArgs),
    /// Print the maximum-likelihood model of every size.
    Mlset(DataArgs),
    /// Fit one named submodel.
    Fit(FitArgs),
    /// Run a simulation described by a JSON configuration.
    Simulate(SimulateArgs),
    /// Compare several criteria on one shared model search.
    Compare(SelectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Table,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Table => OutputFormat::Table,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Binomial,
    Poisson,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gaussian => Family::Gaussian,
            FamilyArg::Binomial => Family::Binomial,
            FamilyArg::Poisson => Family::Poisson,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Accepted for every command; only `simulate` draws random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Comma-separated predictor columns; default is every other column.
    #[arg(long, value_delimiter = ',')]
    pub predictors: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub family: FamilyArg,
    /// Largest model size searched.
    #[arg(long)]
    pub max_size: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Fixed confidence level α of the likelihood-ratio region.
    #[arg(long, conflicts_with = "gamma")]
    pub alpha: Option<f64>,
    /// Threshold schedule exponent γ (threshold n^γ); default 0.5.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Comma-separated criteria, e.g. `cmc(gamma=0.5),cmc(alpha=0.1),aic,bic,hq`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["alpha", "gamma"])]
    pub criterion: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated predictors of the model; empty for intercept only.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub model: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// JSON simulation configuration.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn budget(args: &DataArgs) -> SearchBudget {
    SearchBudget {
        max_size: args.max_size,
        ..SearchBudget::default()
    }
}

fn load(args: &DataArgs) -> Result<crate::Dataset> {
    ingest_csv(&args.input, &args.response, args.predictors.as_deref(), args.family.into())
}

fn parse_criteria(list: &[String]) -> Result<Vec<CriterionSpec<f64>>> {
    list.iter().map(|s| s.trim().parse()).collect()
}

fn cmc_mode(args: &SelectArgs) -> Result<AlphaMode<f64>> {
    let mode = match (args.alpha, args.gamma) {
        (Some(a), None) => AlphaMode::Fixed(a),
        (None, Some(g)) => AlphaMode::Schedule(g),
        (None, None) => AlphaMode::default(),
        (Some(_), Some(_)) => return Err(Error::Usage("give only one of --alpha and --gamma".into())),
    };
    mode.validate().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(mode)
}

fn select_spec(args: &SelectArgs) -> Result<CriterionSpec<f64>> {
    match &args.criterion {
        Some(list) => match parse_criteria(list)?.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::Usage("select takes exactly one --criterion".into())),
        },
        None => Ok(CriterionSpec::Cmc(cmc_mode(args)?)),
    }
}

fn compare_specs(args: &SelectArgs) -> Result<Vec<CriterionSpec<f64>>> {
    match &args.criterion {
        Some(list) => parse_criteria(list),
        None if args.alpha.is_some() || args.gamma.is_some() => {
            Err(Error::Usage("compare takes criteria through --criterion".into()))
        }
        None => Ok(CriterionSpec::default_set()),
    }
}

fn read_config(args: &SimulateArgs) -> Result<SimConfig> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let mut config: SimConfig =
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("simulation config: {e}")))?;
    if let Some(seed) = args.out.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Runs one parsed command and returns the artifact with its output options.
pub fn execute(cli: &Cli) -> Result<(Output, OutputArgs)> {
    match &cli.command {
        Command::Select(a) => {
            let spec = select_spec(a)?;
            let data = load(&a.data)?;
            Ok((cmd_select(&data, spec, &budget(&a.data), a.data.out.format.into())?, a.data.out.clone()))
        }
        Command::Compare(a) => {
            let specs = compare_specs(a)?;
            let data = load(&a.data)?;
            Ok((cmd_compare(&data, &specs, &budget(&a.data), a.data.out.format.into())?, a.data.out.clone()))
        }
        Command::Mlset(a) => {
            let data = load(a)?;
            Ok((cmd_mlset(&data, &budget(a), a.out.format.into())?, a.out.clone()))
        }
        Command::Fit(a) => {
            let data = load(&a.data)?;
            let names: Vec<String> = a.model.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            let model = parse_model(&data, &names)?;
            Ok((cmd_fit(&data, model, a.data.out.format.into())?, a.data.out.clone()))
        }
        Command::Simulate(a) => {
            let config = read_config(a)?;
            Ok((cmd_simulate(&config, a.out.format.into())?, a.out.clone()))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))
}

fn deliver(output: &Output, opts: &OutputArgs) -> Result<()> {
    match &opts.output {
        Some(path) => std::fs::write(path, &output.artifact).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.artifact.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = configure_threads().and_then(|_| execute(&cli)).and_then(|(output, opts)| {
        let mut seen = std::collections::HashSet::new();
        for w in output.warnings.iter().filter(|w| seen.insert(*w)) {
            eprintln!("warning: {w}");
        }
        deliver(&output, &opts)
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
