//! Command implementations behind the `egfkit` binary.
//!
//! Each command returns the text destined for stdout so the binary stays a
//! thin wrapper and the commands can be driven directly from tests.
//! Exit codes: 0 ran, 1 bad input or I/O, 2 statistical precondition failed.

pub mod datasets;
pub mod input;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use egfkit::competitors::Statistic;
use egfkit::distributions::{parse_params, DistributionSpec, Family};
use egfkit::egf::{self, EgfQuery};
use egfkit::gof::{self, GofConfig, GofReport, Sidedness};
use egfkit::kde::{BandwidthRule, KdeConfig, KernelSpec};
use egfkit::simharness::{self, SimConfig, SimResult, POWER_GRID, SIZE_GRID};
use egfkit::Sample;

use datasets::{Dataset, Published};

/// Alternatives used by the power preset, in table order.
pub const POWER_ALTERNATIVES: [&str; 8] = [
    "gamma_shifted:0.5",
    "beta_exponential:1",
    "inverse_beta:0.5",
    "tilted_pareto:1",
    "benini:1.5",
    "weibull:1.5",
    "half_normal:-",
    "log_normal:-",
];

pub const SIZE_GENERATOR: &str = "paretoI:1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    pub fn statistical(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<egfkit::Error> for CliError {
    fn from(e: egfkit::Error) -> Self {
        CliError {
            code: if e.is_statistical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "egfkit", version, about = "Weighted entropy generating functions and a Pareto goodness-of-fit test")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the bootstrap goodness-of-fit test on a data file.
    Gof(GofArgs),
    /// Evaluate a generating function of a distribution.
    Egf(EgfArgs),
    /// Monte Carlo size/power grid.
    Simulate(SimulateArgs),
    /// Analyse one of the embedded datasets.
    Datasets(DatasetsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct KdeArgs {
    /// Kernel mixture, e.g. `gaussian` or `0.5:gaussian,0.5:epanechnikov`.
    #[arg(long, default_value = "gaussian")]
    pub kernel: String,
    /// `silverman` or a fixed positive bandwidth.
    #[arg(long, default_value = "silverman")]
    pub bandwidth: String,
}

impl KdeArgs {
    fn config(&self) -> CliResult<KdeConfig> {
        let kernel: KernelSpec = self.kernel.parse().map_err(|e: egfkit::Error| CliError::io(e.to_string()))?;
        let bandwidth_rule: BandwidthRule =
            self.bandwidth.parse().map_err(|e: egfkit::Error| CliError::io(e.to_string()))?;
        Ok(KdeConfig { kernel, bandwidth_rule })
    }
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 500)]
    pub boot: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub kde: KdeArgs,
}

impl TestArgs {
    fn config(&self, sidedness: Option<Sidedness>) -> CliResult<GofConfig> {
        let cfg = GofConfig {
            gamma: self.gamma,
            boot_reps: self.boot,
            kde: self.kde.config()?,
            seed: self.seed,
            sidedness,
        };
        cfg.validate().map_err(|e| CliError::io(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GofArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub test: TestArgs,
    /// delta|ks|cvm|ad|zan|zbn|men
    #[arg(long, default_value = "delta")]
    pub statistic: String,
    /// Reject only for large values of the statistic.
    #[arg(long)]
    pub one_sided: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EgfArgs {
    #[arg(long)]
    pub family: String,
    /// Comma-separated parameters (`-` for none).
    #[arg(long, default_value = "-", allow_hyphen_values = true)]
    pub params: String,
    /// Order of the generating function.
    #[arg(long)]
    pub s: f64,
    /// Residual threshold; requires `--residual`.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub weighted: bool,
    #[arg(long)]
    pub residual: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaperGrid {
    Size,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Preset generator list and sample-size grid.
    #[arg(long, value_enum)]
    pub paper_grid: Option<PaperGrid>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, alias = "param", allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Sample sizes (comma-separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[command(flatten)]
    pub test: TestArgs,
    /// Comma-separated statistics.
    #[arg(long, default_value = "delta")]
    pub statistics: String,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct DatasetsArgs {
    /// floods|rayleigh
    pub which: String,
    #[command(flatten)]
    pub test: TestArgs,
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,
}

pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Gof(a) => cmd_gof(a),
        Command::Egf(a) => cmd_egf(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Datasets(a) => cmd_datasets(a),
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn parse_statistic(s: &str) -> CliResult<Statistic> {
    s.parse().map_err(|e: egfkit::Error| CliError::io(e.to_string()))
}

pub fn cmd_gof(args: &GofArgs) -> CliResult<String> {
    let stat = parse_statistic(&args.statistic)?;
    let cfg = args.test.config(args.one_sided.then_some(Sidedness::Upper))?;
    let sample = input::read_sample(&args.input)?;
    let report = gof::run_bootstrap(&sample, stat, &cfg)?;
    to_json(&report)
}

fn parse_distribution(family: &str, params: &str) -> CliResult<DistributionSpec> {
    let family: Family = family.parse().map_err(|e: egfkit::Error| CliError::io(e.to_string()))?;
    let params = parse_params(params).map_err(|e| CliError::io(e.to_string()))?;
    DistributionSpec::new(family, &params).map_err(|e| CliError::io(e.to_string()))
}

pub fn cmd_egf(args: &EgfArgs) -> CliResult<String> {
    let dist = parse_distribution(&args.family, &args.params)?;
    let value = match (args.residual, args.t) {
        (true, Some(t)) => {
            let q = EgfQuery::new(args.s, t);
            if args.weighted {
                egf::wregf(&dist, q)?
            } else {
                egf::egf_residual(&dist, q)?
            }
        }
        (true, None) => return Err(CliError::io("--residual requires --t")),
        (false, Some(_)) => return Err(CliError::io("--t is only meaningful with --residual")),
        (false, None) if args.weighted => egf::wegf(&dist, args.s)?,
        (false, None) => egf::egf(&dist, args.s)?,
    };
    Ok(format!("{} {} {:e}\n", value.value, value.method.as_str(), value.est_error))
}

/// One simulated generator and its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorResult {
    pub generator: String,
    pub rows: Vec<simharness::SimRow>,
}

fn sim_generators(args: &SimulateArgs) -> CliResult<(Vec<DistributionSpec>, Vec<usize>)> {
    let parse = |s: &str| s.parse::<DistributionSpec>().map_err(|e| CliError::io(e.to_string()));
    let (gens, grid) = match (args.paper_grid, &args.family) {
        (Some(_), Some(_)) => return Err(CliError::io("--paper-grid and --family are mutually exclusive")),
        (Some(PaperGrid::Size), None) => (vec![parse(SIZE_GENERATOR)?], SIZE_GRID.to_vec()),
        (Some(PaperGrid::Power), None) => (
            POWER_ALTERNATIVES.iter().map(|g| parse(g)).collect::<CliResult<Vec<_>>>()?,
            POWER_GRID.to_vec(),
        ),
        (None, Some(f)) => (
            vec![parse_distribution(f, args.params.as_deref().unwrap_or("-"))?],
            Vec::new(),
        ),
        (None, None) => return Err(CliError::io("either --paper-grid or --family is required")),
    };
    let sizes = if args.n.is_empty() { grid } else { args.n.clone() };
    if sizes.is_empty() {
        return Err(CliError::io("no sample sizes given (use --n)"));
    }
    Ok((gens, sizes))
}

pub fn simulate_results(args: &SimulateArgs) -> CliResult<Vec<GeneratorResult>> {
    let statistics = args
        .statistics
        .split(',')
        .map(parse_statistic)
        .collect::<CliResult<Vec<_>>>()?;
    let gof = args.test.config(None)?;
    let (generators, sample_sizes) = sim_generators(args)?;
    generators
        .into_iter()
        .map(|generator| {
            let cfg = SimConfig {
                generator: generator.clone(),
                sample_sizes: sample_sizes.clone(),
                reps: args.reps,
                gof: gof.clone(),
                statistics: statistics.clone(),
            };
            cfg.validate().map_err(|e| CliError::io(e.to_string()))?;
            let SimResult { rows } = simharness::run_grid(&cfg)?;
            Ok(GeneratorResult {
                generator: generator.to_string(),
                rows,
            })
        })
        .collect()
}

/// A single generator prints as a bare CSV table; several are separated by
/// `# generator=…` comment lines, each followed by its own header.
pub fn render_simulation(results: &[GeneratorResult], format: OutputFormat) -> CliResult<String> {
    match format {
        OutputFormat::Json => to_json(&results),
        OutputFormat::Csv => {
            let mut out = String::new();
            for r in results {
                if results.len() > 1 {
                    out.push_str(&format!("# generator={}\n", r.generator));
                }
                out.push_str(&SimResult { rows: r.rows.clone() }.to_csv());
            }
            Ok(out)
        }
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let results = simulate_results(args)?;
    let text = render_simulation(&results, args.format)?;
    match &args.output {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub dataset: Dataset,
    pub n: usize,
    pub report: GofReport,
    pub published: Published,
}

pub fn analyse_dataset(which: Dataset, config: &GofConfig) -> CliResult<DatasetReport> {
    let sample = Sample::new(which.values().to_vec())?;
    let report = gof::bootstrap_test(&sample, config)?;
    Ok(DatasetReport {
        dataset: which,
        n: sample.len(),
        report,
        published: which.published(),
    })
}

fn render_dataset(r: &DatasetReport) -> String {
    let g = &r.report;
    let decision = if g.reject { "reject" } else { "do not reject" };
    let lo = if g.crit_lo == -f64::MAX {
        "-inf".to_string()
    } else {
        format!("{:.6}", g.crit_lo)
    };
    let mut s = String::new();
    s.push_str(&format!("dataset          {} (n = {})\n", r.dataset, r.n));
    s.push_str(&format!("alpha_hat        {:.6}\n", g.alpha_hat));
    s.push_str(&format!("delta_hat        {:.6}\n", g.delta_hat));
    s.push_str(&format!("critical region  [{lo}, {:.6}]\n", g.crit_hi));
    s.push_str(&format!(
        "settings         gamma = {}, B = {}, seed = {}, sidedness = {}\n",
        g.gamma,
        g.boot_reps,
        g.seed,
        match g.sidedness {
            Sidedness::TwoSided => "two_sided",
            Sidedness::Upper => "upper",
        }
    ));
    s.push_str(&format!("decision         {decision}\n"));
    s.push_str("\npublished vs computed\n");
    s.push_str(&format!("{:<12}{:>12}{:>12}\n", "quantity", "published", "computed"));
    s.push_str(&format!("{:<12}{:>12.4}{:>12.4}\n", "alpha_hat", r.published.alpha_hat, g.alpha_hat));
    s.push_str(&format!("{:<12}{:>12.4}{:>12.4}\n", "delta_hat", r.published.delta_hat, g.delta_hat));
    s.push_str(&format!("{:<12}{:>12}{:>12}\n", "reject", r.published.reject, g.reject));
    s
}

pub fn cmd_datasets(args: &DatasetsArgs) -> CliResult<String> {
    let which: Dataset = args.which.parse().map_err(CliError::io)?;
    let report = analyse_dataset(which, &args.test.config(None)?)?;
    if args.json {
        to_json(&report)
    } else {
        Ok(render_dataset(&report))
    }
}
