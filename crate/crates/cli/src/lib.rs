//! Command-line driver: parses flags and config files, runs one experiment,
//! writes its CSV, JSON sidecar and plot columns.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Kind};
use output::{persist, ExperimentResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GATE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable that pins the worker count.
pub const THREADS_ENV: &str = "TWLAB_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    /// Accuracy or noise-gate refusal.
    Gate(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Gate(_) => EXIT_GATE,
            Self::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage: {m}"),
            Self::Gate(m) => write!(f, "gate: {m}"),
            Self::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<twlab_core::Error> for CliError {
    fn from(e: twlab_core::Error) -> Self {
        use twlab_core::Error as E;
        match e {
            E::Accuracy { .. } | E::NoiseGate(_) | E::Conditioning(_) => Self::Gate(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "twlab",
    version,
    about = "Edge statistics experiments for sample covariance matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// TW_1 and TW_2 CDF on [-10, 6] with spacing 0.01.
    TwTable(Flags),
    /// Sup error of the edge kernels against their Airy limits.
    KernelRates(Flags),
    /// KS distance of the rescaled largest eigenvalue to TW, per N.
    KsScan(Flags),
    /// Green function comparison along the interpolating flow.
    Gfc(Flags),
    /// Averaged local law and N^{1/3} Im m_N at the edge.
    Locallaw(Flags),
    /// Eigenvalue rigidity and counting discrepancy.
    Rigidity(Flags),
    /// Truncated cumulant expansion against its remainder bound.
    CumulantCheck(Flags),
    /// Monte Carlo averages of the registered Green function terms.
    TermAverage(Flags),
    /// Exact identity suite; exits 0 when every identity holds.
    Selftest(Flags),
}

/// Flags shared by every subcommand; each reads only the ones it needs and
/// the rest are ignored.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML file; the table named after the subcommand is read.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output prefix; .csv, .json and .plot.dat are appended.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Values of N, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Aspect ratio M/N.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Entry law: gaussian, complex-gaussian, rademacher, uniform, skewed[:p].
    #[arg(long)]
    pub dist: Option<String>,
    /// Edge rescaling: paper or ma.
    #[arg(long)]
    pub variant: Option<String>,
    /// Largest-eigenvalue sampler: tridiagonal or dense.
    #[arg(long)]
    pub sampler: Option<String>,
    #[arg(long)]
    pub beta: Option<u8>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Re z; defaults to the upper MP edge.
    #[arg(long)]
    pub energy: Option<f64>,
    /// Im z.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Im z = N^{-eta_exponent} when --eta is absent.
    #[arg(long)]
    pub eta_exponent: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa2: Option<f64>,
    /// Flow times, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    /// Lower end of the KS supremum.
    #[arg(long, allow_hyphen_values = true)]
    pub r0: Option<f64>,
    /// Truncation order of the cumulant expansion.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Test functions: sin-gauss, tanh, poly.
    #[arg(long, value_delimiter = ',')]
    pub functions: Option<Vec<String>>,
    /// Registry term names.
    #[arg(long, value_delimiter = ',')]
    pub terms: Option<Vec<String>>,
    /// Drop the cumulant weight from the terms.
    #[arg(long)]
    pub stripped: bool,
}

impl Flags {
    fn to_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            kind: None,
            dims: self.dims.clone(),
            ratio: self.ratio,
            dist: self.dist.clone(),
            variant: self.variant.clone(),
            sampler: self.sampler.clone(),
            beta: self.beta,
            trials: self.trials,
            seed: self.seed,
            energy: self.energy,
            eta: self.eta,
            eta_exponent: self.eta_exponent,
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            t_grid: self.t_grid.clone(),
            r0: self.r0,
            order: self.order,
            samples: self.samples,
            functions: self.functions.clone(),
            terms: self.terms.clone(),
            stripped: self.stripped.then_some(true),
            output: self.out.clone(),
        }
    }
}

impl Command {
    fn parts(&self) -> (Kind, &Flags) {
        match self {
            Self::TwTable(f) => (Kind::TwTable, f),
            Self::KernelRates(f) => (Kind::KernelRates, f),
            Self::KsScan(f) => (Kind::KsScan, f),
            Self::Gfc(f) => (Kind::Gfc, f),
            Self::Locallaw(f) => (Kind::Locallaw, f),
            Self::Rigidity(f) => (Kind::Rigidity, f),
            Self::CumulantCheck(f) => (Kind::CumulantCheck, f),
            Self::TermAverage(f) => (Kind::TermAverage, f),
            Self::Selftest(f) => (Kind::Selftest, f),
        }
    }
}

/// File config overlaid with flags, then resolved.
pub fn resolve_config(command: &Command) -> Result<ExperimentConfig, CliError> {
    let (kind, flags) = command.parts();
    let mut cfg = match &flags.config {
        Some(p) => ExperimentConfig::from_file(p, kind)?,
        None => ExperimentConfig::default(),
    };
    cfg.overlay(&flags.to_config());
    cfg.resolve(kind)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Usage(format!("{THREADS_ENV} = {v:?} is not a positive integer"))
    })?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Runs one command and returns the process exit code.
pub fn execute(command: &Command) -> Result<i32, CliError> {
    configure_threads()?;
    let cfg = resolve_config(command)?;
    let start = Instant::now();
    let out = commands::run(&cfg)?;
    let result = ExperimentResult {
        config: cfg.clone(),
        data: out.data,
        plot: out.plot,
        summary: out.summary,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    // selftest only writes files when asked to
    if cfg.kind != Some(Kind::Selftest) || cfg.output.is_some() {
        let w = persist(&result)?;
        println!("wrote {}", w.csv.display());
        println!("wrote {}", w.json.display());
        if let Some(p) = w.plot {
            println!("wrote {}", p.display());
        }
    } else {
        print!("{}", String::from_utf8_lossy(&result.data.to_csv()));
    }
    if let Some(g) = out.gate {
        eprintln!("twlab: gate: {g}");
        return Ok(EXIT_GATE);
    }
    Ok(EXIT_OK)
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("twlab: {e}");
            e.exit_code()
        }
    }
}
