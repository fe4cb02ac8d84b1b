//! `kaczmarz`: runs one experiment and writes its report.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kaczmarz::experiments::{
    atom_transfer_check, divergence_report, fejer_l1_report, lemma3_sweep, parse_orders, partition_check,
    proof_estimate_ratios, simon_suite, theorem1_ratio_suite, verify_kernels_report, CorpusSpec,
    CounterexampleSpec, ExperimentReport,
};
use kaczmarz::{Error, Exponent, System};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "kaczmarz", version, about = "Walsh–Kaczmarz Fejér means: exact experiments and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output path, `-` for stdout; default `reports/<command>-<unix-seconds>.<ext>`
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Refuse resolutions above this
    #[arg(long, global = true, default_value_t = 14)]
    max_resolution: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    Paley,
    Kaczmarz,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Paley => System::Paley,
            SystemArg::Kaczmarz => System::Kaczmarz,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact kernel identities: Skvortsov, dyadic Dirichlet, Gát, κ_n = w_ρ(n)
    VerifyKernels {
        #[arg(long, default_value_t = 7)]
        resolution: u32,
    },
    /// ‖K_n‖_1 for n <= n_max
    FejerL1 {
        #[arg(long, default_value_t = 1024)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = SystemArg::Kaczmarz)]
        system: SystemArg,
    },
    /// Strong Fejér sum over ∥f∥_{H_p}^p on a random corpus
    Theorem1 {
        #[command(flatten)]
        suite: SuiteArgs,
        #[arg(long, default_value = "1/2")]
        p: Exponent,
    },
    /// The counterexample and its weak-type divergence series
    Theorem2 {
        #[arg(long, default_value = "1/4")]
        p: Exponent,
        #[arg(long, default_value = "3/4")]
        phi_exponent: Exponent,
        /// Comma-separated orders |α_k|
        #[arg(long, conflicts_with = "k_max")]
        alpha_orders: Option<String>,
        /// Use |α_k| = 2k + 2 for k <= k_max
        #[arg(long)]
        k_max: Option<u32>,
    },
    /// Kernel integrals on J_N^{m,l} against 2^A/2^{m+l}
    Lemma3 {
        #[arg(long, default_value_t = 3)]
        resolution: u32,
        /// Comma-separated values of A
        #[arg(long, default_value = "4,5")]
        a_values: String,
    },
    /// Skvortsov-term integrals against their bounds, m in (2^N, n_max]
    Estimates {
        #[arg(long, default_value_t = 3)]
        resolution: u32,
        #[arg(long, default_value_t = 32)]
        n_max: u64,
    },
    /// Exhaustive partition checks of the complement of I_N
    Partitions {
        #[arg(long, default_value_t = 10)]
        resolution: u32,
    },
    /// Fejér means of random atoms off their support
    Atoms {
        #[arg(long, default_value = "1/2")]
        p: Exponent,
        #[arg(long, default_value_t = 6)]
        resolution: u32,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Strong partial-sum sum over ∥f∥_{H_p}^p on a random corpus
    Simon {
        #[command(flatten)]
        suite: SuiteArgs,
        #[arg(long, default_value = "3/4")]
        p: Exponent,
    },
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value_t = 5)]
    resolution: u32,
    /// Random atoms and random functions, this many of each
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also run f ≡ 1
    #[arg(long)]
    constant_function: bool,
}

impl SuiteArgs {
    fn corpus(&self) -> CorpusSpec {
        CorpusSpec {
            trials: self.trials,
            seed: self.seed,
            include_counterexample: true,
            include_constant: self.constant_function,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyKernels { .. } => "verify-kernels",
            Command::FejerL1 { .. } => "fejer-l1",
            Command::Theorem1 { .. } => "theorem1",
            Command::Theorem2 { .. } => "theorem2",
            Command::Lemma3 { .. } => "lemma3",
            Command::Estimates { .. } => "estimates",
            Command::Partitions { .. } => "partitions",
            Command::Atoms { .. } => "atoms",
            Command::Simon { .. } => "simon",
        }
    }

    /// Largest resolution the command will work at.
    fn resolution(&self) -> u32 {
        let order_of = |n: u64| 64 - n.saturating_sub(1).leading_zeros();
        match self {
            Command::VerifyKernels { resolution }
            | Command::Partitions { resolution }
            | Command::Atoms { resolution, .. } => *resolution,
            Command::FejerL1 { n_max, .. } => order_of(*n_max),
            Command::Theorem1 { suite, .. } | Command::Simon { suite, .. } => suite.resolution,
            Command::Theorem2 { alpha_orders, k_max, .. } => match (alpha_orders, k_max) {
                (Some(s), _) => parse_orders(s).ok().and_then(|o| o.last().map(|a| a + 1)).unwrap_or(0),
                (None, Some(k)) => 2 * k + 3,
                (None, None) => CounterexampleSpec::default().resolution(),
            },
            Command::Lemma3 { a_values, .. } => parse_orders(a_values).ok().and_then(|v| v.into_iter().max()).map_or(0, |a| a + 1),
            Command::Estimates { resolution, n_max } => (*resolution).max(order_of(*n_max) + 1),
        }
    }
}

fn run(command: &Command) -> kaczmarz::Result<ExperimentReport> {
    match command {
        Command::VerifyKernels { resolution } => verify_kernels_report(*resolution),
        Command::FejerL1 { n_max, system } => fejer_l1_report((*system).into(), *n_max),
        Command::Theorem1 { suite, p } => Ok(theorem1_ratio_suite(*p, suite.resolution, suite.corpus())?.report),
        Command::Simon { suite, p } => Ok(simon_suite(*p, suite.resolution, suite.corpus())?.report),
        Command::Theorem2 { p, phi_exponent, alpha_orders, k_max } => {
            let alpha_orders = match (alpha_orders, k_max) {
                (Some(s), _) => parse_orders(s)?,
                (None, Some(k)) => CounterexampleSpec::default_orders(*k),
                (None, None) => CounterexampleSpec::default().alpha_orders,
            };
            divergence_report(&CounterexampleSpec { p: *p, phi_exponent: *phi_exponent, alpha_orders })
        }
        Command::Lemma3 { resolution, a_values } => lemma3_sweep(*resolution, &parse_orders(a_values)?),
        Command::Estimates { resolution, n_max } => {
            let lo = 1u64.checked_shl(*resolution).ok_or_else(|| Error::InvalidParameter(format!("N = {resolution} too large")))?;
            proof_estimate_ratios(*resolution, lo, *n_max)
        }
        Command::Partitions { resolution } => partition_check(*resolution),
        Command::Atoms { p, resolution, trials, n_max, seed } => atom_transfer_check(*p, *resolution, *trials, *n_max, *seed),
    }
}

fn render(report: &ExperimentReport, format: Format) -> kaczmarz::Result<Vec<u8>> {
    Ok(match format {
        Format::Csv => report.to_csv_string()?.into_bytes(),
        Format::Json => report.to_json_string()?.into_bytes(),
    })
}

fn default_path(command: &str, format: Format) -> PathBuf {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    PathBuf::from("reports").join(format!("{command}-{secs}.{}", format.ext()))
}

fn write_output(bytes: &[u8], path: &PathBuf) -> io::Result<()> {
    if path.as_os_str() == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        return out.flush();
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)
}

fn configure_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var("KACZMARZ_WORKERS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("KACZMARZ_WORKERS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("KACZMARZ_WORKERS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let resolution = cli.command.resolution();
    if resolution > cli.common.max_resolution {
        eprintln!(
            "error: {} needs resolution {resolution}, above --max-resolution {}",
            cli.command.name(),
            cli.common.max_resolution
        );
        return ExitCode::from(EXIT_USAGE);
    }

    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(Error::Io(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let bytes = match render(&report, cli.common.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
    };
    let path = cli
        .common
        .output
        .clone()
        .unwrap_or_else(|| default_path(cli.command.name(), cli.common.format));
    if let Err(e) = write_output(&bytes, &path) {
        eprintln!("error: writing {}: {e}", path.display());
        return ExitCode::from(EXIT_IO);
    }

    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for (k, v) in &report.metadata {
        if k.starts_with("empirical_constant") && !k.ends_with("_f64") || k == "max_ratio" || k == "global_max_f64" {
            eprintln!("{k} = {v}");
        }
    }
    if path.as_os_str() != "-" {
        eprintln!("wrote {}", path.display());
    }
    if report.all_checks_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK)
    }
}
