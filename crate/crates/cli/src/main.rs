//! `bumpscan`: find the maximum-discrepancy rectangle in a CSV point file.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bumpscan::io::{emit_plot, load_dataset, RunReport, StageTiming};
use bumpscan::scan::{self, Mode, ScanConfig};
use bumpscan::{DiscrepancyKind, Error};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Func {
    Kulldorff,
    Gaussian,
    Bernoulli,
    Gamma,
    Js,
}

impl From<Func> for DiscrepancyKind {
    fn from(f: Func) -> Self {
        match f {
            Func::Kulldorff => Self::Kulldorff,
            Func::Gaussian => Self::Gaussian,
            Func::Bernoulli => Self::Bernoulli,
            Func::Gamma => Self::Gamma,
            Func::Js => Self::JensenShannon,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Additive,
    Relative,
}

/// Scan a CSV of weighted points (header x,y,m,b[,t]) for the rectangle that
/// maximizes a convex discrepancy, and print a key: value report.
///
/// Exit status: 0 on success, 2 when no rectangle meets the support
/// constraint, 1 on bad input.
#[derive(Debug, Parser)]
#[command(name = "bumpscan", version)]
struct Cli {
    /// Input CSV file.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "kulldorff")]
    func: Func,
    /// Approximation parameter.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, value_enum, default_value = "additive")]
    mode: ModeArg,
    /// Support constant C: regions need m_R, b_R in [C/n, 1 - C/n].
    #[arg(long, default_value_t = 1.0)]
    support: f64,
    /// Only report regions where the measurement share exceeds the baseline share.
    #[arg(long)]
    one_sided: bool,
    /// Scan (rectangle, time suffix) pairs; needs a t column.
    #[arg(long)]
    prospective: bool,
    /// Randomization replicas for the p-value (0 disables it).
    #[arg(long, default_value_t = 0)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exhaustive search instead of the approximation (small inputs only).
    #[arg(long)]
    exact: bool,
    /// Write plot data (points plus a RECT record) to this file.
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
    /// Also write the report as JSON to this file.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Append per-stage wall-clock times to the report.
    #[arg(long)]
    timings: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("BUMPSCAN_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("BUMPSCAN_THREADS must be a count, got '{raw}'"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let mut timings = Vec::new();
    let mut stage = |name: &str, start: Instant| {
        timings.push(StageTiming { stage: name.to_owned(), seconds: start.elapsed().as_secs_f64() })
    };

    let start = Instant::now();
    let store = load_dataset(&cli.input)?;
    stage("load", start);

    let config = ScanConfig {
        function: cli.func.into(),
        epsilon: cli.eps,
        mode: match cli.mode {
            ModeArg::Additive => Mode::Additive,
            ModeArg::Relative => Mode::Relative,
        },
        support_c: cli.support,
        one_sided: cli.one_sided,
        replicas: if cli.exact { 0 } else { cli.replicas },
        seed: cli.seed,
        ..ScanConfig::default()
    };
    config.validate()?;
    if cli.exact && cli.replicas > 0 {
        log::warn!("--replicas is ignored with --exact");
    }

    let start = Instant::now();
    let result = match (cli.exact, cli.prospective) {
        (false, false) => scan::max_discrepancy_approx(&store, &config)?,
        (false, true) => scan::max_discrepancy_prospective(&store, &config)?,
        (true, false) => scan::max_discrepancy_exact(&store, &config)?,
        (true, true) => scan::max_discrepancy_exact_prospective(&store, &config)?,
    };
    stage("scan", start);

    if let (Some(path), Some(r)) = (&cli.plot, &result) {
        let start = Instant::now();
        emit_plot(&store, r, path)?;
        stage("plot", start);
    }

    let mut report = RunReport::new(&config, store.len(), cli.prospective, cli.exact, result.as_ref());
    report.replicas = cli.replicas;
    if cli.timings {
        report.timings = timings;
    }
    print!("{}", report.to_text());
    if let Some(path) = &cli.json {
        std::fs::write(path, report.to_json()).map_err(|source| Error::File { path: path.clone(), source })?;
    }
    Ok(if report.feasible { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
