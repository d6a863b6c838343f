//! `harmonic-certify`: experiments, bound checks and certificates from the
//! command line. Exit status is 0 when every checked inequality holds, 1 when
//! some inequality is violated and 2 on errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use harmonic_core::experiments::{
    run_bound_suite, run_figure1, run_sharpness, run_vandermonde_sweep, to_csv, ExperimentConfig,
    Scenario, VandermondeMode, VandermondeRow,
};
use harmonic_core::localizing::{phi, phi_hat, DilatedLocalizer};
use harmonic_core::noise::{apost_certificate, apost_certificate_with_truth};
use harmonic_core::bounds::symmetric_threshold;
use harmonic_core::estimation::estimate;
use harmonic_core::{ExponentialSum, SampleGrid};

#[derive(Parser)]
#[command(name = "harmonic-certify", version, about = "Stability bounds and error certificates for sparse frequency estimation")]
struct Cli {
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the number of trials of the configuration.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noisy ESPRIT study with a posteriori certificates.
    Figure1(ExperimentArgs),
    /// Energy of 1 − e^{2πiτx} against the phase-free pair bound.
    Sharpness(ExperimentArgs),
    #[command(subcommand)]
    Vandermonde(VandermondeCommand),
    #[command(subcommand)]
    Bounds(BoundsCommand),
    #[command(subcommand)]
    Phi(PhiCommand),
    /// ESPRIT plus least squares on a sample file.
    Estimate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        window: Option<usize>,
    },
    /// A posteriori certificate for an estimate.
    Apost {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        delta: f64,
        /// Separation parameter, default 3/(2N+2).
        #[arg(long)]
        q: Option<f64>,
        /// Ground truth; enables the error evaluation.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum VandermondeCommand {
    /// Random sweep of smallest singular values against the lower bounds.
    Verify {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Separated,
    Pairs,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Evaluates one scenario file or suite reproducer.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the reproducer's value, else 1.
        #[arg(long)]
        perturbation: Option<f64>,
    },
    /// Randomized suite over all bounds.
    Suite(ExperimentArgs),
}

#[derive(Subcommand)]
enum PhiCommand {
    /// Tabulates φ (or φ̂ with --fourier) on `a:b:n`.
    Eval {
        #[arg(long)]
        grid: String,
        /// Evaluate the dilation φ_N instead.
        #[arg(long)]
        dilate: Option<usize>,
        #[arg(long)]
        fourier: bool,
    },
}

/// A bare scenario, or a suite reproducer carrying its perturbation.
#[derive(Deserialize)]
#[serde(untagged)]
enum CheckInput {
    Reproducer { perturbation: f64, scenario: Scenario },
    Scenario(Scenario),
}

/// Samples `s[k]` for `k = start, start+1, …`.
#[derive(Serialize, Deserialize)]
struct SampleFile {
    start: i64,
    samples: Vec<Complex64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_config(cli: &Cli, path: Option<&Path>) -> Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    config.validate()?;
    Ok(config)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("grid must look like a:b:n, got {spec}");
    };
    let (a, b): (f64, f64) = (a.parse()?, b.parse()?);
    let n: usize = n.parse()?;
    if n == 0 {
        bail!("grid needs at least one point");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// Returns whether every checked inequality held.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Figure1(args) => {
            let config = load_config(cli, args.config.as_deref())?;
            let output = run_figure1(&config)?;
            write(&args.out.join("figure1.csv"), &to_csv(&output.rows)?)?;
            write(&args.out.join("figure1_trials.csv"), &to_csv(&output.trials)?)?;
            let violations = output.violations();
            println!("figure1: {} noise levels, {} violations", output.rows.len(), violations);
            Ok(violations == 0)
        }
        Command::Sharpness(args) => {
            let config = load_config(cli, args.config.as_deref())?;
            let rows = run_sharpness(&config)?;
            write(&args.out.join("sharpness.csv"), &to_csv(&rows)?)?;
            let bad = rows.iter().filter(|r| !r.holds || r.ratio < 1.0).count();
            println!("sharpness: {} rows, {} violations", rows.len(), bad);
            Ok(bad == 0)
        }
        Command::Vandermonde(VandermondeCommand::Verify { mode, config, out }) => {
            let config = load_config(cli, config.as_deref())?;
            let mode = match mode {
                Mode::Separated => VandermondeMode::Separated,
                Mode::Pairs => VandermondeMode::Pairs,
            };
            let reports = run_vandermonde_sweep(&config, mode)?;
            let rows: Vec<VandermondeRow> = reports.iter().map(VandermondeRow::from).collect();
            write(out, &to_csv(&rows)?)?;
            let bad = reports.iter().filter(|r| !r.holds).count();
            println!("vandermonde: {} configurations, {} violations", reports.len(), bad);
            Ok(bad == 0)
        }
        Command::Bounds(BoundsCommand::Check { config, perturbation }) => {
            let (scenario, recorded) = match read_json::<CheckInput>(config)? {
                CheckInput::Reproducer { perturbation, scenario } => (scenario, perturbation),
                CheckInput::Scenario(scenario) => (scenario, 1.0),
            };
            let report = scenario.evaluate(perturbation.unwrap_or(recorded))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            println!("{}", harmonic_core::bounds::BoundReport::CSV_HEADER);
            println!("{}", report.csv_row());
            Ok(report.holds)
        }
        Command::Bounds(BoundsCommand::Suite(args)) => {
            let config = load_config(cli, args.config.as_deref())?;
            let summary = run_bound_suite(&config)?;
            write(&args.out.join("suite.json"), &serde_json::to_string_pretty(&summary)?)?;
            for (i, failure) in summary.failures.iter().enumerate() {
                let path = args.out.join("reproducers").join(format!("{i:04}_{}.json", failure.label));
                write(&path, &serde_json::to_string_pretty(failure)?)?;
            }
            println!(
                "bound suite: {} checks, {} passed, {} failed",
                summary.total, summary.passed, summary.failed
            );
            Ok(summary.failed == 0)
        }
        Command::Phi(PhiCommand::Eval { grid, dilate, fourier }) => {
            let points = parse_range(grid)?;
            let localizer = dilate.map(DilatedLocalizer::new).transpose()?;
            let mut out = String::from(if *fourier { "w,value_re,value_im\n" } else { "x,value_re,value_im\n" });
            for x in points {
                let v = match (&localizer, fourier) {
                    (Some(l), true) => l.phi_hat(x),
                    (Some(l), false) => Complex64::new(l.phi(x), 0.0),
                    (None, true) => phi_hat(x),
                    (None, false) => Complex64::new(phi(x), 0.0),
                };
                out.push_str(&format!("{},{},{}\n", x, v.re, v.im));
            }
            print!("{out}");
            Ok(true)
        }
        Command::Estimate { input, order, window } => {
            let file: SampleFile = read_json(input)?;
            if file.samples.len() < 2 {
                bail!("need at least two samples");
            }
            let grid = SampleGrid::new(file.start, file.start + file.samples.len() as i64 - 1)?;
            let result = estimate(&file.samples, &grid, *order, *window)?;
            println!("{}", serde_json::to_string_pretty(&result.to_sum()?)?);
            Ok(true)
        }
        Command::Apost { samples, estimate, sigma, delta, q, truth } => {
            let file: SampleFile = read_json(samples)?;
            let len = file.samples.len() as i64;
            if len % 2 == 0 || file.start != -(len - 1) / 2 {
                bail!("samples must cover −N..N");
            }
            let n = ((len - 1) / 2) as usize;
            let g: ExponentialSum = read_json(estimate)?;
            let q = q.unwrap_or_else(|| symmetric_threshold(n));
            let cert = match truth {
                Some(path) => {
                    let f: ExponentialSum = read_json(path)?;
                    apost_certificate_with_truth(&file.samples, &g, &f, n, *sigma, *delta, q)?
                }
                None => apost_certificate(&file.samples, &g, n, *sigma, *delta, q)?,
            };
            println!("{}", serde_json::to_string_pretty(&cert)?);
            Ok(cert.estimate_holds != Some(false))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
