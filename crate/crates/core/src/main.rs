use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::Ordering;

use clap::{Parser, Subcommand};

use starris::harness::{self, Method, SweepSpec, SweepVariable};
use starris::scenario::{read_config, ScenarioConfig};
use starris::{Error, Result};

/// Exit status when a run is cut short by an interrupt (partial CSV kept).
const EXIT_INTERRUPTED: u8 = 130;
/// Exit status when a selftest check fails.
const EXIT_SELFTEST: u8 = 4;

#[derive(Parser)]
#[command(name = "starris", version, about = "STAR-RIS bistatic ISAC simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write results.csv plus plots.
    Run {
        /// Scenario file (`key = value` lines); defaults apply otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        /// n_jam, detector_distance or n_ris.
        #[arg(long)]
        sweep: String,
        /// Comma-separated sweep values, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated subset of safe_isac, random_phase_star, reflect_only_ris.
        #[arg(long, value_delimiter = ',', default_value = "safe_isac,random_phase_star,reflect_only_ris")]
        methods: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record per-method solve times (makes the CSV run-dependent).
        #[arg(long)]
        record_timing: bool,
    },
    /// Run the built-in oracle and property checks.
    Selftest,
    /// Render plots from an existing results CSV.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Label of the horizontal axis.
        #[arg(long, default_value = "sweep value")]
        x_label: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, sweep, values, trials, methods, out, seed, record_timing } => {
            run(config, &sweep, values, trials, &methods, out, seed, record_timing)
        }
        Command::Selftest => Ok(selftest()),
        Command::Plot { csv, out, x_label } => plot(csv, out, &x_label),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run(
    config: Option<PathBuf>,
    sweep: &str,
    values: Vec<f64>,
    trials: usize,
    methods: &[String],
    out: PathBuf,
    seed: u64,
    record_timing: bool,
) -> Result<ExitCode> {
    let base = match &config {
        Some(path) => read_config(path)?,
        None => ScenarioConfig::default(),
    };
    let variable: SweepVariable = sweep.parse()?;
    let methods = methods.iter().map(|m| m.trim().parse::<Method>()).collect::<Result<Vec<_>>>()?;
    let spec = SweepSpec { variable, values, n_trials: trials, methods, base, seed_base: seed, record_timing };
    spec.validate()?;
    std::fs::create_dir_all(&out)?;

    ctrlc::set_handler(|| harness::INTERRUPTED.store(true, Ordering::SeqCst))
        .map_err(|e| Error::Config(format!("cannot install interrupt handler: {e}")))?;

    let result = harness::run_sweep(&spec)?;
    let csv_path = out.join("results.csv");
    harness::write_csv_file(&csv_path, &result)?;
    if result.partial {
        eprintln!("interrupted: wrote {} rows to {}", result.rows.len(), csv_path.display());
        return Ok(ExitCode::from(EXIT_INTERRUPTED));
    }
    harness::emit_plots(&result, &out, variable.as_str())?;
    eprintln!("wrote {} rows to {}", result.rows.len(), csv_path.display());
    if !result.any_feasible() {
        eprintln!("no trial met its constraints");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn selftest() -> ExitCode {
    let checks = starris::selftest::run_all();
    let mut ok = true;
    for c in &checks {
        println!("{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SELFTEST)
    }
}

fn plot(csv: PathBuf, out: PathBuf, x_label: &str) -> Result<ExitCode> {
    let file = std::fs::File::open(&csv)?;
    let result = harness::read_csv(file)?;
    let written = harness::emit_plots(&result, &out, x_label)?;
    eprintln!("wrote {} plots to {}", written.len(), out.display());
    Ok(ExitCode::SUCCESS)
}
