use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use impedance_core::estimators::{estimate, EstimateError, Method};
use impedance_core::harness::stats_file::StatsFile;
use impedance_core::harness::validate::golden_checks;
use impedance_core::harness::{
    degenerate_fraction, run_capacity, run_sweep, write_csv, ConfigError, ExperimentConfig, HarnessError, SweepRow,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(name = "impedance-lab", version, about = "Antenna impedance estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate F, sigma_h^2 and Z_A from a statistics file.
    Estimate {
        /// Statistics file (TOML).
        #[arg(long, visible_alias = "config", value_name = "PATH")]
        stats: PathBuf,
        /// Overrides the method named in the file.
        #[arg(long)]
        method: Option<Method>,
    },
    /// Relative RMSE of the estimators over an SNR grid.
    Sweep(RunArgs),
    /// Capacity with and without load adaptation over an SNR grid.
    Capacity(RunArgs),
    /// Check the reference constants.
    Validate,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output file; standard output when absent and the config names none.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Estimate { stats, method } => run_estimate(&stats, method),
        Command::Sweep(args) => run_experiment(&args, run_sweep),
        Command::Capacity(args) => run_experiment(&args, run_capacity),
        Command::Validate => run_validate(),
    }
}

fn report_error(e: &HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        HarnessError::Config(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_FAILURE),
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(out) = &args.output {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_rows(rows: &[SweepRow], path: Option<&Path>, format: Format) -> Result<(), HarnessError> {
    match format {
        Format::Csv => match path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                write_csv(rows, &mut w)?;
                w.flush()?;
            }
            None => write_csv(rows, io::stdout().lock())?,
        },
    }
    Ok(())
}

fn run_experiment(args: &RunArgs, run: fn(&ExperimentConfig) -> Result<Vec<SweepRow>, HarnessError>) -> ExitCode {
    let result = load_config(args).and_then(|cfg| {
        let rows = run(&cfg)?;
        write_rows(&rows, cfg.output.as_deref(), args.format)?;
        Ok(rows)
    });
    let rows = match result {
        Ok(rows) => rows,
        Err(e) => return report_error(&e),
    };
    let flagged: usize = rows.iter().map(|r| r.trials_degenerate).sum();
    let frac = degenerate_fraction(&rows);
    eprintln!("{} rows, {flagged} degenerate trials ({:.1}%)", rows.len(), 100.0 * frac);
    if frac > 0.5 {
        eprintln!("more than half of all trials were degenerate");
        return ExitCode::from(EXIT_DEGENERATE);
    }
    ExitCode::SUCCESS
}

fn run_estimate(path: &Path, method: Option<Method>) -> ExitCode {
    let file = match StatsFile::from_path(path) {
        Ok(f) => f,
        Err(e) => return report_error(&e),
    };
    let method = method.or(file.method).unwrap_or(Method::MlFf);
    let spec = match file.channel_spec() {
        Ok(s) => s,
        Err(e) => return report_error(&e),
    };
    if method == Method::MlMp && spec.is_none() {
        return report_error(&HarnessError::Config(ConfigError::Invalid {
            field: "correlation",
            reason: "ML_MP needs a [correlation] table".into(),
        }));
    }
    let report = match estimate(&file.stats, method, spec.as_ref()) {
        Ok(r) => r,
        Err(e @ EstimateError::Degenerate { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_DEGENERATE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    let report = match file.loads {
        Some((z1, z2)) => match report.with_impedances(z1, z2) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("warning: no impedance estimate: {e}");
                report
            }
        },
        None => report,
    };
    println!("method = \"{}\"", report.method);
    println!("F_hat = [{:.16e}, {:.16e}]", report.f_hat.re, report.f_hat.im);
    if let Some(s) = report.sigma_h2_hat {
        println!("sigma_h2_hat = {s:.16e}");
    }
    if let Some(m) = report.mu_hat {
        println!("mu_hat = {m:.16e}");
    }
    if let Some(z) = report.z_a_hat {
        println!("Z_A_hat = [{:.16e}, {:.16e}]", z.re, z.im);
    }
    println!("degenerate = {}", report.degenerate);
    if report.degenerate {
        ExitCode::from(EXIT_DEGENERATE)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_validate() -> ExitCode {
    let checks = golden_checks();
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
