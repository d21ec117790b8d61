use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heatbath::config::{parse_config, RunConfig};
use heatbath::io::read_series_csv;
use heatbath::runner::{self, ExitStatus, Pipeline};

#[derive(Parser)]
#[command(version, about = "Qubit decay into reactive environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bath seed (overrides bath.seed).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Input impedance sweep of the configured circuit.
    Impedance(Common),
    /// Mode frequencies of the configured circuit.
    Dispersion(Common),
    /// Integrate the qubit and bath and analyze the decay.
    Evolve(Common),
    /// Repeat `evolve` over values of one config key.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Key to vary, as section.key.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Concurrent runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Re-run the analysis on an existing series CSV.
    Report {
        series: PathBuf,
        /// Config supplying predictions and analysis windows.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write report.txt here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<RunConfig, ExitStatus> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitStatus::IoError
    })?;
    parse_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitStatus::ConfigError
    })
}

fn resolve(common: &Common) -> Result<RunConfig, ExitStatus> {
    let mut cfg = load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(out) = &common.out {
        cfg.output.directory = out.display().to_string();
    }
    Ok(cfg)
}

fn single(common: &Common, pipeline: Pipeline) -> Result<ExitStatus, ExitStatus> {
    let cfg = resolve(common)?;
    let outcome = runner::run(&cfg, pipeline);
    if let Some(msg) = &outcome.message {
        eprintln!("error: {msg}");
    }
    print!("{}", outcome.report.render());
    println!("output = {}", outcome.directory.display());
    Ok(outcome.status)
}

fn execute(cli: Cli) -> Result<ExitStatus, ExitStatus> {
    match cli.command {
        Command::Impedance(c) => single(&c, Pipeline::Impedance),
        Command::Dispersion(c) => single(&c, Pipeline::Dispersion),
        Command::Evolve(c) => single(&c, Pipeline::Evolve),
        Command::Sweep { common, param, values, jobs } => {
            let cfg = resolve(&common)?;
            let outcome = runner::sweep(&cfg, &param, &values, jobs, Pipeline::Evolve);
            for row in &outcome.rows {
                println!("{} = {:?}", row.value, row.status);
            }
            println!("summary = {}", Path::new(&cfg.output.directory).join(runner::SWEEP_SUMMARY).display());
            Ok(outcome.status)
        }
        Command::Report { series, config, out } => {
            let cfg = config.as_deref().map(load).transpose()?;
            let file = fs::File::open(&series).map_err(|e| {
                eprintln!("error: {}: {e}", series.display());
                ExitStatus::IoError
            })?;
            let data = read_series_csv(file).map_err(|e| {
                eprintln!("error: {}: {e}", series.display());
                ExitStatus::IoError
            })?;
            let report = runner::report(&data, cfg.as_ref()).map_err(|e| {
                eprintln!("error: {e}");
                e.status()
            })?;
            let text = report.render();
            print!("{text}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir).and_then(|_| fs::write(dir.join("report.txt"), &text)).map_err(|e| {
                    eprintln!("error: {}: {e}", dir.display());
                    ExitStatus::IoError
                })?;
            }
            Ok(ExitStatus::Success)
        }
    }
}

fn main() -> ExitCode {
    let status = execute(Cli::parse()).unwrap_or_else(|s| s);
    ExitCode::from(status.code() as u8)
}
