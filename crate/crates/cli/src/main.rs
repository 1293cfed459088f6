use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ratchet_core::harness::{run_scenario, write_outputs, ExperimentConfig, Format, SCENARIOS};
use ratchet_core::Error;

#[derive(Parser)]
#[command(name = "ratchet", version, about = "Kicked-rotor ratchet scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write its data files.
    Run {
        scenario: String,
        /// TOML config; its scenario field, if set, must match.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: config value, else ./out/<scenario>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweeps.
        #[arg(long)]
        workers: Option<usize>,
        /// Output format; repeat for several.
        #[arg(long, value_enum)]
        format: Vec<CliFormat>,
    },
    /// List registered scenarios.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
    Svg,
}

impl From<CliFormat> for Format {
    fn from(f: CliFormat) -> Self {
        match f {
            CliFormat::Csv => Format::Csv,
            CliFormat::Json => Format::Json,
            CliFormat::Svg => Format::Svg,
        }
    }
}

fn fail(err: &Error) -> ExitCode {
    let record = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
    eprintln!("{record}");
    ExitCode::FAILURE
}

fn run(
    scenario: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    format: Vec<CliFormat>,
) -> Result<Vec<PathBuf>, Error> {
    let mut cfg = match &config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if !cfg.scenario.is_empty() && cfg.scenario != scenario {
        return Err(Error::Config(format!(
            "config is for scenario '{}' but '{scenario}' was requested",
            cfg.scenario
        )));
    }
    cfg.scenario = scenario;
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::InvalidParameter("--workers must be at least 1".into()));
        }
        cfg.numerics.workers = Some(w);
    }
    if !format.is_empty() {
        cfg.output.formats = format.into_iter().map(Format::from).collect();
    }
    if let Some(o) = out {
        cfg.output.dir = Some(o);
    }
    let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&cfg.scenario));

    let result = match cfg.numerics.workers {
        Some(w) if w > 1 => with_pool(w, || run_scenario(&cfg))?,
        _ => run_scenario(&cfg)?,
    };
    write_outputs(&result, &cfg, &dir, &cfg.output.formats)
}

#[cfg(feature = "parallel")]
fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T, Error> + Send) -> Result<T, Error> {
    let pool = ratchet_core::par::thread_pool(workers)?;
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_pool<T: Send>(_workers: usize, f: impl FnOnce() -> Result<T, Error> + Send) -> Result<T, Error> {
    f()
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for (name, about) in SCENARIOS {
                println!("{name:<20} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { scenario, config, out, workers, format } => match run(scenario, config, out, workers, format) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}
