//! `massscale`: mass scaling experiments on hexahedral models.

mod config;
mod emit;
mod studies;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, ExperimentConfig, DEFAULT_SEED};
use emit::Emitter;
use studies::{AppError, Sections, Study};

#[derive(Parser, Debug)]
#[command(
    name = "massscale",
    version,
    about = "Mass scaling experiments for explicit structural dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for stochastic steps; overrides the config (default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Every study enabled in the config.
    Run,
    /// Element spectra and Rayleigh tables.
    ElementSpectrum,
    /// Global spectra and frequency-ratio curves.
    Spectrum,
    /// Eigenvalue and condition-number bounds.
    Bounds,
    /// Parameter sweeps.
    Sweep,
    /// Critical-step brackets with the central difference method.
    Integrate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::ElementSpectrum => "element-spectrum",
            Command::Spectrum => "spectrum",
            Command::Bounds => "bounds",
            Command::Sweep => "sweep",
            Command::Integrate => "integrate",
        }
    }

    fn sections(self, cfg: &ExperimentConfig) -> Sections {
        let s = cfg.studies;
        match self {
            Command::Run => Sections {
                element: s.element,
                spectrum: s.global,
                bounds: s.condition,
                sweep: !cfg.sweeps.is_empty(),
                integrate: s.stability,
            },
            Command::ElementSpectrum => Sections {
                element: true,
                ..Default::default()
            },
            Command::Spectrum => Sections {
                spectrum: true,
                ..Default::default()
            },
            Command::Bounds => Sections {
                bounds: true,
                ..Default::default()
            },
            Command::Sweep => Sections {
                sweep: true,
                ..Default::default()
            },
            Command::Integrate => Sections {
                integrate: true,
                ..Default::default()
            },
        }
    }
}

enum Failure {
    Config(String),
    Internal(String),
}

impl From<AppError> for Failure {
    fn from(e: AppError) -> Self {
        match e {
            AppError::Config(c) => Failure::Config(c.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn execute(cli: &Cli) -> Result<Vec<String>, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("--config: required".into()))?;
    let cfg = ExperimentConfig::load(path)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .ok_or_else(|| Failure::Config("output: give --out or an output field".into()))?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    if cli.threads == Some(0) {
        return Err(Failure::Config("--threads: must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let sections = cli.command.sections(&cfg);
    if matches!(cli.command, Command::Sweep) && cfg.sweeps.is_empty() {
        return Err(Failure::Config(
            "sweeps: the sweep command needs at least one sweep".into(),
        ));
    }
    let mut emitter = Emitter::new(&out_dir)
        .map_err(|e| Failure::Internal(format!("{}: {e}", out_dir.display())))?;
    pool.install(|| -> Result<(), AppError> {
        let mut study = Study::new(&cfg, seed)?;
        study.run(sections, &mut emitter)
    })?;
    emitter
        .finish(&cfg, seed, cli.command.name())
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("{f}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
