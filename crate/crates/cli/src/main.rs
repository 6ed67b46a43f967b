mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failure classes, mapped to exit codes 1, 2 and 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<emitter_core::Error> for CliError {
    fn from(e: emitter_core::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "emitter", version, about = "Inverse design of narrowband multilayer thermal emitters")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Override any configuration key, e.g. `--set fom.temperature_k=600`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate seed designs by filtered random search and augment them.
    GenData {
        /// Target wavelength in micrometres.
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Smallest figure of merit a seed may have.
        #[arg(long, allow_negative_numbers = true)]
        min_fom: Option<f64>,
        #[arg(long)]
        max_attempts: Option<usize>,
        /// Variants per seed; 0 keeps the seeds only.
        #[arg(long)]
        augment_factor: Option<usize>,
    },
    /// Train the adversarial autoencoder on a dataset.
    Train {
        /// Dataset directory (default: <out>/dataset).
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Run optimization rounds.
    Optimize {
        /// `hybrid`, `direct` or `brute-force`.
        #[arg(long)]
        mode: Option<String>,
        /// Target wavelength in micrometres.
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        rounds: Option<usize>,
        /// Distinct designs scored per round.
        #[arg(long)]
        budget: Option<usize>,
        /// Uniform random evaluations before the surrogate takes over.
        #[arg(long)]
        n_init: Option<usize>,
        /// Trained model (default: <out>/model.aae).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Rounds run concurrently.
        #[arg(long)]
        parallel_rounds: Option<usize>,
    },
    /// Optical and figure-of-merit analysis of one design.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Summarize run directories into figure tables.
    Compare {
        /// Directories holding run files (default: <out>/runs).
        #[arg(long, num_args = 1..)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        rounds: Option<usize>,
        /// Also draw the averaged histories as SVG.
        #[arg(long)]
        svg: bool,
    },
    /// Score every design of a short stack.
    BruteForce {
        /// Stack length; at most 20.
        #[arg(long)]
        layers: usize,
        /// Target wavelength in micrometres.
        #[arg(long)]
        target: Option<f64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Debug, Args)]
pub struct Design {
    /// Layer bits, top layer first (0 = Ge, 1 = SiO2).
    #[arg(long)]
    pub bits: String,
    #[arg(long)]
    pub target: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Analysis {
    /// Emissivity on the figure-of-merit grid.
    Spectrum {
        #[command(flatten)]
        design: Design,
        /// Incidence angle in degrees.
        #[arg(long)]
        angle: Option<f64>,
        /// `s` or `p`.
        #[arg(long)]
        polarization: Option<String>,
        #[arg(long)]
        svg: bool,
    },
    /// Emissivity over incidence angle and wavelength.
    Angular {
        #[command(flatten)]
        design: Design,
        /// `s` or `p`.
        #[arg(long)]
        polarization: Option<String>,
    },
    /// Normalized field amplitude versus depth at normal incidence.
    Field {
        #[command(flatten)]
        design: Design,
        #[arg(long)]
        wavelength: Option<f64>,
    },
    /// Figure-of-merit breakdown.
    Fom {
        #[command(flatten)]
        design: Design,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
