use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gwsae_cli::commands::{cmd_bank, cmd_denoise, cmd_eval, cmd_train};
use gwsae_cli::{CliError, PipelineConfig};

#[derive(Debug, Parser)]
#[command(name = "gwsae", version, about = "Chirp template banks and sparse-autoencoder strain denoising")]
struct Cli {
    /// Pipeline configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides training.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for bank generation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the template bank into paths.bank_dir.
    Bank {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train on the bank; writes the model and trace.csv.
    Train {
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Run a strain file through the trained model.
    Denoise {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// SNR metrics and ASD spectra for an input/denoised pair.
    Eval {
        input: PathBuf,
        denoised: PathBuf,
        /// Noise-free reference, enabling oracle SNR and gain.
        #[arg(long)]
        clean: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.training.seed = seed;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?;
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Bank { out: dir } => {
            if let Some(dir) = dir {
                cfg.paths.bank_dir = dir;
            }
            cmd_bank(&cfg, &mut out)?;
        }
        Command::Train { bank, model } => {
            if let Some(bank) = bank {
                cfg.paths.bank_dir = bank;
            }
            if let Some(model) = model {
                cfg.paths.model = model;
            }
            cmd_train(&cfg, &mut out)?;
        }
        Command::Denoise { input, output, model } => {
            let model = model.unwrap_or(cfg.paths.model);
            cmd_denoise(&model, &input, &output, &mut out)?;
        }
        Command::Eval {
            input,
            denoised,
            clean,
            out_dir,
        } => {
            let dir = out_dir.unwrap_or(cfg.paths.output_dir);
            cmd_eval(&input, &denoised, clean.as_deref(), &dir, &mut out)?;
        }
    }
    out.flush().map_err(|e| CliError::Data(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
