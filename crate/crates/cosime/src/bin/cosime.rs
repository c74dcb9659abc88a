use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cosime::cli::{cmd_cost, cmd_hdc, cmd_mc, cmd_search, cmd_sweep, HdcAction, SweepAxis};
use cosime::config::RunConfig;
use cosime::error::{Error, Result};

/// Behavioral simulator of an in-memory cosine-similarity search engine.
#[derive(Parser)]
#[command(name = "cosime", version, about)]
struct Cli {
    /// Configuration file (TOML). Falls back to $COSIME_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (default: config output_dir, else ./cosime-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the configured Monte Carlo trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Print nothing but errors.
    #[arg(long, global = true, conflicts_with = "verbose")]
    quiet: bool,

    /// Include rail-level detail in reports.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search of a query word against a stored-word file.
    Search {
        /// Stored words: one '0'/'1' word per line.
        #[arg(long)]
        stored: PathBuf,
        /// Query: a single '0'/'1' word.
        #[arg(long)]
        query: PathBuf,
    },
    /// Run the configured Monte Carlo experiment.
    Mc,
    /// Sweep a geometry or margin axis into a CSV.
    Sweep {
        /// rows, dims or margin.
        #[arg(long)]
        axis: String,
    },
    /// Cost estimate and baseline ratio table.
    Cost,
    /// Train or evaluate the classification pipeline.
    Hdc {
        /// train or eval.
        #[arg(long)]
        action: String,
        /// Training CSV (label in last column); needs --test-csv.
        #[arg(long, requires = "test_csv")]
        train_csv: Option<PathBuf>,
        /// Test CSV.
        #[arg(long, requires = "train_csv")]
        test_csv: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = match &cli.config {
        Some(p) => p.clone(),
        None => match std::env::var_os("COSIME_CONFIG") {
            Some(p) => PathBuf::from(p),
            None => {
                return Err(Error::Config(
                    "no configuration: pass --config PATH or set COSIME_CONFIG".into(),
                ))
            }
        },
    };
    let mut cfg = RunConfig::from_path(&path)?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if cli.quiet {
        cfg.verbosity = 0;
    } else if cli.verbose {
        cfg.verbosity = 2;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("cosime-out"));

    let output = match &cli.command {
        Command::Search { stored, query } => cmd_search(&cfg, stored, query, &out_dir)?,
        Command::Mc => cmd_mc(&cfg, cli.trials, &out_dir)?,
        Command::Sweep { axis } => cmd_sweep(&cfg, axis.parse::<SweepAxis>()?, &out_dir)?,
        Command::Cost => cmd_cost(&cfg, &out_dir)?,
        Command::Hdc {
            action,
            train_csv,
            test_csv,
        } => {
            let data = match (train_csv, test_csv) {
                (Some(a), Some(b)) => Some((a.as_path(), b.as_path())),
                _ => None,
            };
            cmd_hdc(&cfg, action.parse::<HdcAction>()?, data, &out_dir)?
        }
    };

    if cfg.verbosity > 0 {
        for line in &output.summary {
            println!("{line}");
        }
        for file in &output.files {
            println!("wrote {}", file.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Exit codes: 0 success, 1 usage, 2 input error, 3 numerical failure.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
