use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semifl::config::{DatasetSpec, RunConfig};
use semifl::runner::{run_experiment, RunError};
use semifl::{compare_runs, semifl_core::protocol::Mode};

/// Semi-federated learning simulator.
///
/// Without a subcommand, runs an experiment (same flags as `run`).
#[derive(Parser)]
#[command(version, about, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write reports.csv, ledger.csv and config.json.
    Run(RunArgs),
    /// Align several reports.csv files into one table.
    Compare {
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
        /// Also write the table to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// JSON run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// semifl, semifl_no_sel_no_prune, cl_only or fl_only.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounds: Option<u64>,
    #[arg(long)]
    eval_every: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// IDX directory, or `synthetic`.
    #[arg(long)]
    dataset: Option<String>,
    /// Train devices on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Suppress per-round progress on stderr.
    #[arg(long, short)]
    quiet: bool,
}

fn build_config(args: &RunArgs) -> Result<RunConfig, String> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(rounds) = args.rounds {
        config.rounds = rounds;
    }
    if let Some(k) = args.eval_every {
        config.eval_every = k;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    match args.dataset.as_deref() {
        None => {}
        Some("synthetic") => {
            if !matches!(config.dataset, DatasetSpec::Synthetic { .. }) {
                config.dataset = DatasetSpec::synthetic();
            }
        }
        Some(dir) => {
            let train_fraction = match config.dataset {
                DatasetSpec::FashionMnist { train_fraction, .. } => train_fraction,
                DatasetSpec::Synthetic { .. } => 1.0,
            };
            config.dataset = DatasetSpec::FashionMnist {
                dir: Some(PathBuf::from(dir)),
                train_fraction,
            };
        }
    }
    if args.sequential {
        config.parallel = false;
    }
    Ok(config)
}

fn run(args: &RunArgs) -> Result<(), String> {
    let config = build_config(args)?;
    let quiet = args.quiet;
    let progress = |r: &semifl::semifl_core::protocol::RoundReport| {
        if quiet {
            return;
        }
        match r.evaluation {
            Some(e) => eprintln!(
                "round {:>4}  accuracy {:.4}  loss {:.4}  uplink {}  buffer {}",
                r.round, e.accuracy, e.loss, r.uplink_bytes_cum, r.buffer_size
            ),
            None => eprintln!("round {:>4}  uplink {}", r.round, r.uplink_bytes_cum),
        }
    };
    let output = run_experiment(&config, progress).map_err(|e| match e {
        RunError::Config(c) => c.to_string(),
        other => other.to_string(),
    })?;
    eprintln!("wrote {}", output.config.out_dir.display());
    Ok(())
}

fn compare(reports: &[PathBuf], out: Option<&PathBuf>) -> Result<(), String> {
    let table = compare_runs(reports).map_err(|e| e.to_string())?;
    let stdout = io::stdout();
    table
        .write_csv(stdout.lock())
        .map_err(|e| format!("cannot write to stdout: {e}"))?;
    if let Some(path) = out {
        let file =
            File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        let mut w = BufWriter::new(file);
        table
            .write_csv(&mut w)
            .and_then(|()| w.flush())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Some(Command::Run(args)) => run(args),
        Some(Command::Compare { reports, out }) => compare(reports, out.as_ref()),
        None => run(&cli.run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
