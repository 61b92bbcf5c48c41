//! Running a configured experiment and persisting its artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use semifl_core::data::{generate_synthetic, Dataset};
use semifl_core::edge::CommLedger;
use semifl_core::nn::ModelParams;
use semifl_core::protocol::{build_devices, Executor, RoundReport, Sequential, Simulation};
use semifl_core::seed::{derive_seed, Purpose};

use crate::config::{ConfigError, DatasetSpec, RunConfig};
use crate::io::{load_fashion_mnist, resolve_data_dir, LoadError};
use crate::parallel::RayonExecutor;

pub const REPORTS_FILE: &str = "reports.csv";
pub const LEDGER_FILE: &str = "ledger.csv";
pub const CONFIG_FILE: &str = "config.json";

pub const REPORT_HEADER: [&str; 6] = [
    "round",
    "accuracy",
    "loss",
    "uplink_bytes_cum",
    "downlink_bytes_cum",
    "buffer_size",
];
pub const LEDGER_HEADER: [&str; 5] = ["round", "device", "direction", "kind", "bytes"];

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("simulation failed: {0}")]
    Simulation(#[from] semifl_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// The configuration as written to `config.json`.
    pub config: RunConfig,
    pub reports: Vec<RoundReport>,
    pub ledger: CommLedger,
}

/// Fills in everything a default leaves implicit, so the written config
/// reproduces the run without the environment.
pub fn resolve(config: &RunConfig) -> Result<RunConfig, RunError> {
    config.validate()?;
    let mut resolved = config.clone();
    if let DatasetSpec::FashionMnist { dir, .. } = &mut resolved.dataset {
        *dir = Some(resolve_data_dir(dir.as_deref())?);
    }
    Ok(resolved)
}

/// Train and test sets for `config`.
pub fn load_datasets(config: &RunConfig) -> Result<(Dataset, Dataset), RunError> {
    match &config.dataset {
        DatasetSpec::FashionMnist {
            dir,
            train_fraction,
        } => {
            let dir = resolve_data_dir(dir.as_deref())?;
            let (train, test) = load_fashion_mnist(&dir)?;
            let train = if *train_fraction < 1.0 {
                train.subsample(*train_fraction, config.seed)?
            } else {
                train
            };
            Ok((train, test))
        }
        DatasetSpec::Synthetic {
            train_samples,
            test_samples,
            dim,
            classes,
        } => {
            let all =
                generate_synthetic(train_samples + test_samples, *classes, *dim, config.seed)?;
            Ok(all.split_at(*train_samples)?)
        }
    }
}

fn evaluates(config: &RunConfig, round: u64) -> bool {
    round % config.eval_every == 0 || round == config.rounds
}

/// Runs all rounds in memory. `on_round` sees each report as it is produced.
pub fn simulate(
    config: &RunConfig,
    train: &Dataset,
    test: &Dataset,
    mut on_round: impl FnMut(&RoundReport),
) -> Result<(Vec<RoundReport>, CommLedger), RunError> {
    config.validate()?;
    let devices = build_devices(
        train,
        &config.capabilities(),
        config.threshold,
        config.labels_per_device,
        config.seed,
    )?;
    let dims = [train.dim(), config.hidden_units, train.num_classes()];
    let initial = ModelParams::init(&dims, derive_seed(config.seed, Purpose::ModelInit, 0, 0))?;
    let mut sim = Simulation::new(
        train,
        devices,
        initial,
        config.strategy(),
        config.mode,
        config.seed,
    )?;
    let mut reports = Vec::with_capacity(config.rounds as usize);
    for round in 1..=config.rounds {
        let test = evaluates(config, round).then_some(test);
        let report = if config.parallel {
            step(&mut sim, &RayonExecutor, test)?
        } else {
            step(&mut sim, &Sequential, test)?
        };
        on_round(&report);
        reports.push(report);
    }
    Ok((reports, sim.ledger().clone()))
}

fn step<E: Executor>(
    sim: &mut Simulation<'_>,
    exec: &E,
    test: Option<&Dataset>,
) -> Result<RoundReport, RunError> {
    Ok(sim.run_round(exec, test)?)
}

/// Resolves, loads, simulates, and writes `reports.csv`, `ledger.csv` and
/// `config.json` into `config.out_dir`.
pub fn run_experiment(
    config: &RunConfig,
    on_round: impl FnMut(&RoundReport),
) -> Result<RunOutput, RunError> {
    let config = resolve(config)?;
    let (train, test) = load_datasets(&config)?;
    let (reports, ledger) = simulate(&config, &train, &test, on_round)?;
    write_artifacts(&config, &reports, &ledger)?;
    Ok(RunOutput {
        config,
        reports,
        ledger,
    })
}

pub fn write_artifacts(
    config: &RunConfig,
    reports: &[RoundReport],
    ledger: &CommLedger,
) -> Result<(), RunError> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|source| RunError::Write {
        path: dir.clone(),
        source,
    })?;
    write_file(&dir.join(CONFIG_FILE), |w| {
        w.write_all(config.to_json().as_bytes())
    })?;
    write_file(&dir.join(REPORTS_FILE), |w| write_reports(reports, w))?;
    write_file(&dir.join(LEDGER_FILE), |w| write_ledger(ledger, w))?;
    Ok(())
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), RunError> {
    let wrap = |source| RunError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    body(&mut w).map_err(wrap)?;
    w.flush().map_err(wrap)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

// `{}` on f64 prints the shortest string that parses back to the same bits.
fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_reports<W: Write>(reports: &[RoundReport], w: W) -> std::io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(REPORT_HEADER)?;
    for r in reports {
        out.write_record([
            r.round.to_string(),
            opt(r.evaluation.map(|e| e.accuracy)),
            opt(r.evaluation.map(|e| e.loss)),
            r.uplink_bytes_cum.to_string(),
            r.downlink_bytes_cum.to_string(),
            r.buffer_size.to_string(),
        ])?;
    }
    out.flush()
}

pub fn write_ledger<W: Write>(ledger: &CommLedger, w: W) -> std::io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(LEDGER_HEADER)?;
    for t in ledger.entries() {
        out.write_record([
            t.round.to_string(),
            t.device.to_string(),
            t.direction.as_str().to_string(),
            t.kind.as_str().to_string(),
            t.bytes.to_string(),
        ])?;
    }
    out.flush()
}
