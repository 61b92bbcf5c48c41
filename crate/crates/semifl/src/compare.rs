//! Side-by-side view of several `reports.csv` files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::runner::{REPORTS_FILE, REPORT_HEADER};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("need at least two report files, got {0}")]
    TooFew(usize),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: csv::Error },
    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },
    #[error("round grids differ from {}: {}", reference.display(), list(offending))]
    GridMismatch {
        reference: PathBuf,
        offending: Vec<PathBuf>,
    },
}

fn list(paths: &[PathBuf]) -> String {
    let mut out = String::new();
    for (i, p) in paths.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}", p.display());
    }
    out
}

/// One run's columns from its `reports.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSeries {
    pub id: String,
    pub path: PathBuf,
    pub rounds: Vec<u64>,
    pub accuracy: Vec<Option<f64>>,
    pub uplink_bytes_cum: Vec<u64>,
}

/// Runs aligned on a shared round grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rounds: Vec<u64>,
    pub runs: Vec<RunSeries>,
}

/// The run id is the directory holding `reports.csv`, or else the file
/// stem.
pub fn run_id(path: &Path) -> String {
    let named_reports = path.file_name().is_some_and(|n| n == REPORTS_FILE);
    let parent = path.parent().and_then(Path::file_name);
    match (named_reports, parent) {
        (true, Some(dir)) => dir.to_string_lossy().into_owned(),
        _ => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string()),
    }
}

pub fn read_reports(path: &Path) -> Result<RunSeries, CompareError> {
    let read_err = |source| CompareError::Read {
        path: path.to_path_buf(),
        source,
    };
    let format_err = |reason: String| CompareError::Format {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(read_err)?;
    let header = reader.headers().map_err(read_err)?.clone();
    if header.iter().ne(REPORT_HEADER) {
        return Err(format_err(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut series = RunSeries {
        id: run_id(path),
        path: path.to_path_buf(),
        rounds: Vec::new(),
        accuracy: Vec::new(),
        uplink_bytes_cum: Vec::new(),
    };
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(read_err)?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let bad = |name: &str| {
            format_err(format!(
                "row {}: bad {name} `{}`",
                line + 1,
                field(REPORT_HEADER.iter().position(|h| *h == name).unwrap())
            ))
        };
        series
            .rounds
            .push(field(0).parse().map_err(|_| bad("round"))?);
        series.accuracy.push(match field(1) {
            "" => None,
            text => Some(text.parse().map_err(|_| bad("accuracy"))?),
        });
        series
            .uplink_bytes_cum
            .push(field(3).parse().map_err(|_| bad("uplink_bytes_cum"))?);
    }
    Ok(series)
}

/// Reads every file and checks that all share the first file's round grid.
/// Duplicate run ids get a `#n` suffix.
pub fn compare_runs(paths: &[PathBuf]) -> Result<Comparison, CompareError> {
    if paths.len() < 2 {
        return Err(CompareError::TooFew(paths.len()));
    }
    let mut runs = paths
        .iter()
        .map(|p| read_reports(p))
        .collect::<Result<Vec<_>, _>>()?;
    let rounds = runs[0].rounds.clone();
    let offending: Vec<PathBuf> = runs
        .iter()
        .filter(|r| r.rounds != rounds)
        .map(|r| r.path.clone())
        .collect();
    if !offending.is_empty() {
        return Err(CompareError::GridMismatch {
            reference: runs[0].path.clone(),
            offending,
        });
    }
    let mut seen = BTreeSet::new();
    for run in &mut runs {
        let base = run.id.clone();
        let mut n = 1;
        while !seen.insert(run.id.clone()) {
            n += 1;
            run.id = format!("{base}#{n}");
        }
    }
    Ok(Comparison { rounds, runs })
}

impl Comparison {
    pub fn header(&self) -> Vec<String> {
        let mut h = vec![String::from("round")];
        h.extend(self.runs.iter().map(|r| format!("accuracy:{}", r.id)));
        h.extend(
            self.runs
                .iter()
                .map(|r| format!("uplink_bytes_cum:{}", r.id)),
        );
        h
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(self.header())?;
        for (i, round) in self.rounds.iter().enumerate() {
            let mut row = vec![round.to_string()];
            row.extend(
                self.runs
                    .iter()
                    .map(|r| r.accuracy[i].map(|a| a.to_string()).unwrap_or_default()),
            );
            row.extend(self.runs.iter().map(|r| r.uplink_bytes_cum[i].to_string()));
            out.write_record(row)?;
        }
        out.flush()
    }
}
