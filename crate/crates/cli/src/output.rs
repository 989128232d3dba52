//! Result tables, CSV and plot-data encoding, and atomic persistence.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Floats use the shortest decimal that round-trips.
    pub fn render(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) if v.is_nan() => "nan".into(),
            Self::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Self::Float(v) => format!("{v:?}"),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Self::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.into())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma-separated, LF line endings, header first.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// Whitespace-separated columns for external plotting; the header line
    /// starts with `#`.
    pub fn to_columns(&self) -> Vec<u8> {
        let mut out = format!("# {}\n", self.header.join(" "));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out.into_bytes()
    }
}

/// Everything one run produces.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub data: Table,
    /// Plot columns; `None` for kinds without a figure.
    pub plot: Option<Table>,
    /// Kind-specific summary for the sidecar (fits, gate outcomes).
    pub summary: serde_json::Value,
    pub wall_seconds: f64,
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'static str,
    config: &'a ExperimentConfig,
    config_hash: String,
    seed: Option<u64>,
    version: &'static str,
    wall_seconds: f64,
    threads: usize,
    rows: usize,
    summary: &'a serde_json::Value,
}

/// Paths written by [`persist`].
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plot: Option<PathBuf>,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn staged(dir: &Path, bytes: &[u8]) -> std::io::Result<NamedTempFile> {
    let mut f = NamedTempFile::new_in(dir)?;
    f.write_all(bytes)?;
    f.as_file().sync_all()?;
    Ok(f)
}

/// Writes `<prefix>.csv`, `<prefix>.json` and `<prefix>.plot.dat` through
/// temporary files renamed into place. On failure nothing new is left behind.
pub fn persist(result: &ExperimentResult) -> Result<Written, CliError> {
    let prefix = result.config.output_prefix();
    let dir = match prefix.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", prefix.display()));
    std::fs::create_dir_all(&dir).map_err(io)?;
    let meta = Metadata {
        command: result.config.kind.map(|k| k.name()).unwrap_or("unknown"),
        config: &result.config,
        config_hash: result.config.hash(),
        seed: result.config.seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_seconds: result.wall_seconds,
        threads: rayon::current_num_threads(),
        rows: result.data.rows.len(),
        summary: &result.summary,
    };
    let json = serde_json::to_vec_pretty(&meta).expect("metadata serializes");

    let mut files = vec![
        (with_suffix(&prefix, ".csv"), result.data.to_csv()),
        (with_suffix(&prefix, ".json"), json),
    ];
    if let Some(p) = &result.plot {
        files.push((with_suffix(&prefix, ".plot.dat"), p.to_columns()));
    }
    let mut temps = Vec::with_capacity(files.len());
    for (_, bytes) in &files {
        temps.push(staged(&dir, bytes).map_err(io)?);
    }
    let mut done: Vec<PathBuf> = Vec::new();
    for (tmp, (path, _)) in temps.into_iter().zip(&files) {
        if let Err(e) = tmp.persist(path) {
            for p in &done {
                let _ = std::fs::remove_file(p);
            }
            return Err(io(e.error));
        }
        done.push(path.clone());
    }
    Ok(Written {
        csv: files[0].0.clone(),
        json: files[1].0.clone(),
        plot: files.get(2).map(|f| f.0.clone()),
    })
}
