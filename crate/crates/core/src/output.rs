//! Result files: CSV tables, spinor snapshots and the JSON run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dirac::SpinorField;
use crate::error::{Error, Result};

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Text(String::new()))
    }
}

pub type Row = Vec<Cell>;

/// Ordered column names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub columns: Vec<String>,
}

impl Schema {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
        }
    }
}

fn text_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders rows as CSV: header first, reals with 17 significant digits, LF
/// line endings. Non-finite reals are refused.
pub fn render_csv(rows: &[Row], schema: &Schema) -> Result<String> {
    let mut out = schema.columns.join(",");
    out.push('\n');
    for (r, row) in rows.iter().enumerate() {
        if row.len() != schema.columns.len() {
            return Err(Error::InvalidInput(format!(
                "row {r} has {} cells, schema has {} columns",
                row.len(),
                schema.columns.len()
            )));
        }
        let cells: Vec<String> = row
            .iter()
            .zip(&schema.columns)
            .map(|(cell, col)| match cell {
                Cell::Real(v) if !v.is_finite() => Err(Error::NonFiniteOutput { column: col.clone() }),
                Cell::Real(v) => Ok(format!("{v:.16e}")),
                Cell::Int(v) => Ok(v.to_string()),
                Cell::Text(s) => Ok(text_field(s)),
            })
            .collect::<Result<_>>()?;
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes a CSV table and returns the SHA-256 of its contents.
pub fn write_results(rows: &[Row], schema: &Schema, path: &Path) -> Result<String> {
    let text = render_csv(rows, schema)?;
    write_atomic(path, text.as_bytes())?;
    Ok(sha256_hex(text.as_bytes()))
}

/// Spinor snapshot as CSV with one row per site.
pub fn snapshot_csv(state: &SpinorField) -> Result<String> {
    let spec = state.spec;
    let rows: Vec<Row> = (0..spec.len())
        .map(|k| {
            let p = spec.position(k);
            vec![
                Cell::Int((k % spec.nx) as i64),
                Cell::Int((k / spec.nx) as i64),
                p[0].into(),
                p[1].into(),
                state.upper[k].re.into(),
                state.upper[k].im.into(),
                state.lower[k].re.into(),
                state.lower[k].im.into(),
            ]
        })
        .collect();
    let schema = Schema::new(&["i", "j", "x", "y", "upper_re", "upper_im", "lower_re", "lower_im"]);
    render_csv(&rows, &schema)
}

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"TDABSNP1";

/// Little-endian binary snapshot: magic, nx and ny as u64, then dx,
/// center x, center y and t as f64, then per site the upper and lower
/// components as (re, im) f64 pairs in storage order.
pub fn snapshot_binary(state: &SpinorField) -> Vec<u8> {
    let spec = state.spec;
    let mut out = Vec::with_capacity(48 + 32 * spec.len());
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&(spec.nx as u64).to_le_bytes());
    out.extend_from_slice(&(spec.ny as u64).to_le_bytes());
    for v in [spec.dx, spec.center[0], spec.center[1], state.t] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for k in 0..spec.len() {
        for v in [state.upper[k].re, state.upper[k].im, state.lower[k].re, state.lower[k].im] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToleranceRecord {
    pub stage: String,
    pub quantity: String,
    pub achieved: f64,
    pub required: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub build: String,
    pub command: String,
    pub config: String,
    pub started: String,
    pub finished: String,
    pub wall_seconds: f64,
    pub tolerances: Vec<ToleranceRecord>,
    pub files: Vec<FileRecord>,
}

/// Collects outputs of one command and writes them with a manifest.
pub struct RunRecorder {
    dir: PathBuf,
    command: String,
    config: String,
    started: SystemTime,
    tolerances: Vec<ToleranceRecord>,
    files: Vec<FileRecord>,
}

impl RunRecorder {
    pub fn new(dir: impl Into<PathBuf>, command: &str, config_text: &str) -> Self {
        Self {
            dir: dir.into(),
            command: command.to_string(),
            config: config_text.to_string(),
            started: SystemTime::now(),
            tolerances: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn tolerance(&mut self, stage: &str, quantity: &str, achieved: f64, required: Option<f64>) {
        self.tolerances.push(ToleranceRecord {
            stage: stage.into(),
            quantity: quantity.into(),
            achieved,
            required,
        });
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.push(FileRecord {
            path: name.into(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, rows: &[Row], schema: &Schema) -> Result<()> {
        let text = render_csv(rows, schema)?;
        self.write_bytes(name, text.as_bytes())
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    /// Writes `manifest.json` and returns the manifest.
    pub fn finish(self) -> Result<RunManifest> {
        let finished = SystemTime::now();
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            build: build_id().into(),
            command: self.command,
            config: self.config,
            started: humantime::format_rfc3339_millis(self.started).to_string(),
            finished: humantime::format_rfc3339_millis(finished).to_string(),
            wall_seconds: finished
                .duration_since(self.started)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            tolerances: self.tolerances,
            files: self.files,
        };
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Io(e.to_string()))?;
        write_atomic(&self.dir.join("manifest.json"), format!("{json}\n").as_bytes())?;
        Ok(manifest)
    }
}

/// Commit the binary was built from, when known.
pub fn build_id() -> &'static str {
    option_env!("TDAB_BUILD_ID").unwrap_or("unknown")
}
