use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Num(x) => Value::from(*x),
            Cell::Text(t) => Value::from(t.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// Tabular result of one experiment with an optional summary.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub report: Option<Value>,
}

#[derive(Serialize)]
struct Document<'a> {
    generated_at_unix: u64,
    experiment: &'static str,
    seed: u64,
    config: &'a RunConfig,
    columns: &'a [&'static str],
    rows: Vec<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a Value>,
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Renders `table`; the first line (CSV) or first key (JSON) holds the
/// generation time and is the only part that varies between reruns.
pub fn render(config: &RunConfig, table: &Table) -> Result<String, CliError> {
    let json_err = |e: serde_json::Error| CliError::Io(e.to_string());
    match config.format {
        Format::Csv => {
            let mut out = format!("# generated_at_unix={}\n", unix_now());
            out += &format!("# experiment={} seed={}\n", config.experiment.name(), config.assembly.rng_seed);
            out += &format!("# config: {}\n", serde_json::to_string(config).map_err(json_err)?);
            if let Some(report) = &table.report {
                out += &format!("# report: {}\n", serde_json::to_string(report).map_err(json_err)?);
            }
            out += &table.columns.join(",");
            out.push('\n');
            for row in &table.rows {
                out += &row.iter().map(Cell::csv).collect::<Vec<_>>().join(",");
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => {
            let doc = Document {
                generated_at_unix: unix_now(),
                experiment: config.experiment.name(),
                seed: config.assembly.rng_seed,
                config,
                columns: &table.columns,
                rows: table.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect(),
                report: table.report.as_ref(),
            };
            let mut text = serde_json::to_string_pretty(&doc).map_err(json_err)?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
