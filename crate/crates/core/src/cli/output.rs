//! Artifact writers. Every file carries the tool name, version and the
//! resolved configuration; CSV files hold them in leading `#` lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value as Json};

use super::config::{Format, RunConfig};
use super::CliError;

pub const TOOL: &str = "eelab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits; parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn header(cfg: &RunConfig) -> Map<String, Json> {
    let mut m = Map::new();
    m.insert("tool".into(), json!(TOOL));
    m.insert("version".into(), json!(VERSION));
    m.insert(
        "config".into(),
        serde_json::to_value(&cfg.params).expect("config values serialize"),
    );
    m
}

/// JSON report: `payload` fields next to `tool`, `version` and `config`.
pub fn write_report<T: Serialize>(
    dir: &Path,
    name: &str,
    cfg: &RunConfig,
    payload: &T,
) -> Result<PathBuf, CliError> {
    let mut m = header(cfg);
    match serde_json::to_value(payload).expect("report payload serializes") {
        Json::Object(fields) => m.extend(fields),
        other => {
            m.insert("data".into(), other);
        }
    }
    let path = dir.join(format!("{name}.json"));
    let mut text = serde_json::to_string_pretty(&Json::Object(m)).expect("json encodes");
    text.push('\n');
    write_file(&path, &text)?;
    Ok(path)
}

/// A table with fixed column order, written as CSV or as a JSON array of
/// row objects depending on `cfg.format`.
pub fn write_table(
    dir: &Path,
    name: &str,
    cfg: &RunConfig,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{name}.{}", cfg.format.extension()));
    let text = match cfg.format {
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# tool = {TOOL}");
            let _ = writeln!(s, "# version = {VERSION}");
            for (k, v) in &cfg.params {
                let _ = writeln!(s, "# {k} = {v}");
            }
            s.push_str(&columns.join(","));
            s.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut m = header(cfg);
            m.insert("columns".into(), json!(columns));
            let objects: Vec<Json> = rows
                .iter()
                .map(|row| {
                    let mut o = Map::new();
                    for (c, x) in columns.iter().zip(row) {
                        o.insert((*c).to_string(), json!(x));
                    }
                    Json::Object(o)
                })
                .collect();
            m.insert("rows".into(), Json::Array(objects));
            let mut t = serde_json::to_string_pretty(&Json::Object(m)).expect("json encodes");
            t.push('\n');
            t
        }
    };
    write_file(&path, &text)?;
    Ok(path)
}
