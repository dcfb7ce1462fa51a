//! Artifact writers. Every file starts with a `generated` timestamp and the
//! resolved config; the timestamp is the only run-dependent content.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use gabordual::io::{write_records, write_signal, CsvRecord, Meta};
use gabordual::SampledSignal;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliResult;

pub fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn meta(config: &Value) -> Meta {
    Meta::new().with("generated", unix_time().to_string()).with("config", config.to_string())
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn csv<T: CsvRecord>(path: &Path, config: &Value, rows: &[T]) -> CliResult<()> {
    let mut w = create(path)?;
    write_records(&mut w, &meta(config), rows)?;
    w.flush()?;
    Ok(())
}

pub fn signal(path: &Path, config: &Value, s: &SampledSignal) -> CliResult<()> {
    let mut w = create(path)?;
    write_signal(&mut w, &meta(config), s)?;
    w.flush()?;
    Ok(())
}

/// Pretty JSON object `{"generated", "config", ...body}`.
pub fn json<T: Serialize>(path: &Path, config: &Value, body: &T) -> CliResult<()> {
    let mut obj = Map::new();
    obj.insert("generated".into(), Value::from(unix_time()));
    obj.insert("config".into(), config.clone());
    match serde_json::to_value(body)? {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &Value::Object(obj))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
