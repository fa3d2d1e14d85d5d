//! Deterministic text output: fixed float formatting and small CSV writers.
//!
//! Every float is printed with 17 significant digits in scientific notation,
//! which round-trips f64 exactly and makes preset re-runs byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Canonical float formatting for all emitted CSV.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{:.16e}", x)
    }
}

/// Line-buffered CSV writer with a fixed header.
pub struct CsvWriter {
    out: std::io::BufWriter<fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut out = std::io::BufWriter::new(fs::File::create(path)?);
        writeln!(out, "{header}")?;
        Ok(CsvWriter { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Write a whole text file, creating parent directories.
pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, content)?;
    Ok(())
}
