use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

use super::ExperimentConfig;

/// 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV cell.
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn is_finite(&self) -> bool {
        !matches!(self, Cell::Float(x) if !x.is_finite())
    }
}

/// Output directory `<out>/<experiment>/`.
#[derive(Debug, Clone)]
pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path, name: &str) -> Result<Self> {
        let dir = root.join(name);
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Writes rows under a single header. Rows holding non-finite values are
    /// rejected.
    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for row in rows {
            if row.len() != header.len() {
                return Err(Error::InvalidArgument(format!(
                    "{name}: row width {} != {}",
                    row.len(),
                    header.len()
                )));
            }
            if !row.iter().all(Cell::is_finite) {
                return Err(Error::Numeric(format!("{name}: non-finite value in row")));
            }
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_errors(&self, rows: &[(String, String)]) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join("errors.csv"))?;
        w.write_record(["id", "reason"])?;
        for (id, reason) in rows {
            w.write_record([id, reason])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }

    pub fn write_manifest(&self, resolved: &ExperimentConfig) -> Result<()> {
        self.write_json("manifest.json", resolved)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(name), text)?;
        Ok(())
    }
}

/// `serde_json::Value` for a finite float, `null` otherwise.
pub fn json_f64(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}
