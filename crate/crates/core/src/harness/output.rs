use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Crate version recorded in every sidecar.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row.
pub struct CsvTable {
    text: String,
    columns: usize,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let names: Vec<&str> = header.iter().map(|s| s.as_ref()).collect();
        Self {
            text: format!("{}\n", names.join(",")),
            columns: names.len(),
        }
    }

    pub fn push_row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn push_floats(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&x| fmt_float(x)).collect();
        self.push_row(&cells);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Write `contents` to `path` through a temporary sibling and a rename, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
