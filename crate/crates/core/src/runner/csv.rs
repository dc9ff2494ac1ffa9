//! Two-column plot-ready text files.
//!
//! Layout: a header line `# <x-name>,<y-name>` followed by one `x,y` row per
//! point, each value in scientific notation with 17 significant digits, every
//! line newline-terminated. Files are written to a temporary sibling and
//! renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{QchaosError, Result};

/// Two named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub x_name: String,
    pub y_name: String,
    pub rows: Vec<(f64, f64)>,
}

impl Table {
    pub fn new(x_name: &str, y_name: &str, rows: Vec<(f64, f64)>) -> Self {
        Table {
            x_name: x_name.to_string(),
            y_name: y_name.to_string(),
            rows,
        }
    }

    pub fn render(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(QchaosError::InsufficientData(format!(
                "refusing to write an empty {},{} table",
                self.x_name, self.y_name
            )));
        }
        let mut out = String::with_capacity(48 * (self.rows.len() + 1));
        writeln!(out, "# {},{}", self.x_name, self.y_name).unwrap();
        for (x, y) in &self.rows {
            writeln!(out, "{x:.16e},{y:.16e}").unwrap();
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| QchaosError::InvalidParameter("missing '# x,y' header".into()))?;
        let (x_name, y_name) = header
            .split_once(',')
            .ok_or_else(|| QchaosError::InvalidParameter(format!("malformed header '{header}'")))?;
        let rows = lines
            .enumerate()
            .map(|(i, line)| {
                let bad = || QchaosError::InvalidParameter(format!("malformed row {}: '{line}'", i + 2));
                let (x, y) = line.split_once(',').ok_or_else(bad)?;
                Ok((x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table::new(x_name, y_name, rows))
    }
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| QchaosError::io(path, std::io::Error::other("path has no file name")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| QchaosError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        QchaosError::io(path, e)
    })
}

/// Renders and atomically writes a table.
pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    write_atomic(path, &table.render()?)
}
