//! Output writing. CSV tables and JSON summaries both go through a temp
//! file and a rename, so readers never observe a half-written file.

use std::fs;
use std::path::{Path, PathBuf};

use crate::AppError;

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn wants_csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn wants_json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// 17 significant digits, enough that parsing the text recovers the
/// exact double. Zero prints without a sign.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn atomic_write(path: &Path, contents: &str) -> Result<(), AppError> {
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    let io = |e: std::io::Error| AppError::Compute(format!("writing {}: {e}", path.display()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn write_csv(stem: &str, header: &str, rows: &[String]) -> Result<(), AppError> {
    let mut s = String::with_capacity(header.len() + 1 + rows.len() * 32);
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    atomic_write(Path::new(&format!("{stem}.csv")), &s)
}

pub fn write_json<T: serde::Serialize>(stem: &str, value: &T) -> Result<(), AppError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Compute(format!("serializing summary: {e}")))?;
    s.push('\n');
    atomic_write(Path::new(&format!("{stem}.json")), &s)
}
