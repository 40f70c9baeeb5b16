//! Persistence helpers: spectra as CSV (one ascending eigenvalue per line,
//! 17 significant digits) and JSON certificates, written atomically via a
//! temporary file in the target directory.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::Result;

/// Atomic write: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// One eigenvalue per line with 17 significant digits.
pub fn spectra_csv(eigenvalues: &[f64]) -> String {
    let mut out = String::with_capacity(eigenvalues.len() * 26);
    for v in eigenvalues {
        out.push_str(&format!("{:.16e}\n", v));
    }
    out
}

pub fn write_spectra_csv(path: &Path, eigenvalues: &[f64]) -> Result<()> {
    atomic_write(path, spectra_csv(eigenvalues).as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    atomic_write(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_formatting() {
        let s = spectra_csv(&[0.0, 2.0, 19.999999999999996]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("0.0000000000000000e0"));
        assert!(lines[2].contains("1.9999999999999996e1") || lines[2].contains("2.0e1"));
        // 17 significant digits: mantissa with 16 decimals.
        assert_eq!(lines[1], "2.0000000000000000e0");
    }

    #[test]
    fn atomic_round_trip() {
        let dir = std::env::temp_dir().join("isospec-report-test");
        let path = dir.join("spectra.csv");
        write_spectra_csv(&path, &[1.5, 2.5]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        std::fs::remove_dir_all(&dir).ok();
    }
}
