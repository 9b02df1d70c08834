use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use tomowitness::{ComplexMatrix, RealMatrix};

use crate::error::CliError;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn complex_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// Fixed-width rendering for terminal output.
pub fn render_matrix(m: &RealMatrix, labels: &[String]) -> String {
    let width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (i, row) in m.row_iter().enumerate() {
        let label = labels.get(i).map(String::as_str).unwrap_or("");
        let _ = write!(out, "  {label:>width$} |");
        for v in row.iter() {
            // avoid printing "-0.000000"
            let v = if v.abs() < 5e-13 { 0.0 } else { *v };
            let _ = write!(out, " {v:>11.6}");
        }
        out.push('\n');
    }
    out
}

pub fn render_complex_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        out.push(' ');
        for z in row.iter() {
            let re = if z.re.abs() < 5e-13 { 0.0 } else { z.re };
            let im = if z.im.abs() < 5e-13 { 0.0 } else { z.im };
            let sign = if im.is_sign_negative() { '-' } else { '+' };
            let _ = write!(out, " {re:>10.6}{sign}{:<9.6}i", im.abs());
        }
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Output { path: path.display().to_string(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize to JSON");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(path, &to_json(value))
}

/// `out.csv` -> `out_rho.csv`.
pub fn companion_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}{ext}"))
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[String]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = String>) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23] {
            let s = sci(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn companion_names() {
        assert_eq!(companion_path(Path::new("/tmp/traj.csv"), "rho"), PathBuf::from("/tmp/traj_rho.csv"));
        assert_eq!(companion_path(Path::new("traj"), "rho"), PathBuf::from("traj_rho"));
    }
}
