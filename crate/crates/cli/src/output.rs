//! Plain-text outputs: CSV tables and the JSON run summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use shuttle_core::FeasibilityReport;

use crate::config::ScenarioConfig;
use crate::error::CliError;

/// 17 significant digits, `.` as decimal separator.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty for a missing value.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: impl IntoIterator<Item = S>) {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(f.as_ref());
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub config_echo: &'a ScenarioConfig,
    pub feasibility: FeasibilityReport,
    pub results: Vec<serde_json::Value>,
    pub warnings: Vec<String>,
}

impl Summary<'_> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(io(&path))?;
    Ok(path)
}

/// `name = value` lines for the terminal.
pub fn report_lines(pairs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "{k:<24}{v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.052, 1.0 / 3.0, -2.5e-29, 1.44269e-25, 0.0] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(["1", ""]);
        assert_eq!(c.into_string(), "a,b\n1,\n");
    }
}
