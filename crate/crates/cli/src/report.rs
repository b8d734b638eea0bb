//! Provenance carried by every output: a `#` comment header on CSV files and
//! the top-level fields of JSON reports.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;

/// Evaluations left of this abscissa are outside the validated region.
pub const UNVALIDATED_RE: f64 = -0.3;

pub const CONFIG_BEGIN: &str = "# config-begin";
pub const CONFIG_END: &str = "# config-end";
pub const WALL_TIME_PREFIX: &str = "# wall_time_s:";

pub struct RunReport {
    pub command: String,
    pub fingerprint: String,
    pub config: RunConfig,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    start: Instant,
}

#[derive(Serialize)]
pub struct JsonReport<'a, T: Serialize> {
    pub command: &'a str,
    pub fingerprint: &'a str,
    pub wall_time_s: f64,
    pub warnings: &'a [String],
    pub config: &'a RunConfig,
    pub result: T,
}

impl RunReport {
    pub fn new(command: String, fingerprint: String, config: RunConfig) -> Self {
        RunReport { command, fingerprint, config, notes: Vec::new(), warnings: Vec::new(), start: Instant::now() }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Records a warning once per distinct abscissa below the validated region.
    pub fn check_abscissa(&mut self, re: f64) {
        if re < UNVALIDATED_RE {
            let text = format!("Re s = {re} < {UNVALIDATED_RE}: values are unvalidated");
            if !self.warnings.contains(&text) {
                self.warnings.push(text);
            }
        }
    }

    pub fn wall_time(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn csv_header(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# fingerprint: {}", self.fingerprint);
        for note in &self.notes {
            let _ = writeln!(out, "# note: {note}");
        }
        for warning in &self.warnings {
            let _ = writeln!(out, "# warning: {warning}");
        }
        let _ = writeln!(out, "{WALL_TIME_PREFIX} {:.3}", self.wall_time());
        out.push_str(CONFIG_BEGIN);
        out.push('\n');
        for line in self.config.to_toml().lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
        out.push_str(CONFIG_END);
        out.push('\n');
        out
    }

    pub fn json<T: Serialize>(&self, result: T) -> String {
        let report = JsonReport {
            command: &self.command,
            fingerprint: &self.fingerprint,
            wall_time_s: self.wall_time(),
            warnings: &self.warnings,
            config: &self.config,
            result,
        };
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        text
    }
}

/// Recovers the TOML config embedded in a CSV header.
#[cfg(test)]
pub fn extract_config(csv: &str) -> Option<String> {
    let mut lines = csv.lines().skip_while(|l| *l != CONFIG_BEGIN);
    lines.next()?;
    let mut toml = String::new();
    for line in lines {
        if line == CONFIG_END {
            return Some(toml);
        }
        toml.push_str(line.strip_prefix('#')?.strip_prefix(' ').unwrap_or(""));
        toml.push('\n');
    }
    None
}

/// CSV cell for an optional value; absent values are empty.
pub fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}
