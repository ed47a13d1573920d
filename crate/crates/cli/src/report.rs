//! Per-command JSON reports and the run's `summary.csv`.
//!
//! Values are deterministic for a fixed configuration. Wall-clock times go
//! under `timing` and are not part of that promise.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    /// Scalar results, in insertion order for the summary.
    pub values: Vec<(String, f64)>,
    /// Verdict of a checker, if the command is one.
    pub passed: Option<bool>,
    /// Non-scalar results.
    pub extra: BTreeMap<String, Value>,
    pub timing: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn value(&mut self, key: impl Into<String>, v: f64) {
        self.values.push((key.into(), v));
    }

    pub fn extra(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("report values serialize");
        self.extra.insert(key.into(), v);
    }

    /// Writes `<out>/<command>.json` and `<out>/summary.csv`, then turns a
    /// failed verdict into [`Failure::Checker`].
    pub fn finish(self, out: &Path) -> Result<(), Failure> {
        fs::create_dir_all(out)?;
        let json = serde_json::to_string_pretty(&self).map_err(|e| Failure::Io(e.to_string()))?;
        fs::write(out.join(format!("{}.json", self.command)), json + "\n")?;
        let mut w = csv::Writer::from_path(out.join("summary.csv")).map_err(|e| Failure::Io(e.to_string()))?;
        let io = |e: csv::Error| Failure::Io(e.to_string());
        w.write_record(["command", "key", "value"]).map_err(io)?;
        for (k, v) in &self.values {
            w.write_record([self.command.as_str(), k, &format!("{v:e}")]).map_err(io)?;
        }
        if let Some(p) = self.passed {
            w.write_record([self.command.as_str(), "passed", if p { "1" } else { "0" }]).map_err(io)?;
        }
        w.flush()?;
        for (k, v) in &self.values {
            println!("{k:<48} {v:.6e}");
        }
        match self.passed {
            Some(false) => Err(Failure::Checker(format!("{} reported a failure", self.command))),
            _ => Ok(()),
        }
    }
}
