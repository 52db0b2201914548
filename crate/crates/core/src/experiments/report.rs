use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

use super::config::ExperimentConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub metric_name: String,
    pub metric_value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Metric {
    /// Passes when the value is finite and at most the threshold.
    pub fn new(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            metric_name: name.to_string(),
            metric_value: value,
            threshold,
            pass: value.is_finite() && value <= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// The config the run used, echoed verbatim.
    pub params: ExperimentConfig,
    pub metrics: Vec<Metric>,
    pub pass: bool,
    pub runtime_seconds: f64,
    /// Files written next to `report.json`, relative to the experiment folder.
    pub artifacts: Vec<String>,
    pub notes: BTreeMap<String, Value>,
}

impl ExperimentReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.metric_name == name)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// One line per metric, for terminals.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} ({:.2}s)\n",
            self.experiment,
            if self.pass { "PASS" } else { "FAIL" },
            self.runtime_seconds
        );
        for m in &self.metrics {
            s.push_str(&format!(
                "  {:<38} {:>12.4e} <= {:<10.3e} {}\n",
                m.metric_name,
                m.metric_value,
                m.threshold,
                if m.pass { "ok" } else { "FAIL" }
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Metric::new("m", f64::NAN, 1.0).pass);
        assert!(!Metric::new("m", f64::INFINITY, 1.0).pass);
        assert!(Metric::new("m", 1.0, 1.0).pass);
        assert!(!Metric::new("m", 1.5, 1.0).pass);
    }
}
