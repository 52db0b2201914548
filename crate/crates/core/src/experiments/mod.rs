//! Named, config-driven experiments and their reports.
//!
//! ```no_run
//! use harmomap::experiments::{registry, run_experiment};
//!
//! let cfg = registry::default_config("quantum-map");
//! let report = run_experiment(&cfg, Some("out".as_ref())).unwrap();
//! assert!(report.pass);
//! ```

pub mod config;
pub mod registry;
pub mod report;
mod runs;

use std::path::Path;
use std::time::Instant;

pub use config::{load_config, validate_config, ExperimentConfig};
pub use report::{ExperimentReport, Metric};

use crate::error::{Error, Result};

/// Registered names in sorted order.
pub fn list_experiments() -> Vec<&'static str> {
    registry::EXPERIMENTS.to_vec()
}

/// Runs one experiment. Artifacts and `report.json` go to
/// `<out>/<experiment>/`, where `out` falls back to `config.output_dir`;
/// with neither, nothing is written.
pub fn run_experiment(config: &ExperimentConfig, out: Option<&Path>) -> Result<ExperimentReport> {
    let start = Instant::now();
    let outcome = match config.experiment.as_str() {
        "quantum-map" | "inverted-map" => runs::quantum_map(config),
        "kvn-map" => runs::kvn_map(config),
        "invariant-check" => runs::invariant_check(config),
        "lindblad-order" => runs::lindblad_order(config),
        "gamma-scaling" => runs::gamma_scaling(config),
        "fp-scaling" => runs::fp_scaling(config),
        "boundary-phase" => runs::boundary_phase(config),
        "bch-check" => runs::bch_check(config),
        "symbolic-verify" => runs::symbolic_verify(config),
        "hybrid-symbolic" => runs::hybrid_symbolic(config),
        other => Err(Error::Config(vec![format!("unknown experiment \"{other}\"")])),
    }?;
    let metrics = outcome
        .metrics
        .iter()
        .map(|&(name, value)| Ok(Metric::new(name, value, config.tolerance(name)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = ExperimentReport {
        experiment: config.experiment.clone(),
        params: config.clone(),
        pass: metrics.iter().all(|m| m.pass),
        metrics,
        runtime_seconds: 0.0,
        artifacts: Vec::new(),
        notes: outcome.notes,
    };
    let dir = out.or(config.output_dir.as_deref()).map(|d| d.join(&config.experiment));
    if let Some(dir) = &dir {
        std::fs::create_dir_all(dir)?;
        for (name, bytes) in &outcome.artifacts {
            std::fs::write(dir.join(name), bytes)?;
            report.artifacts.push(name.clone());
        }
        report.artifacts.push("report.json".into());
    }
    report.runtime_seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = &dir {
        report.write_json(&dir.join("report.json"))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_complete() {
        let names = list_experiments();
        assert_eq!(names.len(), 11);
        assert!(names.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(names, list_experiments());
    }

    #[test]
    fn symbolic_runs_are_deterministic() {
        let cfg = registry::default_config("hybrid-symbolic");
        let a = run_experiment(&cfg, None).unwrap();
        let b = run_experiment(&cfg, None).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert!(a.pass, "{}", a.summary());
    }

    #[test]
    fn reports_land_in_the_experiment_folder() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = registry::default_config("boundary-phase");
        let report = run_experiment(&cfg, Some(dir.path())).unwrap();
        let folder = dir.path().join("boundary-phase");
        for a in &report.artifacts {
            assert!(folder.join(a).exists(), "{a}");
        }
        let text = std::fs::read_to_string(folder.join("report.json")).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.params, cfg);
    }
}
