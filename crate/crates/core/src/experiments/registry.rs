use serde_json::{Map, Value};
use std::collections::BTreeMap;

use super::config::{DissipationConfig, ExperimentConfig, GridConfig, TimesConfig};
use crate::scale::ProfileKind;

/// Registered experiment names, sorted.
pub const EXPERIMENTS: [&str; 11] = [
    "bch-check",
    "boundary-phase",
    "fp-scaling",
    "gamma-scaling",
    "hybrid-symbolic",
    "invariant-check",
    "inverted-map",
    "kvn-map",
    "lindblad-order",
    "quantum-map",
    "symbolic-verify",
];

/// Tolerance keys (one per reported metric) an experiment reads.
pub fn required_tolerances(name: &str) -> &'static [&'static str] {
    match name {
        "bch-check" => &[
            "bch_coefficient_error",
            "closed_form_adjoint_residual",
            "quantum_state_distance",
            "kvn_state_distance",
        ],
        "boundary-phase" => &["boundary_phase_residual", "convention_ambiguity"],
        "fp-scaling" => &["L2_map_distance", "variance_rate_error"],
        "gamma-scaling" => &["trace_distance"],
        "hybrid-symbolic" => &["coupling_relative_error", "hybrid_generator_residual"],
        "invariant-check" => &["invariant_relative_drift", "printed_form_drift"],
        "inverted-map" | "quantum-map" | "kvn-map" => &["L2_map_distance"],
        "lindblad-order" => &["slope_deviation", "kinetic_free_factor_error"],
        "symbolic-verify" => &[
            "conjugation_residual",
            "generator_residual",
            "minimal_coupling_residual",
            "minimal_coupling_corrected_residual",
        ],
        _ => &[],
    }
}

const N: &str = "n";
const NX: &str = "nx";
const NP: &str = "np";
const BOUNDS: &str = "bounds";
const P_BOUNDS: &str = "p_bounds";
const T_STAR: &str = "t_star";
const DT: &str = "dt";
const DTAU: &str = "dtau";

/// `(section, keys)` an experiment needs beyond the generic schema.
fn needed(name: &str) -> Vec<(&'static str, &'static [&'static str])> {
    let one_d: &'static [&'static str] = &[N, BOUNDS];
    let two_d: &'static [&'static str] = &[NX, NP, BOUNDS, P_BOUNDS];
    match name {
        "quantum-map" | "inverted-map" => vec![("grid", one_d), ("times", &[T_STAR, DTAU])],
        "kvn-map" => vec![("grid", two_d), ("times", &[T_STAR, DT])],
        "invariant-check" => vec![("grid", two_d), ("times", &[T_STAR])],
        "lindblad-order" => vec![("grid", one_d), ("times", &[T_STAR, DT]), ("dissipation", &["gamma"])],
        "gamma-scaling" => vec![("grid", one_d), ("times", &[T_STAR, DT, DTAU]), ("dissipation", &["gamma"])],
        "fp-scaling" => vec![("grid", two_d), ("times", &[T_STAR, DT, DTAU]), ("dissipation", &["D"])],
        "boundary-phase" => vec![("grid", &[N])],
        "bch-check" => vec![("grid", &[N, NX, NP, BOUNDS, P_BOUNDS]), ("times", &[T_STAR])],
        "hybrid-symbolic" => vec![("dissipation", &["k"])],
        _ => vec![],
    }
}

/// Experiment-specific problems in an otherwise schema-valid config, as
/// `(key path, message)`.
pub fn requirements(name: &str, root: &Map<String, Value>) -> Vec<(Vec<&'static str>, String)> {
    let mut out = Vec::new();
    for (section, keys) in needed(name) {
        let obj = root.get(section).and_then(Value::as_object);
        for key in keys {
            if obj.is_none_or(|o| !o.contains_key(*key)) {
                out.push((vec![section], format!("{name} requires \"{section}.{key}\"")));
            }
        }
    }
    let kind = root.get("kind").and_then(Value::as_str).unwrap_or("standard");
    let omega = root.get("omega").and_then(Value::as_f64).unwrap_or(1.0);
    let t_star = root
        .get("times")
        .and_then(|t| t.get("t_star"))
        .and_then(Value::as_f64);
    match name {
        "inverted-map" if kind != "inverted" => {
            out.push((vec!["kind"], "inverted-map requires kind \"inverted\"".into()));
        }
        "invariant-check" | "gamma-scaling" | "fp-scaling" | "boundary-phase" | "lindblad-order"
            if kind != "standard" =>
        {
            out.push((vec!["kind"], format!("{name} supports only kind \"standard\"")));
        }
        _ => {}
    }
    if kind == "inverted" {
        if let Some(t) = t_star {
            if omega * t >= 1.0 {
                out.push((
                    vec!["times", "t_star"],
                    format!("inverted kind requires t_star < 1/omega = {}", 1.0 / omega),
                ));
            }
        }
    }
    out
}

fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn grid_1d(n: usize, half: f64) -> GridConfig {
    GridConfig {
        n: Some(n),
        bounds: Some([-half, half]),
        ..GridConfig::default()
    }
}

fn grid_2d(n: usize, half: f64) -> GridConfig {
    GridConfig {
        nx: Some(n),
        np: Some(n),
        bounds: Some([-half, half]),
        p_bounds: Some([-half, half]),
        ..GridConfig::default()
    }
}

fn times(t_star: Option<f64>, dt: Option<f64>, dtau: Option<f64>) -> TimesConfig {
    TimesConfig { t_star, dt, dtau }
}

/// The bundled configuration of an experiment; these match the acceptance
/// settings.
pub fn default_config(name: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        experiment: name.to_string(),
        omega: 1.0,
        kind: ProfileKind::Standard,
        grid: GridConfig::default(),
        times: TimesConfig::default(),
        dissipation: DissipationConfig::default(),
        tolerances: BTreeMap::new(),
        output_dir: None,
    };
    match name {
        "quantum-map" => {
            cfg.grid = grid_1d(2048, 40.0);
            cfg.times = times(Some(1.0), None, Some(1e-4));
            cfg.tolerances = tolerances(&[("L2_map_distance", 1e-5)]);
        }
        "inverted-map" => {
            cfg.kind = ProfileKind::Inverted;
            cfg.grid = grid_1d(2048, 40.0);
            cfg.times = times(Some(0.5), None, Some(1e-4));
            cfg.tolerances = tolerances(&[("L2_map_distance", 1e-5)]);
        }
        "kvn-map" => {
            cfg.grid = grid_2d(512, 8.0);
            cfg.times = times(Some(1.0), Some(1e-3), None);
            cfg.tolerances = tolerances(&[("L2_map_distance", 1e-4)]);
        }
        "invariant-check" => {
            cfg.grid = grid_2d(512, 16.0);
            cfg.times = times(Some(2.0), None, None);
            cfg.tolerances = tolerances(&[("invariant_relative_drift", 1e-5), ("printed_form_drift", 1e-5)]);
        }
        "lindblad-order" => {
            cfg.grid = grid_1d(256, 10.0);
            cfg.times = times(Some(0.1), Some(5e-5), None);
            cfg.dissipation.gamma = Some(0.5);
            cfg.tolerances = tolerances(&[("slope_deviation", 0.1), ("kinetic_free_factor_error", 1e-10)]);
        }
        "gamma-scaling" => {
            cfg.grid = grid_1d(256, 12.0);
            cfg.times = times(Some(1.0), Some(1e-3), Some(1e-3));
            cfg.dissipation.gamma = Some(0.2);
            cfg.tolerances = tolerances(&[("trace_distance", 1e-3)]);
        }
        "fp-scaling" => {
            cfg.grid = grid_2d(256, 10.0);
            cfg.times = times(Some(1.0), Some(1e-3), Some(1e-3));
            cfg.dissipation.diffusion = Some(0.1);
            cfg.tolerances = tolerances(&[("L2_map_distance", 1e-3), ("variance_rate_error", 0.02)]);
        }
        "boundary-phase" => {
            cfg.grid = GridConfig {
                n: Some(256),
                ..GridConfig::default()
            };
            cfg.tolerances = tolerances(&[("boundary_phase_residual", 1e-6), ("convention_ambiguity", 0.5)]);
        }
        "bch-check" => {
            cfg.grid = GridConfig {
                n: Some(1024),
                nx: Some(256),
                np: Some(256),
                bounds: Some([-14.0, 14.0]),
                p_bounds: Some([-14.0, 14.0]),
            };
            cfg.times = times(Some(1.0), None, None);
            cfg.tolerances = tolerances(&[
                ("bch_coefficient_error", 1e-12),
                ("closed_form_adjoint_residual", 1e-10),
                ("quantum_state_distance", 1e-6),
                ("kvn_state_distance", 1e-6),
            ]);
        }
        "symbolic-verify" => {
            cfg.tolerances = tolerances(&[
                ("conjugation_residual", 1e-12),
                ("generator_residual", 1e-12),
                ("minimal_coupling_residual", 1e-12),
                ("minimal_coupling_corrected_residual", 1e-12),
            ]);
        }
        "hybrid-symbolic" => {
            cfg.dissipation.k = Some(0.3);
            cfg.tolerances = tolerances(&[("coupling_relative_error", 1e-10), ("hybrid_generator_residual", 1e-10)]);
        }
        _ => {}
    }
    cfg
}
