use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;

use super::registry;
use crate::error::{Error, Result};
use crate::scale::ProfileKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub omega: f64,
    #[serde(default)]
    pub kind: ProfileKind,
    #[serde(default, skip_serializing_if = "GridConfig::is_empty")]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "TimesConfig::is_empty")]
    pub times: TimesConfig,
    #[serde(default, skip_serializing_if = "DissipationConfig::is_empty")]
    pub dissipation: DissipationConfig,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Either `n` (1D) or `nx`/`np` (phase space); `bounds` is the `x` box and
/// `p_bounds` the momentum box.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub np: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_bounds: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtau: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl GridConfig {
    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

impl TimesConfig {
    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

impl DissipationConfig {
    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

impl ExperimentConfig {
    /// Pretty-printed JSON with a trailing newline.
    pub fn canonical(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn tolerance(&self, name: &str) -> Result<f64> {
        self.tolerances
            .get(name)
            .copied()
            .ok_or_else(|| Error::Config(vec![format!("tolerances: missing \"{name}\"")]))
    }

    pub fn t_star(&self) -> Result<f64> {
        self.times
            .t_star
            .ok_or_else(|| Error::Config(vec!["times: missing \"t_star\"".into()]))
    }
}

/// Line of the first occurrence of `"key":` after byte `from`, with its offset.
fn find_key(raw: &str, key: &str, from: usize) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let mut start = from;
    while let Some(rel) = raw.get(start..)?.find(&needle) {
        let at = start + rel;
        let rest = raw[at + needle.len()..].trim_start();
        if rest.starts_with(':') {
            return Some(at);
        }
        start = at + needle.len();
    }
    None
}

fn line_of(raw: &str, offset: usize) -> usize {
    raw[..offset].matches('\n').count() + 1
}

/// Line number of a key path such as `["grid", "n"]`; falls back to the
/// deepest located parent, then to line 1.
fn locate(raw: &str, path: &[&str]) -> usize {
    let mut offset = 0;
    let mut line = 1;
    for key in path {
        match find_key(raw, key, offset) {
            Some(at) => {
                offset = at;
                line = line_of(raw, at);
            }
            None => break,
        }
    }
    line
}

struct Issues<'a> {
    raw: &'a str,
    list: Vec<String>,
}

impl Issues<'_> {
    fn push(&mut self, path: &[&str], message: impl AsRef<str>) {
        let line = locate(self.raw, path);
        let name = if path.is_empty() { "config".to_string() } else { path.join(".") };
        self.list.push(format!("line {line}: {name}: {}", message.as_ref()));
    }
}

fn as_number(v: &Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

fn check_keys(issues: &mut Issues, obj: &Map<String, Value>, parent: &[&str], allowed: &[&str]) {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            let mut path = parent.to_vec();
            path.push(key);
            issues.push(&path, format!("unknown key (allowed: {})", allowed.join(", ")));
        }
    }
}

fn check_number(
    issues: &mut Issues,
    obj: &Map<String, Value>,
    path: &[&str],
    required: bool,
    valid: impl Fn(f64) -> bool,
    range: &str,
) {
    let key = path[path.len() - 1];
    match obj.get(key) {
        None if required => issues.push(&path[..path.len() - 1], format!("missing required field \"{key}\"")),
        None => {}
        Some(v) => match as_number(v) {
            None => issues.push(path, "expected a finite number"),
            Some(x) if !valid(x) => issues.push(path, format!("out of range: {x} (must be {range})")),
            Some(_) => {}
        },
    }
}

fn check_size(issues: &mut Issues, obj: &Map<String, Value>, path: &[&str]) {
    let key = path[path.len() - 1];
    if let Some(v) = obj.get(key) {
        match v.as_u64() {
            Some(n) if n >= 64 && n.is_power_of_two() => {}
            _ => issues.push(path, format!("expected a power of two >= 64, got {v}")),
        }
    }
}

fn check_bounds(issues: &mut Issues, obj: &Map<String, Value>, path: &[&str]) {
    let key = path[path.len() - 1];
    if let Some(v) = obj.get(key) {
        let pair = v
            .as_array()
            .filter(|a| a.len() == 2)
            .and_then(|a| Some((as_number(&a[0])?, as_number(&a[1])?)));
        match pair {
            Some((lo, hi)) if lo < hi => {}
            _ => issues.push(path, format!("expected [min, max] with min < max, got {v}")),
        }
    }
}

/// Validates raw JSON text; every problem is reported with its line.
pub fn validate_config(raw: &str) -> std::result::Result<ExperimentConfig, Vec<String>> {
    let value: Value = match serde_json::from_str(raw) {
        Ok(v) => v,
        Err(e) => return Err(vec![format!("line {}: syntax error: {e}", e.line())]),
    };
    let mut issues = Issues { raw, list: Vec::new() };
    let Some(root) = value.as_object() else {
        return Err(vec!["line 1: config: expected a JSON object".into()]);
    };
    check_keys(
        &mut issues,
        root,
        &[],
        &["experiment", "omega", "kind", "grid", "times", "dissipation", "tolerances", "output_dir"],
    );

    let experiment = match root.get("experiment") {
        None => {
            issues.push(&[], "missing required field \"experiment\"");
            None
        }
        Some(Value::String(name)) if registry::EXPERIMENTS.contains(&name.as_str()) => Some(name.as_str()),
        Some(v) => {
            issues.push(
                &["experiment"],
                format!("unknown experiment {v} (known: {})", registry::EXPERIMENTS.join(", ")),
            );
            None
        }
    };
    check_number(&mut issues, root, &["omega"], true, |x| x > 0.0, "> 0");
    if let Some(v) = root.get("kind") {
        if serde_json::from_value::<ProfileKind>(v.clone()).is_err() {
            issues.push(&["kind"], format!("expected \"standard\" or \"inverted\", got {v}"));
        }
    }

    match root.get("grid") {
        None => {}
        Some(Value::Object(g)) => {
            check_keys(&mut issues, g, &["grid"], &["n", "nx", "np", "bounds", "p_bounds"]);
            for key in ["n", "nx", "np"] {
                check_size(&mut issues, g, &["grid", key]);
            }
            check_bounds(&mut issues, g, &["grid", "bounds"]);
            check_bounds(&mut issues, g, &["grid", "p_bounds"]);
            let has_2d = g.contains_key("nx") || g.contains_key("np");
            if has_2d && !(g.contains_key("nx") && g.contains_key("np")) {
                issues.push(&["grid"], "\"nx\" and \"np\" must be given together");
            }
        }
        Some(_) => issues.push(&["grid"], "expected an object"),
    }

    match root.get("times") {
        None => {}
        Some(Value::Object(t)) => {
            check_keys(&mut issues, t, &["times"], &["t_star", "dt", "dtau"]);
            check_number(&mut issues, t, &["times", "t_star"], false, |x| x >= 0.0, ">= 0");
            check_number(&mut issues, t, &["times", "dt"], false, |x| x > 0.0, "> 0");
            check_number(&mut issues, t, &["times", "dtau"], false, |x| x > 0.0, "> 0");
        }
        Some(_) => issues.push(&["times"], "expected an object"),
    }

    match root.get("dissipation") {
        None => {}
        Some(Value::Object(d)) => {
            check_keys(&mut issues, d, &["dissipation"], &["gamma", "D", "k"]);
            check_number(&mut issues, d, &["dissipation", "gamma"], false, |x| x >= 0.0, ">= 0");
            check_number(&mut issues, d, &["dissipation", "D"], false, |x| x >= 0.0, ">= 0");
            check_number(&mut issues, d, &["dissipation", "k"], false, |_| true, "finite");
        }
        Some(_) => issues.push(&["dissipation"], "expected an object"),
    }

    match root.get("tolerances") {
        None => issues.push(&[], "missing required field \"tolerances\""),
        Some(Value::Object(t)) => {
            for (key, v) in t {
                match as_number(v) {
                    Some(x) if x > 0.0 => {}
                    _ => issues.push(&["tolerances", key], format!("tolerance must be a positive number, got {v}")),
                }
            }
            if let Some(name) = experiment {
                for needed in registry::required_tolerances(name) {
                    if !t.contains_key(*needed) {
                        issues.push(&["tolerances"], format!("missing \"{needed}\" required by {name}"));
                    }
                }
            }
        }
        Some(_) => issues.push(&["tolerances"], "expected an object"),
    }

    if let Some(v) = root.get("output_dir") {
        if !v.is_string() {
            issues.push(&["output_dir"], "expected a path string");
        }
    }

    if issues.list.is_empty() {
        if let Some(name) = experiment {
            for (path, problem) in registry::requirements(name, root) {
                issues.push(&path, problem);
            }
        }
    }
    if !issues.list.is_empty() {
        return Err(issues.list);
    }
    serde_json::from_value(value).map_err(|e| vec![format!("line 1: config: {e}")])
}

/// Reads and validates a config file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let raw = std::fs::read_to_string(path)?;
    validate_config(&raw).map_err(Error::Config)
}
