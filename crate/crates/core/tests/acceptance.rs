//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Thresholds are fixed here rather than read from the bundled configs, so a
//! loosened config cannot turn a criterion green.

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use harmomap::experiments::{load_config, run_experiment, ExperimentConfig, ExperimentReport};

fn bundled(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"));
    load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport, String> {
    run_experiment(cfg, None).map_err(|e| format!("{}: {e}", cfg.experiment))
}

fn value(r: &ExperimentReport, metric: &str) -> f64 {
    r.metric(metric).map_or(f64::NAN, |m| m.metric_value)
}

fn note(r: &ExperimentReport, key: &str) -> String {
    r.notes.get(key).map_or_else(|| "-".into(), |v| v.to_string())
}

/// `value <= limit` with NaN failing.
fn within(v: f64, limit: f64) -> bool {
    v.is_finite() && v <= limit
}

type Check = Result<(bool, String), String>;

fn quantum_mapping() -> Check {
    let base = bundled("quantum-map");
    let mut second = base.clone();
    second.omega = 2.0;
    second.times.t_star = Some(0.7);
    let a = value(&run(&base)?, "L2_map_distance");
    let b = value(&run(&second)?, "L2_map_distance");
    Ok((
        within(a, 1e-5) && within(b, 1e-5),
        format!("L2 up to phase {a:.3e} (w=1, t*=1), {b:.3e} (w=2, t*=0.7); limit 1e-5"),
    ))
}

fn closed_form_unitaries() -> Check {
    let r = run(&bundled("bch-check"))?;
    let q = value(&r, "quantum_state_distance");
    let k = value(&r, "kvn_state_distance");
    let printed = note(&r, "kvn_printed_sign_adjoint_residual");
    Ok((
        within(q, 1e-6) && within(k, 1e-6),
        format!(
            "max state distance quantum {q:.3e}, classical {k:.3e} over 11 samples; limit 1e-6; \
             classical sign resolved to (1 - ...), printed sign adjoint residual {printed}"
        ),
    ))
}

fn symbolic_generators() -> Check {
    let r = run(&bundled("symbolic-verify"))?;
    let conj = value(&r, "conjugation_residual");
    let generator = value(&r, "generator_residual");
    let literal = value(&r, "minimal_coupling_residual");
    let corrected = value(&r, "minimal_coupling_corrected_residual");
    Ok((
        [conj, generator, literal].iter().all(|&v| within(v, 1e-12)),
        format!(
            "conjugations {conj:.1e}, H'/H''/K'/K'' {generator:.1e}, minimal coupling as printed \
             {literal:.3e} (corrected with (c cdot)^2 x theta: {corrected:.1e}); limit 1e-12"
        ),
    ))
}

fn kvn_mapping() -> Check {
    let d = value(&run(&bundled("kvn-map"))?, "L2_map_distance");
    Ok((within(d, 1e-4), format!("L2 {d:.3e}; limit 1e-4")))
}

fn invariant() -> Check {
    let base = bundled("invariant-check");
    let mut second = base.clone();
    second.omega = 2.0;
    let r1 = run(&base)?;
    let r2 = run(&second)?;
    let a = value(&r1, "invariant_relative_drift");
    let b = value(&r2, "invariant_relative_drift");
    let printed = value(&r1, "printed_form_drift");
    Ok((
        within(a, 1e-5) && within(b, 1e-5) && within(printed, 1e-5),
        format!(
            "relative drift {a:.2e} (w=1), {b:.2e} (w=2), printed form at w=1 {printed:.2e}; limit 1e-5; \
             printed form at w=2 {}",
            note(&r2, "printed_form_drift")
        ),
    ))
}

fn lindblad_decomposition() -> Check {
    let r = run(&bundled("lindblad-order"))?;
    let slope = r.notes.get("slope").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    let factor = value(&r, "kinetic_free_factor_error");
    Ok((
        (0.9..=1.1).contains(&slope) && within(factor, 1e-10),
        format!("error slope {slope:.4} (want [0.9, 1.1]), kinetic-free factor error {factor:.1e} (limit 1e-10)"),
    ))
}

fn gamma_scaling() -> Check {
    let d = value(&run(&bundled("gamma-scaling"))?, "trace_distance");
    Ok((within(d, 1e-3), format!("trace distance {d:.3e}; limit 1e-3")))
}

fn diffusion_scaling() -> Check {
    let r = run(&bundled("fp-scaling"))?;
    let d = value(&r, "L2_map_distance");
    let rate = value(&r, "variance_rate_error");
    Ok((
        within(d, 1e-3) && within(rate, 0.02),
        format!("L2 {d:.3e} (limit 1e-3), variance-rate relative error {rate:.2e} (limit 0.02)"),
    ))
}

fn hybrid_coupling() -> Check {
    let r = run(&bundled("hybrid-symbolic"))?;
    let e = value(&r, "coupling_relative_error");
    Ok((within(e, 1e-10), format!("coupling vs c^4 k relative error {e:.2e}; limit 1e-10")))
}

fn inverted_variant() -> Check {
    let base = bundled("inverted-map");
    let mut second = base.clone();
    second.omega = 2.0;
    second.times.t_star = Some(0.25);
    let a = value(&run(&base)?, "L2_map_distance");
    let b = value(&run(&second)?, "L2_map_distance");
    Ok((
        within(a, 1e-5) && within(b, 1e-5),
        format!("L2 up to phase {a:.3e} (w=1), {b:.3e} (w=2), t* = 0.5/w; limit 1e-5"),
    ))
}

fn boundary_phase() -> Check {
    let r = run(&bundled("boundary-phase"))?;
    let ambiguity = value(&r, "convention_ambiguity");
    let residual = value(&r, "boundary_phase_residual");
    Ok((
        ambiguity == 0.0 && within(residual, 1e-6),
        format!(
            "matching conventions {} with worst residual {residual:.2e} over three (tau, L) samples",
            note(&r, "matched_conventions")
        ),
    ))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 11] = [
        ("quantum mapping equivalence", quantum_mapping),
        ("closed-form unitaries vs composed products", closed_form_unitaries),
        ("symbolic generator suite", symbolic_generators),
        ("KvN mapping equivalence", kvn_mapping),
        ("invariant conservation", invariant),
        ("two-unitary Lindblad decomposition", lindblad_decomposition),
        ("gamma scaling", gamma_scaling),
        ("diffusion scaling", diffusion_scaling),
        ("hybrid coupling", hybrid_coupling),
        ("inverted variant", inverted_variant),
        ("boundary phase convention", boundary_phase),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
