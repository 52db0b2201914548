//! The squeezing and gauge unitaries of the free-to-harmonic mapping, their
//! connection terms, and the generator identities they produce.
//!
//! All builders take numeric values of `c`, `ċ`, `c̈`. A unitary is always
//! represented by its generator `G` with `U = exp(−iG)`.

use num_complex::Complex64;
use std::sync::Arc;

use super::{
    adjoint_conjugate, bch_combine, transform_generator, Algebra, Conjugation, OperatorPoly,
    TransformStep, I,
};
use crate::error::Result;
use crate::scale::ScaleValues;

/// Names of a quantum pair `(x, p)` inside some algebra.
#[derive(Debug, Clone, Copy)]
pub struct QuantumPair<'a> {
    pub x: &'a str,
    pub p: &'a str,
}

/// Names of a classical KvN quadruple `(x, p, λ, θ)` inside some algebra.
#[derive(Debug, Clone, Copy)]
pub struct KvnQuad<'a> {
    pub x: &'a str,
    pub p: &'a str,
    pub lambda: &'a str,
    pub theta: &'a str,
}

pub const QUANTUM: QuantumPair<'static> = QuantumPair { x: "x", p: "p" };
pub const KVN: KvnQuad<'static> = KvnQuad {
    x: "x",
    p: "p",
    lambda: "lambda",
    theta: "theta",
};
pub const HYBRID_CLASSICAL: KvnQuad<'static> = KvnQuad {
    x: "X",
    p: "P",
    lambda: "Lambda",
    theta: "Theta",
};

fn w(alg: &Arc<Algebra>, names: &[&str]) -> OperatorPoly {
    OperatorPoly::word(alg, names).expect("low-degree word")
}

fn g(alg: &Arc<Algebra>, name: &str) -> OperatorPoly {
    OperatorPoly::generator(alg, name)
}

/// `x̂p̂ + p̂x̂`.
pub fn quantum_dilation(alg: &Arc<Algebra>, q: QuantumPair) -> OperatorPoly {
    w(alg, &[q.x, q.p]).add(&w(alg, &[q.p, q.x]))
}

/// `p̂θ̂ + θ̂p̂ − (x̂λ̂ + λ̂x̂)`.
pub fn kvn_dilation(alg: &Arc<Algebra>, k: KvnQuad) -> OperatorPoly {
    w(alg, &[k.p, k.theta])
        .add(&w(alg, &[k.theta, k.p]))
        .sub(&w(alg, &[k.x, k.lambda]))
        .sub(&w(alg, &[k.lambda, k.x]))
}

/// Squeezing `Û = exp(−i (ln c/2)(x̂p̂ + p̂x̂))` with connection
/// `−iÛ†∂Û = −(ċ/2c)(x̂p̂ + p̂x̂)`.
pub fn quantum_squeeze(alg: &Arc<Algebra>, q: QuantumPair, v: ScaleValues) -> TransformStep {
    let d = quantum_dilation(alg, q);
    TransformStep {
        generator: d.scale_re(v.c.ln() / 2.0),
        connection: d.scale_re(-v.cdot / (2.0 * v.c)),
    }
}

/// Gauge `R̂ = exp(i (cċ/2) x̂²)` with connection `−iR̂†∂R̂ = ½(ċ² + c c̈) x̂²`.
pub fn quantum_gauge(alg: &Arc<Algebra>, q: QuantumPair, v: ScaleValues) -> TransformStep {
    let x2 = w(alg, &[q.x, q.x]);
    TransformStep {
        generator: x2.scale_re(-v.gauge() / 2.0),
        connection: x2.scale_re(0.5 * (v.cdot * v.cdot + v.c * v.cddot)),
    }
}

/// Classical squeezing `Û_cl = exp(i (ln c/2) S)`, `S = p̂θ̂ + θ̂p̂ − (x̂λ̂ + λ̂x̂)`,
/// with connection `−iÛ_cl†∂Û_cl = (ċ/2c) S`.
pub fn kvn_squeeze(alg: &Arc<Algebra>, k: KvnQuad, v: ScaleValues) -> TransformStep {
    let s = kvn_dilation(alg, k);
    TransformStep {
        generator: s.scale_re(-v.c.ln() / 2.0),
        connection: s.scale_re(v.cdot / (2.0 * v.c)),
    }
}

/// Classical gauge `R̂_cl = exp(−i cċ x̂θ̂)` with connection
/// `−iR̂_cl†∂R̂_cl = −(ċ² + c c̈) x̂θ̂`.
pub fn kvn_gauge(alg: &Arc<Algebra>, k: KvnQuad, v: ScaleValues) -> TransformStep {
    let xt = w(alg, &[k.x, k.theta]);
    TransformStep {
        generator: xt.scale_re(v.gauge()),
        connection: xt.scale_re(-(v.cdot * v.cdot + v.c * v.cddot)),
    }
}

pub fn quantum_steps(alg: &Arc<Algebra>, v: ScaleValues) -> Vec<TransformStep> {
    vec![quantum_squeeze(alg, QUANTUM, v), quantum_gauge(alg, QUANTUM, v)]
}

pub fn kvn_steps(alg: &Arc<Algebra>, v: ScaleValues) -> Vec<TransformStep> {
    vec![kvn_squeeze(alg, KVN, v), kvn_gauge(alg, KVN, v)]
}

/// `Ĥ′ = p̂²/(2c²) − (ċ/2c)(x̂p̂ + p̂x̂)`.
pub fn expected_h_prime(alg: &Arc<Algebra>, v: ScaleValues) -> OperatorPoly {
    w(alg, &["p", "p"])
        .scale_re(0.5 / (v.c * v.c))
        .add(&quantum_dilation(alg, QUANTUM).scale_re(-v.cdot / (2.0 * v.c)))
}

/// `Ĥ″ = (1/c²)(p̂²/2 + c̈c³ x̂²/2)`.
pub fn expected_h_double_prime(alg: &Arc<Algebra>, v: ScaleValues) -> OperatorPoly {
    let c2 = v.c * v.c;
    w(alg, &["p", "p"])
        .scale_re(0.5 / c2)
        .add(&w(alg, &["x", "x"]).scale_re(0.5 * v.cddot * v.c))
}

/// `K̂′ = (1/c²)[p̂λ̂ + (cċ/2) S]`.
pub fn expected_k_prime(alg: &Arc<Algebra>, v: ScaleValues) -> OperatorPoly {
    let c2 = v.c * v.c;
    w(alg, &["p", "lambda"])
        .add(&kvn_dilation(alg, KVN).scale_re(v.gauge() / 2.0))
        .scale_re(1.0 / c2)
}

/// `K̂″ = (1/c²)(p̂λ̂ − c̈c³ x̂θ̂)`.
pub fn expected_k_double_prime(alg: &Arc<Algebra>, v: ScaleValues) -> OperatorPoly {
    let c2 = v.c * v.c;
    w(alg, &["p", "lambda"])
        .scale_re(1.0 / c2)
        .sub(&w(alg, &["x", "theta"]).scale_re(v.cddot * v.c))
}

/// One named identity and its coefficient-wise residual.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
}

/// The nine displayed conjugation identities of the quantum and classical
/// squeezing and gauge unitaries.
pub fn conjugation_table(v: ScaleValues) -> Result<Vec<IdentityCheck>> {
    let q = Algebra::quantum();
    let k = Algebra::kvn();
    let uq = quantum_squeeze(&q, QUANTUM, v).generator;
    let rq = quantum_gauge(&q, QUANTUM, v).generator;
    let uk = kvn_squeeze(&k, KVN, v).generator;
    let rk = kvn_gauge(&k, KVN, v).generator;
    let fwd = |gen: &OperatorPoly, a: &OperatorPoly| adjoint_conjugate(gen, a, Conjugation::Forward);
    let (c, a) = (v.c, v.gauge());

    let mut out = Vec::new();
    let mut check = |name, got: OperatorPoly, want: OperatorPoly| {
        out.push(IdentityCheck {
            name,
            residual: got.max_abs_diff(&want),
        })
    };
    check("U'x U = c x", fwd(&uq, &g(&q, "x"))?, g(&q, "x").scale_re(c));
    check("U'p U = p / c", fwd(&uq, &g(&q, "p"))?, g(&q, "p").scale_re(1.0 / c));
    check(
        "R'p R = p + c cdot x",
        fwd(&rq, &g(&q, "p"))?,
        g(&q, "p").add(&g(&q, "x").scale_re(a)),
    );
    check("Ucl'x Ucl = c x", fwd(&uk, &g(&k, "x"))?, g(&k, "x").scale_re(c));
    check("Ucl'p Ucl = p / c", fwd(&uk, &g(&k, "p"))?, g(&k, "p").scale_re(1.0 / c));
    check(
        "Ucl'lambda Ucl = lambda / c",
        fwd(&uk, &g(&k, "lambda"))?,
        g(&k, "lambda").scale_re(1.0 / c),
    );
    check(
        "Ucl'theta Ucl = c theta",
        fwd(&uk, &g(&k, "theta"))?,
        g(&k, "theta").scale_re(c),
    );
    check(
        "Rcl'p Rcl = p + c cdot x",
        fwd(&rk, &g(&k, "p"))?,
        g(&k, "p").add(&g(&k, "x").scale_re(a)),
    );
    check(
        "Rcl'lambda Rcl = lambda - c cdot theta",
        fwd(&rk, &g(&k, "lambda"))?,
        g(&k, "lambda").sub(&g(&k, "theta").scale_re(a)),
    );
    Ok(out)
}

/// The generator identities `Ĥ′`, `Ĥ″`, `K̂′`, `K̂″` at one sample.
pub fn generator_checks(v: ScaleValues) -> Result<Vec<IdentityCheck>> {
    let q = Algebra::quantum();
    let k = Algebra::kvn();
    let h = w(&q, &["p", "p"]).scale_re(0.5);
    let kf = w(&k, &["p", "lambda"]);
    let qs = quantum_steps(&q, v);
    let ks = kvn_steps(&k, v);
    Ok(vec![
        IdentityCheck {
            name: "H' (squeezed free Hamiltonian)",
            residual: transform_generator(&h, &qs[..1])?.max_abs_diff(&expected_h_prime(&q, v)),
        },
        IdentityCheck {
            name: "H'' (squeezed and gauged)",
            residual: transform_generator(&h, &qs)?.max_abs_diff(&expected_h_double_prime(&q, v)),
        },
        IdentityCheck {
            name: "K' (squeezed free Koopman operator)",
            residual: transform_generator(&kf, &ks[..1])?.max_abs_diff(&expected_k_prime(&k, v)),
        },
        IdentityCheck {
            name: "K'' (squeezed and gauged)",
            residual: transform_generator(&kf, &ks)?
                .max_abs_diff(&expected_k_double_prime(&k, v)),
        },
    ])
}

/// Outcome of the KvN minimal-coupling substitution for `Â = a x̂`.
#[derive(Debug, Clone)]
pub struct MinimalCoupling {
    /// `½[(p̂−Â)λ̂ + λ̂(p̂−Â)] + ½ ∂Â/∂x̂ [(p̂−Â)θ̂ + θ̂(p̂−Â)]`.
    pub substituted: OperatorPoly,
    /// `c² K̂′` obtained by squeezing `p̂λ̂` with `ċ = a/c`.
    pub c2_k_prime: OperatorPoly,
    /// `max |substituted − c²K̂′|`, the literal identity.
    pub literal_residual: f64,
    /// Coefficient of `x̂θ̂` in `c²K̂′ − substituted`.
    pub missing_x_theta: f64,
}

/// Builds the minimal-coupling substitution for `Â = a_coeff · x̂` and compares
/// it with `c²K̂′` at the given `c` (with `cċ = a_coeff`).
pub fn verify_minimal_coupling(a_coeff: f64, c: f64) -> Result<MinimalCoupling> {
    let k = Algebra::kvn();
    let half = 0.5;
    let shifted_p = g(&k, "p").sub(&g(&k, "x").scale_re(a_coeff));
    let lam = g(&k, "lambda");
    let th = g(&k, "theta");
    let first = shifted_p.mul(&lam)?.add(&lam.mul(&shifted_p)?).scale_re(half);
    let second = shifted_p
        .mul(&th)?
        .add(&th.mul(&shifted_p)?)
        .scale_re(half * a_coeff);
    let substituted = first.add(&second);

    let v = ScaleValues {
        c,
        cdot: a_coeff / c,
        cddot: 0.0,
    };
    let c2_k_prime = transform_generator(
        &w(&k, &["p", "lambda"]),
        &[kvn_squeeze(&k, KVN, v)],
    )?
    .scale_re(c * c);
    let diff = c2_k_prime.sub(&substituted);
    Ok(MinimalCoupling {
        literal_residual: diff.max_abs(),
        missing_x_theta: diff.coeff(&[("x", 1), ("theta", 1)]).re,
        substituted,
        c2_k_prime,
    })
}

/// Which printed sign to use for the classical closed-form exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormSign {
    /// `(1 − (c²+1)/(c²−1))`, the coefficient obtained from `f(u)` with the
    /// commutator evaluated in the algebra.
    Derived,
    /// `(1 + (c²+1)/(c²−1))`, as printed for the classical unitary.
    Printed,
}

/// `ln c / (c² − 1)`, finite at `c = 1`.
fn log_ratio(c: f64) -> f64 {
    let h = c - 1.0;
    if h == 0.0 {
        0.5
    } else {
        h.ln_1p() / (h * (2.0 + h))
    }
}

/// Coefficients of a combined generator `G = dilation · D + quadratic · Q`,
/// where `D` is the sector's dilation operator (`x̂p̂+p̂x̂`, or `−S` for KvN)
/// and `Q` is `x̂²` (quantum) or `x̂θ̂` (KvN).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub dilation: f64,
    pub quadratic: f64,
}

/// `𝒰 = ÛR̂ = exp(−iG)` with
/// `G = (ln c/2)[cċ(1 − (c²+1)/(c²−1)) x̂² + x̂p̂ + p̂x̂]`.
pub fn quantum_closed_form(v: ScaleValues) -> ClosedForm {
    ClosedForm {
        dilation: v.c.ln() / 2.0,
        quadratic: -v.gauge() * log_ratio(v.c),
    }
}

/// `𝒰_cl = Û_cl R̂_cl = exp(−iG)` with
/// `G = ln c [cċ(1 ∓ (c²+1)/(c²−1))·(∓1) x̂θ̂ + ½(x̂λ̂ + λ̂x̂ − p̂θ̂ − θ̂p̂)]`.
pub fn kvn_closed_form(v: ScaleValues, sign: ClosedFormSign) -> ClosedForm {
    let quadratic = match sign {
        // ln c · cċ · 2/(c²−1)
        ClosedFormSign::Derived => 2.0 * v.gauge() * log_ratio(v.c),
        // ln c · cċ · 2c²/(c²−1)
        ClosedFormSign::Printed => 2.0 * v.gauge() * v.c * v.c * log_ratio(v.c),
    };
    ClosedForm {
        dilation: v.c.ln() / 2.0,
        quadratic,
    }
}

pub fn quantum_closed_form_generator(alg: &Arc<Algebra>, v: ScaleValues) -> OperatorPoly {
    let cf = quantum_closed_form(v);
    quantum_dilation(alg, QUANTUM)
        .scale_re(cf.dilation)
        .add(&w(alg, &["x", "x"]).scale_re(cf.quadratic))
}

pub fn kvn_closed_form_generator(
    alg: &Arc<Algebra>,
    v: ScaleValues,
    sign: ClosedFormSign,
) -> OperatorPoly {
    let cf = kvn_closed_form(v, sign);
    kvn_dilation(alg, KVN)
        .scale_re(-cf.dilation)
        .add(&w(alg, &["x", "theta"]).scale_re(cf.quadratic))
}

/// Residuals of one closed-form check at a sample `(c, ċ)`.
#[derive(Debug, Clone)]
pub struct ClosedFormCheck {
    /// `max |u − (−2 ln c)|`.
    pub u_residual: f64,
    /// `max |G_bch − G_closed|` where `G_bch = i Z` from `bch_combine`.
    pub generator_residual: f64,
    /// Largest coefficient mismatch between conjugation by `exp(Z)` and by
    /// `exp(X)` followed by `exp(Y)`, over all generators.
    pub adjoint_residual: f64,
}

fn adjoint_equivalence(z_gen: &OperatorPoly, steps: &[OperatorPoly]) -> Result<f64> {
    let alg = z_gen.algebra().clone();
    let mut worst: f64 = 0.0;
    for name in alg.names() {
        let a = g(&alg, name);
        let single = adjoint_conjugate(z_gen, &a, Conjugation::Forward)?;
        let mut composed = a.clone();
        for s in steps {
            composed = adjoint_conjugate(s, &composed, Conjugation::Forward)?;
        }
        worst = worst.max(single.max_abs_diff(&composed));
    }
    Ok(worst)
}

/// Checks the quantum combined unitary against the composition `ÛR̂`.
pub fn check_quantum_closed_form(v: ScaleValues) -> Result<ClosedFormCheck> {
    let q = Algebra::quantum();
    let u = quantum_squeeze(&q, QUANTUM, v).generator;
    let r = quantum_gauge(&q, QUANTUM, v).generator;
    // exp(X) = exp(−iG_U), exp(Y) = exp(−iG_R).
    let bch = bch_combine(&u.scale(-I), &r.scale(-I))?;
    let g_bch = bch.z.scale(I);
    let closed = quantum_closed_form_generator(&q, v);
    Ok(ClosedFormCheck {
        u_residual: (bch.u - Complex64::new(-2.0 * v.c.ln(), 0.0)).norm(),
        generator_residual: g_bch.max_abs_diff(&closed),
        adjoint_residual: adjoint_equivalence(&closed, &[u, r])?,
    })
}

/// Checks a classical combined unitary (with either sign) against `Û_cl R̂_cl`.
pub fn check_kvn_closed_form(v: ScaleValues, sign: ClosedFormSign) -> Result<ClosedFormCheck> {
    let k = Algebra::kvn();
    let u = kvn_squeeze(&k, KVN, v).generator;
    let r = kvn_gauge(&k, KVN, v).generator;
    let bch = bch_combine(&u.scale(-I), &r.scale(-I))?;
    let g_bch = bch.z.scale(I);
    let closed = kvn_closed_form_generator(&k, v, sign);
    Ok(ClosedFormCheck {
        u_residual: (bch.u - Complex64::new(-2.0 * v.c.ln(), 0.0)).norm(),
        generator_residual: g_bch.max_abs_diff(&closed),
        adjoint_residual: adjoint_equivalence(&closed, &[u, r])?,
    })
}

/// Outcome of transforming the hybrid quantum-classical Liouvillian.
#[derive(Debug, Clone)]
pub struct HybridReport {
    /// Coupling constant read off the transformed, time-rescaled generator.
    pub coupling: f64,
    /// `c⁴ k`.
    pub expected_coupling: f64,
    /// Largest coefficient mismatch against the harmonic hybrid Liouvillian
    /// with coupling `c⁴k`.
    pub residual: f64,
    pub pass: bool,
}

/// `𝓛_h = Λ̂P̂ + ½p̂² − (k/2) x̂(Θ̂ + X̂)`.
pub fn hybrid_liouvillian(alg: &Arc<Algebra>, k: f64) -> OperatorPoly {
    w(alg, &["Lambda", "P"])
        .add(&w(alg, &["p", "p"]).scale_re(0.5))
        .sub(&w(alg, &["x", "Theta"]).add(&w(alg, &["x", "X"])).scale_re(k / 2.0))
}

/// Transforms the hybrid Liouvillian with the quantum unitaries on `(x, p)`
/// and the classical ones on `(X, P, Λ, Θ)`, rescales time by `c²`, and reads
/// off the coupling.
pub fn verify_hybrid_scaling(
    k: f64,
    c: f64,
    cdot: f64,
    cddot: f64,
    omega: f64,
) -> Result<HybridReport> {
    let h = Algebra::hybrid();
    let v = ScaleValues { c, cdot, cddot };
    let steps = [
        quantum_squeeze(&h, QUANTUM, v),
        quantum_gauge(&h, QUANTUM, v),
        kvn_squeeze(&h, HYBRID_CLASSICAL, v),
        kvn_gauge(&h, HYBRID_CLASSICAL, v),
    ];
    let transformed = transform_generator(&hybrid_liouvillian(&h, k), &steps)?.scale_re(c * c);
    let c4k = c.powi(4) * k;
    let w2 = omega * omega;
    let expected = w(&h, &["p", "p"])
        .scale_re(0.5)
        .add(&w(&h, &["x", "x"]).scale_re(0.5 * w2))
        .add(&w(&h, &["Lambda", "P"]))
        .sub(&w(&h, &["X", "Theta"]).scale_re(w2))
        .sub(&w(&h, &["x", "Theta"]).add(&w(&h, &["x", "X"])).scale_re(c4k / 2.0));
    let coupling = -2.0 * transformed.coeff(&[("x", 1), ("Theta", 1)]).re;
    let residual = transformed.max_abs_diff(&expected);
    Ok(HybridReport {
        coupling,
        expected_coupling: c4k,
        residual,
        pass: residual <= 1e-10 && (coupling - c4k).abs() <= 1e-10 * c4k.abs().max(1.0),
    })
}
