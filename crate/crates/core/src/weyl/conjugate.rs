use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::collections::{BTreeMap, VecDeque};

use super::{Monomial, OperatorPoly, I};
use crate::error::{Error, Result};
use crate::linalg::expm;

/// Direction of a conjugation by `U = exp(−iG)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjugation {
    /// `U† A U`, i.e. `exp(i ad_G) A`.
    Forward,
    /// `U A U†`, i.e. `exp(−i ad_G) A`.
    Inverse,
}

/// Degree bound on the conjugated operand.
const MAX_OPERAND_DEGREE: usize = 4;

/// Conjugates `a` by `U = exp(−iG)` for a generator of degree at most two.
///
/// With central commutators, `ad_G` never raises degree, so the monomials
/// reachable from `a` span a finite invariant subspace. The adjoint action is
/// assembled as a matrix on that subspace and exponentiated exactly.
pub fn adjoint_conjugate(
    g: &OperatorPoly,
    a: &OperatorPoly,
    direction: Conjugation,
) -> Result<OperatorPoly> {
    g.same_algebra(a)?;
    if g.degree() > 2 {
        return Err(Error::Structure(format!(
            "conjugation generator must have degree <= 2, got {}",
            g.degree()
        )));
    }
    if a.degree() > MAX_OPERAND_DEGREE {
        return Err(Error::DegreeOverflow {
            degree: a.degree(),
            limit: MAX_OPERAND_DEGREE,
        });
    }
    if g.is_zero() || a.is_zero() {
        return Ok(a.clone());
    }
    let alg = a.algebra().clone();
    let factor = match direction {
        Conjugation::Forward => I,
        Conjugation::Inverse => -I,
    };

    // Close the span of `a`'s monomials under ad_G.
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    let mut basis: Vec<Monomial> = Vec::new();
    let mut images: Vec<OperatorPoly> = Vec::new();
    let mut queue: VecDeque<Monomial> = a.terms.keys().cloned().collect();
    for m in &queue {
        index.insert(m.clone(), basis.len());
        basis.push(m.clone());
    }
    while let Some(m) = queue.pop_front() {
        let mono = OperatorPoly::from_terms(&alg, [(m.clone(), Complex64::new(1.0, 0.0))]);
        let image = g.commutator(&mono)?.scale(factor);
        for mm in image.terms.keys() {
            if !index.contains_key(mm) {
                index.insert(mm.clone(), basis.len());
                basis.push(mm.clone());
                queue.push_back(mm.clone());
            }
        }
        images.push(image);
    }
    // `images` was filled in queue order, which is basis order.
    let n = basis.len();
    let mut ad = Array2::<Complex64>::zeros((n, n));
    for (j, image) in images.iter().enumerate() {
        for (m, c) in image.terms() {
            ad[[index[m], j]] = *c;
        }
    }
    let mut v = Array1::<Complex64>::zeros(n);
    for (m, c) in a.terms() {
        v[index[m]] = *c;
    }
    let out = expm(&ad).dot(&v);
    Ok(OperatorPoly::from_terms(
        &alg,
        basis.into_iter().zip(out.iter().copied()),
    ))
}

/// One unitary step `U = exp(−iG)` together with its connection term
/// `−i U† ∂U/∂t`, supplied in closed form.
#[derive(Debug, Clone)]
pub struct TransformStep {
    pub generator: OperatorPoly,
    pub connection: OperatorPoly,
}

/// Applies `H → U† H U − i U† ∂U/∂t` for each step in order.
pub fn transform_generator(h: &OperatorPoly, steps: &[TransformStep]) -> Result<OperatorPoly> {
    let mut out = h.clone();
    for step in steps {
        out = adjoint_conjugate(&step.generator, &out, Conjugation::Forward)?.add(&step.connection);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::Algebra;

    #[test]
    fn squeezing_scales_position() {
        let q = Algebra::quantum();
        let w = |n: &[&str]| OperatorPoly::word(&q, n).unwrap();
        let c = 2.0f64;
        let g = w(&["x", "p"]).add(&w(&["p", "x"])).scale_re(c.ln() / 2.0);
        let x = OperatorPoly::generator(&q, "x");
        let got = adjoint_conjugate(&g, &x, Conjugation::Forward).unwrap();
        assert!(got.max_abs_diff(&x.scale_re(2.0)) < 1e-14, "{got}");
    }

    #[test]
    fn zero_generator_is_identity() {
        let k = Algebra::kvn();
        let a = OperatorPoly::word(&k, &["p", "lambda", "theta"]).unwrap();
        let got = adjoint_conjugate(&OperatorPoly::zero(&k), &a, Conjugation::Forward).unwrap();
        assert!(got.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn gauge_shifts_momentum() {
        let q = Algebra::quantum();
        let (c, cdot) = (2f64.sqrt(), 0.5f64.sqrt());
        let g = OperatorPoly::word(&q, &["x", "x"]).unwrap().scale_re(-c * cdot / 2.0);
        let p = OperatorPoly::generator(&q, "p");
        let got = adjoint_conjugate(&g, &p, Conjugation::Forward).unwrap();
        let expected = p.add(&OperatorPoly::generator(&q, "x"));
        assert!(got.max_abs_diff(&expected) < 1e-14, "{got}");
    }

    #[test]
    fn cubic_generator_is_rejected() {
        let q = Algebra::quantum();
        let g = OperatorPoly::word(&q, &["x", "x", "p"]).unwrap();
        let x = OperatorPoly::generator(&q, "x");
        assert!(matches!(
            adjoint_conjugate(&g, &x, Conjugation::Forward),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn inverse_undoes_forward() {
        let k = Algebra::kvn();
        let w = |n: &[&str]| OperatorPoly::word(&k, n).unwrap();
        let g = w(&["x", "theta"]).scale_re(0.7).add(&w(&["p", "lambda"]).scale_re(-0.3));
        let a = w(&["x", "x", "lambda"]).add(&w(&["theta", "p"]));
        let there = adjoint_conjugate(&g, &a, Conjugation::Forward).unwrap();
        let back = adjoint_conjugate(&g, &there, Conjugation::Inverse).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-12);
    }
}
