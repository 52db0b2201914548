use num_complex::Complex64;

use super::OperatorPoly;
use crate::error::{Error, Result};

/// Below this `|u|` the series `1 + u/2 + u²/12` replaces the closed form.
const SERIES_THRESHOLD: f64 = 1e-6;

/// `f(u) = (u/2)(1 + coth(u/2))`, the coefficient in
/// `exp(X) exp(Y) = exp(X + f(u) Y)` when `[X, Y] = u Y`.
pub fn bch_coefficient(u: Complex64) -> Complex64 {
    if u.norm() < SERIES_THRESHOLD {
        return 1.0 + u / 2.0 + u * u / 12.0;
    }
    let half = u / 2.0;
    half * (1.0 + half.cosh() / half.sinh())
}

#[derive(Debug, Clone)]
pub struct BchResult {
    /// `Z` with `exp(Z) = exp(X) exp(Y)`.
    pub z: OperatorPoly,
    /// The structure constant `u` in `[X, Y] = u Y`.
    pub u: Complex64,
    /// `f(u)`.
    pub coefficient: Complex64,
}

/// Combines `exp(X) exp(Y)` into a single exponential when `[X, Y] = u Y`.
pub fn bch_combine(x: &OperatorPoly, y: &OperatorPoly) -> Result<BchResult> {
    let comm = x.commutator(y)?;
    let y_norm_sq: f64 = y.terms().map(|(_, c)| c.norm_sqr()).sum();
    let u = if y_norm_sq == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        y.terms()
            .map(|(m, c)| c.conj() * comm.coeff_of(m))
            .sum::<Complex64>()
            / y_norm_sq
    };
    let residual = comm.sub(&y.scale(u)).max_abs();
    let scale = comm.max_abs() + y.max_abs();
    if residual > 1e-12 * scale.max(1.0) {
        return Err(Error::Structure(format!(
            "[X, Y] is not proportional to Y (residual {residual:.3e})"
        )));
    }
    let coefficient = bch_coefficient(u);
    Ok(BchResult {
        z: x.add(&y.scale(coefficient)),
        u,
        coefficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{Algebra, I};

    #[test]
    fn coefficient_values() {
        assert_eq!(bch_coefficient(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        let f = bch_coefficient(Complex64::new(-2.0, 0.0));
        // Direct evaluation: coth(1) − 1.
        let direct = 1.0f64.cosh() / 1.0f64.sinh() - 1.0;
        assert!((f.re - direct).abs() < 1e-15);
        assert!((f.re - 0.313_035).abs() < 1e-6);
        assert!(f.im.abs() < 1e-15);
    }

    #[test]
    fn series_and_closed_form_agree_at_the_switch() {
        for &u in &[0.99e-6, 1.01e-6, -1.01e-6, 1e-4] {
            let z = Complex64::new(u, 0.0);
            let closed = z / (1.0 - (-z).exp());
            assert!((bch_coefficient(z) - closed).norm() < 1e-10, "u = {u}");
        }
    }

    #[test]
    fn commuting_operands_add() {
        let q = Algebra::quantum();
        let x = OperatorPoly::generator(&q, "x").scale(I);
        let y = OperatorPoly::word(&q, &["x", "x"]).unwrap().scale(I * 0.3);
        let r = bch_combine(&x, &y).unwrap();
        assert_eq!(r.u, Complex64::new(0.0, 0.0));
        assert!(r.z.max_abs_diff(&x.add(&y)) < 1e-15);
    }

    #[test]
    fn squeeze_gauge_structure_constant() {
        let q = Algebra::quantum();
        let w = |n: &[&str]| OperatorPoly::word(&q, n).unwrap();
        let (c, cdot) = (1.7f64, 0.4f64);
        let x = w(&["x", "p"]).add(&w(&["p", "x"])).scale(-I * c.ln() / 2.0);
        let y = w(&["x", "x"]).scale(I * c * cdot / 2.0);
        let r = bch_combine(&x, &y).unwrap();
        assert!((r.u - Complex64::new(-2.0 * c.ln(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn non_proportional_commutator_is_rejected() {
        let q = Algebra::quantum();
        let x = OperatorPoly::word(&q, &["p", "p"]).unwrap();
        let y = OperatorPoly::word(&q, &["x", "x"]).unwrap();
        assert!(matches!(bch_combine(&x, &y), Err(Error::Structure(_))));
    }
}
