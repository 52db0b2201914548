//! Small dense linear algebra: matrix exponential and Hermitian trace norms.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

fn one_norm(a: &Array2<Complex64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring around a truncated Taylor series.
///
/// `A` is scaled by `2^-s` until its 1-norm is at most 1/2, where the series
/// converges to double precision within 20 terms.
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(s));

    let mut result = Array2::<Complex64>::eye(n);
    let mut term = Array2::<Complex64>::eye(n);
    for k in 1..=30 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        result += &term;
        if one_norm(&term) <= 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Eigenvalues of a Hermitian matrix (the anti-Hermitian part is ignored).
pub fn hermitian_eigenvalues(a: &Array2<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[[i, j]] + a[[j, i]].conj()));
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// Trace norm `Σ|λ_i|` of a Hermitian matrix.
pub fn hermitian_trace_norm(a: &Array2<Complex64>) -> f64 {
    hermitian_eigenvalues(a).iter().map(|l| l.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn expm_of_nilpotent_is_polynomial() {
        let z = Complex64::new(0.0, 0.0);
        let a = array![[z, Complex64::new(3.0, 0.0)], [z, z]];
        let e = expm(&a);
        assert!((e[[0, 1]] - Complex64::new(3.0, 0.0)).norm() < 1e-15);
        assert!((e[[0, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let theta = 7.3;
        let z = Complex64::new(0.0, 0.0);
        let a = array![
            [z, Complex64::new(-theta, 0.0)],
            [Complex64::new(theta, 0.0), z]
        ];
        let e = expm(&a);
        assert!((e[[0, 0]].re - theta.cos()).abs() < 1e-13);
        assert!((e[[1, 0]].re - theta.sin()).abs() < 1e-13);
    }

    #[test]
    fn trace_norm_of_diagonal() {
        let a = array![
            [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-0.25, 0.0)]
        ];
        assert!((hermitian_trace_norm(&a) - 0.75).abs() < 1e-15);
    }
}
