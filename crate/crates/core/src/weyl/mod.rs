//! Exact symbolic algebra for polynomials in canonical generators whose
//! commutators are central scalars (Heisenberg-type algebras).
//!
//! Every polynomial is stored normal-ordered: each monomial is an exponent
//! vector over the algebra's generators taken in their declared order. A
//! product is brought back to normal form by moving generators left and
//! collecting the scalar contractions `[g_i, g_j]`.

mod bch;
mod conjugate;
pub mod mapping;

pub use bch::{bch_coefficient, bch_combine, BchResult};
pub use conjugate::{adjoint_conjugate, transform_generator, Conjugation, TransformStep};

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Highest total degree any stored polynomial may reach.
pub const MAX_DEGREE: usize = 6;

/// Coefficients smaller than this are dropped after every operation.
pub const PRUNE: f64 = 1e-14;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Generators and their (central) commutator table.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    names: Vec<String>,
    comm: Vec<Vec<Complex64>>,
}

impl Algebra {
    /// Builds an algebra from generator names and pairwise commutators
    /// `[a, b] = value`. Unlisted pairs commute.
    pub fn new(names: &[&str], relations: &[(&str, &str, Complex64)]) -> Result<Self> {
        let g = names.len();
        let mut comm = vec![vec![Complex64::new(0.0, 0.0); g]; g];
        let index = |n: &str| {
            names
                .iter()
                .position(|m| *m == n)
                .ok_or_else(|| Error::Structure(format!("unknown generator {n}")))
        };
        for &(a, b, v) in relations {
            let (i, j) = (index(a)?, index(b)?);
            if i == j {
                return Err(Error::Structure(format!("[{a},{a}] must vanish")));
            }
            comm[i][j] = v;
            comm[j][i] = -v;
        }
        Ok(Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            comm,
        })
    }

    /// `(x, p)` with `[x, p] = i`.
    pub fn quantum() -> Arc<Self> {
        Arc::new(Self::new(&["x", "p"], &[("x", "p", I)]).expect("valid preset"))
    }

    /// `(x, p, lambda, theta)` with `[x, lambda] = [p, theta] = i`.
    pub fn kvn() -> Arc<Self> {
        Arc::new(
            Self::new(
                &["x", "p", "lambda", "theta"],
                &[("x", "lambda", I), ("p", "theta", I)],
            )
            .expect("valid preset"),
        )
    }

    /// Quantum `(x, p)` joined with a classical KvN sector
    /// `(X, P, Lambda, Theta)`; the sectors commute.
    pub fn hybrid() -> Arc<Self> {
        Arc::new(
            Self::new(
                &["x", "p", "X", "P", "Lambda", "Theta"],
                &[("x", "p", I), ("X", "Lambda", I), ("P", "Theta", I)],
            )
            .expect("valid preset"),
        )
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `[g_i, g_j]`.
    pub fn commutator_of(&self, i: usize, j: usize) -> Complex64 {
        self.comm[i][j]
    }
}

/// Exponent vector over the generators, in canonical order.
pub type Monomial = Vec<u8>;

fn degree_of(m: &Monomial) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// A normal-ordered polynomial with complex coefficients.
#[derive(Clone)]
pub struct OperatorPoly {
    algebra: Arc<Algebra>,
    terms: BTreeMap<Monomial, Complex64>,
}

impl OperatorPoly {
    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        Self {
            algebra: algebra.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(algebra: &Arc<Algebra>, value: Complex64) -> Self {
        let mut p = Self::zero(algebra);
        p.add_term(vec![0; algebra.len()], value);
        p
    }

    pub fn one(algebra: &Arc<Algebra>) -> Self {
        Self::scalar(algebra, Complex64::new(1.0, 0.0))
    }

    /// A single generator. Panics on unknown names, which are programming
    /// errors for the fixed presets.
    pub fn generator(algebra: &Arc<Algebra>, name: &str) -> Self {
        let i = algebra
            .index(name)
            .unwrap_or_else(|| panic!("unknown generator {name}"));
        let mut m = vec![0; algebra.len()];
        m[i] = 1;
        let mut p = Self::zero(algebra);
        p.add_term(m, Complex64::new(1.0, 0.0));
        p
    }

    /// The product of the named generators in the order given, normal-ordered.
    pub fn word(algebra: &Arc<Algebra>, names: &[&str]) -> Result<Self> {
        let mut p = Self::one(algebra);
        for n in names {
            p = p.mul(&Self::generator(algebra, n))?;
        }
        Ok(p)
    }

    pub fn from_terms(
        algebra: &Arc<Algebra>,
        terms: impl IntoIterator<Item = (Monomial, Complex64)>,
    ) -> Self {
        let mut p = Self::zero(algebra);
        for (m, c) in terms {
            assert_eq!(m.len(), algebra.len(), "monomial length mismatch");
            p.add_term(m, c);
        }
        p.prune();
        p
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(degree_of).max().unwrap_or(0)
    }

    /// Coefficient of the normal-ordered monomial `Π name^exp`.
    pub fn coeff(&self, powers: &[(&str, u8)]) -> Complex64 {
        let mut m = vec![0u8; self.algebra.len()];
        for &(n, e) in powers {
            let i = self
                .algebra
                .index(n)
                .unwrap_or_else(|| panic!("unknown generator {n}"));
            m[i] += e;
        }
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn coeff_of(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        *self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE);
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || *self.algebra == *other.algebra {
            Ok(())
        } else {
            Err(Error::Structure("operands belong to different algebras".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_algebra(other).expect("algebra mismatch in add");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(&self.algebra);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out.prune();
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Right-multiplies every term by generator `j` and normal-orders.
    fn mul_generator(&self, j: usize) -> Self {
        let alg = &self.algebra;
        let mut out = Self::zero(alg);
        for (m, &a) in &self.terms {
            let mut raised = m.clone();
            raised[j] += 1;
            out.add_term(raised, a);
            // Move g_j left past every g_i (i > j): each passage leaves the
            // central contraction e_i [g_i, g_j] times the monomial with one
            // fewer g_i.
            for i in (j + 1)..alg.len() {
                let e = m[i];
                let k = alg.comm[i][j];
                if e == 0 || k == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut lowered = m.clone();
                lowered[i] -= 1;
                out.add_term(lowered, a * k * e as f64);
            }
        }
        out
    }

    /// Normal-ordered product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let degree = self.degree() + other.degree();
        if !self.is_zero() && !other.is_zero() && degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow {
                degree,
                limit: MAX_DEGREE,
            });
        }
        let mut out = Self::zero(&self.algebra);
        for (m, &b) in &other.terms {
            let mut acc = self.scale(b);
            for (j, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.mul_generator(j);
                }
            }
            for (mm, c) in acc.terms {
                out.add_term(mm, c);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Hermitian adjoint. Reverses each monomial and conjugates coefficients;
    /// the generators themselves are Hermitian.
    pub fn adjoint(&self) -> Self {
        let alg = &self.algebra;
        let mut out = Self::zero(alg);
        for (m, c) in &self.terms {
            let mut word = Self::scalar(alg, c.conj());
            for j in (0..m.len()).rev() {
                for _ in 0..m[j] {
                    word = word.mul_generator(j);
                }
            }
            for (mm, cc) in word.terms {
                out.add_term(mm, cc);
            }
        }
        out.prune();
        out
    }
}

impl fmt::Debug for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·{}", self.algebra.names[i])?,
                    _ => write!(f, "·{}^{}", self.algebra.names[i], e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_relation() {
        let q = Algebra::quantum();
        let x = OperatorPoly::generator(&q, "x");
        let p = OperatorPoly::generator(&q, "p");
        let xp = x.mul(&p).unwrap();
        let px = p.mul(&x).unwrap();
        let diff = xp.sub(&px);
        assert!(diff.max_abs_diff(&OperatorPoly::scalar(&q, I)) < 1e-15);
        // p·x = x·p − i in the x-before-p order.
        assert_eq!(px.coeff(&[("x", 1), ("p", 1)]), c(1.0, 0.0));
        assert_eq!(px.coeff(&[]), c(0.0, -1.0));
    }

    #[test]
    fn identity_is_neutral() {
        let k = Algebra::kvn();
        let a = OperatorPoly::word(&k, &["theta", "p", "x", "lambda"]).unwrap();
        let one = OperatorPoly::one(&k);
        assert!(one.mul(&a).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(a.mul(&one).unwrap().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn square_of_sum_matches_brute_force_expansion() {
        // (x+p)^2 = x^2 + xp + px + p^2 = x^2 + 2xp − i + p^2.
        let q = Algebra::quantum();
        let s = OperatorPoly::generator(&q, "x").add(&OperatorPoly::generator(&q, "p"));
        let sq = s.mul(&s).unwrap();
        let expected = OperatorPoly::from_terms(
            &q,
            [
                (vec![2, 0], c(1.0, 0.0)),
                (vec![1, 1], c(2.0, 0.0)),
                (vec![0, 2], c(1.0, 0.0)),
                (vec![0, 0], c(0.0, -1.0)),
            ],
        );
        assert!(sq.max_abs_diff(&expected) < 1e-15, "{sq}");
    }

    #[test]
    fn products_are_associative() {
        let k = Algebra::kvn();
        let a = OperatorPoly::word(&k, &["lambda", "x"]).unwrap();
        let b = OperatorPoly::word(&k, &["theta", "p"]).unwrap().add(&OperatorPoly::generator(&k, "x"));
        let d = OperatorPoly::word(&k, &["p", "lambda"]).unwrap();
        let left = a.mul(&b).unwrap().mul(&d).unwrap();
        let right = a.mul(&b.mul(&d).unwrap()).unwrap();
        assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn degree_overflow_is_reported() {
        let q = Algebra::quantum();
        let x4 = OperatorPoly::word(&q, &["x", "x", "x", "x"]).unwrap();
        let p3 = OperatorPoly::word(&q, &["p", "p", "p"]).unwrap();
        assert!(matches!(
            x4.mul(&p3),
            Err(Error::DegreeOverflow { degree: 7, limit: 6 })
        ));
    }

    #[test]
    fn dilation_commutator_with_x_squared() {
        let q = Algebra::quantum();
        let d = OperatorPoly::word(&q, &["x", "p"])
            .unwrap()
            .add(&OperatorPoly::word(&q, &["p", "x"]).unwrap());
        let x2 = OperatorPoly::word(&q, &["x", "x"]).unwrap();
        let got = d.commutator(&x2).unwrap();
        assert!(got.max_abs_diff(&x2.scale(c(0.0, -4.0))) < 1e-15, "{got}");
    }

    #[test]
    fn kvn_dilation_commutator_with_shear() {
        // With [x,lambda] = [p,theta] = i the commutator evaluates to +4i x theta.
        let k = Algebra::kvn();
        let w = |n: &[&str]| OperatorPoly::word(&k, n).unwrap();
        let s = w(&["p", "theta"])
            .add(&w(&["theta", "p"]))
            .sub(&w(&["x", "lambda"]))
            .sub(&w(&["lambda", "x"]));
        let xt = w(&["x", "theta"]);
        let got = s.commutator(&xt).unwrap();
        assert!(got.max_abs_diff(&xt.scale(c(0.0, 4.0))) < 1e-15, "{got}");
    }

    #[test]
    fn kvn_fundamental_relations() {
        let k = Algebra::kvn();
        let g = |n| OperatorPoly::generator(&k, n);
        assert!(g("x").commutator(&g("theta")).unwrap().is_zero());
        assert!(g("lambda").commutator(&g("theta")).unwrap().is_zero());
        assert!(g("lambda").commutator(&g("p")).unwrap().is_zero());
        let xl = g("x").commutator(&g("lambda")).unwrap();
        assert!(xl.max_abs_diff(&OperatorPoly::scalar(&k, I)) < 1e-15);
        let pt = g("p").commutator(&g("theta")).unwrap();
        assert!(pt.max_abs_diff(&OperatorPoly::scalar(&k, I)) < 1e-15);
    }

    #[test]
    fn hybrid_sectors_commute() {
        let h = Algebra::hybrid();
        let g = |n| OperatorPoly::generator(&h, n);
        for a in ["x", "p"] {
            for b in ["X", "P", "Lambda", "Theta"] {
                assert!(g(a).commutator(&g(b)).unwrap().is_zero());
            }
        }
        let xp = g("x").commutator(&g("p")).unwrap();
        assert!(xp.max_abs_diff(&OperatorPoly::scalar(&h, I)) < 1e-15);
    }

    #[test]
    fn adjoint_of_xp() {
        let q = Algebra::quantum();
        let xp = OperatorPoly::word(&q, &["x", "p"]).unwrap();
        let px = OperatorPoly::word(&q, &["p", "x"]).unwrap();
        assert!(xp.adjoint().max_abs_diff(&px) < 1e-15);
    }
}
