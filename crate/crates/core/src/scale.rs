//! The scaling schedule `c(t)` shared by every mapping in the crate.
//!
//! For the standard (harmonic) kind `c(t) = sqrt(1 + ω²t²)`, which solves
//! `c̈ c³ = ω²` with `c(0) = 1`, `ċ(0) = 0`. The associated clock is
//! `τ = arctan(ωt)/ω`, so that `dt = c² dτ` and `c(τ) = 1/cos(ωτ)`.
//!
//! The inverted kind is the formal substitution `ω → iω`: `c(t) =
//! sqrt(1 - ω²t²)`, `c̈ c³ = -ω²`, `τ = artanh(ωt)/ω`. It is only defined for
//! `|t| < 1/ω`.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// Free particle to harmonic oscillator.
    #[default]
    Standard,
    /// Free particle to inverted oscillator (`ω → iω`).
    Inverted,
}

/// Value and first two time derivatives of `c(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleValues {
    pub c: f64,
    pub cdot: f64,
    pub cddot: f64,
}

impl ScaleValues {
    /// The gauge coefficient `c ċ` that multiplies `x̂` in the vector potential.
    pub fn gauge(&self) -> f64 {
        self.c * self.cdot
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleProfile {
    omega: f64,
    kind: ProfileKind,
    t_max: f64,
}

impl ScaleProfile {
    pub fn new(omega: f64, kind: ProfileKind, t_max: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !(t_max > 0.0) || t_max.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        if kind == ProfileKind::Inverted && t_max * omega > 1.0 {
            return Err(Error::Domain(format!(
                "inverted profile horizon t_max={t_max} exceeds 1/omega={}",
                1.0 / omega
            )));
        }
        Ok(Self { omega, kind, t_max })
    }

    /// Standard profile valid for all finite `t`.
    pub fn standard(omega: f64) -> Result<Self> {
        Self::new(omega, ProfileKind::Standard, f64::INFINITY)
    }

    /// Inverted profile valid for `|t| < 1/ω`.
    pub fn inverted(omega: f64) -> Result<Self> {
        Self::new(omega, ProfileKind::Inverted, 1.0 / omega)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// `+ω²` for the standard kind, `-ω²` for the inverted kind; the
    /// coefficient of `x̂²` (times two) in the target Hamiltonian.
    pub fn signed_omega_sq(&self) -> f64 {
        match self.kind {
            ProfileKind::Standard => self.omega * self.omega,
            ProfileKind::Inverted => -self.omega * self.omega,
        }
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite, got {t}")));
        }
        if self.kind == ProfileKind::Inverted && (self.omega * t).abs() >= 1.0 {
            return Err(Error::Domain(format!(
                "inverted profile requires |t| < 1/omega = {}, got t = {t}",
                1.0 / self.omega
            )));
        }
        if t.abs() > self.t_max {
            return Err(Error::Domain(format!(
                "|t| = {} exceeds the profile horizon {}",
                t.abs(),
                self.t_max
            )));
        }
        Ok(())
    }

    pub fn eval_scale(&self, t: f64) -> Result<ScaleValues> {
        self.check_t(t)?;
        let w2 = self.signed_omega_sq();
        let c = (1.0 + w2 * t * t).sqrt();
        Ok(ScaleValues {
            c,
            cdot: w2 * t / c,
            cddot: w2 / (c * c * c),
        })
    }

    pub fn tau_of_t(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let wt = self.omega * t;
        Ok(match self.kind {
            ProfileKind::Standard => wt.atan() / self.omega,
            ProfileKind::Inverted => wt.atanh() / self.omega,
        })
    }

    /// Half-width of the open interval of admissible `τ` (infinite for the
    /// inverted kind).
    pub fn tau_limit(&self) -> f64 {
        match self.kind {
            ProfileKind::Standard => FRAC_PI_2 / self.omega,
            ProfileKind::Inverted => f64::INFINITY,
        }
    }

    pub fn t_of_tau(&self, tau: f64) -> Result<f64> {
        if !tau.is_finite() {
            return Err(Error::Domain(format!("tau must be finite, got {tau}")));
        }
        let wtau = self.omega * tau;
        let t = match self.kind {
            ProfileKind::Standard => {
                if tau.abs() >= self.tau_limit() {
                    return Err(Error::Domain(format!(
                        "tau = {tau} is outside (-pi/(2 omega), pi/(2 omega))"
                    )));
                }
                wtau.tan() / self.omega
            }
            ProfileKind::Inverted => wtau.tanh() / self.omega,
        };
        self.check_t(t)?;
        Ok(t)
    }

    /// `c` as a function of the oscillator clock: `1/cos(ωτ)` or `1/cosh(ωτ)`.
    pub fn c_of_tau(&self, tau: f64) -> Result<f64> {
        self.t_of_tau(tau)?;
        let wtau = self.omega * tau;
        Ok(match self.kind {
            ProfileKind::Standard => 1.0 / wtau.cos(),
            ProfileKind::Inverted => 1.0 / wtau.cosh(),
        })
    }
}
