//! One-dimensional Schrödinger dynamics on a periodic grid and the quantum
//! free-to-harmonic mapping `|ψ̄⟩ = R̂†Û†|ψ⟩` with `ωt = tan(ωτ)`.
//!
//! Units are `ħ = m = 1`. The squeezing `Û` acts as `(Ûψ)(x) = c^{-1/2} ψ(x/c)`
//! and is applied by band-limited resampling; the gauge `R̂` is the chirp
//! `e^{i cċ x²/2}`.

use num_complex::Complex64;
use std::io::Write;

use crate::error::{Error, Result};
use crate::scale::{ProfileKind, ScaleProfile};
use crate::spectral::{interpolate, wavenumbers, FftPair, Resampler};
use crate::weyl::mapping::quantum_closed_form;

/// Largest tolerated `‖lost‖/‖ψ‖` when a state is resampled.
pub const ALIASING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec1D {
    n: usize,
    x_min: f64,
    x_max: f64,
}

impl GridSpec1D {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= 64, got {n}"
            )));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { n, x_min, x_max })
    }

    /// `[−half_width, half_width)`.
    pub fn symmetric(n: usize, half_width: f64) -> Result<Self> {
        Self::new(n, -half_width, half_width)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        wavenumbers(self.n, self.length())
    }
}

#[derive(Debug, Clone)]
pub struct WaveFunction1D {
    pub grid: GridSpec1D,
    pub amplitudes: Vec<Complex64>,
    /// `t` on the free side, `τ` on the oscillator side.
    pub time: f64,
}

impl WaveFunction1D {
    pub fn new(grid: GridSpec1D, amplitudes: Vec<Complex64>, time: f64) -> Self {
        assert_eq!(grid.n(), amplitudes.len(), "amplitude count must match the grid");
        Self {
            grid,
            amplitudes,
            time,
        }
    }

    pub fn from_fn(grid: GridSpec1D, time: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.points().into_iter().map(f).collect();
        Self::new(grid, amplitudes, time)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let s = 1.0 / self.norm();
        self.amplitudes.iter_mut().for_each(|z| *z *= s);
    }

    /// `⟨self|other⟩ = Σ conj(ψ) φ dx`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (d * self.grid.dx()).sqrt()
    }

    /// `min_φ ‖e^{iφ}ψ − φ‖`, attained at the phase of `⟨ψ|φ⟩`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let d: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm_sqr())
            .sum();
        (d * self.grid.dx()).sqrt()
    }

    pub fn mean_x(&self) -> f64 {
        let dx = self.grid.dx();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(j, z)| self.grid.x(j) * z.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm_sqr()
    }

    pub fn var_x(&self) -> f64 {
        let m = self.mean_x();
        let dx = self.grid.dx();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(j, z)| (self.grid.x(j) - m).powi(2) * z.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm_sqr()
    }

    fn momentum_density(&self) -> (Vec<f64>, Vec<f64>) {
        let mut spec = self.amplitudes.clone();
        FftPair::new(self.grid.n()).forward(&mut spec);
        let w: Vec<f64> = spec.iter().map(|z| z.norm_sqr()).collect();
        (self.grid.wavenumbers(), w)
    }

    pub fn mean_p(&self) -> f64 {
        let (k, w) = self.momentum_density();
        let total: f64 = w.iter().sum();
        k.iter().zip(&w).map(|(k, w)| k * w).sum::<f64>() / total
    }

    pub fn var_p(&self) -> f64 {
        let (k, w) = self.momentum_density();
        let total: f64 = w.iter().sum();
        let m = k.iter().zip(&w).map(|(k, w)| k * w).sum::<f64>() / total;
        k.iter().zip(&w).map(|(k, w)| (k - m).powi(2) * w).sum::<f64>() / total
    }

    /// Spectral interpolation at an arbitrary point.
    pub fn value_at(&self, x: f64) -> Complex64 {
        interpolate(
            &self.amplitudes,
            self.grid.x_min(),
            self.grid.length(),
            x,
            &FftPair::new(self.grid.n()),
        )
    }

    /// Snapshot CSV with header `x,re_psi,im_psi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re_psi,im_psi")?;
        for (j, z) in self.amplitudes.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", self.grid.x(j), z.re, z.im)?;
        }
        Ok(())
    }
}

/// A Gaussian test state and whether it comfortably fits the grid.
#[derive(Debug, Clone)]
pub struct Gaussian {
    pub state: WaveFunction1D,
    /// Set when `x0 ± 5σ` leaves the domain.
    pub support_warning: bool,
}

/// Normalized `exp(−(x−x0)²/(2σ²) + i p0 x)`.
pub fn make_gaussian(grid: GridSpec1D, x0: f64, p0: f64, sigma: f64) -> Gaussian {
    let mut state = WaveFunction1D::from_fn(grid, 0.0, |x| {
        Complex64::from_polar((-(x - x0).powi(2) / (2.0 * sigma * sigma)).exp(), p0 * x)
    });
    state.normalize();
    let support_warning = x0 - 5.0 * sigma < grid.x_min() || x0 + 5.0 * sigma > grid.x_max();
    Gaussian {
        state,
        support_warning,
    }
}

/// Potential energy `V(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    /// `ω²x²/2`.
    Harmonic(f64),
    /// `−ω²x²/2`.
    Inverted(f64),
}

impl Potential {
    pub fn for_profile(profile: &ScaleProfile) -> Self {
        match profile.kind() {
            ProfileKind::Standard => Potential::Harmonic(profile.omega()),
            ProfileKind::Inverted => Potential::Inverted(profile.omega()),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic(w) => 0.5 * w * w * x * x,
            Potential::Inverted(w) => -0.5 * w * w * x * x,
        }
    }

    /// `V′(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic(w) => w * w * x,
            Potential::Inverted(w) => -w * w * x,
        }
    }
}

/// Exact free evolution: multiplies the spectrum by `e^{−ik²t/2}`.
pub fn propagate_free(psi: &WaveFunction1D, t: f64) -> WaveFunction1D {
    let fft = FftPair::new(psi.grid.n());
    let mut a = psi.amplitudes.clone();
    fft.forward(&mut a);
    for (z, k) in a.iter_mut().zip(psi.grid.wavenumbers()) {
        *z *= Complex64::from_polar(1.0, -0.5 * k * k * t);
    }
    fft.inverse(&mut a);
    WaveFunction1D::new(psi.grid, a, psi.time + t)
}

/// Strang splitting `e^{−iVh/2} e^{−iTh} e^{−iVh/2}` over `duration`, with the
/// step shortened so that an integer number of steps lands on `duration`.
pub fn propagate_split(
    psi: &WaveFunction1D,
    potential: Potential,
    duration: f64,
    max_step: f64,
) -> Result<WaveFunction1D> {
    if !(max_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {max_step}"
        )));
    }
    if duration == 0.0 {
        return Ok(psi.clone());
    }
    let steps = ((duration.abs() / max_step) - 1e-9).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let grid = psi.grid;
    let fft = FftPair::new(grid.n());
    let half_v: Vec<Complex64> = grid
        .points()
        .iter()
        .map(|&x| Complex64::from_polar(1.0, -0.5 * potential.value(x) * h))
        .collect();
    let full_v: Vec<Complex64> = half_v.iter().map(|z| z * z).collect();
    let kinetic: Vec<Complex64> = grid
        .wavenumbers()
        .iter()
        .map(|&k| Complex64::from_polar(1.0, -0.5 * k * k * h))
        .collect();
    let mut a = psi.amplitudes.clone();
    mul_in_place(&mut a, &half_v);
    for s in 0..steps {
        fft.forward(&mut a);
        mul_in_place(&mut a, &kinetic);
        fft.inverse(&mut a);
        mul_in_place(&mut a, if s + 1 == steps { &half_v } else { &full_v });
    }
    Ok(WaveFunction1D::new(grid, a, psi.time + duration))
}

/// Oscillator evolution `i∂ψ/∂τ = ½(p̂² + ω²x̂²)ψ` over `tau`.
pub fn propagate_harmonic(
    psi: &WaveFunction1D,
    omega: f64,
    tau: f64,
    dtau: f64,
) -> Result<WaveFunction1D> {
    propagate_split(psi, Potential::Harmonic(omega), tau, dtau)
}

fn mul_in_place(a: &mut [Complex64], b: &[Complex64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x *= y);
}

/// `Ĥψ` with the kinetic part applied spectrally.
pub fn apply_hamiltonian(psi: &WaveFunction1D, potential: Potential) -> WaveFunction1D {
    let fft = FftPair::new(psi.grid.n());
    let mut t = psi.amplitudes.clone();
    fft.forward(&mut t);
    for (z, k) in t.iter_mut().zip(psi.grid.wavenumbers()) {
        *z *= 0.5 * k * k;
    }
    fft.inverse(&mut t);
    for (j, z) in t.iter_mut().enumerate() {
        *z += potential.value(psi.grid.x(j)) * psi.amplitudes[j];
    }
    WaveFunction1D::new(psi.grid, t, psi.time)
}

/// Reusable squeezing `(Ûψ)(x) = c^{-1/2} ψ(x/c)` on a fixed grid.
pub struct Dilation {
    grid: GridSpec1D,
    c: f64,
    resampler: Resampler,
}

impl Dilation {
    pub fn new(grid: GridSpec1D, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must be positive, got {c}"
            )));
        }
        Ok(Self {
            grid,
            c,
            resampler: Resampler::new(grid.n(), grid.x_min(), grid.length(), 1.0 / c),
        })
    }

    /// Dilates `data` in place; returns the lost squared norm in grid units
    /// (`Σ|ψ_j|²`), whether it left through the band edge or the domain edge.
    pub fn apply_raw(&self, data: &mut [Complex64]) -> f64 {
        let s = 1.0 / self.c;
        let total: f64 = data.iter().map(|z| z.norm_sqr()).sum();
        let (lo, hi) = (self.grid.x_min(), self.grid.x_max());
        // Stretching samples only [s·x_min, s·x_max); the rest is lost.
        let mut lost = 0.0;
        if s < 1.0 {
            for (j, z) in data.iter().enumerate() {
                let x = self.grid.x(j);
                if x < s * lo || x >= s * hi {
                    lost += z.norm_sqr();
                }
            }
        }
        lost += self.resampler.apply(data) * total;
        let amp = s.sqrt();
        for (j, z) in data.iter_mut().enumerate() {
            let y = s * self.grid.x(j);
            // Compressing reaches outside the domain, where a localized state
            // vanishes; the periodic interpolant would wrap instead.
            if y < lo || y >= hi {
                *z = Complex64::new(0.0, 0.0);
            } else {
                *z *= amp;
            }
        }
        lost
    }

    pub fn apply(&self, psi: &WaveFunction1D) -> Result<WaveFunction1D> {
        let mut a = psi.amplitudes.clone();
        let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let lost = self.apply_raw(&mut a);
        check_aliasing(lost, total, self.c)?;
        Ok(WaveFunction1D::new(psi.grid, a, psi.time))
    }
}

pub(crate) fn check_aliasing(lost: f64, total: f64, c: f64) -> Result<()> {
    let fraction = if total > 0.0 { (lost / total).sqrt() } else { 0.0 };
    if fraction > ALIASING_TOLERANCE {
        return Err(Error::Aliasing {
            fraction,
            context: format!("dilation by {c}"),
        });
    }
    Ok(())
}

/// `Ûψ` with `Û†x̂Û = c x̂`, `Û†p̂Û = p̂/c`.
pub fn apply_dilation(psi: &WaveFunction1D, c: f64) -> Result<WaveFunction1D> {
    if c == 1.0 {
        return Ok(psi.clone());
    }
    Dilation::new(psi.grid, c)?.apply(psi)
}

/// Pointwise `e^{iαx²/2}`, so that `⟨p⟩ → ⟨p⟩ + α⟨x⟩`.
pub fn apply_chirp(psi: &WaveFunction1D, alpha: f64) -> WaveFunction1D {
    let mut out = psi.clone();
    chirp_in_place(&mut out.amplitudes, &psi.grid, alpha);
    out
}

pub(crate) fn chirp_in_place(a: &mut [Complex64], grid: &GridSpec1D, alpha: f64) {
    if alpha == 0.0 {
        return;
    }
    for (j, z) in a.iter_mut().enumerate() {
        let x = grid.x(j);
        *z *= Complex64::from_polar(1.0, 0.5 * alpha * x * x);
    }
}

/// `|ψ̄⟩ = R̂†(t) Û†(t) |ψ⟩`: squeeze by `1/c` first, then remove the chirp
/// `cċ`. The result is stamped with `τ(t)`.
pub fn map_free_to_harmonic(
    psi_free: &WaveFunction1D,
    profile: &ScaleProfile,
    t: f64,
) -> Result<WaveFunction1D> {
    let v = profile.eval_scale(t)?;
    let tau = profile.tau_of_t(t)?;
    let squeezed = apply_dilation(psi_free, 1.0 / v.c)?;
    let mut out = apply_chirp(&squeezed, -v.gauge());
    out.time = tau;
    Ok(out)
}

/// `|ψ⟩ = Û(t) R̂(t) |ψ̄⟩` at `t = t(τ)`.
pub fn map_harmonic_to_free(
    psi_harm: &WaveFunction1D,
    profile: &ScaleProfile,
    tau: f64,
) -> Result<WaveFunction1D> {
    let t = profile.t_of_tau(tau)?;
    let v = profile.eval_scale(t)?;
    let chirped = apply_chirp(psi_harm, v.gauge());
    let mut out = apply_dilation(&chirped, v.c)?;
    out.time = t;
    Ok(out)
}

/// Target accuracy of the Richardson-extrapolated generator flow.
const FLOW_TOLERANCE: f64 = 1e-8;
const FLOW_MAX_STEPS: usize = 1 << 12;

/// One Strang pass of `exp(−i[d(x̂p̂+p̂x̂) + q x̂²])` with `n` substeps.
fn quadratic_flow(
    psi: &WaveFunction1D,
    dilation: f64,
    quadratic: f64,
    n: usize,
) -> Result<Vec<Complex64>> {
    let h = 1.0 / n as f64;
    // exp(−i d h (x̂p̂+p̂x̂)) is the squeeze with ln c' = 2 d h.
    let squeeze = Dilation::new(psi.grid, (2.0 * dilation * h).exp())?;
    let total: f64 = psi.amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let mut a = psi.amplitudes.clone();
    let mut lost = 0.0;
    // exp(−i q (h/2) x̂²) is the chirp with α = −q h.
    chirp_in_place(&mut a, &psi.grid, -quadratic * h);
    for s in 0..n {
        lost += squeeze.apply_raw(&mut a);
        let alpha = if s + 1 == n { -quadratic * h } else { -2.0 * quadratic * h };
        chirp_in_place(&mut a, &psi.grid, alpha);
    }
    check_aliasing(lost, total, (2.0 * dilation).exp())?;
    Ok(a)
}

/// Drives a second-order `pass(n)` (with `n` substeps) to convergence:
/// successive Richardson combinations `(4S(2n) − S(n))/3` are compared until
/// they agree within `tol`.
pub(crate) fn richardson<T>(
    pass: impl Fn(usize) -> Result<T>,
    combine: impl Fn(&T, &T) -> T,
    distance: impl Fn(&T, &T) -> f64,
    tol: f64,
    max_steps: usize,
) -> Result<T> {
    let mut n = 4;
    let mut coarse = pass(n)?;
    let mut previous: Option<T> = None;
    loop {
        n *= 2;
        if n > max_steps {
            return Err(Error::Convergence(format!(
                "generator flow did not reach {tol:.1e} within {max_steps} substeps"
            )));
        }
        let fine = pass(n)?;
        let extrapolated = combine(&fine, &coarse);
        if let Some(prev) = &previous {
            if distance(&extrapolated, prev) <= tol {
                return Ok(extrapolated);
            }
        }
        previous = Some(extrapolated);
        coarse = fine;
    }
}

/// Integrates `dψ/ds = −iGψ` over `s ∈ [0, 1]` for the quadratic generator
/// `G = d(x̂p̂+p̂x̂) + q x̂²` by Strang splitting with Richardson extrapolation.
pub fn apply_quadratic_flow(psi: &WaveFunction1D, dilation: f64, quadratic: f64) -> Result<WaveFunction1D> {
    if dilation == 0.0 && quadratic == 0.0 {
        return Ok(psi.clone());
    }
    let dx = psi.grid.dx();
    let a = richardson(
        |n| quadratic_flow(psi, dilation, quadratic, n),
        |f, c| f.iter().zip(c).map(|(f, c)| (4.0 * f - c) / 3.0).collect::<Vec<_>>(),
        |a, b| (a.iter().zip(b).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * dx).sqrt(),
        FLOW_TOLERANCE * psi.norm(),
        FLOW_MAX_STEPS,
    )?;
    Ok(WaveFunction1D::new(psi.grid, a, psi.time))
}

/// Applies the single combined unitary `𝒰(t) = exp(−iG)` by integrating its
/// generator; agrees with `Û(t) R̂(t) ψ`.
pub fn apply_closed_form_unitary(
    psi: &WaveFunction1D,
    profile: &ScaleProfile,
    t: f64,
) -> Result<WaveFunction1D> {
    let v = profile.eval_scale(t)?;
    let cf = quantum_closed_form(v);
    apply_quadratic_flow(psi, cf.dilation, cf.quadratic)
}

/// The composed product `Û(t) R̂(t) ψ`: chirp `cċ`, then squeeze by `c`.
pub fn apply_composed_unitary(
    psi: &WaveFunction1D,
    profile: &ScaleProfile,
    t: f64,
) -> Result<WaveFunction1D> {
    let v = profile.eval_scale(t)?;
    apply_dilation(&apply_chirp(psi, v.gauge()), v.c)
}

/// Builds the oscillator-side state of an `L`-periodic free state.
///
/// `phi` lives on a box `[x0, x0 + L)` and is evolved freely to `t`; the
/// result samples `ψ̄(ξ) = c^{1/2} e^{−i cċ ξ²/2} φ(cξ, t)` on `target`, using
/// the periodic interpolant of `φ` (exact for a band-limited periodic state).
/// The result is not normalizable and is meant for pointwise probes.
pub fn map_periodic_free_to_harmonic(
    phi: &WaveFunction1D,
    profile: &ScaleProfile,
    t: f64,
    target: GridSpec1D,
) -> Result<WaveFunction1D> {
    let v = profile.eval_scale(t)?;
    let evolved = propagate_free(phi, t);
    let fft = FftPair::new(phi.grid.n());
    let mut spec = evolved.amplitudes.clone();
    fft.forward(&mut spec);
    let n = phi.grid.n();
    let x0 = phi.grid.x_min();
    let modes: Vec<(f64, Complex64)> = phi
        .grid
        .wavenumbers()
        .into_iter()
        .zip(spec)
        .filter(|(_, a)| a.norm() > 0.0)
        .collect();
    let sqrt_c = v.c.sqrt();
    let out = WaveFunction1D::from_fn(target, profile.tau_of_t(t)?, |xi| {
        let x = v.c * xi;
        let phi_x: Complex64 = modes
            .iter()
            .map(|(k, a)| a * Complex64::from_polar(1.0, k * (x - x0)))
            .sum::<Complex64>()
            / n as f64;
        sqrt_c * Complex64::from_polar(1.0, -0.5 * v.gauge() * xi * xi) * phi_x
    });
    Ok(out)
}

/// Measured boundary relation between `ψ̄(0)` and `ψ̄(L/c)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundaryPhaseReport {
    pub tau: f64,
    pub t: f64,
    pub length: f64,
    /// `L/c = L cos(ωτ)` for the standard kind.
    pub probe: f64,
    pub ratio_re: f64,
    pub ratio_im: f64,
    pub ratio_modulus: f64,
    pub measured_phase: f64,
    /// `¼ sin(2ωτ) L²`.
    pub candidate_tau: f64,
    /// `¼ sin(2ωt) L²`.
    pub candidate_t: f64,
    /// Wrapped distances of the measured phase to `±candidate`.
    pub tau_printed_residual: f64,
    pub tau_conjugate_residual: f64,
    pub t_printed_residual: f64,
    pub t_conjugate_residual: f64,
    pub degenerate: bool,
}

impl BoundaryPhaseReport {
    pub fn tau_matches(&self, tol: f64) -> Option<Orientation> {
        orientation(self.tau_printed_residual, self.tau_conjugate_residual, tol)
    }

    pub fn t_matches(&self, tol: f64) -> Option<Orientation> {
        orientation(self.t_printed_residual, self.t_conjugate_residual, tol)
    }
}

/// Whether a candidate phase matched as printed or with opposite sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Orientation {
    Printed,
    Conjugate,
}

fn orientation(printed: f64, conjugate: f64, tol: f64) -> Option<Orientation> {
    if printed <= tol {
        Some(Orientation::Printed)
    } else if conjugate <= tol {
        Some(Orientation::Conjugate)
    } else {
        None
    }
}

fn wrap(phase: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = phase.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Compares `ψ̄(L/c)/ψ̄(0)` with the candidate boundary phases. The probe and
/// the origin are read by spectral interpolation (exact when they are nodes).
pub fn check_boundary_phase(
    psi_harm: &WaveFunction1D,
    profile: &ScaleProfile,
    tau: f64,
    length: f64,
) -> Result<BoundaryPhaseReport> {
    let t = profile.t_of_tau(tau)?;
    let c = profile.c_of_tau(tau)?;
    let probe = length / c;
    let at_origin = psi_harm.value_at(0.0);
    let at_probe = psi_harm.value_at(probe);
    let w = profile.omega();
    let candidate_tau = 0.25 * (2.0 * w * tau).sin() * length * length;
    let candidate_t = 0.25 * (2.0 * w * t).sin() * length * length;
    let degenerate = at_origin.norm() < 1e-8;
    let ratio = if degenerate {
        Complex64::new(f64::NAN, f64::NAN)
    } else {
        at_probe / at_origin
    };
    let measured = ratio.arg();
    Ok(BoundaryPhaseReport {
        tau,
        t,
        length,
        probe,
        ratio_re: ratio.re,
        ratio_im: ratio.im,
        ratio_modulus: ratio.norm(),
        measured_phase: measured,
        candidate_tau,
        candidate_t,
        tau_printed_residual: wrap(measured - candidate_tau).abs(),
        tau_conjugate_residual: wrap(measured + candidate_tau).abs(),
        t_printed_residual: wrap(measured - candidate_t).abs(),
        t_conjugate_residual: wrap(measured + candidate_t).abs(),
        degenerate,
    })
}

/// Harmonic-side grid on which both `0` and `L/c` are nodes: spacing
/// `(L/c)/(n/4)` with the origin at index `n/2`.
pub fn boundary_probe_grid(n: usize, length: f64, c: f64) -> Result<GridSpec1D> {
    let h = (length / c) / (n / 4) as f64;
    GridSpec1D::new(n, -((n / 2) as f64) * h, ((n / 2) as f64) * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn grid() -> GridSpec1D {
        GridSpec1D::symmetric(512, 20.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec1D::new(48, -1.0, 1.0).is_err());
        assert!(GridSpec1D::new(100, -1.0, 1.0).is_err());
        assert!(GridSpec1D::new(64, 1.0, 1.0).is_err());
        assert!((GridSpec1D::new(64, 0.0, 6.4).unwrap().dx() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn gaussian_moments() {
        let g = make_gaussian(grid(), 0.0, 0.0, 1.0);
        assert!(!g.support_warning);
        assert!((g.state.norm() - 1.0).abs() < 1e-14);
        assert!(g.state.mean_x().abs() < 1e-14);
        assert!(g.state.mean_p().abs() < 1e-12);
        assert!((g.state.var_x() - 0.5).abs() < 1e-12);

        let g = make_gaussian(grid(), 1.0, 2.0, 0.5);
        assert!((g.state.mean_x() - 1.0).abs() < 1e-12);
        assert!((g.state.mean_p() - 2.0).abs() < 1e-10);

        assert!(make_gaussian(grid(), 17.0, 0.0, 1.0).support_warning);
    }

    #[test]
    fn free_propagation() {
        let g = make_gaussian(grid(), 0.0, 0.0, 1.0).state;
        let same = propagate_free(&g, 0.0);
        assert!(same.distance(&g) < 1e-14);
        // σ = 1: Var(x) = (1 + t²)/2.
        let later = propagate_free(&g, 1.0);
        assert!((later.var_x() - 1.0).abs() < 1e-12);
        assert!((later.norm() - 1.0).abs() < 1e-12);

        // A grid mode only picks up e^{−ik²t/2}.
        let gr = grid();
        let k0 = 2.0 * PI * 5.0 / gr.length();
        let wave = WaveFunction1D::from_fn(gr, 0.0, |x| Complex64::from_polar(1.0, k0 * x));
        let moved = propagate_free(&wave, 0.8);
        let phase = Complex64::from_polar(1.0, -0.5 * k0 * k0 * 0.8);
        let expected = WaveFunction1D::new(gr, wave.amplitudes.iter().map(|z| z * phase).collect(), 0.8);
        assert!(moved.distance(&expected) < 1e-12);
    }

    #[test]
    fn harmonic_ground_state_is_stationary() {
        let w = 1.5;
        let gr = grid();
        let mut g = WaveFunction1D::from_fn(gr, 0.0, |x| Complex64::new((-w * x * x / 2.0).exp(), 0.0));
        g.normalize();
        let tau = 0.9;
        let out = propagate_harmonic(&g, w, tau, 1e-3).unwrap();
        let phase = Complex64::from_polar(1.0, -w * tau / 2.0);
        let expected = WaveFunction1D::new(gr, g.amplitudes.iter().map(|z| z * phase).collect(), tau);
        assert!(out.distance(&expected) < 1e-6, "{}", out.distance(&expected));
        let h = apply_hamiltonian(&g, Potential::Harmonic(w));
        assert!((g.inner(&h).re - w / 2.0).abs() < 1e-10);
        assert!(propagate_harmonic(&g, w, 0.0, 1e-3).unwrap().distance(&g) == 0.0);
    }

    #[test]
    fn coherent_state_returns_after_a_period() {
        let gr = GridSpec1D::symmetric(256, 12.0).unwrap();
        let g = make_gaussian(gr, 2.0, 0.0, 1.0).state;
        let out = propagate_harmonic(&g, 1.0, 2.0 * PI, 1e-4).unwrap();
        let fidelity = g.inner(&out).norm_sqr();
        assert!(fidelity > 1.0 - 1e-8, "{fidelity}");
    }

    #[test]
    fn dilation_contracts() {
        let g = make_gaussian(grid(), 1.0, 0.0, 1.0).state;
        assert!(apply_dilation(&g, 1.0).unwrap().distance(&g) == 0.0);
        let d = apply_dilation(&g, 2.0).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-12);
        assert!((d.mean_x() - 2.0).abs() < 1e-10);
        assert!((d.var_x() - 2.0).abs() < 1e-9);

        let g = make_gaussian(grid(), 0.0, 2.0, 1.0).state;
        let d = apply_dilation(&g, 2.0).unwrap();
        assert!((d.mean_p() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dilation_reports_aliasing() {
        let g = make_gaussian(grid(), 6.0, 0.0, 1.0).state;
        assert!(matches!(apply_dilation(&g, 4.0), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn chirp_contracts() {
        let g = make_gaussian(grid(), 2.0, 0.0, 1.0).state;
        assert!(apply_chirp(&g, 0.0).distance(&g) == 0.0);
        let ch = apply_chirp(&g, 0.5);
        assert!((ch.mean_p() - g.mean_p() - 1.0).abs() < 1e-10);
        for (a, b) in ch.amplitudes.iter().zip(&g.amplitudes) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn free_ground_state_maps_to_oscillator_ground_state() {
        let p = ScaleProfile::standard(1.0).unwrap();
        let gr = GridSpec1D::symmetric(1024, 30.0).unwrap();
        let g = make_gaussian(gr, 0.0, 0.0, 1.0).state;
        for &t in &[0.5, 1.0, 2.0] {
            let mapped = map_free_to_harmonic(&propagate_free(&g, t), &p, t).unwrap();
            assert!((mapped.time - p.tau_of_t(t).unwrap()).abs() < 1e-15);
            assert!(mapped.distance_up_to_phase(&g) < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn map_at_zero_is_identity_and_maps_invert() {
        let p = ScaleProfile::standard(1.3).unwrap();
        let gr = GridSpec1D::symmetric(1024, 30.0).unwrap();
        let g = make_gaussian(gr, 0.4, -0.7, 1.2).state;
        let m0 = map_free_to_harmonic(&g, &p, 0.0).unwrap();
        assert!(m0.distance(&g) == 0.0 && m0.time == 0.0);
        let t = 0.8;
        let there = map_free_to_harmonic(&g, &p, t).unwrap();
        assert!((there.norm() - 1.0).abs() < 1e-10);
        let back = map_harmonic_to_free(&there, &p, p.tau_of_t(t).unwrap()).unwrap();
        assert!(back.distance(&g) < 1e-10);
        assert!((back.time - t).abs() < 1e-12);
    }

    #[test]
    fn pulled_back_ground_state_evolves_freely() {
        let p = ScaleProfile::standard(1.0).unwrap();
        let gr = GridSpec1D::symmetric(1024, 30.0).unwrap();
        let mut ground = WaveFunction1D::from_fn(gr, 0.0, |x| Complex64::new((-x * x / 2.0).exp(), 0.0));
        ground.normalize();
        let evolved = propagate_harmonic(&ground, 1.0, FRAC_PI_4, 1e-4).unwrap();
        let pulled = map_harmonic_to_free(&evolved, &p, FRAC_PI_4).unwrap();
        let initial = map_harmonic_to_free(&ground, &p, 0.0).unwrap();
        let free = propagate_free(&initial, 1.0);
        assert!(pulled.distance_up_to_phase(&free) < 1e-6);
    }

    #[test]
    fn closed_form_unitary_matches_composition() {
        let p = ScaleProfile::standard(1.0).unwrap();
        let gr = GridSpec1D::symmetric(1024, 30.0).unwrap();
        let g = make_gaussian(gr, 0.5, 0.3, 1.0).state;
        assert!(apply_closed_form_unitary(&g, &p, 0.0).unwrap().distance(&g) == 0.0);
        let flow = apply_closed_form_unitary(&g, &p, 1.0).unwrap();
        let composed = apply_composed_unitary(&g, &p, 1.0).unwrap();
        assert!(flow.distance(&composed) < 1e-6, "{}", flow.distance(&composed));
        assert!((flow.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn boundary_phase_at_origin_time() {
        let p = ScaleProfile::standard(1.0).unwrap();
        let length = 2.0 * PI;
        let box_grid = GridSpec1D::new(64, 0.0, length).unwrap();
        let phi = WaveFunction1D::from_fn(box_grid, 0.0, |x| {
            Complex64::new(1.0, 0.0) + 0.5 * Complex64::from_polar(1.0, x) + 0.25 * Complex64::from_polar(1.0, -2.0 * x)
        });
        let target = boundary_probe_grid(256, length, 1.0).unwrap();
        let psi = map_periodic_free_to_harmonic(&phi, &p, 0.0, target).unwrap();
        let r = check_boundary_phase(&psi, &p, 0.0, length).unwrap();
        assert!((r.ratio_modulus - 1.0).abs() < 1e-12);
        assert!(r.measured_phase.abs() < 1e-12);
    }

    #[test]
    fn csv_snapshot_has_header() {
        let g = make_gaussian(GridSpec1D::symmetric(64, 5.0).unwrap(), 0.0, 0.0, 1.0).state;
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,re_psi,im_psi"));
        assert_eq!(text.lines().count(), 65);
        assert!(!text.contains('\r'));
    }
}
