//! Koopman–von Neumann dynamics on a periodic phase-space box.
//!
//! A state is a complex amplitude `Ψ(x, p)` stored as an `nx × np` array
//! (row `i` is the line `x = x_i`). The Bopp operators `λ̂ = −i∂/∂x` and
//! `θ̂ = −i∂/∂p` act spectrally. Advection and diffusion are exact Fourier
//! multipliers, combined by Strang splitting.

use ndarray::Array2;
use num_complex::Complex64;
use std::io::Write;

use crate::error::{Error, Result};
use crate::quantum::{check_aliasing, richardson, Dilation, GridSpec1D, Potential};
use crate::scale::ScaleProfile;
use crate::spectral::FftPair;
use crate::weyl::mapping::{kvn_closed_form, ClosedFormSign};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec2D {
    x: GridSpec1D,
    p: GridSpec1D,
}

impl GridSpec2D {
    pub fn new(nx: usize, np: usize, x_min: f64, x_max: f64, p_min: f64, p_max: f64) -> Result<Self> {
        Ok(Self {
            x: GridSpec1D::new(nx, x_min, x_max)?,
            p: GridSpec1D::new(np, p_min, p_max)?,
        })
    }

    /// Square box `[−half_width, half_width)²` with `n × n` points.
    pub fn square(n: usize, half_width: f64) -> Result<Self> {
        Self::new(n, n, -half_width, half_width, -half_width, half_width)
    }

    pub fn x_axis(&self) -> GridSpec1D {
        self.x
    }

    pub fn p_axis(&self) -> GridSpec1D {
        self.p
    }

    pub fn nx(&self) -> usize {
        self.x.n()
    }

    pub fn np(&self) -> usize {
        self.p.n()
    }

    pub fn cell(&self) -> f64 {
        self.x.dx() * self.p.dx()
    }
}

/// First and second moments of a phase-space weight.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Moments {
    pub mass: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
    /// Excess kurtosis of the `p` marginal.
    pub kurtosis_p: f64,
}

#[derive(Debug, Clone)]
pub struct PhaseSpaceState {
    pub grid: GridSpec2D,
    pub amplitudes: Array2<Complex64>,
    pub time: f64,
}

impl PhaseSpaceState {
    pub fn new(grid: GridSpec2D, amplitudes: Array2<Complex64>, time: f64) -> Self {
        assert_eq!(amplitudes.dim(), (grid.nx(), grid.np()), "amplitude shape must match the grid");
        Self {
            grid,
            amplitudes,
            time,
        }
    }

    pub fn from_fn(grid: GridSpec2D, time: f64, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let (xa, pa) = (grid.x_axis(), grid.p_axis());
        let amplitudes = Array2::from_shape_fn((grid.nx(), grid.np()), |(i, j)| f(xa.x(i), pa.x(j)));
        Self::new(grid, amplitudes, time)
    }

    /// Real, positive `exp(−(x−x0)²/(2σx²) − (p−p0)²/(2σp²))`, L²-normalized.
    pub fn gaussian_blob(grid: GridSpec2D, x0: f64, p0: f64, sigma_x: f64, sigma_p: f64) -> Self {
        let mut s = Self::from_fn(grid, 0.0, |x, p| {
            let e = (x - x0).powi(2) / (2.0 * sigma_x * sigma_x) + (p - p0).powi(2) / (2.0 * sigma_p * sigma_p);
            Complex64::new((-e).exp(), 0.0)
        });
        s.normalize();
        s
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let s = 1.0 / self.norm();
        self.amplitudes.mapv_inplace(|z| z * s);
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d: f64 = self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (d * self.grid.cell()).sqrt()
    }

    fn moments_of(&self, weight: impl Fn(Complex64) -> f64) -> Moments {
        let (xa, pa) = (self.grid.x_axis(), self.grid.p_axis());
        let (mut m0, mut mx, mut mp) = (0.0, 0.0, 0.0);
        for ((i, j), z) in self.amplitudes.indexed_iter() {
            let w = weight(*z);
            m0 += w;
            mx += w * xa.x(i);
            mp += w * pa.x(j);
        }
        let (mean_x, mean_p) = (mx / m0, mp / m0);
        let (mut vx, mut vp, mut cxp, mut k4) = (0.0, 0.0, 0.0, 0.0);
        for ((i, j), z) in self.amplitudes.indexed_iter() {
            let w = weight(*z);
            let (dx, dp) = (xa.x(i) - mean_x, pa.x(j) - mean_p);
            vx += w * dx * dx;
            vp += w * dp * dp;
            cxp += w * dx * dp;
            k4 += w * dp.powi(4);
        }
        let var_p = vp / m0;
        Moments {
            mass: m0 * self.grid.cell(),
            mean_x,
            mean_p,
            var_x: vx / m0,
            var_p,
            cov_xp: cxp / m0,
            kurtosis_p: k4 / m0 / (var_p * var_p) - 3.0,
        }
    }

    /// Moments of the probability density `|Ψ|²`.
    pub fn moments(&self) -> Moments {
        self.moments_of(|z| z.norm_sqr())
    }

    /// Moments of `Re Ψ` read as a density; appropriate for a real, positive
    /// state transported by a Fokker–Planck generator.
    pub fn density_moments(&self) -> Moments {
        self.moments_of(|z| z.re)
    }

    fn spectral_weights(&self) -> Array2<f64> {
        let mut a = self.amplitudes.clone();
        fft2(&mut a, &FftPair::new(self.grid.nx()), &FftPair::new(self.grid.np()));
        a.mapv(|z| z.norm_sqr())
    }

    /// `(⟨λ̂⟩, ⟨θ̂⟩)`.
    pub fn mean_bopp(&self) -> (f64, f64) {
        let w = self.spectral_weights();
        let (kx, kp) = (self.grid.x_axis().wavenumbers(), self.grid.p_axis().wavenumbers());
        let total: f64 = w.sum();
        let (mut l, mut t) = (0.0, 0.0);
        for ((i, j), v) in w.indexed_iter() {
            l += v * kx[i];
            t += v * kp[j];
        }
        (l / total, t / total)
    }

    /// `∫|Ψ|² dp` on the `x` nodes.
    pub fn marginal_x(&self) -> Vec<f64> {
        let dp = self.grid.p_axis().dx();
        self.amplitudes
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>() * dp)
            .collect()
    }

    /// `∫|Ψ|² dx` on the `p` nodes.
    pub fn marginal_p(&self) -> Vec<f64> {
        let dx = self.grid.x_axis().dx();
        self.amplitudes
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx)
            .collect()
    }

    /// Snapshot CSV with header `x,p,re_psi,im_psi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let (xa, pa) = (self.grid.x_axis(), self.grid.p_axis());
        writeln!(w, "x,p,re_psi,im_psi")?;
        for ((i, j), z) in self.amplitudes.indexed_iter() {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", xa.x(i), pa.x(j), z.re, z.im)?;
        }
        Ok(())
    }

    /// Marginal CSV with header `x,density` or `p,density`.
    pub fn write_marginal_csv<W: Write>(&self, along_x: bool, mut w: W) -> std::io::Result<()> {
        let (axis, values, name) = if along_x {
            (self.grid.x_axis(), self.marginal_x(), "x")
        } else {
            (self.grid.p_axis(), self.marginal_p(), "p")
        };
        writeln!(w, "{name},density")?;
        for (j, v) in values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", axis.x(j), v)?;
        }
        Ok(())
    }
}

/// Applies `f` to every line of constant `x` (contiguous in `p`).
fn along_p(a: &mut Array2<Complex64>, mut f: impl FnMut(usize, &mut [Complex64])) {
    for (i, mut row) in a.rows_mut().into_iter().enumerate() {
        f(i, row.as_slice_mut().expect("rows are contiguous"));
    }
}

/// Applies `f` to every line of constant `p`, through a scratch buffer.
fn along_x(a: &mut Array2<Complex64>, mut f: impl FnMut(usize, &mut [Complex64])) {
    let mut buf = vec![ZERO; a.nrows()];
    for (j, mut col) in a.columns_mut().into_iter().enumerate() {
        buf.iter_mut().zip(col.iter()).for_each(|(b, z)| *b = *z);
        f(j, &mut buf);
        col.iter_mut().zip(&buf).for_each(|(z, b)| *z = *b);
    }
}

fn fft2(a: &mut Array2<Complex64>, fx: &FftPair, fp: &FftPair) {
    along_p(a, |_, r| fp.forward(r));
    along_x(a, |_, c| fx.forward(c));
}

/// Split-step tables for one step size.
struct Stepper {
    fx: FftPair,
    fp: FftPair,
    /// `e^{−i k_x p_j h/2}`, indexed `[k_x, j]`.
    half_drift: Array2<Complex64>,
    /// `e^{+i k_p V′(x_i) h}`, indexed `[i, k_p]`; absent for free motion.
    kick: Option<Array2<Complex64>>,
    kp_sq: Vec<f64>,
    h: f64,
}

impl Stepper {
    fn new(grid: &GridSpec2D, potential: Potential, h: f64) -> Self {
        let (xa, pa) = (grid.x_axis(), grid.p_axis());
        let (kx, kp) = (xa.wavenumbers(), pa.wavenumbers());
        let half_drift = Array2::from_shape_fn((grid.nx(), grid.np()), |(a, j)| {
            Complex64::from_polar(1.0, -0.5 * kx[a] * pa.x(j) * h)
        });
        let kick = (potential != Potential::Free).then(|| {
            Array2::from_shape_fn((grid.nx(), grid.np()), |(i, b)| {
                Complex64::from_polar(1.0, kp[b] * potential.derivative(xa.x(i)) * h)
            })
        });
        Self {
            fx: FftPair::new(grid.nx()),
            fp: FftPair::new(grid.np()),
            half_drift,
            kick,
            kp_sq: kp.iter().map(|k| k * k).collect(),
            h,
        }
    }

    /// `Ψ(x, p) → Ψ(x − p·h·halves/2, p)`.
    fn drift(&self, a: &mut Array2<Complex64>, halves: u32) {
        let table = &self.half_drift;
        along_x(a, |j, col| {
            self.fx.forward(col);
            for (k, z) in col.iter_mut().enumerate() {
                let ph = table[(k, j)];
                *z *= if halves == 2 { ph * ph } else { ph };
            }
            self.fx.inverse(col);
        });
    }

    /// Full `p`-step: force kick `Ψ(x, p + V′h)` and diffusion `e^{−D k_p² h}`.
    fn kick_and_diffuse(&self, a: &mut Array2<Complex64>, d: f64) {
        if self.kick.is_none() && d == 0.0 {
            return;
        }
        let damp: Vec<f64> = self.kp_sq.iter().map(|k2| (-d * k2 * self.h).exp()).collect();
        along_p(a, |i, row| {
            self.fp.forward(row);
            match &self.kick {
                Some(t) => row
                    .iter_mut()
                    .enumerate()
                    .for_each(|(b, z)| *z *= t[(i, b)] * damp[b]),
                None => row.iter_mut().zip(&damp).for_each(|(z, g)| *z *= g),
            }
            self.fp.inverse(row);
        });
    }
}

/// Strang evolution under `K̂ = p̂λ̂ − V′(x̂)θ̂ − i D(t) θ̂²` for `duration`,
/// with the diffusion coefficient sampled at step midpoints.
pub fn propagate_phase_space(
    state: &PhaseSpaceState,
    potential: Potential,
    diffusion: &dyn Fn(f64) -> f64,
    duration: f64,
    max_step: f64,
) -> Result<PhaseSpaceState> {
    if !(max_step > 0.0) || !(duration >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need duration >= 0 and step > 0, got {duration} and {max_step}"
        )));
    }
    if duration == 0.0 {
        return Ok(state.clone());
    }
    let steps = ((duration / max_step) - 1e-9).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let stepper = Stepper::new(&state.grid, potential, h);
    let mut a = state.amplitudes.clone();
    stepper.drift(&mut a, 1);
    for s in 0..steps {
        let d = diffusion(state.time + (s as f64 + 0.5) * h);
        if !(d >= 0.0) {
            return Err(Error::InvalidParameter(format!("diffusion must be >= 0, got {d}")));
        }
        stepper.kick_and_diffuse(&mut a, d);
        stepper.drift(&mut a, if s + 1 == steps { 1 } else { 2 });
    }
    Ok(PhaseSpaceState::new(state.grid, a, state.time + duration))
}

/// Liouville evolution (`D = 0`) over `duration`.
pub fn propagate_liouville(
    state: &PhaseSpaceState,
    potential: Potential,
    duration: f64,
    max_step: f64,
) -> Result<PhaseSpaceState> {
    propagate_phase_space(state, potential, &|_| 0.0, duration, max_step)
}

/// One Strang step: half drift, full force kick, half drift.
pub fn liouville_step(state: &PhaseSpaceState, potential: Potential, dt: f64) -> Result<PhaseSpaceState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    propagate_liouville(state, potential, dt, dt)
}

/// Exact free streaming `Ψ(x − pt, p)`.
pub fn free_flow(state: &PhaseSpaceState, t: f64) -> PhaseSpaceState {
    let stepper = Stepper::new(&state.grid, Potential::Free, t);
    let mut a = state.amplitudes.clone();
    stepper.drift(&mut a, 2);
    PhaseSpaceState::new(state.grid, a, state.time + t)
}

/// One free Fokker–Planck step `∂Ψ/∂t = −p∂Ψ/∂x + D∂²Ψ/∂p²`.
pub fn fokker_planck_step(state: &PhaseSpaceState, d: f64, dt: f64) -> Result<PhaseSpaceState> {
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!("diffusion must be >= 0, got {d}")));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    propagate_phase_space(state, Potential::Free, &|_| d, dt, dt)
}

fn dilate_raw(grid: &GridSpec2D, a: &mut Array2<Complex64>, c: f64) -> Result<f64> {
    // c^{-1/2} from the x factor and c^{1/2} from the p factor cancel.
    let dx = Dilation::new(grid.x_axis(), c)?;
    let dp = Dilation::new(grid.p_axis(), 1.0 / c)?;
    let mut lost = 0.0;
    along_x(a, |_, col| lost += dx.apply_raw(col));
    along_p(a, |_, row| lost += dp.apply_raw(row));
    Ok(lost)
}

/// `Û_cl Ψ = Ψ(x/c, cp)`, so that `⟨x⟩ → c⟨x⟩` and `⟨p⟩ → ⟨p⟩/c`.
pub fn apply_dilation_2d(state: &PhaseSpaceState, c: f64) -> Result<PhaseSpaceState> {
    if c == 1.0 {
        return Ok(state.clone());
    }
    let mut a = state.amplitudes.clone();
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let lost = dilate_raw(&state.grid, &mut a, c)?;
    check_aliasing(lost, total, c)?;
    Ok(PhaseSpaceState::new(state.grid, a, state.time))
}

/// Shifts every `x` line by `αx` in `p`; returns the squared amplitude that
/// wrapped across the `p` boundary.
fn shear_raw(grid: &GridSpec2D, a: &mut Array2<Complex64>, alpha: f64, fp: &FftPair) -> f64 {
    let (xa, pa) = (grid.x_axis(), grid.p_axis());
    let kp = pa.wavenumbers();
    let mut lost = 0.0;
    along_p(a, |i, row| {
        let d = alpha * xa.x(i);
        for (j, z) in row.iter().enumerate() {
            let p = pa.x(j);
            if p + d >= pa.x_max() || p + d < pa.x_min() {
                lost += z.norm_sqr();
            }
        }
        fp.forward(row);
        row.iter_mut()
            .zip(&kp)
            .for_each(|(z, k)| *z *= Complex64::from_polar(1.0, -k * d));
        fp.inverse(row);
    });
    lost
}

/// `R̂_cl(α)Ψ = e^{−iαx̂θ̂}Ψ = Ψ(x, p − αx)`; the momentum moves by `+α⟨x⟩`,
/// matching `R̂_cl†p̂R̂_cl = p̂ + αx̂`.
pub fn apply_shear(state: &PhaseSpaceState, alpha: f64) -> Result<PhaseSpaceState> {
    if alpha == 0.0 {
        return Ok(state.clone());
    }
    let mut a = state.amplitudes.clone();
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let lost = shear_raw(&state.grid, &mut a, alpha, &FftPair::new(state.grid.np()));
    check_aliasing(lost, total, 1.0)?;
    Ok(PhaseSpaceState::new(state.grid, a, state.time))
}

/// `Ψ̄ = R̂_cl†Û_cl†Ψ`, i.e. `Ψ̄(x, p) = Ψ(cx, (p + cċx)/c)`, stamped with `τ(t)`.
pub fn map_free_to_harmonic_kvn(state: &PhaseSpaceState, profile: &ScaleProfile, t: f64) -> Result<PhaseSpaceState> {
    let v = profile.eval_scale(t)?;
    let mut out = apply_shear(&apply_dilation_2d(state, 1.0 / v.c)?, -v.gauge())?;
    out.time = profile.tau_of_t(t)?;
    Ok(out)
}

/// Inverse of [`map_free_to_harmonic_kvn`] at `t = t(τ)`.
pub fn map_harmonic_to_free_kvn(state: &PhaseSpaceState, profile: &ScaleProfile, tau: f64) -> Result<PhaseSpaceState> {
    let t = profile.t_of_tau(tau)?;
    let v = profile.eval_scale(t)?;
    let mut out = apply_dilation_2d(&apply_shear(state, v.gauge())?, v.c)?;
    out.time = t;
    Ok(out)
}

/// The composed product `Û_cl(t)R̂_cl(t)Ψ`.
pub fn apply_composed_unitary_cl(state: &PhaseSpaceState, profile: &ScaleProfile, t: f64) -> Result<PhaseSpaceState> {
    let v = profile.eval_scale(t)?;
    apply_dilation_2d(&apply_shear(state, v.gauge())?, v.c)
}

const FLOW_TOLERANCE: f64 = 1e-8;
const FLOW_MAX_STEPS: usize = 1 << 10;

/// Strang pass of `exp(−i[d·(−Ŝ) + q x̂θ̂])`, `Ŝ = p̂θ̂+θ̂p̂−x̂λ̂−λ̂x̂`.
fn classical_flow(state: &PhaseSpaceState, dilation: f64, quadratic: f64, n: usize) -> Result<Array2<Complex64>> {
    let h = 1.0 / n as f64;
    let fp = FftPair::new(state.grid.np());
    let c_step = (2.0 * dilation * h).exp();
    let mut a = state.amplitudes.clone();
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let mut lost = shear_raw(&state.grid, &mut a, 0.5 * quadratic * h, &fp);
    for s in 0..n {
        lost += dilate_raw(&state.grid, &mut a, c_step)?;
        let alpha = if s + 1 == n { 0.5 } else { 1.0 } * quadratic * h;
        lost += shear_raw(&state.grid, &mut a, alpha, &fp);
    }
    check_aliasing(lost, total, (2.0 * dilation).exp())?;
    Ok(a)
}

/// Applies `𝒰_cl(t) = exp(−iG)` by integrating its single generator, with
/// substep doubling and a Richardson combination as in the quantum case.
pub fn apply_closed_form_unitary_cl(state: &PhaseSpaceState, profile: &ScaleProfile, t: f64) -> Result<PhaseSpaceState> {
    let cf = kvn_closed_form(profile.eval_scale(t)?, ClosedFormSign::Derived);
    if cf.dilation == 0.0 && cf.quadratic == 0.0 {
        return Ok(state.clone());
    }
    let cell = state.grid.cell();
    let a = richardson(
        |n| classical_flow(state, cf.dilation, cf.quadratic, n),
        |f, c| (f * 4.0 - c) / Complex64::new(3.0, 0.0),
        |a, b| ((a - b).iter().map(|z| z.norm_sqr()).sum::<f64>() * cell).sqrt(),
        FLOW_TOLERANCE * state.norm(),
        FLOW_MAX_STEPS,
    )?;
    Ok(PhaseSpaceState::new(state.grid, a, state.time))
}

/// Sector contributions to `⟨Î⟩`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InvariantParts {
    /// `⟨ωx̂²/(2c²) + (ċx̂ − cp̂)²/(2ω)⟩`.
    pub xp: f64,
    /// `⟨ωθ̂²/(2c²) + (ċθ̂ + cλ̂)²/(2ω)⟩`.
    pub bopp: f64,
    pub total: f64,
    /// The same quadratic form with the explicit `ω` factors set to one.
    pub unit_omega_total: f64,
}

/// `⟨Ψ|Î(t)|Ψ⟩` for the Ermakov–Lewis invariant of the free KvN flow.
pub fn invariant_expectation(state: &PhaseSpaceState, profile: &ScaleProfile, t: f64) -> Result<InvariantParts> {
    let v = profile.eval_scale(t)?;
    let (c, cd, w) = (v.c, v.cdot, profile.omega());
    let (xa, pa) = (state.grid.x_axis(), state.grid.p_axis());
    let (mut n0, mut a1, mut a2) = (0.0, 0.0, 0.0);
    for ((i, j), z) in state.amplitudes.indexed_iter() {
        let r = z.norm_sqr();
        let (x, p) = (xa.x(i), pa.x(j));
        n0 += r;
        a1 += r * x * x / (2.0 * c * c);
        a2 += r * (cd * x - c * p).powi(2) / 2.0;
    }
    let weights = state.spectral_weights();
    let (kx, kp) = (xa.wavenumbers(), pa.wavenumbers());
    let (mut m0, mut b1, mut b2) = (0.0, 0.0, 0.0);
    for ((i, j), r) in weights.indexed_iter() {
        m0 += r;
        b1 += r * kp[j] * kp[j] / (2.0 * c * c);
        b2 += r * (cd * kp[j] + c * kx[i]).powi(2) / 2.0;
    }
    let (a1, a2, b1, b2) = (a1 / n0, a2 / n0, b1 / m0, b2 / m0);
    let xp = w * a1 + a2 / w;
    let bopp = w * b1 + b2 / w;
    Ok(InvariantParts {
        xp,
        bopp,
        total: xp + bopp,
        unit_omega_total: a1 + a2 + b1 + b2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn grid(n: usize, half: f64) -> GridSpec2D {
        GridSpec2D::square(n, half).unwrap()
    }

    fn blob(n: usize, half: f64, x0: f64, p0: f64) -> PhaseSpaceState {
        PhaseSpaceState::gaussian_blob(grid(n, half), x0, p0, 0.7, 0.7)
    }

    #[test]
    fn blob_moments() {
        let b = blob(128, 8.0, 1.0, -0.5);
        let m = b.moments();
        assert!((b.norm() - 1.0).abs() < 1e-14);
        assert!((m.mean_x - 1.0).abs() < 1e-12 && (m.mean_p + 0.5).abs() < 1e-12);
        assert!((m.var_x - 0.245).abs() < 1e-12 && m.cov_xp.abs() < 1e-12);
        let d = b.density_moments();
        assert!((d.var_p - 0.49).abs() < 1e-12 && d.kurtosis_p.abs() < 1e-10);
    }

    #[test]
    fn free_streaming_moves_the_centre() {
        let b = blob(128, 10.0, 1.0, 0.5);
        let m = free_flow(&b, 2.0).moments();
        assert!((m.mean_x - 2.0).abs() < 1e-10 && (m.mean_p - 0.5).abs() < 1e-12);
        let s = liouville_step(&b, Potential::Free, 0.1).unwrap().moments();
        assert!((s.mean_x - 1.05).abs() < 1e-10);
    }

    #[test]
    fn harmonic_period_returns() {
        let b = blob(128, 8.0, 1.5, 0.0);
        let out = propagate_liouville(&b, Potential::Harmonic(1.0), 2.0 * PI, 1e-3).unwrap();
        assert!(out.distance(&b) < 1e-6, "{}", out.distance(&b));
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dilation_scalings() {
        let b = blob(256, 12.0, 1.0, 1.0);
        let m0 = b.moments();
        let d = apply_dilation_2d(&b, 2.0).unwrap();
        let m = d.moments();
        assert!((d.norm() - 1.0).abs() < 1e-12);
        assert!((m.mean_x - 2.0).abs() < 1e-10 && (m.mean_p - 0.5).abs() < 1e-10);
        assert!((m.var_x - 4.0 * m0.var_x).abs() < 1e-10);
        assert!((m.var_p - m0.var_p / 4.0).abs() < 1e-10);
        assert!(apply_dilation_2d(&b, 1.0).unwrap().distance(&b) == 0.0);
    }

    #[test]
    fn shear_moves_momentum_by_alpha_x() {
        let b = blob(128, 8.0, 2.0, 0.0);
        let s = apply_shear(&b, 0.5).unwrap();
        assert!((s.moments().mean_p - 1.0).abs() < 1e-10);
        assert!((s.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
        assert!(apply_shear(&b, 0.0).unwrap().distance(&b) == 0.0);
    }

    #[test]
    fn bopp_conjugation_contracts() {
        let b = PhaseSpaceState::from_fn(grid(256, 10.0), 0.0, |x, p| {
            let g = (-(x - 0.5).powi(2) / 0.98 - (p + 0.3).powi(2) / 0.98).exp();
            Complex64::from_polar(g, 0.8 * x - 0.6 * p)
        });
        let (l0, t0) = b.mean_bopp();
        let (l, t) = apply_dilation_2d(&b, 1.5).unwrap().mean_bopp();
        assert!((l - l0 / 1.5).abs() < 1e-9 && (t - 1.5 * t0).abs() < 1e-9);
        // R̂_cl†λ̂R̂_cl = λ̂ − αθ̂.
        let (l, t) = apply_shear(&b, 0.4).unwrap().mean_bopp();
        assert!((l - (l0 - 0.4 * t0)).abs() < 1e-9 && (t - t0).abs() < 1e-9);
    }

    #[test]
    fn mapping_is_harmonic_rotation() {
        let p = ScaleProfile::standard(1.0).unwrap();
        let b = blob(256, 9.0, 0.5, 0.3);
        let mapped = map_free_to_harmonic_kvn(&free_flow(&b, 1.0), &p, 1.0).unwrap();
        assert!((mapped.time - FRAC_PI_4).abs() < 1e-15);
        let rotated = PhaseSpaceState::from_fn(b.grid, 0.0, |x, q| {
            let (s, c) = FRAC_PI_4.sin_cos();
            let (x0, p0) = (x * c - q * s, x * s + q * c);
            let e = (x0 - 0.5).powi(2) / 0.98 + (p0 - 0.3).powi(2) / 0.98;
            Complex64::new((-e).exp(), 0.0)
        });
        let mut rotated = rotated;
        rotated.normalize();
        assert!(mapped.distance(&rotated) < 1e-9, "{}", mapped.distance(&rotated));
        let back = map_harmonic_to_free_kvn(&mapped, &p, FRAC_PI_4).unwrap();
        assert!(back.distance(&free_flow(&b, 1.0)) < 1e-9);
    }

    #[test]
    fn closed_form_unitary_matches_composition() {
        let p = ScaleProfile::standard(1.0).unwrap();
        let b = blob(256, 12.0, 0.5, 0.3);
        let flow = apply_closed_form_unitary_cl(&b, &p, 1.0).unwrap();
        let composed = apply_composed_unitary_cl(&b, &p, 1.0).unwrap();
        assert!(flow.distance(&composed) < 1e-6, "{}", flow.distance(&composed));
        assert!((flow.norm() - 1.0).abs() < 1e-8);
        assert!(apply_closed_form_unitary_cl(&b, &p, 0.0).unwrap().distance(&b) == 0.0);
    }

    #[test]
    fn fokker_planck_diffuses_momentum() {
        let b = blob(128, 10.0, 0.0, 0.0);
        let v0 = b.density_moments().var_p;
        let zero = fokker_planck_step(&b, 0.0, 0.01).unwrap();
        assert!(zero.distance(&liouville_step(&b, Potential::Free, 0.01).unwrap()) < 1e-14);
        let out = propagate_phase_space(&b, Potential::Free, &|_| 0.1, 1.0, 1e-2).unwrap();
        let m = out.density_moments();
        assert!((m.var_p - (v0 + 0.2)).abs() < 1e-10, "{}", m.var_p - v0);
        assert!(m.kurtosis_p.abs() < 1e-3);
        assert!(fokker_planck_step(&b, -1.0, 0.01).is_err());
    }

    #[test]
    fn invariant_at_origin_and_along_free_flow() {
        for &w in &[1.0, 2.0] {
            let p = ScaleProfile::standard(w).unwrap();
            let b = blob(256, 12.0, 0.8, -0.4);
            let i0 = invariant_expectation(&b, &p, 0.0).unwrap();
            let m = b.moments();
            let centroid = 0.5 * (w * m.mean_x.powi(2) + m.mean_p.powi(2) / w);
            let widths = 0.5 * (w * m.var_x + m.var_p / w);
            assert!((i0.xp - centroid - widths).abs() < 1e-10);
            for &t in &[0.5, 1.0, 2.0] {
                let it = invariant_expectation(&free_flow(&b, t), &p, t).unwrap();
                assert!(((it.total - i0.total) / i0.total).abs() < 1e-8, "w = {w}, t = {t}");
            }
        }
    }
}
