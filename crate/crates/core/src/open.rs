//! Position-basis decoherence: the Lindblad equation with the single jump
//! operator `x̂`,
//!
//! `dρ/dt = −i[Ĥ, ρ] + (γ/2)(2x̂ρx̂ − {ρ, x̂²})`,
//!
//! integrated by RK4 and by the two-unitary average, and its image under the
//! free-to-harmonic map where `γ → c⁴γ`. The Fokker–Planck counterpart
//! (`D → c⁴D`) lives here too.

use ndarray::Array2;
use num_complex::Complex64;
use std::io::Write;

use crate::error::{Error, Result};
use crate::kvn::{self, PhaseSpaceState};
use crate::linalg::{hermitian_eigenvalues, hermitian_trace_norm};
use crate::quantum::{check_aliasing, make_gaussian, Dilation, GridSpec1D, Potential, WaveFunction1D};
use crate::scale::ScaleProfile;
use crate::spectral::FftPair;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest entry magnitude tolerated during integration.
const BLOWUP: f64 = 1e6;
/// Largest tolerated trace drift over an RK4 run.
const TRACE_DRIFT: f64 = 1e-8;

/// Position-basis kernel `ρ(x_i, x_j)`; operator trace is `Σ ρ_ii dx`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub grid: GridSpec1D,
    pub matrix: Array2<Complex64>,
    pub time: f64,
}

impl DensityMatrix {
    pub fn new(grid: GridSpec1D, matrix: Array2<Complex64>, time: f64) -> Self {
        assert_eq!(matrix.dim(), (grid.n(), grid.n()), "matrix shape must match the grid");
        Self { grid, matrix, time }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &WaveFunction1D) -> Self {
        let a = &psi.amplitudes;
        let m = Array2::from_shape_fn((a.len(), a.len()), |(i, j)| a[i] * a[j].conj());
        Self::new(psi.grid, m, psi.time)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|z| z.re).sum::<f64>() * self.grid.dx()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let dx = self.grid.dx();
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        m.indexed_iter()
            .map(|((i, j), z)| (z - m[(j, i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Operator as a matrix: `ρ_ij dx`.
    pub fn operator(&self) -> Array2<Complex64> {
        let dx = self.grid.dx();
        self.matrix.mapv(|z| z * dx)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.operator())
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Frobenius norm of the operator difference.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        let d: f64 = self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        d.sqrt() * self.grid.dx()
    }

    /// `½‖ρ₁ − ρ₂‖₁`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let dx = self.grid.dx();
        let diff = (&self.matrix - &other.matrix).mapv(|z| z * dx);
        0.5 * hermitian_trace_norm(&diff)
    }

    fn hermitize(&mut self) {
        let t = self.matrix.t().mapv(|z| z.conj());
        self.matrix = (&self.matrix + &t).mapv(|z| z * 0.5);
    }
}

/// System Hamiltonian; `None` switches off the coherent part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hamiltonian {
    None,
    Free,
    Harmonic(f64),
    Inverted(f64),
}

impl Hamiltonian {
    fn potential(&self) -> Option<Potential> {
        match *self {
            Hamiltonian::None => None,
            Hamiltonian::Free => Some(Potential::Free),
            Hamiltonian::Harmonic(w) => Some(Potential::Harmonic(w)),
            Hamiltonian::Inverted(w) => Some(Potential::Inverted(w)),
        }
    }
}

/// Measurement strength as a function of the evolution clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSchedule {
    Constant(f64),
    /// `γ / cos⁴(ωτ)`.
    CosQuartic { gamma: f64, omega: f64 },
}

impl GammaSchedule {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            GammaSchedule::Constant(g) => g,
            GammaSchedule::CosQuartic { gamma, omega } => gamma / (omega * t).cos().powi(4),
        }
    }
}

fn transposed(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().as_standard_layout().into_owned()
}

fn for_rows(a: &mut Array2<Complex64>, f: impl FnMut(&mut [Complex64])) {
    let n = a.ncols();
    a.as_slice_mut()
        .expect("standard layout")
        .chunks_mut(n)
        .for_each(f);
}

/// `Ĥv` for one vector on the grid (the kinetic part is real symmetric as a
/// matrix, so the same map acts on rows for right multiplication).
struct HamiltonianAction {
    fft: FftPair,
    kinetic: Vec<f64>,
    potential: Vec<f64>,
}

impl HamiltonianAction {
    fn new(grid: &GridSpec1D, potential: Potential) -> Self {
        Self {
            fft: FftPair::new(grid.n()),
            kinetic: grid.wavenumbers().iter().map(|k| 0.5 * k * k).collect(),
            potential: grid.points().iter().map(|&x| potential.value(x)).collect(),
        }
    }

    fn apply(&self, v: &mut [Complex64]) {
        let orig = v.to_vec();
        self.fft.forward(v);
        v.iter_mut().zip(&self.kinetic).for_each(|(z, k)| *z *= k);
        self.fft.inverse(v);
        for ((z, o), w) in v.iter_mut().zip(&orig).zip(&self.potential) {
            *z += o * w;
        }
    }

    /// `−i(Ĥρ − ρĤ)`.
    fn commutator(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut left = transposed(rho);
        for_rows(&mut left, |c| self.apply(c));
        let left = transposed(&left);
        let mut right = rho.clone();
        for_rows(&mut right, |r| self.apply(r));
        (left - right).mapv(|z| Complex64::new(z.im, -z.re))
    }
}

fn rhs_with(
    rho: &Array2<Complex64>,
    action: Option<&HamiltonianAction>,
    gamma: f64,
    x: &[f64],
) -> Array2<Complex64> {
    let mut d = match action {
        Some(h) => h.commutator(rho),
        None => Array2::from_elem(rho.dim(), ZERO),
    };
    if gamma != 0.0 {
        for ((i, j), z) in d.indexed_iter_mut() {
            *z -= 0.5 * gamma * (x[i] - x[j]).powi(2) * rho[(i, j)];
        }
    }
    d
}

/// `dρ/dt` at strength `gamma`.
pub fn lindblad_rhs(rho: &DensityMatrix, hamiltonian: Hamiltonian, gamma: f64) -> Result<Array2<Complex64>> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
    }
    let action = hamiltonian.potential().map(|p| HamiltonianAction::new(&rho.grid, p));
    Ok(rhs_with(&rho.matrix, action.as_ref(), gamma, &rho.grid.points()))
}

/// Classical RK4 from `rho.time` to `rho.time + duration`, with the schedule
/// evaluated at the stage times.
pub fn lindblad_rk4_evolve(
    rho: &DensityMatrix,
    hamiltonian: Hamiltonian,
    gamma: GammaSchedule,
    duration: f64,
    max_step: f64,
) -> Result<DensityMatrix> {
    if !(max_step > 0.0) || !(duration >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need duration >= 0 and step > 0, got {duration} and {max_step}"
        )));
    }
    let steps = ((duration / max_step) - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok(rho.clone());
    }
    let h = duration / steps as f64;
    let action = hamiltonian.potential().map(|p| HamiltonianAction::new(&rho.grid, p));
    let x = rho.grid.points();
    let trace0 = rho.trace();
    let mut state = rho.clone();
    for s in 0..steps {
        let t = rho.time + s as f64 * h;
        let (g0, g1, g2) = (gamma.at(t), gamma.at(t + 0.5 * h), gamma.at(t + h));
        if !(g0 >= 0.0 && g1 >= 0.0 && g2 >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0 near t = {t}")));
        }
        let m = &state.matrix;
        let k1 = rhs_with(m, action.as_ref(), g0, &x);
        let k2 = rhs_with(&(m + &(&k1 * (0.5 * h))), action.as_ref(), g1, &x);
        let k3 = rhs_with(&(m + &(&k2 * (0.5 * h))), action.as_ref(), g1, &x);
        let k4 = rhs_with(&(m + &(&k3 * h)), action.as_ref(), g2, &x);
        state.matrix = m + &((k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0));
        state.hermitize();
        if state.matrix.iter().any(|z| !(z.norm() <= BLOWUP)) {
            return Err(Error::Instability(format!("density matrix entry exceeded {BLOWUP} at t = {}", t + h)));
        }
    }
    state.time = rho.time + duration;
    let drift = (state.trace() - trace0).abs();
    if drift > TRACE_DRIFT {
        return Err(Error::Instability(format!(
            "trace drifted by {drift:.3e}; reduce the step"
        )));
    }
    Ok(state)
}

/// Strang factors of `e^{∓iĤ_s dt}` with `Ĥ_s = ½p̂² + s√(γ/dt)x̂`.
struct BranchUnitary {
    fft: FftPair,
    half_v: Vec<Complex64>,
    kinetic: Option<Vec<Complex64>>,
}

impl BranchUnitary {
    fn new(grid: &GridSpec1D, strength: f64, dt: f64, include_kinetic: bool, sign: f64) -> Self {
        let half_v = grid
            .points()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, -sign * 0.5 * strength * x * dt))
            .collect();
        let kinetic = include_kinetic.then(|| {
            grid.wavenumbers()
                .iter()
                .map(|k| Complex64::from_polar(1.0, -sign * 0.5 * k * k * dt))
                .collect()
        });
        Self {
            fft: FftPair::new(grid.n()),
            half_v,
            kinetic,
        }
    }

    fn apply(&self, v: &mut [Complex64]) {
        v.iter_mut().zip(&self.half_v).for_each(|(z, p)| *z *= p);
        if let Some(k) = &self.kinetic {
            self.fft.forward(v);
            v.iter_mut().zip(k).for_each(|(z, p)| *z *= p);
            self.fft.inverse(v);
        }
        v.iter_mut().zip(&self.half_v).for_each(|(z, p)| *z *= p);
    }

    /// `U ρ U†`, with `U` on columns and `Ū = (U†)ᵀ` on rows.
    fn conjugate(&self, conj: &Self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut t = transposed(rho);
        for_rows(&mut t, |c| self.apply(c));
        let mut out = transposed(&t);
        for_rows(&mut out, |r| conj.apply(r));
        out
    }
}

/// Prepared two-unitary map for a fixed `(γ, dt)`.
pub struct TwoUnitaryStep {
    branches: [(BranchUnitary, BranchUnitary); 2],
    dt: f64,
}

impl TwoUnitaryStep {
    pub fn new(grid: &GridSpec1D, gamma: f64, dt: f64, include_kinetic: bool) -> Result<Self> {
        if !(dt > 0.0) || !(gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need dt > 0 and gamma >= 0, got {dt} and {gamma}"
            )));
        }
        let strength = (gamma / dt).sqrt();
        let branch = |s: f64| {
            (
                BranchUnitary::new(grid, s * strength, dt, include_kinetic, 1.0),
                BranchUnitary::new(grid, s * strength, dt, include_kinetic, -1.0),
            )
        };
        Ok(Self {
            branches: [branch(1.0), branch(-1.0)],
            dt,
        })
    }

    /// `ρ → ½Σ_{s=±} e^{−iĤ_s dt} ρ e^{+iĤ_s dt}`.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let [(u_plus, c_plus), (u_minus, c_minus)] = &self.branches;
        let (a, b) = rayon::join(
            || u_plus.conjugate(c_plus, &rho.matrix),
            || u_minus.conjugate(c_minus, &rho.matrix),
        );
        DensityMatrix::new(rho.grid, (a + b).mapv(|z| z * 0.5), rho.time + self.dt)
    }
}

/// One step of the two-unitary decomposition.
pub fn two_unitary_step(rho: &DensityMatrix, gamma: f64, dt: f64, include_kinetic: bool) -> Result<DensityMatrix> {
    Ok(TwoUnitaryStep::new(&rho.grid, gamma, dt, include_kinetic)?.apply(rho))
}

/// `steps` repeated two-unitary steps of size `dt`.
pub fn two_unitary_evolve(
    rho: &DensityMatrix,
    gamma: f64,
    dt: f64,
    steps: usize,
    include_kinetic: bool,
) -> Result<DensityMatrix> {
    let step = TwoUnitaryStep::new(&rho.grid, gamma, dt, include_kinetic)?;
    let mut out = rho.clone();
    for _ in 0..steps {
        out = step.apply(&out);
    }
    Ok(out)
}

/// `ρ̄ = MρM†` with the wavefunction map `M = R̂†Û†` at time `t`.
pub fn map_density(rho: &DensityMatrix, profile: &ScaleProfile, t: f64) -> Result<DensityMatrix> {
    let v = profile.eval_scale(t)?;
    let tau = profile.tau_of_t(t)?;
    if t == 0.0 {
        let mut out = rho.clone();
        out.time = tau;
        return Ok(out);
    }
    let grid = rho.grid;
    let squeeze = Dilation::new(grid, 1.0 / v.c)?;
    let chirp: Vec<Complex64> = grid
        .points()
        .iter()
        .map(|&x| Complex64::from_polar(1.0, -0.5 * v.gauge() * x * x))
        .collect();
    let total: f64 = rho.matrix.iter().map(|z| z.norm_sqr()).sum();
    let mut lost = 0.0;
    // M on columns.
    let mut m = transposed(&rho.matrix);
    for_rows(&mut m, |c| {
        lost += squeeze.apply_raw(c);
        c.iter_mut().zip(&chirp).for_each(|(z, p)| *z *= p);
    });
    // M̄ on rows; the squeeze is real.
    let mut m = transposed(&m);
    for_rows(&mut m, |r| {
        lost += squeeze.apply_raw(r);
        r.iter_mut().zip(&chirp).for_each(|(z, p)| *z *= p.conj());
    });
    check_aliasing(lost, total, 1.0 / v.c)?;
    Ok(DensityMatrix::new(grid, m, tau))
}

/// Settings shared by the two scaling experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSetup {
    pub omega: f64,
    pub t_star: f64,
    /// Free-side step.
    pub dt: f64,
    /// Oscillator-side step.
    pub dtau: f64,
    /// Number of comparison checkpoints, equally spaced in `τ`.
    pub checkpoints: usize,
}

impl ScalingSetup {
    fn schedule(&self, profile: &ScaleProfile) -> Result<Vec<(f64, f64)>> {
        let tau_star = profile.tau_of_t(self.t_star)?;
        let k = self.checkpoints.max(1);
        (1..=k)
            .map(|i| {
                let tau = tau_star * i as f64 / k as f64;
                let t = if i == k { self.t_star } else { profile.t_of_tau(tau)? };
                Ok((t, tau))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GammaScalingOutcome {
    /// `(τ, trace distance)` at each checkpoint.
    pub series: Vec<(f64, f64)>,
    pub final_distance: f64,
    pub trace_free: f64,
    pub trace_harmonic: f64,
}

/// Evolves a Gaussian `ρ(0)` under the free Lindblad equation with constant
/// `γ`, maps it, and compares with the oscillator evolution whose strength
/// follows `γ/cos⁴(ωτ)`.
pub fn gamma_scaling_experiment(
    initial: &WaveFunction1D,
    gamma: f64,
    setup: ScalingSetup,
) -> Result<GammaScalingOutcome> {
    let profile = ScaleProfile::standard(setup.omega)?;
    let rho0 = DensityMatrix::pure(initial);
    let mut free = rho0.clone();
    let mut harm = rho0;
    let schedule = GammaSchedule::CosQuartic {
        gamma,
        omega: setup.omega,
    };
    let mut series = Vec::new();
    for (t, tau) in setup.schedule(&profile)? {
        free = lindblad_rk4_evolve(&free, Hamiltonian::Free, GammaSchedule::Constant(gamma), t - free.time, setup.dt)?;
        harm = lindblad_rk4_evolve(&harm, Hamiltonian::Harmonic(setup.omega), schedule, tau - harm.time, setup.dtau)?;
        let mapped = map_density(&free, &profile, t)?;
        series.push((tau, mapped.trace_distance(&harm)));
    }
    Ok(GammaScalingOutcome {
        final_distance: series.last().map_or(0.0, |s| s.1),
        series,
        trace_free: free.trace(),
        trace_harmonic: harm.trace(),
    })
}

/// Standard Gaussian pure state used by the Lindblad experiments.
pub fn gaussian_density(grid: GridSpec1D, x0: f64, p0: f64, sigma: f64) -> DensityMatrix {
    DensityMatrix::pure(&make_gaussian(grid, x0, p0, sigma).state)
}

#[derive(Debug, Clone)]
pub struct DScalingOutcome {
    /// `(τ, L² distance)` at each checkpoint.
    pub series: Vec<(f64, f64)>,
    pub final_distance: f64,
    /// `(τ, measured diffusive rate, 2D c⁴(τ))` on the oscillator side.
    pub rates: Vec<(f64, f64, f64)>,
    pub worst_rate_error: f64,
}

/// Fokker–Planck analogue of [`gamma_scaling_experiment`] for a real,
/// positive KvN state; also checks the `p`-variance growth rate
/// `dVar_p/dτ + 2ω²Cov_xp = 2D c⁴(τ)` on the oscillator side.
pub fn d_scaling_experiment(
    initial: &PhaseSpaceState,
    d: f64,
    setup: ScalingSetup,
) -> Result<DScalingOutcome> {
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!("diffusion must be >= 0, got {d}")));
    }
    let profile = ScaleProfile::standard(setup.omega)?;
    let w = setup.omega;
    let schedule = move |tau: f64| d / (w * tau).cos().powi(4);
    let mut free = initial.clone();
    let mut harm = initial.clone();
    let mut series = Vec::new();
    let mut rates = Vec::new();
    for (t, tau) in setup.schedule(&profile)? {
        free = kvn::propagate_phase_space(&free, Potential::Free, &|_| d, t - free.time, setup.dt)?;
        harm = kvn::propagate_phase_space(&harm, Potential::Harmonic(w), &schedule, tau - harm.time, setup.dtau)?;
        let mapped = kvn::map_free_to_harmonic_kvn(&free, &profile, t)?;
        series.push((tau, mapped.distance(&harm)));
        rates.push(variance_rate(&harm, w, &schedule, setup.dtau)?);
    }
    let worst_rate_error = rates
        .iter()
        .filter(|r| r.2 > 0.0)
        .map(|(_, m, e)| ((m - e) / e).abs())
        .fold(0.0, f64::max);
    Ok(DScalingOutcome {
        final_distance: series.last().map_or(0.0, |s| s.1),
        series,
        rates,
        worst_rate_error,
    })
}

/// Three-point `dVar_p/dτ + 2ω²Cov_xp` of the density moments at
/// `state.time`, against `2D(τ)`.
fn variance_rate(
    state: &PhaseSpaceState,
    omega: f64,
    schedule: &dyn Fn(f64) -> f64,
    dtau: f64,
) -> Result<(f64, f64, f64)> {
    // Diffusion cannot be run backwards, so the stencil is one-sided.
    let tau = state.time;
    let h = dtau;
    let f1 = kvn::propagate_phase_space(state, Potential::Harmonic(omega), schedule, h, h)?;
    let f2 = kvn::propagate_phase_space(&f1, Potential::Harmonic(omega), schedule, h, h)?;
    let (m0, m1, m2) = (state.density_moments(), f1.density_moments(), f2.density_moments());
    let slope = (-3.0 * m0.var_p + 4.0 * m1.var_p - m2.var_p) / (2.0 * h);
    let measured = slope + 2.0 * omega * omega * m0.cov_xp;
    Ok((tau, measured, 2.0 * schedule(tau)))
}

/// Series CSV with header `t_or_tau,metric`.
pub fn write_series_csv<W: Write>(series: &[(f64, f64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t_or_tau,metric")?;
    for (t, m) in series {
        writeln!(w, "{t:.16e},{m:.16e}")?;
    }
    Ok(())
}
