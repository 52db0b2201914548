//! Position-measurement Lindblad dynamics: RK4 against the two-unitary
//! average, whose error falls linearly with the step.

use harmomap::open::{self, GammaSchedule, Hamiltonian};
use harmomap::quantum::GridSpec1D;

fn main() -> harmomap::Result<()> {
    let grid = GridSpec1D::symmetric(128, 10.0)?;
    let rho0 = open::gaussian_density(grid, 0.5, 0.3, 1.0);
    let (gamma, duration) = (0.5, 0.1);
    let reference = open::lindblad_rk4_evolve(&rho0, Hamiltonian::Free, GammaSchedule::Constant(gamma), duration, 5e-5)?;
    println!("purity {:.6} -> {:.6}", rho0.purity(), reference.purity());
    let mut previous: Option<f64> = None;
    for dt in [4e-4, 2e-4, 1e-4] {
        let steps = (duration / dt).round() as usize;
        let rho = open::two_unitary_evolve(&rho0, gamma, dt, steps, true)?;
        let err = rho.frobenius_distance(&reference);
        let ratio = previous.map_or(String::new(), |p| format!(" (ratio {:.3})", p / err));
        println!("dt = {dt:.0e}: error {err:.3e}{ratio}");
        previous = Some(err);
    }
    Ok(())
}
