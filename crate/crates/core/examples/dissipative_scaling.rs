//! Constant dissipation on the free side becomes a growing γ/cos⁴(ωτ) or
//! D/cos⁴(ωτ) on the oscillator side.

use harmomap::kvn::{GridSpec2D, PhaseSpaceState};
use harmomap::open::{self, ScalingSetup};
use harmomap::quantum::{make_gaussian, GridSpec1D};

fn main() -> harmomap::Result<()> {
    let setup = ScalingSetup {
        omega: 1.0,
        t_star: 1.0,
        dt: 2e-3,
        dtau: 2e-3,
        checkpoints: 4,
    };
    let psi = make_gaussian(GridSpec1D::symmetric(128, 12.0)?, 0.5, 0.3, 1.0).state;
    let lindblad = open::gamma_scaling_experiment(&psi, 0.2, setup)?;
    for (tau, d) in &lindblad.series {
        println!("gamma: tau = {tau:.4}, trace distance {d:.3e}");
    }

    let blob = PhaseSpaceState::gaussian_blob(GridSpec2D::square(128, 10.0)?, 0.5, 0.3, 0.7, 0.7);
    let fp = open::d_scaling_experiment(&blob, 0.1, setup)?;
    for ((tau, d), (_, measured, expected)) in fp.series.iter().zip(&fp.rates) {
        println!("D: tau = {tau:.4}, L2 {d:.3e}, variance rate {measured:.5} vs 2D c^4 = {expected:.5}");
    }
    Ok(())
}
