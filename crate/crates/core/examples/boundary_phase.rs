//! A periodic free state, mapped, acquires a position-dependent phase between
//! the origin and L/c. Both candidate phase conventions are compared.

use harmomap::quantum::{self, GridSpec1D, WaveFunction1D};
use harmomap::scale::ScaleProfile;
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> harmomap::Result<()> {
    let profile = ScaleProfile::standard(1.0)?;
    let length = 2.0 * PI;
    let k = 2.0 * PI / length;
    let phi = WaveFunction1D::from_fn(GridSpec1D::new(64, 0.0, length)?, 0.0, |x| {
        Complex64::new(1.0, 0.0) + 0.5 * Complex64::from_polar(1.0, k * x)
    });
    for tau in [0.3, 0.6, 1.1] {
        let t = profile.t_of_tau(tau)?;
        let target = quantum::boundary_probe_grid(256, length, profile.c_of_tau(tau)?)?;
        let psi = quantum::map_periodic_free_to_harmonic(&phi, &profile, t, target)?;
        let r = quantum::check_boundary_phase(&psi, &profile, tau, length)?;
        println!(
            "tau = {tau}: measured {:+.9}, with tau {:+.9}, with t {:+.9} -> tau {:?}, t {:?}",
            r.measured_phase,
            r.candidate_tau,
            r.candidate_t,
            r.tau_matches(1e-6),
            r.t_matches(1e-6)
        );
    }
    Ok(())
}
