//! The inverted variant maps free motion onto the upside-down oscillator for
//! |t| < 1/ω.

use harmomap::quantum::{self, make_gaussian, GridSpec1D, Potential};
use harmomap::scale::ScaleProfile;

fn main() -> harmomap::Result<()> {
    let omega = 1.0;
    let profile = ScaleProfile::inverted(omega)?;
    let psi0 = make_gaussian(GridSpec1D::symmetric(2048, 40.0)?, 0.5, 0.3, 1.0).state;
    for t in [0.2, 0.5, 0.8] {
        let tau = profile.tau_of_t(t)?;
        let mapped = quantum::map_free_to_harmonic(&quantum::propagate_free(&psi0, t), &profile, t)?;
        let direct = quantum::propagate_split(&psi0, Potential::Inverted(omega), tau, 1e-4)?;
        println!(
            "t = {t}: tau = {tau:.6}, var x {:.4}, distance {:.3e}",
            direct.var_x(),
            mapped.distance_up_to_phase(&direct)
        );
    }
    Ok(())
}
