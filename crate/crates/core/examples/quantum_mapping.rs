//! Free evolution followed by the map agrees with oscillator evolution.

use harmomap::quantum::{self, make_gaussian, GridSpec1D, Potential};
use harmomap::scale::ScaleProfile;

fn main() -> harmomap::Result<()> {
    let grid = GridSpec1D::symmetric(2048, 40.0)?;
    let psi0 = make_gaussian(grid, 0.5, 0.3, 1.0).state;
    for (omega, t) in [(1.0, 1.0), (2.0, 0.7)] {
        let profile = ScaleProfile::standard(omega)?;
        let tau = profile.tau_of_t(t)?;
        let free = quantum::propagate_free(&psi0, t);
        let mapped = quantum::map_free_to_harmonic(&free, &profile, t)?;
        let direct = quantum::propagate_split(&psi0, Potential::Harmonic(omega), tau, 1e-4)?;
        println!(
            "omega = {omega}, t = {t}, tau = {tau:.6}: distance up to phase {:.3e}, <x> {:.6} vs {:.6}",
            mapped.distance_up_to_phase(&direct),
            mapped.mean_x(),
            direct.mean_x()
        );
    }

    let profile = ScaleProfile::standard(1.0)?;
    let composed = quantum::apply_composed_unitary(&psi0, &profile, 1.0)?;
    let closed = quantum::apply_closed_form_unitary(&psi0, &profile, 1.0)?;
    println!("closed-form vs composed unitary: {:.3e}", closed.distance(&composed));
    Ok(())
}
