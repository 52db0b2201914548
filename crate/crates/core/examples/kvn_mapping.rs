//! The classical (KvN) map: a free phase-space blob becomes a rotated blob.

use harmomap::kvn::{self, GridSpec2D, PhaseSpaceState};
use harmomap::quantum::Potential;
use harmomap::scale::ScaleProfile;

fn main() -> harmomap::Result<()> {
    let grid = GridSpec2D::square(256, 8.0)?;
    let blob = PhaseSpaceState::gaussian_blob(grid, 0.5, 0.3, 0.7, 0.7);
    let profile = ScaleProfile::standard(1.0)?;
    let t = 1.0;
    let tau = profile.tau_of_t(t)?;
    let mapped = kvn::map_free_to_harmonic_kvn(&kvn::free_flow(&blob, t), &profile, t)?;
    let direct = kvn::propagate_liouville(&blob, Potential::Harmonic(1.0), tau, 1e-3)?;
    let (m, d) = (mapped.moments(), direct.moments());
    println!("tau = {tau:.6}");
    println!("mapped: <x> {:.6} <p> {:.6} var x {:.6}", m.mean_x, m.mean_p, m.var_x);
    println!("direct: <x> {:.6} <p> {:.6} var x {:.6}", d.mean_x, d.mean_p, d.var_x);
    println!("L2 distance {:.3e}", mapped.distance(&direct));

    let sheared = kvn::apply_shear(&blob, 0.5)?;
    println!(
        "shear by 0.5 moves <p> from {:.4} to {:.4} (<x> = {:.4})",
        blob.moments().mean_p,
        sheared.moments().mean_p,
        blob.moments().mean_x
    );
    Ok(())
}
