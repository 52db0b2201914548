//! ⟨Î⟩ along free KvN motion, with and without the explicit ω factors.

use harmomap::kvn::{self, GridSpec2D, PhaseSpaceState};
use harmomap::scale::ScaleProfile;

fn main() -> harmomap::Result<()> {
    let blob = PhaseSpaceState::gaussian_blob(GridSpec2D::square(256, 16.0)?, 0.5, 0.3, 0.7, 0.7);
    for omega in [1.0, 2.0] {
        let profile = ScaleProfile::standard(omega)?;
        println!("omega = {omega}");
        for i in 0..=4 {
            let t = 0.5 * i as f64;
            let parts = kvn::invariant_expectation(&kvn::free_flow(&blob, t), &profile, t)?;
            println!(
                "  t = {t:.1}: total {:.12}  (xp {:.6}, bopp {:.6})  unit-omega form {:.6}",
                parts.total, parts.xp, parts.bopp, parts.unit_omega_total
            );
        }
    }
    Ok(())
}
