//! A quantum particle coupled to a classical one: the map rescales the
//! coupling constant to c⁴k.

use harmomap::scale::ScaleProfile;
use harmomap::weyl::mapping::verify_hybrid_scaling;

fn main() -> harmomap::Result<()> {
    let k = 0.3;
    let profile = ScaleProfile::standard(1.0)?;
    for t in [0.0, 0.5, 1.0, 2.0] {
        let v = profile.eval_scale(t)?;
        let r = verify_hybrid_scaling(k, v.c, v.cdot, v.cddot, 1.0)?;
        println!(
            "t = {t}: c = {:.6}, coupling {:.12} (c^4 k = {:.12}), residual {:.1e}",
            v.c, r.coupling, r.expected_coupling, r.residual
        );
    }
    Ok(())
}
