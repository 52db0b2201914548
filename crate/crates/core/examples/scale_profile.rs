//! The scaling schedule c(t), its clock τ(t), and the inverted variant.

use harmomap::scale::ScaleProfile;

fn main() -> harmomap::Result<()> {
    let harmonic = ScaleProfile::standard(1.0)?;
    let inverted = ScaleProfile::inverted(1.0)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "t", "c", "cdot", "tau", "c(tau)");
    for i in 0..=8 {
        let t = 0.25 * i as f64;
        let v = harmonic.eval_scale(t)?;
        let tau = harmonic.tau_of_t(t)?;
        println!("{t:6.2} {:10.6} {:10.6} {tau:10.6} {:10.6}", v.c, v.cdot, harmonic.c_of_tau(tau)?);
    }
    println!("tau saturates at pi/(2 omega) = {:.6}", harmonic.tau_limit());

    println!("\ninverted, valid for |t| < 1/omega:");
    for t in [0.0, 0.3, 0.6, 0.9] {
        let v = inverted.eval_scale(t)?;
        println!("t = {t:.1}: c = {:.6}, tau = {:.6}", v.c, inverted.tau_of_t(t)?);
    }
    match inverted.eval_scale(1.2) {
        Err(e) => println!("t = 1.2: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
