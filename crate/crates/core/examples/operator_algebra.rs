//! Symbolic conjugations, the combined-unitary closed forms, and the
//! generator identities, checked at one `(ω, t)` sample.

use harmomap::scale::ScaleProfile;
use harmomap::weyl::mapping::{self, ClosedFormSign};
use harmomap::weyl::{adjoint_conjugate, bch_coefficient, Algebra, Conjugation, OperatorPoly};
use num_complex::Complex64;

fn main() -> harmomap::Result<()> {
    let q = Algebra::quantum();
    let x = OperatorPoly::generator(&q, "x");
    let p = OperatorPoly::generator(&q, "p");
    println!("[x, p] = {:?}", x.commutator(&p)?.coeff(&[]));

    // exp(i·s(xp+px)/2) scales x by e^{s}.
    let g = OperatorPoly::word(&q, &["x", "p"])?
        .add(&OperatorPoly::word(&q, &["p", "x"])?)
        .scale_re(0.5 * 2f64.ln());
    let xc = adjoint_conjugate(&g, &x, Conjugation::Forward)?;
    println!("U'xU with ln c = ln 2: {:.12} x", xc.coeff(&[("x", 1)]).re);

    println!("f(-2) = {:.15}", bch_coefficient(Complex64::new(-2.0, 0.0)).re);

    let v = ScaleProfile::standard(1.0)?.eval_scale(1.0)?;
    for check in mapping::conjugation_table(v)?.iter().chain(&mapping::generator_checks(v)?) {
        println!("{:<42} residual {:.1e}", check.name, check.residual);
    }
    let qc = mapping::check_quantum_closed_form(v)?;
    let derived = mapping::check_kvn_closed_form(v, ClosedFormSign::Derived)?;
    let printed = mapping::check_kvn_closed_form(v, ClosedFormSign::Printed)?;
    println!("quantum closed form: adjoint residual {:.1e}", qc.adjoint_residual);
    println!("classical closed form, (1 - ...) sign: {:.1e}", derived.adjoint_residual);
    println!("classical closed form, (1 + ...) sign: {:.3e}", printed.adjoint_residual);

    let m = mapping::verify_minimal_coupling(v.gauge(), v.c)?;
    println!(
        "minimal coupling: residual {:.3e}, missing x theta coefficient {:.6} = (c cdot)^2 = {:.6}",
        m.literal_residual,
        m.missing_x_theta,
        v.gauge().powi(2)
    );
    Ok(())
}
