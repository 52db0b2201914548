use num_complex::Complex64;
use proptest::prelude::*;

use harmomap::experiments::{registry, validate_config};
use harmomap::kvn::{self, GridSpec2D, PhaseSpaceState};
use harmomap::open::{self, DensityMatrix};
use harmomap::quantum::{self, make_gaussian, GridSpec1D};
use harmomap::scale::ScaleProfile;
use harmomap::weyl::{adjoint_conjugate, bch_coefficient, Algebra, Conjugation, OperatorPoly};

fn quadratic(alg: &std::sync::Arc<Algebra>, coeffs: &[f64]) -> OperatorPoly {
    let names = alg.names().to_vec();
    let mut g = OperatorPoly::zero(alg);
    let mut k = 0;
    for i in 0..names.len() {
        for j in i..names.len() {
            g = g.add(&OperatorPoly::word(alg, &[&names[i], &names[j]]).unwrap().scale_re(coeffs[k]));
            k += 1;
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn clock_round_trip(omega in 0.2f64..3.0, s in -0.95f64..0.95) {
        let p = ScaleProfile::standard(omega).unwrap();
        let t = 3.0 * s / omega;
        let tau = p.tau_of_t(t).unwrap();
        prop_assert!((p.t_of_tau(tau).unwrap() - t).abs() < 1e-12 * (1.0 + t.abs()));
        let c = p.eval_scale(t).unwrap().c;
        prop_assert!((p.c_of_tau(tau).unwrap() - c).abs() < 1e-12 * c);

        let inv = ScaleProfile::inverted(omega).unwrap();
        let t = s / omega;
        let tau = inv.tau_of_t(t).unwrap();
        prop_assert!((inv.t_of_tau(tau).unwrap() - t).abs() < 1e-12);
    }

    #[test]
    fn ermakov_equation_holds(omega in 0.2f64..3.0, t in -2.0f64..2.0) {
        let v = ScaleProfile::standard(omega).unwrap().eval_scale(t).unwrap();
        prop_assert!((v.cddot * v.c.powi(3) - omega * omega).abs() < 1e-12 * omega * omega);
    }

    #[test]
    fn bch_coefficient_reflection(u in -6.0f64..6.0) {
        // f(u) − f(−u) = u, on both branches.
        let f = |u: f64| bch_coefficient(Complex64::new(u, 0.0)).re;
        prop_assert!((f(u) - f(-u) - u).abs() < 1e-12 * (1.0 + u.abs()));
        let small = u * 1e-8;
        prop_assert!((f(small) - f(-small) - small).abs() < 1e-15);
    }

    #[test]
    fn conjugation_inverts(coeffs in prop::collection::vec(-1.0f64..1.0, 10), a in prop::collection::vec(-2.0f64..2.0, 4)) {
        let alg = Algebra::kvn();
        let g = quadratic(&alg, &coeffs);
        let names = alg.names().to_vec();
        let mut op = OperatorPoly::zero(&alg);
        for (name, c) in names.iter().zip(&a) {
            op = op.add(&OperatorPoly::generator(&alg, name).scale_re(*c));
        }
        let there = adjoint_conjugate(&g, &op, Conjugation::Forward).unwrap();
        let back = adjoint_conjugate(&g, &there, Conjugation::Inverse).unwrap();
        prop_assert!(back.max_abs_diff(&op) < 1e-10);
    }

    #[test]
    fn conjugation_is_a_homomorphism(coeffs in prop::collection::vec(-1.0f64..1.0, 3)) {
        // U†[x,p]U = [U†xU, U†pU] = i.
        let alg = Algebra::quantum();
        let g = quadratic(&alg, &coeffs);
        let x = adjoint_conjugate(&g, &OperatorPoly::generator(&alg, "x"), Conjugation::Forward).unwrap();
        let p = adjoint_conjugate(&g, &OperatorPoly::generator(&alg, "p"), Conjugation::Forward).unwrap();
        let comm = x.commutator(&p).unwrap();
        let i = OperatorPoly::scalar(&alg, Complex64::new(0.0, 1.0));
        prop_assert!(comm.max_abs_diff(&i) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quantum_map_round_trip(x0 in -2.0f64..2.0, p0 in -1.0f64..1.0, sigma in 0.8f64..1.5, omega in 0.5f64..1.5, s in 0.05f64..1.0) {
        let grid = GridSpec1D::symmetric(1024, 40.0).unwrap();
        let psi = make_gaussian(grid, x0, p0, sigma).state;
        let profile = ScaleProfile::standard(omega).unwrap();
        let t = s / omega;
        let mapped = quantum::map_free_to_harmonic(&psi, &profile, t).unwrap();
        prop_assert!((mapped.norm() - 1.0).abs() < 1e-10);
        let back = quantum::map_harmonic_to_free(&mapped, &profile, profile.tau_of_t(t).unwrap()).unwrap();
        prop_assert!(back.distance(&psi) < 1e-10);
    }

    #[test]
    fn dilation_and_chirp_contracts(x0 in -1.0f64..1.0, p0 in -1.0f64..1.0, c in 0.7f64..1.5, alpha in -1.0f64..1.0) {
        let grid = GridSpec1D::symmetric(1024, 30.0).unwrap();
        let psi = make_gaussian(grid, x0, p0, 1.0).state;
        let d = quantum::apply_dilation(&psi, c).unwrap();
        prop_assert!((d.mean_x() - c * psi.mean_x()).abs() < 1e-8);
        prop_assert!((d.mean_p() - psi.mean_p() / c).abs() < 1e-8);
        let r = quantum::apply_chirp(&psi, alpha);
        prop_assert!((r.mean_p() - psi.mean_p() - alpha * psi.mean_x()).abs() < 1e-8);
        prop_assert!((r.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kvn_map_matches_rotation_of_means(x0 in -1.0f64..1.0, p0 in -1.0f64..1.0, s in 0.1f64..1.0) {
        let grid = GridSpec2D::square(128, 10.0).unwrap();
        let blob = PhaseSpaceState::gaussian_blob(grid, x0, p0, 0.7, 0.7);
        let profile = ScaleProfile::standard(1.0).unwrap();
        let free = kvn::free_flow(&blob, s);
        let mapped = kvn::map_free_to_harmonic_kvn(&free, &profile, s).unwrap();
        let tau = profile.tau_of_t(s).unwrap();
        let m = mapped.moments();
        let (x0m, p0m) = (blob.moments().mean_x, blob.moments().mean_p);
        prop_assert!((m.mean_x - (x0m * tau.cos() + p0m * tau.sin())).abs() < 1e-8);
        prop_assert!((m.mean_p - (p0m * tau.cos() - x0m * tau.sin())).abs() < 1e-8);
    }

    #[test]
    fn two_unitary_step_is_a_channel(gamma in 0.0f64..2.0, dt in 1e-4f64..1e-2) {
        let grid = GridSpec1D::symmetric(64, 8.0).unwrap();
        let rho = open::gaussian_density(grid, 0.5, 0.3, 1.0);
        let out: DensityMatrix = open::two_unitary_step(&rho, gamma, dt, true).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-10);
        prop_assert!(out.hermiticity_error() < 1e-12);
        prop_assert!(out.min_eigenvalue() > -1e-10);
        prop_assert!(out.purity() <= rho.purity() + 1e-12);
    }

    #[test]
    fn configs_round_trip(omega in 0.1f64..5.0, t_star in 0.0f64..3.0, tol in 1e-12f64..1.0) {
        let mut cfg = registry::default_config("quantum-map");
        cfg.omega = omega;
        cfg.times.t_star = Some(t_star);
        cfg.tolerances.insert("L2_map_distance".into(), tol);
        let text = cfg.canonical();
        let parsed = validate_config(&text).unwrap();
        prop_assert_eq!(parsed.canonical(), text);
        prop_assert_eq!(parsed, cfg);
    }
}
