//! Randomized invariants. Case counts are tuned so the whole file stays
//! in the seconds range; the expensive quadrature properties use few
//! cases with wide parameter coverage.

use proptest::prelude::*;

use rieszkit::ball::{k1_kernel, poisson_mass, reflected_distance};
use rieszkit::constants::{bubble_integral, riesz_constant};
use rieszkit::extremal::{Bubble, KelvinTransform};
use rieszkit::gamma::{gamma, sphere_area};
use rieszkit::params::ProblemParams;
use rieszkit::profile::TailModel;
use rieszkit::quad::{integrate, QuadratureSpec, SingularityHint};
use rieszkit::riesz::{riesz_potential, PurePower};
use rieszkit::Check;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

proptest! {
    // --- scalar kernels: cheap, many cases -------------------------------

    #[test]
    fn gamma_recursion(x in 0.05f64..20.0) {
        let lhs = gamma(x + 1.0);
        let rhs = x * gamma(x);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(rhs.abs()));
    }

    #[test]
    fn sphere_area_double_step(n in 2u32..12) {
        // |S^{n+1}| / |S^{n-1}| = 2 pi / n.
        let ratio = sphere_area(n + 2) / sphere_area(n);
        let expect = 2.0 * std::f64::consts::PI / n as f64;
        prop_assert!((ratio - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn check_pass_rule(computed in -10.0f64..10.0, reference in -10.0f64..10.0, tol in 1e-12f64..1.0) {
        let c = Check::against("x", computed, reference, tol);
        let rel = if reference == 0.0 {
            (computed - reference).abs()
        } else {
            (computed - reference).abs() / reference.abs()
        };
        prop_assert_eq!(c.pass, rel <= tol);
    }

    #[test]
    fn tail_model_through_interpolates(r in 0.5f64..50.0, v in 0.01f64..10.0, kappa in 0.5f64..8.0) {
        let t = TailModel::through(r, v, kappa);
        prop_assert!((t.coefficient * r.powf(-kappa) - v).abs() <= 1e-12 * v);
    }

    #[test]
    fn critical_pair_zeroes_scaling_exponents(
        n in 3u32..8,
        sigma_frac in 0.1f64..0.9,
        alpha in 0.3f64..2.0,
    ) {
        let sigma = sigma_frac * n as f64;
        let p = match ProblemParams::critical(n, 0, alpha, sigma) {
            Ok(p) => p,
            Err(_) => return Ok(()), // s too close to n/2 for this n
        };
        let (tau, mu) = p.scaling_exponents();
        prop_assert!(tau.abs() <= 1e-10 && mu.abs() <= 1e-10);
    }

    // --- bubble family ----------------------------------------------------

    #[test]
    fn bubble_scaling_covariance(
        mu in 0.1f64..10.0,
        c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0,
        x0 in -5.0f64..5.0, x1 in -5.0f64..5.0, x2 in -5.0f64..5.0,
    ) {
        let params = ProblemParams::critical(3, 0, 2.0, 2.0).unwrap();
        let b = Bubble::scaled(&params, mu, vec![c0, c1, c2]).unwrap();
        let std = Bubble::standard(&params).unwrap();
        let x = [x0, x1, x2];
        let y = [mu * (x0 - c0), mu * (x1 - c1), mu * (x2 - c2)];
        let lhs = b.value(&x);
        let rhs = mu.powf(b.k) * std.value(&y);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn kelvin_is_an_involution(
        c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, c2 in -1.0f64..1.0,
        lambda in 0.2f64..3.0,
        nu in 0.2f64..3.0,
        p0 in -4.0f64..4.0, p1 in -4.0f64..4.0, p2 in -4.0f64..4.0,
    ) {
        let d2 = (p0 - c0) * (p0 - c0) + (p1 - c1) * (p1 - c1) + (p2 - c2) * (p2 - c2);
        prop_assume!(d2 > 0.01);
        let params = ProblemParams::critical(3, 0, 2.0, 2.0).unwrap();
        let b = Bubble::standard(&params).unwrap();
        let f = |x: &[f64]| b.value(x);
        let x0 = vec![c0, c1, c2];
        let kt = KelvinTransform::new(&f, x0.clone(), lambda, nu).unwrap();
        let g = |x: &[f64]| kt.eval(x).unwrap();
        let kt2 = KelvinTransform::new(&g, x0, lambda, nu).unwrap();
        let p = [p0, p1, p2];
        let round = kt2.eval(&p).unwrap();
        prop_assert!((round - f(&p)).abs() <= 1e-10 * f(&p).abs());
    }

    #[test]
    fn kelvin_fixes_its_sphere(
        lambda in 0.3f64..2.5,
        nu in 0.2f64..3.0,
        az in 0.0f64..std::f64::consts::TAU,
        pol in 0.1f64..3.0,
    ) {
        let d = [pol.sin() * az.cos(), pol.sin() * az.sin(), pol.cos()];
        let x = [lambda * d[0], lambda * d[1], lambda * d[2]];
        let params = ProblemParams::critical(3, 0, 2.0, 2.0).unwrap();
        let b = Bubble::standard(&params).unwrap();
        let f = |y: &[f64]| b.value(y);
        let kt = KelvinTransform::new(&f, vec![0.0; 3], lambda, nu).unwrap();
        let v = kt.eval(&x).unwrap();
        prop_assert!((v - f(&x)).abs() <= 1e-11 * f(&x).abs());
    }

    #[test]
    fn standard_bubble_gap_sign(lambda in 0.05f64..3.0, t in 0.05f64..0.95) {
        // omega_lambda has the sign of (1 - lambda^2)(lambda^2 - r^2)
        // for the standard bubble about the origin.
        prop_assume!((lambda - 1.0).abs() > 1e-3);
        let params = ProblemParams::critical(3, 0, 2.0, 2.0).unwrap();
        let b = Bubble::standard(&params).unwrap();
        let f = |y: &[f64]| b.value(y);
        let kt = KelvinTransform::new(&f, vec![0.0; 3], lambda, 1.0).unwrap();
        let r = t * lambda;
        let x = [r, 0.0, 0.0];
        let omega = kt.eval(&x).unwrap() - f(&x);
        let sign = (1.0 - lambda * lambda) * (lambda * lambda - r * r);
        prop_assert!(omega * sign > 0.0, "omega {omega:e} vs predicted sign {sign:e}");
    }

    // --- moving-spheres comparison kernels ---------------------------------

    #[test]
    fn reflection_kernel_symmetry_and_sign(
        x0r in 0.0f64..0.5,
        xr in 0.0f64..0.9, xa in 0.0f64..std::f64::consts::TAU,
        yr in 0.0f64..0.9, ya in 0.0f64..std::f64::consts::TAU,
    ) {
        let lambda = 1.0;
        let x0 = [x0r, 0.0, 0.0];
        let x = [x0r + xr * xa.cos(), xr * xa.sin(), 0.3 * xr];
        let y = [x0r + yr * ya.cos(), yr * ya.sin(), -0.2 * yr];
        let dx: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assume!(dx > 1e-3);
        // Both inside the sphere of radius lambda about x0 by construction
        // (|x - x0| <= 0.9 sqrt(1 + 0.09) < 1).
        let k_xy = k1_kernel(3, 1.0, lambda, &x0, &x, &y).unwrap();
        let k_yx = k1_kernel(3, 1.0, lambda, &x0, &y, &x).unwrap();
        prop_assert!((k_xy - k_yx).abs() <= 1e-10 * k_xy.abs().max(1.0));
        prop_assert!(k_xy > 0.0);
        // Reflection distance is symmetric too.
        let q_xy = reflected_distance(&x, &y, &x0, lambda);
        let q_yx = reflected_distance(&y, &x, &x0, lambda);
        prop_assert!((q_xy - q_yx).abs() <= 1e-12 * q_xy.max(1.0));
    }
}

// --- quadrature-backed identities: few cases, strict tolerances -----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn power_law_with_endpoint_hint(e in -0.9f64..3.0) {
        let q = spec().with_hints(vec![SingularityHint::new(0.0, e.min(0.0))]);
        let v = integrate(|x: f64| x.powf(e), 0.0, 1.0, &q).unwrap();
        let exact = 1.0 / (e + 1.0);
        prop_assert!((v.value - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn power_tail_to_infinity(k in 1.1f64..6.0) {
        let q = spec().with_hints(vec![SingularityHint::at_infinity(k)]);
        let v = integrate(|x: f64| x.powf(-k), 1.0, f64::INFINITY, &q).unwrap();
        let exact = 1.0 / (k - 1.0);
        prop_assert!((v.value - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn convolution_identity_random_parameters(
        n in 3u32..6,
        gfrac in 0.15f64..0.85,
        rho in 0.0f64..8.0,
    ) {
        let gamma_exp = gfrac * (n as f64 - 0.3) / 2.0;
        prop_assume!(gamma_exp > 0.25);
        let u = rieszkit::profile::AlgebraicBump::new(1.0, 1.0, n as f64 - gamma_exp);
        let got = riesz_potential(&u, 2.0 * gamma_exp, n, rho, &spec()).unwrap();
        let exact = bubble_integral(gamma_exp, n).unwrap()
            * (1.0 + rho * rho).powf(-gamma_exp);
        prop_assert!(
            (got.value - exact).abs() <= 1e-6 * exact,
            "n={n} gamma={gamma_exp} rho={rho}: rel {:e}",
            (got.value - exact).abs() / exact
        );
    }

    #[test]
    fn composition_random_orders(
        a1 in 0.4f64..1.4,
        a2 in 0.4f64..1.2,
    ) {
        // R_a1 |.|^{a1-n} * R_a2 |.|^{a2-n} = R_{a1+a2} |.|^{a1+a2-n} at |x| = 1.
        let n = 3u32;
        prop_assume!(a1 + a2 < 2.7);
        let u = PurePower { exponent: n as f64 - a2 };
        let inner = riesz_potential(&u, n as f64 - a1, n, 1.0, &spec()).unwrap();
        let lhs = riesz_constant(a1, n).unwrap() * riesz_constant(a2, n).unwrap() * inner.value;
        let rhs = riesz_constant(a1 + a2, n).unwrap();
        prop_assert!(
            (lhs - rhs).abs() <= 1e-4 * rhs,
            "a1={a1} a2={a2}: rel {:e}", (lhs - rhs).abs() / rhs
        );
    }

    #[test]
    fn poisson_mass_is_one_everywhere(
        alpha in 0.2f64..1.8,
        frac in 0.0f64..0.95,
        radius in 0.5f64..2.0,
    ) {
        let m = poisson_mass(3, alpha, radius, frac * radius, &spec()).unwrap();
        prop_assert!((m - 1.0).abs() <= 1e-10, "alpha={alpha} frac={frac}: {m:e}");
    }
}
