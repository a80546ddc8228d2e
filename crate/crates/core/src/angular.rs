//! Angular reduction of rotation-invariant kernels.
//!
//! For radial densities, an n-dimensional convolution against a kernel
//! `f(|x - y|)` collapses to a 1-D radial integral weighted by the sphere
//! average of the kernel over directions:
//!
//! ```text
//! W_f(rho, r) = |S^{n-2}| int_0^pi f(d(theta)) sin^{n-2}(theta) dtheta,
//! d^2 = rho^2 + r^2 - 2 rho r cos(theta)
//! ```
//!
//! so that `(f * u)(rho) = int_0^inf u(r) r^{n-1} W_f(rho, r) dr`.
//!
//! The implementation substitutes `u = cos(theta)` and declares the endpoint
//! exponents `(n-3)/2` (from `(1-u^2)^{(n-3)/2}`), sharpening the `u = 1`
//! exponent by `-e/2` near the diagonal `rho = r` where the kernel blows up
//! like `d^{-e}`.

use crate::error::{Error, Result};
use crate::gamma::sphere_area;
use crate::quad::{integrate, QuadratureSpec, SingularityHint};

/// Relative window inside which the `u = 1` endpoint is treated as
/// kernel-singular. Over-clustering away from the diagonal is harmless, so
/// the window is generous.
const DIAGONAL_WINDOW: f64 = 0.2;

/// Exact-diagonal detection threshold (relative to the larger radius).
// Radii this close count as exactly equal. The window must sit strictly
// below the ~15 eps offset floor the quadrature's 16 eps collapse guard
// leaves after rounding, so hinted radial integrals never observe the
// diagonal's +inf at a node.
const DIAGONAL_EXACT: f64 = 4.0 * f64::EPSILON;

/// Sphere average of a general radial kernel: `W_f(a, b)` above, with
/// `diag_exponent` declaring the blow-up rate `f(d) ~ d^{-diag_exponent}`
/// as `d -> 0` (use 0 for bounded kernels).
///
/// Requires `n >= 2` and `a, b >= 0`; the caller is responsible for `f`
/// being finite away from `d = 0`.
pub fn sphere_kernel_integral<F>(
    f: F,
    a: f64,
    b: f64,
    n: u32,
    diag_exponent: f64,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if n < 2 {
        return Err(Error::domain("n", n as f64, "n >= 2 for angular reduction"));
    }
    if a < 0.0 || b < 0.0 {
        return Err(Error::domain("radius", a.min(b), "radii >= 0"));
    }
    if a == 0.0 || b == 0.0 {
        // Kernel is constant over the sphere: W = |S^{n-1}| f(max radius).
        return Ok(sphere_area(n) * f(a.max(b)));
    }

    let w = (n as f64 - 3.0) / 2.0;
    let near_diagonal = (a - b).abs() <= DIAGONAL_WINDOW * (a + b);

    // Integrate in v = 1 - cos(theta), v in [0, 2]: the diagonal endpoint
    // sits at v = 0, where the quadrature's power substitution is exact, so
    // the squared distance d^2 = (a-b)^2 + 2ab v carries no cancellation
    // even for nearly-equal radii.
    //
    // Endpoint exponents in v: the weight (v(2-v))^w contributes w at both
    // ends; at v = 0 a kernel blowing up like d^{-e} adds -e/2. Near (but
    // off) the diagonal the combined exponent can dip below -1 while the
    // integral stays finite; it is clamped to keep the substitution legal
    // while still clustering nodes hard at the peak.
    let mut lower = w;
    if near_diagonal && diag_exponent > 0.0 {
        lower = (w - diag_exponent / 2.0).max(-0.95);
    }

    let hints = vec![
        SingularityHint::new(0.0, lower),
        SingularityHint::new(2.0, w),
    ];
    let aspec = spec.with_hints(hints);

    let gap_sq = (a - b) * (a - b);
    let integrand = |v: f64| {
        let d2 = gap_sq + 2.0 * a * b * v;
        let weight = if w == 0.0 { 1.0 } else { (v * (2.0 - v)).powf(w) };
        f(d2.sqrt()) * weight
    };

    let r = integrate(integrand, 0.0, 2.0, &aspec)?;
    if !r.converged {
        return Err(Error::NonConvergent {
            estimate: sphere_area(n - 1) * r.value,
            error: sphere_area(n - 1) * r.error,
        });
    }
    Ok(sphere_area(n - 1) * r.value)
}

/// Sphere average of the power kernel `d^{-exponent}`:
///
/// `W(rho, r) = |S^{n-2}| int_0^pi (rho^2 + r^2 - 2 rho r cos t)^{-e/2} sin^{n-2} t dt`.
///
/// Exact special values: `W(0, r) = |S^{n-1}| r^{-e}`. On the exact diagonal
/// `rho = r` the angular integral is finite iff `e < n - 1`; for
/// `n - 1 <= e < n` it diverges pointwise but remains integrable in the
/// radial variable, so `+inf` is returned; for `e >= n` the radial integral
/// itself diverges and the call errors out.
pub fn angular_weight(
    rho: f64,
    r: f64,
    exponent: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "n >= 2 for angular reduction"));
    }
    if rho < 0.0 || r < 0.0 {
        return Err(Error::domain("radius", rho.min(r), "radii >= 0"));
    }

    if rho == 0.0 || r == 0.0 {
        let m = rho.max(r);
        if m == 0.0 {
            return if exponent > 0.0 {
                Err(Error::Singular("power kernel at zero distance".into()))
            } else {
                Ok(sphere_area(n) * if exponent == 0.0 { 1.0 } else { 0.0 })
            };
        }
        return Ok(sphere_area(n) * m.powf(-exponent));
    }

    let nf = n as f64;
    if (rho - r).abs() <= DIAGONAL_EXACT * rho.max(r) && exponent >= nf - 1.0 {
        if exponent >= nf {
            return Err(Error::Divergent(format!(
                "angular weight with exponent {exponent} >= n = {n} on the diagonal"
            )));
        }
        // Pointwise divergent but radially integrable; the radial quadrature
        // never lands exactly on the diagonal (it is a declared split point).
        return Ok(f64::INFINITY);
    }

    sphere_kernel_integral(|d| d.powf(-exponent), rho, r, n, exponent.max(0.0), spec)
}

/// Far-field expansion coefficients of `W` for the power kernel:
///
/// `W(rho, r) = |S^{n-1}| r^{-e} (1 + c2 x^2 + c4 x^4 + O(x^6))`, `x = rho/r`.
///
/// Used to integrate tails analytically past the range where direct angular
/// quadrature is wasteful.
pub fn angular_weight_far_coeffs(exponent: f64, n: u32) -> (f64, f64) {
    let nf = n as f64;
    let l = exponent / 2.0;
    let c2 = -l + 2.0 * l * (l + 1.0) / nf;
    let c4 = l * (l + 1.0) / 2.0 - 2.0 * l * (l + 1.0) * (l + 2.0) / nf
        + 2.0 * l * (l + 1.0) * (l + 2.0) * (l + 3.0) / (nf * (nf + 2.0));
    (c2, c4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::sphere_area;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// Closed form in n = 3: the u-integral is elementary,
    /// W = 2 pi [ |rho-r|^{2-e} - (rho+r)^{2-e} ] / (rho r (e - 2)), e != 2,
    /// and (2 pi / (rho r)) ln((rho+r)/|rho-r|) at e = 2.
    fn w3_exact(rho: f64, r: f64, e: f64) -> f64 {
        if (e - 2.0).abs() < 1e-12 {
            2.0 * PI / (rho * r) * ((rho + r) / (rho - r).abs()).ln()
        } else {
            2.0 * PI * ((rho - r).abs().powf(2.0 - e) - (rho + r).powf(2.0 - e))
                / (rho * r * (e - 2.0))
        }
    }

    #[test]
    fn matches_n3_closed_form() {
        for &(rho, r, e) in &[
            (0.5, 1.0, 1.0),
            (1.0, 2.0, 1.5),
            (0.3, 0.31, 1.0),
            (2.0, 5.0, 2.0),
            (1.0, 1.2, 2.5),
            (4.0, 0.5, 0.7),
        ] {
            let w = angular_weight(rho, r, e, 3, &spec()).unwrap();
            assert_relative_eq!(w, w3_exact(rho, r, e), max_relative = 1e-9);
        }
    }

    #[test]
    fn diagonal_n3_unit() {
        // W(1, 1, 1; n=3) = 2 pi [0 - 2^1]/(1*1*(-1)) ... via the e=1 closed
        // form limit: 2 pi (2 - 0) / 1 = 4 pi. Finite because e < n - 1.
        let w = angular_weight(1.0, 1.0, 1.0, 3, &spec()).unwrap();
        assert_relative_eq!(w, 4.0 * PI, max_relative = 1e-9);
    }

    #[test]
    fn reference_value_n4() {
        // 30-digit arbitrary-precision reference.
        let w = angular_weight(1.3, 0.7, 2.4, 4, &spec()).unwrap();
        assert_relative_eq!(w, 10.938_847_903_675_146, max_relative = 1e-9);
    }

    #[test]
    fn zero_radius_is_exact_power() {
        for n in [2u32, 3, 4, 5] {
            let w = angular_weight(0.0, 2.0, 1.3, n, &spec()).unwrap();
            assert_relative_eq!(
                w,
                sphere_area(n) * 2f64.powf(-1.3),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn symmetry_in_arguments() {
        for n in [2u32, 3, 5] {
            let a = angular_weight(0.8, 2.2, 1.7, n, &spec()).unwrap();
            let b = angular_weight(2.2, 0.8, 1.7, n, &spec()).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn scaling_homogeneity() {
        // W(c rho, c r) = c^{-e} W(rho, r).
        let c = 3.7;
        let e = 1.9;
        for n in [3u32, 4] {
            let w1 = angular_weight(0.6, 1.1, e, n, &spec()).unwrap();
            let w2 = angular_weight(c * 0.6, c * 1.1, e, n, &spec()).unwrap();
            assert_relative_eq!(w2, w1 * c.powf(-e), max_relative = 1e-9);
        }
    }

    #[test]
    fn diagonal_semantics() {
        // e < n-1: finite. n-1 <= e < n: +inf. e >= n: error.
        let w = angular_weight(1.0, 1.0, 1.5, 3, &spec()).unwrap();
        assert!(w.is_finite());
        let w = angular_weight(1.0, 1.0, 2.3, 3, &spec()).unwrap();
        assert!(w.is_infinite());
        let err = angular_weight(1.0, 1.0, 3.0, 3, &spec());
        assert!(matches!(err, Err(Error::Divergent(_))));
    }

    #[test]
    fn near_diagonal_blowup_rate() {
        // For e > n-1, W(rho, r) ~ C |rho - r|^{n-1-e} as r -> rho: check the
        // growth exponent by sampling two gaps.
        let e = 2.5;
        let n = 3u32;
        let w1 = angular_weight(1.0, 1.0 + 1e-3, e, n, &spec()).unwrap();
        let w2 = angular_weight(1.0, 1.0 + 1e-4, e, n, &spec()).unwrap();
        let measured = (w2 / w1).ln() / (10f64).ln();
        assert_relative_eq!(measured, e - (n as f64 - 1.0), max_relative = 0.02);
    }

    #[test]
    fn far_field_series_matches_direct() {
        for &(e, n) in &[(1.0, 3u32), (2.0, 3), (1.5, 4), (2.0, 5), (3.0, 5)] {
            let (c2, c4) = angular_weight_far_coeffs(e, n);
            let (rho, r) = (0.3f64, 60.0f64);
            let x = rho / r;
            let series = sphere_area(n) * r.powf(-e) * (1.0 + c2 * x * x + c4 * x.powi(4));
            let direct = angular_weight(rho, r, e, n, &spec()).unwrap();
            assert_relative_eq!(direct, series, max_relative = 1e-10);
        }
    }

    #[test]
    fn bounded_kernel_through_general_interface() {
        // f(d) = 1 integrates the weight alone: W = |S^{n-1}|. n = 2 has a
        // -1/2 weight singularity at the far endpoint v = 2, where the
        // collapse guard's (16 eps * 2)^{1/2} truncation — not the engine
        // tolerance — sets the accuracy.
        for n in [2u32, 3, 4, 6] {
            let w = sphere_kernel_integral(|_| 1.0, 1.0, 1.0, n, 0.0, &spec()).unwrap();
            assert_relative_eq!(w, sphere_area(n), max_relative = 8e-8);
        }
    }
}
