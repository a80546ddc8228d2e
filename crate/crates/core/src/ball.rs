//! Green and Poisson kernels of the ball, the representation formula they
//! satisfy, and the comparison kernels driving the moving-spheres argument.
//!
//! For the fractional operator the ball Green function is
//!
//! ```text
//! G_alpha(x, y) = green_constant(n, alpha) |x-y|^{alpha-n} H(s0),
//! H(s) = int_0^s t^{alpha/2 - 1} (1+t)^{-n/2} dt,
//! s0 = (R^2 - |x|^2)(R^2 - |y|^2) / (R^2 |x-y|^2),
//! ```
//!
//! and the exterior Poisson kernel is
//!
//! ```text
//! P_alpha(x, y) = pi^{-(n/2+1)} Gamma(n/2) sin(pi alpha / 2)
//!                 ((R^2-|x|^2)/(|y|^2-R^2))^{alpha/2} |x-y|^{-n}.
//! ```
//!
//! `green_constant` absorbs the same `(2 pi)^alpha` normalization as the
//! fractional Laplacian here, so `u(x) = int_B G_alpha g + int_{B^c} P_alpha u`
//! holds with `g` produced by [`crate::radial_ops::fractional_laplacian_radial`].

use crate::angular::{angular_weight, sphere_kernel_integral};
use crate::error::{Error, Result};
use crate::gamma::{gamma, sphere_area};
use crate::profile::{RadialFunction, RadialProfile, TailModel};
use crate::quad::{integrate, QuadratureSpec, SingularityHint};
use crate::radial_ops::fractional_laplacian_radial;
use crate::report::Check;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// `pi^alpha Gamma(n/2) / (pi^{n/2} Gamma(alpha/2)^2)`.
pub fn green_constant(n: u32, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain("alpha", alpha, "alpha in (0, 2)"));
    }
    let nf = n as f64;
    let g = gamma(alpha / 2.0);
    Ok(PI.powf(alpha) * gamma(nf / 2.0) / (PI.powf(nf / 2.0) * g * g))
}

/// `int_0^s t^{alpha/2-1} (1+t)^{-n/2} dt`: binomial series for small `s`,
/// complete-beta complement otherwise.
pub fn green_profile_integral(n: u32, alpha: f64, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain("s", s, "nonnegative"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let a = alpha / 2.0;
    let c = n as f64 / 2.0;
    if s <= 0.5 {
        // (1+t)^{-c} = sum b_k t^k, b_0 = 1, b_k = -b_{k-1} (c+k-1)/k.
        let mut total = 0.0;
        let mut b = 1.0;
        let mut k = 0.0;
        loop {
            let term = b * s.powf(a + k) / (a + k);
            total += term;
            if term.abs() < 1e-16 * total.abs().max(1e-300) || k > 200.0 {
                break;
            }
            b *= -(c + k) / (k + 1.0);
            k += 1.0;
        }
        return Ok(total);
    }
    // H(inf) - int_s^inf: the complete integral is B(a, c - a).
    let complete = gamma(a) * gamma(c - a) / gamma(c);
    let q = QuadratureSpec {
        hints: vec![SingularityHint::at_infinity(c - a + 1.0)],
        ..spec.clone()
    };
    let tail = integrate(
        |t: f64| t.powf(a - 1.0) * (1.0 + t).powf(-c),
        s,
        f64::INFINITY,
        &q,
    )?;
    Ok(complete - tail.value)
}

/// Classical Green function of `-Delta` on the ball of radius `R`
/// (`n >= 3`), as a function of `|x|`, `|y|` and `|x-y|`.
///
/// The image term uses `|x| |x*/|x|^2 R^2 - y| / R
/// = sqrt(R^2 - 2 x.y + |x|^2 |y|^2 / R^2)`, which is stable down to
/// `x = 0` where it degenerates to `R`.
pub fn green_laplacian_ball(n: u32, radius: f64, rx: f64, ry: f64, dist: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain("n", n as f64, "n >= 3"));
    }
    for (name, v, lim) in [("|x|", rx, radius), ("|y|", ry, radius)] {
        if !(v >= 0.0 && v <= lim) {
            return Err(Error::domain(name, v, "inside the closed ball"));
        }
    }
    let nf = n as f64;
    // 2 x.y recovered from the distance: |x-y|^2 = rx^2 + ry^2 - 2 x.y.
    let two_xy = rx * rx + ry * ry - dist * dist;
    let image_sq = radius * radius - two_xy + (rx * ry / radius) * (rx * ry / radius);
    if image_sq <= 0.0 {
        return Err(Error::domain("geometry", image_sq, "valid point pair"));
    }
    let c = 1.0 / ((nf - 2.0) * sphere_area(n));
    Ok(c * (dist.powf(2.0 - nf) - image_sq.powf((2.0 - nf) / 2.0)))
}

/// Fractional Green function of the ball for `alpha in (0, 2)`, as a
/// function of `|x|`, `|y|`, `|x-y|`.
pub fn green_fractional_ball(
    n: u32,
    alpha: f64,
    radius: f64,
    rx: f64,
    ry: f64,
    dist: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    for (name, v) in [("|x|", rx), ("|y|", ry)] {
        if !(v >= 0.0 && v < radius) {
            return Err(Error::domain(name, v, "inside the open ball"));
        }
    }
    if !(dist > 0.0) {
        return Err(Error::Singular("Green kernel evaluated on its pole".into()));
    }
    let r2 = radius * radius;
    let s0 = (r2 - rx * rx) * (r2 - ry * ry) / (r2 * dist * dist);
    let h = green_profile_integral(n, alpha, s0, spec)?;
    Ok(green_constant(n, alpha)? * dist.powf(alpha - n as f64) * h)
}

/// Exterior Poisson kernel of the ball (`|x| < R < |y|`), as a function of
/// `|x|`, `|y|`, `|x-y|`.
pub fn poisson_fractional_ball(
    n: u32,
    alpha: f64,
    radius: f64,
    rx: f64,
    ry: f64,
    dist: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain("alpha", alpha, "alpha in (0, 2)"));
    }
    if !(rx >= 0.0 && rx < radius && ry > radius) {
        return Err(Error::domain(
            "|x|,|y|",
            rx,
            "|x| < R < |y| for the exterior kernel",
        ));
    }
    let nf = n as f64;
    let c = gamma(nf / 2.0) * PI.powf(-nf / 2.0 - 1.0) * (PI * alpha / 2.0).sin();
    let ratio = (radius * radius - rx * rx) / (ry * ry - radius * radius);
    Ok(c * ratio.powf(alpha / 2.0) * dist.powf(-nf))
}

/// Total exterior mass `int_{|y| > R} P_alpha(x, y) dy`; equals 1 for every
/// interior `x` (the kernel is an exit distribution).
pub fn poisson_mass(
    n: u32,
    alpha: f64,
    radius: f64,
    rx: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(rx >= 0.0 && rx < radius) {
        return Err(Error::domain("|x|", rx, "strictly inside the ball"));
    }
    let nf = n as f64;
    let c = gamma(nf / 2.0) * PI.powf(-nf / 2.0 - 1.0) * (PI * alpha / 2.0).sin();
    let front = (radius * radius - rx * rx).powf(alpha / 2.0);
    // Shifted variable t = r - R keeps the boundary singularity at the
    // left endpoint 0, where the power substitution is exact; writing
    // r^2 - R^2 = t (2R + t) avoids reconstructing the small gap.
    let q = QuadratureSpec {
        hints: vec![
            SingularityHint::new(0.0, -alpha / 2.0),
            SingularityHint::at_infinity(1.0 + alpha),
        ],
        ..spec.clone()
    };
    let num = integrate(
        |t: f64| {
            let r = radius + t;
            let w = angular_weight(rx, r, nf, n, spec).unwrap_or(f64::NAN);
            r.powf(nf - 1.0) * (t * (2.0 * radius + t)).powf(-alpha / 2.0) * w
        },
        0.0,
        f64::INFINITY,
        &q,
    )?;
    Ok(c * front * num.value)
}

/// Checks the interior representation
/// `u(x) = int_B G_alpha(x,y) g(y) dy + int_{B^c} P_alpha(x,y) u(y) dy`
/// with `g = (-Delta)^{alpha/2} u` computed independently, at the given
/// interior radii.
pub fn verify_representation<U: RadialFunction + ?Sized>(
    u: &U,
    n: u32,
    alpha: f64,
    radius: f64,
    radii: &[f64],
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Check>> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain("alpha", alpha, "alpha in (0, 2)"));
    }
    let nf = n as f64;

    // g = (-Delta)^{alpha/2} u on a grid covering the ball, splined. The
    // tail model is irrelevant: g is only queried inside the ball.
    let g_nodes = RadialProfile::default_grid(radius, 64);
    let g_vals = fractional_laplacian_radial(u, alpha, n, &g_nodes, spec)?;
    let g_prof = RadialProfile::new(g_nodes, g_vals.values, TailModel::new(0.0, nf))?;

    let mut checks = Vec::with_capacity(radii.len());
    for &rho in radii {
        if !(rho >= 0.0 && rho < radius) {
            return Err(Error::domain("rho", rho, "inside the ball"));
        }

        // Interior Green term.
        let mut hints = vec![SingularityHint::new(radius, alpha / 2.0)];
        if alpha < 1.25 && rho > 0.0 {
            hints.push(SingularityHint::new(rho, (alpha - 1.0).min(-0.2)));
        }
        let q_green = QuadratureSpec {
            hints,
            ..spec.clone()
        };
        let green = integrate(
            |r: f64| {
                let shell = sphere_kernel_integral(
                    |d| {
                        green_fractional_ball(n, alpha, radius, rho, r, d, spec)
                            .unwrap_or(f64::NAN)
                    },
                    rho,
                    r,
                    n,
                    nf - alpha,
                    spec,
                )
                .unwrap_or(f64::NAN);
                g_prof.value(r) * r.powf(nf - 1.0) * shell
            },
            0.0,
            radius,
            &q_green,
        )?;

        // Exterior Poisson term, in the shifted variable t = r - R (see
        // poisson_mass for why).
        let tail = u.tail();
        let c = gamma(nf / 2.0) * PI.powf(-nf / 2.0 - 1.0) * (PI * alpha / 2.0).sin();
        let front = (radius * radius - rho * rho).powf(alpha / 2.0);
        let q_poisson = QuadratureSpec {
            hints: vec![
                SingularityHint::new(0.0, -alpha / 2.0),
                SingularityHint::at_infinity(1.0 + alpha + tail.kappa),
            ],
            ..spec.clone()
        };
        let poisson = integrate(
            |t: f64| {
                let r = radius + t;
                let w = angular_weight(rho, r, nf, n, spec).unwrap_or(f64::NAN);
                u.value(r) * r.powf(nf - 1.0) * (t * (2.0 * radius + t)).powf(-alpha / 2.0) * w
            },
            0.0,
            f64::INFINITY,
            &q_poisson,
        )?;

        let reproduced = green.value + c * front * poisson.value;
        checks.push(Check::against(
            format!("representation[n={n},alpha={alpha},R={radius},rho={rho}]"),
            reproduced,
            u.value(rho),
            tol,
        ));
    }
    Ok(checks)
}

// --- moving-spheres comparison kernels ------------------------------------------

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// The reflected distance entering both comparison kernels:
/// `q = | |y-x0| (x-x0)/lambda - lambda (y-x0)/|y-x0| |`, computed from the
/// symmetric quadratic form
/// `q^2 = |x-x0|^2 |y-x0|^2 / lambda^2 - 2 (x-x0).(y-x0) + lambda^2`.
pub fn reflected_distance(x: &[f64], y: &[f64], x0: &[f64], lambda: f64) -> f64 {
    let dx: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
    let dy: Vec<f64> = y.iter().zip(x0).map(|(a, b)| a - b).collect();
    let dot: f64 = dx.iter().zip(&dy).map(|(a, b)| a * b).sum();
    let q2 = norm(&dx).powi(2) * norm(&dy).powi(2) / (lambda * lambda) - 2.0 * dot
        + lambda * lambda;
    q2.max(0.0).sqrt()
}

/// Difference of the `(n-2s)`-kernel and its sphere-reflected image, with
/// the Riesz constant attached. Positive inside `B_lambda(x0)`, zero when
/// `x` sits on the sphere.
pub fn k1_kernel(
    n: u32,
    s: f64,
    lambda: f64,
    x0: &[f64],
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let nf = n as f64;
    if !(s > 0.0 && 2.0 * s < nf) {
        return Err(Error::domain("s", s, "0 < 2s < n"));
    }
    let c = crate::constants::riesz_constant(2.0 * s, n)?;
    let e = nf - 2.0 * s;
    let d = dist(x, y);
    if d == 0.0 {
        return Err(Error::Singular("kernel difference at x = y".into()));
    }
    let q = reflected_distance(x, y, x0, lambda);
    Ok(c * (d.powf(-e) - q.powf(-e)))
}

/// Same difference for the interaction exponent `sigma`, without a
/// normalizing constant.
pub fn k2_kernel(
    n: u32,
    sigma: f64,
    lambda: f64,
    x0: &[f64],
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    if !(sigma > 0.0 && sigma < n as f64) {
        return Err(Error::domain("sigma", sigma, "sigma in (0, n)"));
    }
    let d = dist(x, y);
    if d == 0.0 {
        return Err(Error::Singular("kernel difference at x = y".into()));
    }
    let q = reflected_distance(x, y, x0, lambda);
    Ok(d.powf(-sigma) - q.powf(-sigma))
}

/// Uniform point in the open ball `B_lambda(x0)` by rejection from the cube.
fn sample_in_ball(rng: &mut ChaCha8Rng, n: u32, x0: &[f64], lambda: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r < 0.999 && r > 1e-6 {
            return v
                .iter()
                .zip(x0)
                .map(|(a, b)| a * lambda + b)
                .collect();
        }
    }
}

/// Point on the sphere `partial B_lambda(x0)`.
fn sample_on_sphere(rng: &mut ChaCha8Rng, n: u32, x0: &[f64], lambda: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r < 1.0 && r > 1e-3 {
            return v
                .iter()
                .zip(x0)
                .map(|(a, b)| a / r * lambda + b)
                .collect();
        }
    }
}

/// Randomized structural checks of the comparison kernels: positivity of
/// both differences for interior pairs, vanishing on the sphere, and
/// symmetry under swapping the arguments.
pub fn kernel_checks(
    n: u32,
    s: f64,
    sigma: f64,
    lambda: f64,
    x0: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<Check>> {
    if x0.len() != n as usize {
        return Err(Error::domain("x0", x0.len() as f64, "length n"));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain("lambda", lambda, "positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_k1 = f64::INFINITY;
    let mut min_k2 = f64::INFINITY;
    let mut worst_sym = 0.0f64;
    let mut worst_boundary = 0.0f64;

    for _ in 0..samples {
        let x = sample_in_ball(&mut rng, n, x0, lambda);
        let y = sample_in_ball(&mut rng, n, x0, lambda);
        if dist(&x, &y) < 1e-9 * lambda {
            continue;
        }
        let k1 = k1_kernel(n, s, lambda, x0, &x, &y)?;
        let k2 = k2_kernel(n, sigma, lambda, x0, &x, &y)?;
        min_k1 = min_k1.min(k1);
        min_k2 = min_k2.min(k2);
        let k1_swapped = k1_kernel(n, s, lambda, x0, &y, &x)?;
        worst_sym = worst_sym.max((k1 - k1_swapped).abs() / k1.abs().max(1e-300));

        let xb = sample_on_sphere(&mut rng, n, x0, lambda);
        if dist(&xb, &y) > 1e-9 * lambda {
            let k1b = k1_kernel(n, s, lambda, x0, &xb, &y)?;
            let scale = dist(&xb, &y).powf(2.0 * s - n as f64);
            worst_boundary = worst_boundary.max(k1b.abs() / scale);
        }
    }

    Ok(vec![
        Check::at_least(
            format!("k1-positive[n={n},s={s},lambda={lambda}]"),
            min_k1,
            0.0,
            0.0,
        ),
        Check::at_least(
            format!("k2-positive[n={n},sigma={sigma},lambda={lambda}]"),
            min_k2,
            0.0,
            0.0,
        ),
        Check::against(
            format!("k1-symmetric[n={n},s={s}]"),
            worst_sym,
            0.0,
            1e-10,
        ),
        Check::against(
            format!("k1-boundary-zero[n={n},s={s}]"),
            worst_boundary,
            0.0,
            1e-9,
        ),
    ])
}
