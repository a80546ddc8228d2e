//! Sharp constants: Riesz normalizations, bubble integrals, Sobolev and
//! convolution-inequality constants, and the fractional Laplacian
//! normalization constant.
//!
//! All Gamma-ratio formulas here are exercised against independent
//! high-precision references in the tests; the quadrature-based
//! normalization constant is cross-checked against its own closed form.

use crate::error::{Error, Result};
use crate::gamma::{gamma, sphere_area};
use crate::params::ProblemParams;
use crate::quad::{integrate, QuadratureSpec, SingularityHint};
use std::f64::consts::PI;

/// Margin kept from Gamma poles / domain edges: inputs within this distance
/// of a pole are rejected rather than silently amplified.
const POLE_MARGIN: f64 = 1e-8;

/// Riesz kernel normalization `R_{gamma, n}`:
///
/// `(-Delta)^{-gamma/2} f = R_{gamma,n} |x|^{-(n-gamma)} * f`, with
///
/// `R_{gamma,n} = Gamma((n-gamma)/2) / (pi^{n/2} 2^gamma Gamma(gamma/2))`.
pub fn riesz_constant(gamma_exp: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    if !(gamma_exp > POLE_MARGIN && gamma_exp < nf - POLE_MARGIN) {
        return Err(Error::domain(
            "gamma",
            gamma_exp,
            "gamma in (0, n), away from the endpoints",
        ));
    }
    Ok(gamma((nf - gamma_exp) / 2.0)
        / (PI.powf(nf / 2.0) * 2f64.powf(gamma_exp) * gamma(gamma_exp / 2.0)))
}

/// The bubble convolution integral
///
/// `I(gamma) = int_{R^n} (1+|y|^2)^{-(n-gamma)} ... ` reduced to closed form:
/// `I(gamma) = pi^{n/2} Gamma((n - 2 gamma)/2) / Gamma(n - gamma)`,
/// valid for `0 < gamma < n/2`.
///
/// This is the constant in the algebraic identity
/// `|x|^{-(n-2gamma)} * (1+|x|^2)^{-(n-gamma)}`
/// `= R_{2gamma,n}^{-1} ... = I(gamma) (1+|x|^2)^{-gamma} / ...` —
/// concretely, the convolution of the kernel with the standard bubble
/// profile stays in the bubble family with constant `I(gamma)`.
pub fn bubble_integral(gamma_exp: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    if !(gamma_exp > POLE_MARGIN && gamma_exp < nf / 2.0 - POLE_MARGIN) {
        return Err(Error::domain(
            "gamma",
            gamma_exp,
            "gamma in (0, n/2), away from the endpoints",
        ));
    }
    Ok(PI.powf(nf / 2.0) * gamma((nf - 2.0 * gamma_exp) / 2.0) / gamma(nf - gamma_exp))
}

/// Amplitude `C` of the standard extremal bubble
/// `Q(x) = C (1 + |x|^2)^{-(n-2s)/2}` solving the critical integral
/// equation; requires exactly critical exponents.
///
/// `C = [ R_{2s,n} I(sigma/2) I((n-2s)/2) ]^{-(n-2s)/(2(n+2s-sigma))}`.
pub fn bubble_normalization(params: &ProblemParams) -> Result<f64> {
    let nf = params.n as f64;
    let s = params.s();
    if s >= nf / 2.0 - POLE_MARGIN {
        return Err(Error::domain("s", s, "s < n/2 for bubbles to decay"));
    }
    if !params.is_critical() {
        let (tau, mu) = params.scaling_exponents();
        return Err(Error::domain(
            "tau/mu",
            tau.abs().max(mu.abs()),
            "critical exponents (tau = mu = 0)",
        ));
    }
    let product = riesz_constant(2.0 * s, params.n)?
        * bubble_integral(params.sigma / 2.0, params.n)?
        * bubble_integral((nf - 2.0 * s) / 2.0, params.n)?;
    let exponent = -(nf - 2.0 * s) / (2.0 * (nf + 2.0 * s - params.sigma));
    Ok(product.powf(exponent))
}

/// Sharp Sobolev constant for the embedding `\dot H^s -> L^{2n/(n-2s)}`:
///
/// `S = (4 pi)^{-s/2} [Gamma(n)/Gamma(n/2)]^{s/n}`
/// `    sqrt(Gamma((n-2s)/2) / Gamma((n+2s)/2))`,
///
/// normalized so `||u||_{L^{2n/(n-2s)}} <= S ||(-Delta)^{s/2} u||_{L^2}`.
pub fn sobolev_constant(s: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    if !(s > POLE_MARGIN && s < nf / 2.0 - POLE_MARGIN) {
        return Err(Error::domain("s", s, "s in (0, n/2)"));
    }
    let ratio = gamma(nf) / gamma(nf / 2.0);
    Ok((1.0 / (2.0 * PI.sqrt())).powf(s)
        * ratio.powf(s / nf)
        * (gamma((nf - 2.0 * s) / 2.0) / gamma((nf + 2.0 * s) / 2.0)).sqrt())
}

/// Sharp constant of the convolution-energy inequality
///
/// `int (|x|^{-(n-sigma)} * u^{p_c}) u^{p_c} <= S^{2(2n-sigma)/(n-2s)}
///  ||(-Delta)^{s/2} u||^{...}` (equality at the bubble), assembled from
/// the Riesz constant, the bubble integrals, and the Sobolev constant:
///
/// `S = [R_{2s,n} I((n-2s)/2)]^{(n-2s)(n-sigma)/(4s(2n-sigma))}`
/// `    [I(sigma/2)]^{-(n-2s)/(2(2n-sigma))}`
/// `    S_{s,n}^{-n(n+2s-sigma)/(2s(2n-sigma))}` — see the energy tests for
/// the equivalent form `S = ||(-Delta)^{s/2} Q||^{(n+2s-sigma)/(2n-sigma)}`.
pub fn hls_constant(sigma: f64, s: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    if !(sigma > POLE_MARGIN && sigma < nf - POLE_MARGIN) {
        return Err(Error::domain("sigma", sigma, "sigma in (0, n)"));
    }
    if !(s > POLE_MARGIN && s < nf / 2.0 - POLE_MARGIN) {
        return Err(Error::domain("s", s, "s in (0, n/2)"));
    }
    let r = riesz_constant(2.0 * s, n)?;
    let i_half = bubble_integral((nf - 2.0 * s) / 2.0, n)?;
    let i_sigma = bubble_integral(sigma / 2.0, n)?;
    let sob = sobolev_constant(s, n)?;

    let e1 = (nf - 2.0 * s) * (nf - sigma) / (4.0 * s * (2.0 * nf - sigma));
    let e2 = -(nf - 2.0 * s) / (2.0 * (2.0 * nf - sigma));
    let e3 = -nf * (nf + 2.0 * s - sigma) / (2.0 * s * (2.0 * nf - sigma));
    Ok((r * i_half).powf(e1) * i_sigma.powf(e2) * sob.powf(e3))
}

/// Normalization constant of the fractional Laplacian in the convention
/// used throughout this crate,
///
/// `(-Delta)^{alpha/2} u(x) = C_{alpha,n} PV int (u(x) - u(y)) / |x-y|^{n+alpha} dy`,
/// `C_{alpha,n} = ( int (1 - cos(2 pi zeta_1)) / |zeta|^{n+alpha} dzeta )^{-1}`.
///
/// Note the `2 pi` inside the cosine: this convention makes the operator
/// `(2 pi)^{-alpha}` times the classical one, and every kernel constant in
/// this crate is calibrated to it.
///
/// Computed by quadrature (a Fubini split into a radial cross-section factor
/// and a 1-D oscillatory factor with an integration-by-parts tail). For
/// `alpha` within 0.05 of the degenerate endpoints {0, 2} the tolerances are
/// relaxed; the returned value is still accurate to ~1e-9 there.
pub fn frac_lap_normalization(alpha: f64, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("n", n as f64, "n >= 1"));
    }
    if !(alpha > POLE_MARGIN && alpha < 2.0 - POLE_MARGIN) {
        return Err(Error::domain("alpha", alpha, "alpha in (0, 2)"));
    }
    let nf = n as f64;
    let near_edge = alpha < 0.05 || alpha > 1.95;
    let spec = QuadratureSpec {
        rel_tol: if near_edge { 1e-9 } else { 1e-11 },
        abs_tol: 1e-16,
        max_depth: 48,
        hints: Vec::new(),
    };

    // Fubini over zeta = (zeta_1, zeta_perp), then polar in both factors:
    // J = B * K with
    //   B = |S^{n-2}| int_0^inf t^{n-2} (1 + t^2)^{-(n+alpha)/2} dt  (B = 1 if n = 1),
    //   K = 2 int_0^inf (1 - cos(2 pi z)) z^{-1-alpha} dz.
    let b = if n == 1 {
        1.0
    } else {
        let bspec = spec.with_hints(vec![SingularityHint::at_infinity(alpha + 2.0)]);
        let r = integrate(
            |t: f64| t.powf(nf - 2.0) * (1.0 + t * t).powf(-(nf + alpha) / 2.0),
            0.0,
            f64::INFINITY,
            &bspec,
        )?;
        if !r.converged {
            return Err(Error::NonConvergent {
                estimate: r.value,
                error: r.error,
            });
        }
        sphere_area(n - 1) * r.value
    };

    let two_pi = 2.0 * PI;
    let head_cut = 0.05f64; // 2 pi z < 1: Taylor series of 1 - cos converges fast
    let tail_cut = 40.0f64; // ~40 periods resolved numerically, tail via parts

    // Head by series: int_0^delta (1 - cos(2 pi z)) z^{-1-alpha} dz
    //   = sum_{j>=1} (-1)^{j+1} (2 pi)^{2j} delta^{2j-alpha} / ((2j)! (2j-alpha)),
    // which sidesteps the z^{1-alpha} endpoint entirely (uniform in alpha).
    let head = {
        let mut sum = 0.0;
        let mut coeff = 1.0; // (2 pi)^{2j} / (2j)! with alternating sign
        for j in 1..40u32 {
            let tj = 2.0 * j as f64;
            coeff *= -(two_pi * two_pi) / (tj * (tj - 1.0));
            let term = -coeff * head_cut.powf(tj - alpha) / (tj - alpha);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-30) {
                break;
            }
        }
        sum
    };

    let mid = integrate(
        |z: f64| {
            // 1 - cos via sin^2 to avoid cancellation for small z.
            let s = (PI * z).sin();
            2.0 * s * s * z.powf(-1.0 - alpha)
        },
        head_cut,
        tail_cut,
        &spec,
    )?;
    if !mid.converged {
        return Err(Error::NonConvergent {
            estimate: mid.value,
            error: mid.error,
        });
    }

    // Tail: int_T^inf z^{-1-alpha} dz = T^{-alpha}/alpha exactly, minus the
    // oscillatory part int_T^inf z^{-1-alpha} cos(2 pi z) dz expanded by
    // repeated integration by parts (4 terms; remainder < 1e-10 at T = 40).
    let tail_const = tail_cut.powf(-alpha) / alpha;
    let tail_cos = cos_tail_by_parts(tail_cut, alpha, two_pi);
    let k = 2.0 * (head + mid.value + tail_const - tail_cos);

    Ok(1.0 / (b * k))
}

/// Four-term integration-by-parts expansion of
/// `int_T^inf z^{-1-alpha} cos(b z) dz`.
fn cos_tail_by_parts(t: f64, alpha: f64, b: f64) -> f64 {
    let (s, c) = (b * t).sin_cos();
    let a1 = 1.0 + alpha;
    let a2 = 2.0 + alpha;
    let a3 = 3.0 + alpha;
    // Successive antiderivatives alternate sin/cos with growing powers.
    -t.powf(-1.0 - alpha) * s / b + (a1 / b) * (t.powf(-2.0 - alpha) * c / b)
        - (a1 * a2 / (b * b)) * (t.powf(-3.0 - alpha) * s / b)
        - (a1 * a2 * a3 / (b * b * b)) * (t.powf(-4.0 - alpha) * c / b)
}
