//! Riesz-type potentials of radial functions and the identities built on
//! them: the bubble convolution identity, kernel composition, Hartree
//! fields, and the energy identity for extremal profiles.
//!
//! The basic object is
//!
//! ```text
//! (P_sigma u)(x) = int_{R^n} |x - y|^{-sigma} u(|y|) dy,   0 < sigma < n,
//! ```
//!
//! reduced to a radial integral against the angular weight
//! `W(rho, r) = int_{S^{n-1}} |rho e - r omega|^{-sigma} d omega`. Off-grid
//! decay is handled analytically through the profile's tail model, so the
//! numeric window never has to chase slowly decaying integrands.

use crate::angular::{angular_weight, angular_weight_far_coeffs};
use crate::constants::{bubble_integral, bubble_normalization, hls_constant, riesz_constant};
use crate::error::{Error, Result};
use crate::gamma::{gamma, sphere_area};
use crate::params::ProblemParams;
use crate::profile::{AlgebraicBump, RadialFunction, RadialProfile, TailModel};
use crate::quad::{integrate, QuadratureSpec, SingularityHint};
use crate::report::Check;

/// Outcome of a single potential evaluation.
#[derive(Debug, Clone, Copy)]
pub struct PotentialResult {
    pub value: f64,
    /// Quadrature error plus tail-model contributions.
    pub error: f64,
    /// Share of the value supplied by the analytic tail extension; large
    /// fractions mean the answer leans on the tail model, not quadrature.
    pub tail_fraction: f64,
    pub converged: bool,
}

/// `int |x-y|^{-sigma} u(|y|) dy` at `|x| = rho`.
///
/// Requires `sigma in (0, n)` and a tail decaying strictly faster than
/// `r^{-(n - sigma)}` so the integral converges at infinity. Divergence at
/// the origin (e.g. a power-law profile evaluated at `rho = 0`) is reported
/// as an error rather than a large number.
pub fn riesz_potential<U: RadialFunction + ?Sized>(
    u: &U,
    sigma: f64,
    n: u32,
    rho: f64,
    spec: &QuadratureSpec,
) -> Result<PotentialResult> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "n >= 2"));
    }
    if !(sigma > 0.0 && sigma < n as f64) {
        return Err(Error::domain("sigma", sigma, "sigma in (0, n)"));
    }
    if !(rho >= 0.0) {
        return Err(Error::domain("rho", rho, "rho >= 0"));
    }
    let nf = n as f64;
    let tail = u.tail();
    let kappa = tail.kappa;
    if !(kappa > nf - sigma) {
        return Err(Error::Divergent(format!(
            "tail r^-{kappa} is not integrable against the r^-{sigma} kernel in dimension {n}"
        )));
    }
    let area = sphere_area(n);
    let r_far = (20.0 * rho).max(u.tail_start()).max(20.0);

    if rho == 0.0 {
        // W(0, r) = area * r^{-sigma}.
        let origin_exp = nf - 1.0 - sigma + u.origin_exponent();
        if origin_exp <= -1.0 {
            return Err(Error::Divergent(format!(
                "integrand ~ r^{origin_exp} near the origin"
            )));
        }
        let mut hints = Vec::new();
        if origin_exp < 0.0 {
            hints.push(SingularityHint::new(0.0, origin_exp));
        }
        let q = QuadratureSpec {
            hints,
            ..spec.clone()
        };
        let num = integrate(
            |r: f64| u.value(r) * r.powf(nf - 1.0 - sigma),
            0.0,
            r_far,
            &q,
        )?;
        let tail_int = tail.coefficient * r_far.powf(nf - sigma - kappa) / (kappa + sigma - nf);
        let value = area * (num.value + tail_int);
        let err = area * (num.error + 1e-6 * tail_int.abs());
        return Ok(PotentialResult {
            value,
            error: err,
            tail_fraction: (area * tail_int / value).abs(),
            converged: num.converged,
        });
    }

    // rho > 0: radial integral of u(r) r^{n-1} W(rho, r).
    let mut hints = Vec::new();
    let origin_exp = nf - 1.0 + u.origin_exponent();
    if origin_exp <= -1.0 {
        return Err(Error::Divergent(format!(
            "integrand ~ r^{origin_exp} near the origin"
        )));
    }
    if origin_exp < 0.0 {
        hints.push(SingularityHint::new(0.0, origin_exp));
    }
    // The angular weight blows up like |r - rho|^{n-1-sigma} on the
    // diagonal once sigma >= n-1 (log at equality); a hint there keeps the
    // quadrature off the exact diagonal and restores fast convergence for
    // nearby weak singularities too.
    let diag_exp = nf - 1.0 - sigma;
    if diag_exp < 0.25 && rho < r_far {
        hints.push(SingularityHint::new(rho, diag_exp.min(-0.2)));
    }
    let q = QuadratureSpec {
        hints,
        ..spec.clone()
    };
    let num = integrate(
        |r: f64| {
            let w = angular_weight(rho, r, sigma, n, spec).unwrap_or(f64::NAN);
            u.value(r) * r.powf(nf - 1.0) * w
        },
        0.0,
        r_far,
        &q,
    )?;

    // Analytic tail: W(rho, r) = area r^{-sigma} (1 + c2 (rho/r)^2 + ...).
    let (c2, c4) = angular_weight_far_coeffs(sigma, n);
    let a = tail.coefficient;
    let base = nf - sigma - kappa;
    let t0 = a * r_far.powf(base) / (kappa + sigma - nf);
    let t2 = a * c2 * rho * rho * r_far.powf(base - 2.0) / (kappa + sigma - nf + 2.0);
    let t4 = a * c4 * rho.powi(4) * r_far.powf(base - 4.0) / (kappa + sigma - nf + 4.0);
    let tail_int = t0 + t2 + t4;
    let tail_err = t4.abs() * (rho / r_far) * (rho / r_far) + 1e-6 * t0.abs();

    let value = area * tail_int + num.value;
    Ok(PotentialResult {
        value,
        error: num.error + area * tail_err,
        tail_fraction: (area * tail_int / value).abs(),
        converged: num.converged,
    })
}

/// `int |x-z|^{-a} |z|^{-b} dz = two_kernel_constant(a,b,n) |x|^{n-a-b}`
/// for `a, b, a+b-n` all in `(0, n)`.
pub fn two_kernel_constant(a: f64, b: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    for (name, v) in [("a", a), ("b", b), ("a+b-n", a + b - nf)] {
        if !(v > 0.0 && v < nf) {
            return Err(Error::domain(name, v, "in (0, n)"));
        }
    }
    Ok(std::f64::consts::PI.powf(nf / 2.0)
        * gamma((nf - a) / 2.0)
        * gamma((nf - b) / 2.0)
        * gamma((a + b - nf) / 2.0)
        / (gamma(a / 2.0) * gamma(b / 2.0) * gamma(nf - (a + b) / 2.0)))
}

// --- identity checks -----------------------------------------------------------

/// Verifies `int |x-y|^{-2 gamma} (1+|y|^2)^{-(n-gamma)} dy
///            = I(gamma) (1+|x|^2)^{-gamma}`
/// at the given radii, where `I` is the closed-form bubble integral.
pub fn verify_convolution_identity(
    n: u32,
    gamma_exp: f64,
    radii: &[f64],
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Check>> {
    let i_exact = bubble_integral(gamma_exp, n)?;
    let u = AlgebraicBump::new(1.0, 1.0, n as f64 - gamma_exp);
    let sigma = 2.0 * gamma_exp;
    let mut checks = Vec::with_capacity(radii.len());
    for &rho in radii {
        let got = riesz_potential(&u, sigma, n, rho, spec)?;
        let expect = i_exact * (1.0 + rho * rho).powf(-gamma_exp);
        checks.push(Check::against(
            format!("convolution[n={n},gamma={gamma_exp},rho={rho}]"),
            got.value,
            expect,
            tol,
        ));
    }
    Ok(checks)
}

/// Power-law profile `r^{-e}` with everything the potential integrator
/// needs spelled out exactly.
pub struct PurePower {
    pub exponent: f64,
}

impl RadialFunction for PurePower {
    fn value(&self, r: f64) -> f64 {
        r.powf(-self.exponent)
    }
    fn tail(&self) -> TailModel {
        TailModel::new(1.0, self.exponent)
    }
    fn tail_start(&self) -> f64 {
        1.0
    }
    fn origin_exponent(&self) -> f64 {
        -self.exponent
    }
}

/// Verifies the composition law of Riesz kernels,
/// `int |x-y|^{-(n-a1)} |y|^{-(n-a2)} dy
///    = (R_{a1+a2} / (R_{a1} R_{a2})) |x|^{-(n-a1-a2)}`,
/// by numeric convolution at the given radii.
pub fn verify_composition(
    n: u32,
    alpha1: f64,
    alpha2: f64,
    radii: &[f64],
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Check>> {
    let nf = n as f64;
    if !(alpha1 + alpha2 < nf) {
        return Err(Error::domain(
            "alpha1+alpha2",
            alpha1 + alpha2,
            "below n for a composable pair",
        ));
    }
    let constant = riesz_constant(alpha1 + alpha2, n)?
        / (riesz_constant(alpha1, n)? * riesz_constant(alpha2, n)?);
    let u = PurePower {
        exponent: nf - alpha2,
    };
    let mut checks = Vec::with_capacity(radii.len());
    for &rho in radii {
        if rho <= 0.0 {
            return Err(Error::domain("rho", rho, "positive (kernel pole at 0)"));
        }
        let got = riesz_potential(&u, nf - alpha1, n, rho, spec)?;
        let expect = constant * rho.powf(alpha1 + alpha2 - nf);
        checks.push(Check::against(
            format!("composition[n={n},a1={alpha1},a2={alpha2},rho={rho}]"),
            got.value,
            expect,
            tol,
        ));
    }
    Ok(checks)
}

// --- Hartree field -------------------------------------------------------------

/// The nonlocal factor `V(x) = int |x-y|^{-sigma} u(|y|)^p dy`, sampled on
/// a radial grid with an exact algebraic tail.
#[derive(Debug)]
pub struct HartreeField {
    pub profile: RadialProfile,
    /// Worst per-node quadrature error.
    pub error: f64,
}

impl RadialFunction for HartreeField {
    fn value(&self, r: f64) -> f64 {
        self.profile.value(r)
    }
    fn tail(&self) -> TailModel {
        self.profile.tail()
    }
    fn tail_start(&self) -> f64 {
        self.profile.tail_start()
    }
}

/// `u^p` viewed as a radial function (tails and origin exponents scale by
/// `p`).
struct PoweredProfile<'a, U: RadialFunction + ?Sized> {
    u: &'a U,
    p: f64,
}

impl<U: RadialFunction + ?Sized> RadialFunction for PoweredProfile<'_, U> {
    fn value(&self, r: f64) -> f64 {
        self.u.value(r).powf(self.p)
    }
    fn tail(&self) -> TailModel {
        let t = self.u.tail();
        TailModel::new(t.coefficient.powf(self.p), t.kappa * self.p)
    }
    fn tail_start(&self) -> f64 {
        self.u.tail_start()
    }
    fn origin_exponent(&self) -> f64 {
        self.u.origin_exponent() * self.p
    }
}

/// Computes the Hartree field of `u^p` under the `|x|^{-sigma}` kernel.
///
/// The far tail of `V` is attached analytically: when `u^p` has finite
/// mass (`p kappa > n`) the field decays like `M r^{-sigma}` with `M` the
/// total mass; otherwise like `r^{-(sigma + p kappa - n)}` with the
/// two-kernel composition constant. The borderline `p kappa = n` is
/// rejected.
pub fn hartree_field<U: RadialFunction + ?Sized>(
    u: &U,
    p: f64,
    sigma: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<HartreeField> {
    if !(p > 0.0) {
        return Err(Error::domain("p", p, "positive"));
    }
    let nf = n as f64;
    let powered = PoweredProfile { u, p };
    let pk = powered.tail().kappa;
    if (pk - nf).abs() < 1e-9 {
        return Err(Error::Divergent(
            "p*kappa = n: logarithmic mass growth has no algebraic tail model".into(),
        ));
    }

    let r_max = (2.0 * u.tail_start()).max(100.0);
    let nodes = RadialProfile::default_grid(r_max, 192);
    let mut values = Vec::with_capacity(nodes.len());
    let mut worst = 0.0f64;
    for &rho in &nodes {
        let res = riesz_potential(&powered, sigma, n, rho, spec)?;
        values.push(res.value);
        worst = worst.max(res.error);
    }

    let tail = if pk > nf {
        // Finite mass: V ~ (total mass of u^p) r^{-sigma}.
        let mass_num = integrate(
            |r: f64| powered.value(r) * r.powf(nf - 1.0),
            0.0,
            r_max,
            spec,
        )?;
        let a = powered.tail().coefficient;
        let mass =
            sphere_area(n) * (mass_num.value + a * r_max.powf(nf - pk) / (pk - nf));
        TailModel::new(mass, sigma)
    } else {
        let a = powered.tail().coefficient;
        TailModel::new(a * two_kernel_constant(sigma, pk, n)?, sigma + pk - nf)
    };

    Ok(HartreeField {
        profile: RadialProfile::new(nodes, values, tail)?,
        error: worst,
    })
}

/// The full Hartree nonlinearity `(|x|^{-sigma} * u^p)(x) u(x)^q` as a
/// radial profile.
///
/// The tail multiplies the field's decay with `q` copies of `u`'s:
/// coefficient `A_V A_u^q`, exponent `kappa_V + q kappa_u`, where
/// `kappa_V` is `sigma` when `u^p` has finite mass and
/// `sigma + p kappa_u - n` otherwise.
pub fn hartree_apply<U: RadialFunction + ?Sized>(
    u: &U,
    params: &ProblemParams,
    spec: &QuadratureSpec,
) -> Result<RadialProfile> {
    if !(params.q > 0.0) {
        return Err(Error::domain("q", params.q, "positive"));
    }
    let field = hartree_field(u, params.p, params.sigma, params.n, spec)?;
    let tu = u.tail();
    let tv = field.tail();
    let tail = TailModel::new(
        tv.coefficient * tu.coefficient.powf(params.q),
        tv.kappa + params.q * tu.kappa,
    );
    let values = field
        .profile
        .nodes()
        .iter()
        .map(|&r| field.value(r) * u.value(r).powf(params.q))
        .collect();
    RadialProfile::new(field.profile.nodes().to_vec(), values, tail)
}

/// Scale-invariant convolution norm
///
/// ```text
/// ||u|| = ( int (|x|^{-sigma} * |u|^t) |u|^t dx )^{(n-2s)/(2(2n-sigma))},
/// t = (2n - sigma)/(n - 2s),
/// ```
///
/// the natural norm for the critical problem: replacing `u` by
/// `mu^{(n-2s)/2} u(mu x)` leaves it unchanged.
pub fn hartree_norm<U: RadialFunction + ?Sized>(
    u: &U,
    sigma: f64,
    s: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let nf = n as f64;
    if !(s > 0.0 && 2.0 * s < nf) {
        return Err(Error::domain("s", s, "0 < 2s < n"));
    }
    if !(sigma > 0.0 && sigma < nf) {
        return Err(Error::domain("sigma", sigma, "in (0, n)"));
    }
    let t = (2.0 * nf - sigma) / (nf - 2.0 * s);
    let raw = interaction_energy(u, t, t - 1.0, sigma, n, spec)?;
    Ok(raw.powf((nf - 2.0 * s) / (2.0 * (2.0 * nf - sigma))))
}

// --- energies ------------------------------------------------------------------

/// `int_{R^n} |grad u|^2 dx` for a profile with an analytic derivative
/// (the `s = 1` Dirichlet energy).
pub fn dirichlet_energy(u: &AlgebraicBump, n: u32, spec: &QuadratureSpec) -> Result<f64> {
    let nf = n as f64;
    let t = u.tail();
    let kappa = t.kappa;
    if !(2.0 * kappa + 2.0 > nf) {
        return Err(Error::Divergent(format!(
            "gradient tail r^-{} not square integrable",
            kappa + 1.0
        )));
    }
    let r_far = u.tail_start();
    let num = integrate(
        |r: f64| {
            let d = u.derivative(r);
            d * d * r.powf(nf - 1.0)
        },
        0.0,
        r_far,
        spec,
    )?;
    // |u'| ~ kappa A r^{-kappa-1} in the tail.
    let a = kappa * t.coefficient;
    let tail = a * a * r_far.powf(nf - 2.0 - 2.0 * kappa) / (2.0 * kappa + 2.0 - nf);
    Ok(sphere_area(n) * (num.value + tail))
}

/// Interaction energy `E = int (|x|^{-sigma} * u^p) u^{q+1} dx`.
pub fn interaction_energy<U: RadialFunction + ?Sized>(
    u: &U,
    p: f64,
    q: f64,
    sigma: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let nf = n as f64;
    let field = hartree_field(u, p, sigma, n, spec)?;
    let weight = PoweredProfile { u, p: q + 1.0 };
    let r_far = field.tail_start().max(weight.tail_start());
    let num = integrate(
        |r: f64| field.value(r) * weight.value(r) * r.powf(nf - 1.0),
        0.0,
        r_far,
        spec,
    )?;
    // Tail: V ~ A_V r^{-k_V}, u^{q+1} ~ A_w r^{-k_w}.
    let tv = field.tail();
    let tw = weight.tail();
    let decay = tv.kappa + tw.kappa - nf;
    if !(decay > 0.0) {
        return Err(Error::Divergent("interaction energy tail".into()));
    }
    let tail = tv.coefficient * tw.coefficient * r_far.powf(-decay) / decay;
    Ok(sphere_area(n) * (num.value + tail))
}

/// For the `s = 1` critical problem, checks that the Dirichlet energy of
/// the normalized extremal equals its interaction energy, and that the
/// induced best constant matches the closed-form sharp constant.
pub fn verify_energy_identity(
    params: &ProblemParams,
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Check>> {
    if params.m != 0 || params.alpha != 2.0 {
        return Err(Error::domain(
            "s",
            params.s(),
            "s = 1 (m = 0, alpha = 2) for the Dirichlet form",
        ));
    }
    if !params.is_critical() {
        return Err(Error::Domain {
            name: "p,q",
            value: params.p,
            requirement: "critical exponent pair",
        });
    }
    let n = params.n;
    let nf = n as f64;
    let s = params.s();
    let sigma = params.sigma;
    let c = bubble_normalization(params)?;
    let q_prof = AlgebraicBump::new(c, 1.0, (nf - 2.0 * s) / 2.0);

    let lhs = dirichlet_energy(&q_prof, n, spec)?;
    let rhs = interaction_energy(&q_prof, params.p, params.q, sigma, n, spec)?;

    let mut checks = vec![Check::against(
        format!("energy-identity[n={n},s={s},sigma={sigma}]"),
        lhs,
        rhs,
        tol,
    )];

    // Best constant from the energy vs the closed form.
    let exponent = (nf + 2.0 * s - sigma) / (2.0 * (2.0 * nf - sigma));
    let s_from_energy = lhs.powf(exponent);
    let s_sharp = hls_constant(sigma, s, n)?;
    checks.push(Check::against(
        format!("best-constant[n={n},s={s},sigma={sigma}]"),
        s_from_energy,
        s_sharp,
        tol,
    ));
    Ok(checks)
}
