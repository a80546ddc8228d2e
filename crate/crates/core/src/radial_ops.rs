//! Radial differential operators: the Laplacian, its inverse, the
//! fractional Laplacian, and iterated superharmonicity chains.
//!
//! The fractional Laplacian of a radial function is evaluated through the
//! second-difference form
//!
//! ```text
//! (-Delta)^{alpha/2} u(rho)
//!   = -C_{alpha,n} |S^{n-1}| int_0^inf t^{-1-alpha} (M_u(rho,t) - u(rho)) dt,
//! ```
//!
//! where `M_u(rho, t)` is the spherical mean of `u` over the sphere of
//! radius `t` centred at radius `rho`. The integral is split three ways:
//! a small-`t` head handled by the Pizzetti expansion
//! `M_u - u = Delta u t^2/(2n) + Delta^2 u t^4/(8n(n+2)) + O(t^6)`,
//! an adaptive midsection, and an analytic far tail driven by the profile's
//! algebraic tail model.

use crate::angular::{angular_weight_far_coeffs, sphere_kernel_integral};
use crate::constants::frac_lap_normalization;
use crate::error::{Error, Result};
use crate::gamma::sphere_area;
use crate::params::ProblemParams;
use crate::profile::{RadialFunction, RadialProfile, TailModel};
use crate::quad::{integrate, QuadratureSpec};

// --- finite differences ------------------------------------------------------

/// Step scale for Richardson-extrapolated central differences. Relative to
/// `1 + r` so truncation error tracks the decay of the differentiated
/// function.
const FD_STEP: f64 = 0.02;

fn even_eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> f64 {
    f(x.abs())
}

/// Second derivative of the even extension by four-level Richardson
/// extrapolation (O(h^8) truncation). Returns (value, noise estimate);
/// the estimate combines the last extrapolation step -- which bounds the
/// error of the *previous* level -- with the roundoff floor of the finest
/// difference, so it is conservative for the returned value.
fn d2_richardson<F: Fn(f64) -> f64>(f: &F, r: f64, h: f64) -> (f64, f64) {
    let d2 = |h: f64| {
        (even_eval(f, r + h) - 2.0 * even_eval(f, r) + even_eval(f, r - h)) / (h * h)
    };
    let a: Vec<f64> = (0..4).map(|j| d2(h / (1 << j) as f64)).collect();
    let b: Vec<f64> = (0..3).map(|j| (4.0 * a[j + 1] - a[j]) / 3.0).collect();
    let c: Vec<f64> = (0..2).map(|j| (16.0 * b[j + 1] - b[j]) / 15.0).collect();
    let d = (64.0 * c[1] - c[0]) / 63.0;
    let roundoff = 1000.0 * f64::EPSILON * even_eval(f, r).abs() / (h * h);
    (d, (d - c[1]).abs() + roundoff)
}

/// First derivative, same scheme.
fn d1_richardson<F: Fn(f64) -> f64>(f: &F, r: f64, h: f64) -> (f64, f64) {
    let d1 = |h: f64| (even_eval(f, r + h) - even_eval(f, r - h)) / (2.0 * h);
    let a: Vec<f64> = (0..4).map(|j| d1(h / (1 << j) as f64)).collect();
    let b: Vec<f64> = (0..3).map(|j| (4.0 * a[j + 1] - a[j]) / 3.0).collect();
    let c: Vec<f64> = (0..2).map(|j| (16.0 * b[j + 1] - b[j]) / 15.0).collect();
    let d = (64.0 * c[1] - c[0]) / 63.0;
    let roundoff = 100.0 * f64::EPSILON * even_eval(f, r).abs() / h;
    (d, (d - c[1]).abs() + roundoff)
}

/// Radial Laplacian `u'' + (n-1) u'/r` of an even profile, by Richardson
/// finite differences on the function values. Returns (value, noise).
///
/// At (or within 1e-4 of) the origin the smooth-even form `n u''(0)` is
/// used instead of dividing by `r`.
pub fn laplacian_at<F: Fn(f64) -> f64>(f: &F, r: f64, n: u32) -> (f64, f64) {
    let nf = n as f64;
    if r < 1e-4 {
        let (d2, e2) = d2_richardson(f, 0.0, FD_STEP);
        return (nf * d2, nf * e2);
    }
    let h = (FD_STEP * (1.0 + r)).min(0.45 * r);
    let (d2, e2) = d2_richardson(f, r, h);
    let (d1, e1) = d1_richardson(f, r, h);
    (
        d2 + (nf - 1.0) * d1 / r,
        e2 + (nf - 1.0) * e1 / r,
    )
}

/// Radial bilaplacian via the 1-D form
/// `u'''' + 2(n-1) u'''/r + (n-1)(n-3) u''/r^2 - (n-1)(n-3) u'/r^3`
/// (smooth-even `n(n+2) u''''(0)/3` at the origin). One Richardson level;
/// this only feeds the small-`t` head of the fractional Laplacian where a
/// few digits suffice.
pub fn bilaplacian_at<F: Fn(f64) -> f64>(f: &F, r: f64, n: u32) -> (f64, f64) {
    let nf = n as f64;
    let d4 = |r: f64, h: f64| {
        (even_eval(f, r - 2.0 * h) - 4.0 * even_eval(f, r - h) + 6.0 * even_eval(f, r)
            - 4.0 * even_eval(f, r + h)
            + even_eval(f, r + 2.0 * h))
            / h.powi(4)
    };
    let d3 = |r: f64, h: f64| {
        (-even_eval(f, r - 2.0 * h) + 2.0 * even_eval(f, r - h) - 2.0 * even_eval(f, r + h)
            + even_eval(f, r + 2.0 * h))
            / (2.0 * h * h * h)
    };
    let rich = |g: &dyn Fn(f64, f64) -> f64, r: f64, h: f64, order: i32| {
        let a1 = g(r, h);
        let a2 = g(r, h / 2.0);
        let v = (4.0 * a2 - a1) / 3.0;
        let noise = (v - a2).abs() + 50.0 * f64::EPSILON * even_eval(f, r).abs() / h.powi(order);
        (v, noise)
    };

    if r < 1e-3 {
        let (v4, e4) = rich(&|r, h| d4(r, h), 0.0, 2.5 * FD_STEP, 4);
        return (nf * (nf + 2.0) * v4 / 3.0, nf * (nf + 2.0) * e4 / 3.0);
    }
    let h = (2.5 * FD_STEP * (1.0 + r)).min(0.2 * r);
    let (v4, e4) = rich(&|r, h| d4(r, h), r, h, 4);
    let (v3, e3) = rich(&|r, h| d3(r, h), r, h, 3);
    let (v2, e2) = d2_richardson(f, r, h);
    let (v1, e1) = d1_richardson(f, r, h);
    let c3 = 2.0 * (nf - 1.0) / r;
    let c2 = (nf - 1.0) * (nf - 3.0) / (r * r);
    let c1 = (nf - 1.0) * (nf - 3.0) / (r * r * r);
    (
        v4 + c3 * v3 + c2 * v2 - c1 * v1,
        e4 + c3 * e3 + c2.abs() * e2 + c1.abs() * e1,
    )
}

// --- grid operators ----------------------------------------------------------

/// Result of a grid-to-grid operator: the output profile plus per-node
/// error estimates.
#[derive(Debug, Clone)]
pub struct OperatorResult {
    pub profile: RadialProfile,
    pub errors: Vec<f64>,
}

/// Radial Laplacian of a sampled profile, evaluated at its own nodes from
/// the spline. Error estimates compare the spline derivatives against
/// independent divided differences in the grid data.
///
/// Output tail: `Delta(A r^{-k}) = k(k+2-n) A r^{-k-2}`.
pub fn radial_laplacian(u: &RadialProfile, n: u32) -> Result<OperatorResult> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "n >= 2"));
    }
    let nodes = u.nodes();
    if nodes.len() < 5 {
        return Err(Error::Profile(
            "radial Laplacian needs at least 5 nodes".into(),
        ));
    }
    let nf = n as f64;
    let mut values = Vec::with_capacity(nodes.len());
    let mut errors = vec![0.0; nodes.len()];

    for (i, &r) in nodes.iter().enumerate() {
        let lap = if i == 0 {
            nf * u.second_derivative(0.0)
        } else {
            u.second_derivative(r) + (nf - 1.0) * u.derivative(r) / r
        };
        values.push(lap);
    }

    // Independent check: centred divided differences on the raw grid data.
    let y = u.values();
    for i in 1..nodes.len() - 1 {
        let hm = nodes[i] - nodes[i - 1];
        let hp = nodes[i + 1] - nodes[i];
        let fd2 = 2.0
            * (hm * y[i + 1] - (hm + hp) * y[i] + hp * y[i - 1])
            / (hm * hp * (hm + hp));
        let fd1 = (y[i + 1] - y[i - 1]) / (hm + hp);
        let fd_lap = fd2 + (nf - 1.0) * fd1 / nodes[i];
        errors[i] = (values[i] - fd_lap).abs();
    }
    errors[0] = errors[1];
    let last = nodes.len() - 1;
    errors[last] = errors[last - 1];

    let t = u.tail_model();
    let out_tail = TailModel::new(
        t.kappa * (t.kappa + 2.0 - nf) * t.coefficient,
        t.kappa + 2.0,
    );
    Ok(OperatorResult {
        profile: RadialProfile::new(nodes.to_vec(), values, out_tail)?,
        errors,
    })
}

/// Solves `-Delta w = g` for a radial `w` on the grid of `g`:
///
/// `w(rho) = w(0) - int_0^rho t^{1-n} F(t) dt`, `F(t) = int_0^t g s^{n-1} ds`.
///
/// `w0 = Some(c)` pins `w(0) = c`; `None` picks the normalization that
/// decays at infinity, `w(0) = int_0^inf t^{1-n} F(t) dt` (requires the
/// tail of `g` to decay faster than `r^{-2}`).
pub fn inverse_laplacian_radial(
    g: &RadialProfile,
    n: u32,
    w0: Option<f64>,
) -> Result<OperatorResult> {
    if n < 3 {
        return Err(Error::domain("n", n as f64, "n >= 3 for a decaying inverse"));
    }
    let nf = n as f64;
    let nodes = g.nodes().to_vec();
    if nodes.len() < 5 {
        return Err(Error::Profile("inverse Laplacian needs >= 5 nodes".into()));
    }
    let tight = QuadratureSpec {
        rel_tol: 1e-11,
        abs_tol: 1e-18,
        max_depth: 30,
        hints: Vec::new(),
    };

    // F at the nodes (cumulative mass integral of g).
    let mut f_nodes = vec![0.0; nodes.len()];
    let mut f_err = vec![0.0; nodes.len()];
    for i in 1..nodes.len() {
        let r = integrate(
            |t: f64| g.value(t) * t.powf(nf - 1.0),
            nodes[i - 1],
            nodes[i],
            &tight,
        )?;
        f_nodes[i] = f_nodes[i - 1] + r.value;
        f_err[i] = f_err[i - 1] + r.error;
    }

    // Cumulative descent integral D(rho) = int_0^rho t^{1-n} F(t) dt, with F
    // reconstructed inside each interval from its left node value.
    let mut d_nodes = vec![0.0; nodes.len()];
    let mut d_err = vec![0.0; nodes.len()];
    for i in 1..nodes.len() {
        let (a, b) = (nodes[i - 1], nodes[i]);
        let f_a = f_nodes[i - 1];
        let r = integrate(
            |t: f64| {
                let df = integrate(|s: f64| g.value(s) * s.powf(nf - 1.0), a, t, &tight)
                    .map(|x| x.value)
                    .unwrap_or(f64::NAN);
                (f_a + df) * t.powf(1.0 - nf)
            },
            a,
            b,
            &tight,
        )?;
        d_nodes[i] = d_nodes[i - 1] + r.value;
        d_err[i] = d_err[i - 1] + r.error + f_err[i - 1] * 0.5 * (b - a) * (a.max(1e-300)).powf(1.0 - nf);
    }

    let kappa_g = g.tail_model().kappa;
    let a_g = g.tail_model().coefficient;
    let r_edge = *nodes.last().unwrap();
    let f_edge = *f_nodes.last().unwrap();

    let w_origin = match w0 {
        Some(c) => c,
        None => {
            if kappa_g <= 2.0 + 1e-9 {
                return Err(Error::Divergent(format!(
                    "source tail r^-{kappa_g} too fat for a decaying inverse"
                )));
            }
            // D(inf) = D(r_edge) + int_{r_edge}^inf t^{1-n} F~(t) dt with
            // F~(t) = F(r_edge) + A (t^{n-kappa} - r_edge^{n-kappa})/(n-kappa).
            let tail = if (kappa_g - nf).abs() < 1e-9 {
                // borderline: F grows logarithmically; integrate numerically
                let spec = QuadratureSpec::default();
                integrate(
                    |t: f64| {
                        (f_edge + a_g * (t / r_edge).ln()) * t.powf(1.0 - nf)
                    },
                    r_edge,
                    f64::INFINITY,
                    &spec,
                )?
                .value
            } else {
                let c = a_g / (nf - kappa_g);
                let f_const = f_edge - c * r_edge.powf(nf - kappa_g);
                f_const * r_edge.powf(2.0 - nf) / (nf - 2.0)
                    + c * r_edge.powf(2.0 - kappa_g) / (kappa_g - 2.0)
            };
            *d_nodes.last().unwrap() + tail
        }
    };

    let values: Vec<f64> = d_nodes.iter().map(|d| w_origin - d).collect();

    // Leading tail of w: Newtonian r^{2-n} from the total mass plus the
    // direct r^{2-kappa_g} contribution of the source tail; keep whichever
    // decays slower. When w does not tend to zero the tail degenerates to a
    // constant model.
    let w_edge = *values.last().unwrap();
    let out_tail = if w0.is_none() || w_edge.abs() < 1e-12 {
        if nf - 2.0 <= kappa_g - 2.0 {
            TailModel::through(r_edge, w_edge, nf - 2.0)
        } else {
            TailModel::through(r_edge, w_edge, kappa_g - 2.0)
        }
    } else {
        TailModel::new(w_edge, 0.0)
    };

    Ok(OperatorResult {
        profile: RadialProfile::new(nodes, values, out_tail)?,
        errors: d_err,
    })
}

// --- fractional Laplacian ----------------------------------------------------

/// Pointwise operator values with per-point error estimates.
#[derive(Debug, Clone)]
pub struct OperatorValues {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Combined estimate: quadrature error + expansion truncations + FD noise.
    pub errors: Vec<f64>,
    /// Per-point quadrature convergence.
    pub converged: Vec<bool>,
}

impl OperatorValues {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}

/// `(-Delta)^{alpha/2} u` at the given radii for a radial `u`.
///
/// `alpha = 2` falls back to the classical `-Delta` via finite differences,
/// so order bookkeeping (`s = m + alpha/2`, `alpha in (0, 2]`) works
/// uniformly. Requires a decaying profile (`tail kappa > 0`).
pub fn fractional_laplacian_radial<U: RadialFunction + ?Sized>(
    u: &U,
    alpha: f64,
    n: u32,
    radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<OperatorValues> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "n >= 2"));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain("alpha", alpha, "alpha in (0, 2]"));
    }
    if radii.iter().any(|&r| !(r >= 0.0)) {
        return Err(Error::domain("rho", f64::NAN, "radii >= 0"));
    }

    if alpha == 2.0 {
        let f = |r: f64| u.value(r);
        let mut values = Vec::with_capacity(radii.len());
        let mut errors = Vec::with_capacity(radii.len());
        for &rho in radii {
            let (lap, noise) = laplacian_at(&f, rho, n);
            values.push(-lap);
            errors.push(noise);
        }
        return Ok(OperatorValues {
            radii: radii.to_vec(),
            values,
            errors,
            converged: vec![true; radii.len()],
        });
    }

    let tail = u.tail();
    if !(tail.kappa > 0.0) {
        return Err(Error::domain(
            "tail.kappa",
            tail.kappa,
            "decaying profile (kappa > 0)",
        ));
    }

    let c_norm = frac_lap_normalization(alpha, n)?;
    let area = sphere_area(n);
    let (far_c2, far_c4) = angular_weight_far_coeffs(tail.kappa, n);
    let f = |r: f64| u.value(r);

    let mut values = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    let mut converged = Vec::with_capacity(radii.len());

    for &rho in radii {
        let u_rho = u.value(rho);
        let t0 = 0.01 * (1.0 + rho);
        let t_far = (100.0 * (1.0 + rho)).max(1.5 * u.tail_start());

        // Head: Pizzetti expansion of the spherical mean.
        let (lap, lap_noise) = laplacian_at(&f, rho, n);
        let (bilap, bilap_noise) = bilaplacian_at(&f, rho, n);
        let nf = n as f64;
        let head = lap / (2.0 * nf) * t0.powf(2.0 - alpha) / (2.0 - alpha)
            + bilap / (8.0 * nf * (nf + 2.0)) * t0.powf(4.0 - alpha) / (4.0 - alpha);
        // Truncation ~ next (t^6) term; estimated from the t^4 term's size.
        let head_err = lap_noise / (2.0 * nf) * t0.powf(2.0 - alpha) / (2.0 - alpha)
            + (bilap.abs() + bilap_noise) / (8.0 * nf * (nf + 2.0)) * t0.powf(4.0 - alpha)
                / (4.0 - alpha)
                * t0
                * t0
            + bilap_noise / (8.0 * nf * (nf + 2.0)) * t0.powf(4.0 - alpha) / (4.0 - alpha);

        // Midsection: direct double quadrature of the mean difference.
        let mean_diff = |t: f64| {
            let w = sphere_kernel_integral(
                |d| u.value(d) - u_rho,
                rho,
                t,
                n,
                0.0,
                spec,
            )
            .unwrap_or(f64::NAN);
            w / area
        };
        let mid = integrate(
            |t: f64| t.powf(-1.0 - alpha) * mean_diff(t),
            t0,
            t_far,
            spec,
        )?;

        // Far tail: the mean of u over big spheres follows the tail model
        // with the far-field angular correction in (rho/t)^2.
        let a = tail.coefficient;
        let k = tail.kappa;
        let tail_val = a * t_far.powf(-alpha - k) / (alpha + k)
            + a * far_c2 * rho * rho * t_far.powf(-alpha - k - 2.0) / (alpha + k + 2.0)
            - u_rho * t_far.powf(-alpha) / alpha;
        let tail_err = (a * far_c4 * rho.powi(4) * t_far.powf(-alpha - k - 4.0)
            / (alpha + k + 4.0))
            .abs()
            + 1e-6 * (a * t_far.powf(-alpha - k) / (alpha + k)).abs();

        let total = -(c_norm * area) * (head + mid.value + tail_val);
        values.push(total);
        errors.push((c_norm * area) * (head_err + mid.error + tail_err));
        converged.push(mid.converged);
    }

    Ok(OperatorValues {
        radii: radii.to_vec(),
        values,
        errors,
        converged,
    })
}

// --- superharmonicity chain ---------------------------------------------------

/// One stage of the chain.
#[derive(Debug, Clone)]
pub struct ChainStage {
    /// Number of `-Delta` applications on top of the base operator.
    pub order: u32,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub minimum: f64,
    /// Worst per-point error estimate (quadrature + differentiation noise).
    pub noise: f64,
}

/// Wrapper turning a point closure + tail data into a [`RadialFunction`].
struct DerivedRadial<F: Fn(f64) -> f64> {
    f: F,
    tail: TailModel,
    tail_start: f64,
}

impl<F: Fn(f64) -> f64> RadialFunction for DerivedRadial<F> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn tail(&self) -> TailModel {
        self.tail
    }
    fn tail_start(&self) -> f64 {
        self.tail_start
    }
}

/// `(-Delta)^i u` as a boxed closure tower plus the transformed tail model
/// (`-Delta(A r^{-k}) = -k(k+2-n) A r^{-k-2}` applied `i` times).
fn lap_tower<'a, U: RadialFunction + ?Sized>(
    u: &'a U,
    i: u32,
    n: u32,
) -> (Box<dyn Fn(f64) -> f64 + 'a>, TailModel) {
    let mut tail = u.tail();
    let mut f: Box<dyn Fn(f64) -> f64 + 'a> = Box::new(move |r: f64| u.value(r));
    for _ in 0..i {
        let prev = f;
        f = Box::new(move |r: f64| -laplacian_at(&|x| prev(x), r, n).0);
        tail = TailModel::new(
            -tail.kappa * (tail.kappa + 2.0 - n as f64) * tail.coefficient,
            tail.kappa + 2.0,
        );
    }
    (f, tail)
}

/// Evaluates the superharmonicity chain of `u` for operator order
/// `s = m + alpha/2`:
///
/// * `alpha < 2`: stages `v_i = (-Delta)^i (-Delta)^{alpha/2} u` for
///   `i = 0..=m`, computed as `(-Delta)^{alpha/2} ((-Delta)^i u)` so the
///   iterated Laplacian differentiates exact input rather than quadrature
///   output;
/// * `alpha = 2`: stages `v_i = (-Delta)^i u` for `i = 0..=m` (the base
///   operator is classical).
///
/// For solutions in the positivity theory every stage is nonnegative;
/// `minimum` and `noise` let callers assert that with an honest error bar.
pub fn superharmonic_chain<U: RadialFunction + ?Sized>(
    u: &U,
    params: &ProblemParams,
    radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<ChainStage>> {
    let n = params.n;
    let m = params.m;
    let alpha = params.alpha;
    if radii.is_empty() {
        return Err(Error::domain("radii", 0.0, "non-empty evaluation grid"));
    }

    let base_start = u.tail_start();
    let mut stages = Vec::with_capacity(m as usize + 1);

    for i in 0..=m {
        let (f_i, tail_i) = lap_tower(u, i, n);
        if alpha < 2.0 {
            let derived = DerivedRadial {
                f: &f_i,
                tail: tail_i,
                tail_start: base_start,
            };
            let vals = fractional_laplacian_radial(&derived, alpha, n, radii, spec)?;
            let minimum = vals.min();
            let noise = vals.max_error();
            stages.push(ChainStage {
                order: i,
                radii: radii.to_vec(),
                values: vals.values,
                minimum,
                noise,
            });
        } else {
            // alpha = 2: v_i = (-Delta)^i u directly; noise is the FD
            // estimate of the outermost application.
            let values: Vec<f64> = radii.iter().map(|&r| f_i(r)).collect();
            let mut noise: f64 = 0.0;
            if i > 0 {
                let (prev, _) = lap_tower(u, i - 1, n);
                for &r in radii {
                    let (_, e) = laplacian_at(&|x| prev(x), r, n);
                    noise = noise.max(e);
                }
            }
            let minimum = values.iter().copied().fold(f64::INFINITY, f64::min);
            stages.push(ChainStage {
                order: i,
                radii: radii.to_vec(),
                values,
                minimum,
                noise,
            });
        }
    }
    Ok(stages)
}
