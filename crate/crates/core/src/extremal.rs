//! The extremal bubble family, its integral-equation residual, Kelvin
//! transforms, and the moving-spheres machinery (gap function, critical
//! scale, asymptotic coefficient, lower bound).

use crate::constants::{bubble_normalization, riesz_constant};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::profile::{AlgebraicBump, RadialFunction, TailModel};
use crate::quad::QuadratureSpec;
use crate::riesz::{hartree_field, riesz_potential, HartreeField};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// --- bubble family ---------------------------------------------------------------

/// `u(x) = mu^k C (1 + mu^2 |x-x0|^2)^{-k}` with `k = (n-2s)/2`: the
/// scale/translate family of extremal profiles.
#[derive(Debug, Clone)]
pub struct Bubble {
    pub mu: f64,
    pub x0: Vec<f64>,
    /// Normalization constant `C` (the amplitude at scale 1).
    pub normalization: f64,
    /// Decay exponent half: `k = (n - 2s)/2`.
    pub k: f64,
}

impl Bubble {
    /// The normalized extremal at scale 1 centred at the origin.
    pub fn standard(params: &ProblemParams) -> Result<Self> {
        Self::scaled(params, 1.0, vec![0.0; params.n as usize])
    }

    /// Arbitrary member of the family.
    pub fn scaled(params: &ProblemParams, mu: f64, x0: Vec<f64>) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::domain("mu", mu, "positive"));
        }
        if x0.len() != params.n as usize {
            return Err(Error::domain("x0", x0.len() as f64, "length n"));
        }
        Ok(Bubble {
            mu,
            x0,
            normalization: bubble_normalization(params)?,
            k: (params.n as f64 - 2.0 * params.s()) / 2.0,
        })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .zip(&self.x0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        self.mu.powf(self.k) * self.normalization
            * (1.0 + self.mu * self.mu * r2).powf(-self.k)
    }

    /// The radial profile about the bubble's own centre.
    pub fn radial_profile(&self) -> AlgebraicBump {
        AlgebraicBump::new(
            self.mu.powf(self.k) * self.normalization,
            self.mu,
            self.k,
        )
    }

    /// `lim |x|^{n-2s} u(x) = C mu^{-k}`.
    pub fn asymptotic_limit(&self) -> f64 {
        self.normalization * self.mu.powf(-self.k)
    }
}

// --- integral-equation residual ----------------------------------------------------

/// The product `V(r) u(r)^q` with tail bookkeeping, feeding the outer
/// potential of the integral equation.
struct SourceDensity<'a> {
    field: &'a HartreeField,
    u: &'a AlgebraicBump,
    q: f64,
}

impl RadialFunction for SourceDensity<'_> {
    fn value(&self, r: f64) -> f64 {
        self.field.value(r) * self.u.value(r).powf(self.q)
    }
    fn tail(&self) -> TailModel {
        let tv = self.field.tail();
        let tu = self.u.tail();
        TailModel::new(
            tv.coefficient * tu.coefficient.powf(self.q),
            tv.kappa + self.q * tu.kappa,
        )
    }
    fn tail_start(&self) -> f64 {
        self.field.tail_start().max(self.u.tail_start())
    }
}

/// Worst relative residual of the integral equation
/// `u = R_{2s,n} |x|^{-(n-2s)} * ((|x|^{-sigma} * u^p) u^q)`
/// over the sample radii (measured about the bubble's centre, where both
/// convolutions are one-dimensional).
///
/// Near zero for critical exponent pairs; order-one for anything else.
pub fn ie_residual(
    b: &Bubble,
    params: &ProblemParams,
    sample_radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let n = params.n;
    let s = params.s();
    if 2.0 * s >= n as f64 {
        return Err(Error::domain("s", s, "2s < n for the kernel form"));
    }
    let u = b.radial_profile();
    let field = hartree_field(&u, params.p, params.sigma, n, spec)?;
    let density = SourceDensity {
        field: &field,
        u: &u,
        q: params.q,
    };
    let c = riesz_constant(2.0 * s, n)?;
    let mut worst = 0.0f64;
    for &rho in sample_radii {
        let t = c * riesz_potential(&density, n as f64 - 2.0 * s, n, rho, spec)?.value;
        let expect = u.value(rho);
        worst = worst.max((t - expect).abs() / expect.abs());
    }
    Ok(worst)
}

// --- Kelvin transform ---------------------------------------------------------------

/// `x -> (lambda/|x-x0|)^nu u(x0 + lambda^2 (x-x0)/|x-x0|^2)`.
pub struct KelvinTransform<'a, F: ?Sized> {
    pub u: &'a F,
    pub x0: Vec<f64>,
    pub lambda: f64,
    pub nu: f64,
}

impl<'a, F: Fn(&[f64]) -> f64 + ?Sized> KelvinTransform<'a, F> {
    pub fn new(u: &'a F, x0: Vec<f64>, lambda: f64, nu: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::domain("lambda", lambda, "positive"));
        }
        Ok(KelvinTransform { u, x0, lambda, nu })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let dx: Vec<f64> = x.iter().zip(&self.x0).map(|(a, b)| a - b).collect();
        let d2: f64 = dx.iter().map(|v| v * v).sum();
        if d2 == 0.0 {
            return Err(Error::Singular(
                "Kelvin transform evaluated at its centre".into(),
            ));
        }
        let scale = self.lambda * self.lambda / d2;
        let image: Vec<f64> = self
            .x0
            .iter()
            .zip(&dx)
            .map(|(c, v)| c + scale * v)
            .collect();
        Ok((self.lambda / d2.sqrt()).powf(self.nu) * (self.u)(&image))
    }
}

// --- moving spheres -----------------------------------------------------------------

/// Gap samples `omega_lambda(x_i) = u_{x0,lambda}(x_i) - u(x_i)` inside
/// the sphere, plus the violation indicator.
#[derive(Debug, Clone)]
pub struct MovingSphereState {
    pub x0: Vec<f64>,
    pub lambda: f64,
    pub points: Vec<Vec<f64>>,
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    /// Indices where the gap dips below `-tol` (the violation set sample).
    pub violations: Vec<usize>,
}

/// Evaluates the gap at the given interior points.
pub fn moving_sphere_gap<F: Fn(&[f64]) -> f64>(
    u: &F,
    x0: &[f64],
    lambda: f64,
    nu: f64,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<MovingSphereState> {
    let kelvin = KelvinTransform::new(u, x0.to_vec(), lambda, nu)?;
    let mut gaps = Vec::with_capacity(points.len());
    let mut min_gap = f64::INFINITY;
    let mut violations = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let g = kelvin.eval(x)? - u(x);
        min_gap = min_gap.min(g);
        if g < -tol {
            violations.push(i);
        }
        gaps.push(g);
    }
    Ok(MovingSphereState {
        x0: x0.to_vec(),
        lambda,
        points: points.to_vec(),
        gaps,
        min_gap,
        violations,
    })
}

/// Unit directions: all signed axes, plus a Fibonacci sphere in n = 3 or
/// seeded Gaussian directions otherwise.
pub fn direction_samples(n: u32, extra: usize, seed: u64) -> Vec<Vec<f64>> {
    let nu = n as usize;
    let mut dirs = Vec::with_capacity(2 * nu + extra);
    for i in 0..nu {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; nu];
            e[i] = sign;
            dirs.push(e);
        }
    }
    if n == 3 {
        // Fibonacci sphere: even coverage, deterministic.
        let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
        for i in 0..extra {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / extra as f64;
            let r = (1.0 - y * y).sqrt();
            let th = golden * i as f64;
            dirs.push(vec![r * th.cos(), y, r * th.sin()]);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = move || {
            // Box-Muller from two uniforms.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        while dirs.len() < 2 * nu + extra {
            let v: Vec<f64> = (0..nu).map(|_| gauss()).collect();
            let r = norm(&v);
            if r > 1e-3 {
                dirs.push(v.iter().map(|x| x / r).collect());
            }
        }
    }
    dirs
}

/// Interior sample cloud for the gap: `radial_count` shells, the direction
/// set from [`direction_samples`].
pub fn gap_sample_points(
    n: u32,
    x0: &[f64],
    lambda: f64,
    radial_count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let dirs = direction_samples(n, 64, seed);
    let mut pts = Vec::with_capacity(radial_count * dirs.len());
    for i in 0..radial_count {
        let r = lambda * (i as f64 + 0.5) / radial_count as f64;
        for d in &dirs {
            pts.push(x0.iter().zip(d).map(|(c, v)| c + r * v).collect());
        }
    }
    pts
}

/// Result of the critical-scale search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalScale {
    Finite(f64),
    /// No violation up to the search ceiling.
    Infinite,
}

/// Supremum of `lambda` with `omega_lambda >= -tol` on a dense interior
/// sample, located by geometric scan plus bisection.
pub fn critical_scale<F: Fn(&[f64]) -> f64>(
    u: &F,
    x0: &[f64],
    nu: f64,
    lambda_max: f64,
    tol: f64,
    seed: u64,
) -> Result<CriticalScale> {
    if !(lambda_max > 0.0) {
        return Err(Error::domain("lambda_max", lambda_max, "positive"));
    }
    let n = x0.len() as u32;
    let clean = |lambda: f64| -> Result<bool> {
        let pts = gap_sample_points(n, x0, lambda, 24, seed);
        let state = moving_sphere_gap(u, x0, lambda, nu, &pts, tol)?;
        Ok(state.violations.is_empty())
    };

    // Geometric scan upward until the first violating scale.
    let mut lo = 1e-3 * lambda_max;
    if !clean(lo)? {
        // Violated already at the smallest scale probed: keep shrinking.
        let mut hi = lo;
        for _ in 0..40 {
            lo /= 2.0;
            if clean(lo)? {
                return bisect(u, x0, nu, lo, hi, tol, seed);
            }
            hi = lo;
        }
        return Err(Error::domain(
            "lambda",
            lo,
            "a clean scale above underflow (gap negative at every probe)",
        ));
    }
    let mut hi = lo;
    loop {
        let next = (hi * 1.25).min(lambda_max);
        if !clean(next)? {
            return bisect(u, x0, nu, hi, next, tol, seed);
        }
        hi = next;
        if hi >= lambda_max {
            return Ok(CriticalScale::Infinite);
        }
    }
}

fn bisect<F: Fn(&[f64]) -> f64>(
    u: &F,
    x0: &[f64],
    nu: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    seed: u64,
) -> Result<CriticalScale> {
    let n = x0.len() as u32;
    while hi - lo > 1e-7 * (1.0 + lo) {
        let mid = 0.5 * (lo + hi);
        let pts = gap_sample_points(n, x0, mid, 24, seed);
        let state = moving_sphere_gap(u, x0, mid, nu, &pts, tol)?;
        if state.violations.is_empty() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalScale::Finite(0.5 * (lo + hi)))
}

// --- asymptotics ---------------------------------------------------------------------

/// `lim_{R->inf} R^nu u(R d)` by Neville extrapolation in `1/R` along each
/// direction; errors out if the tableau does not settle (wrong decay
/// order, logarithmic corrections, ...).
pub fn asymptotic_coefficient<F: Fn(&[f64]) -> f64>(
    u: &F,
    nu: f64,
    directions: &[Vec<f64>],
    r0: f64,
) -> Result<f64> {
    if directions.is_empty() {
        return Err(Error::domain("directions", 0.0, "non-empty"));
    }
    if !(r0 > 0.0) {
        return Err(Error::domain("r0", r0, "positive"));
    }
    const LEVELS: usize = 10;
    let mut total = 0.0;
    for d in directions {
        let mut t = [0.0; LEVELS];
        let mut val = [0.0; LEVELS];
        for j in 0..LEVELS {
            let r = r0 * (1 << j) as f64;
            let x: Vec<f64> = d.iter().map(|v| v * r).collect();
            t[j] = 1.0 / r;
            val[j] = r.powf(nu) * u(&x);
        }
        // Neville tableau toward t = 0.
        let mut row = val;
        for k in 1..LEVELS {
            for j in (k..LEVELS).rev() {
                row[j] = row[j] + (row[j] - row[j - 1]) * t[j] / (t[j - k] - t[j]);
            }
        }
        let estimate = row[LEVELS - 1];
        let settle = (row[LEVELS - 1] - row[LEVELS - 2]).abs();
        if !(settle <= 1e-9 * estimate.abs().max(1e-300)) {
            return Err(Error::Extrapolation(format!(
                "tableau not settled: last step {settle:.3e} against {estimate:.3e}"
            )));
        }
        total += estimate;
    }
    Ok(total / directions.len() as f64)
}

/// Sampled infimum of `|x-x0|^nu u(x)` over the given radii (>= 1) and a
/// standard direction set. Positive values certify the decay lower bound.
pub fn lower_bound_check<F: Fn(&[f64]) -> f64>(
    u: &F,
    x0: &[f64],
    nu: f64,
    radii: &[f64],
    seed: u64,
) -> Result<f64> {
    if radii.iter().any(|&r| !(r >= 1.0)) {
        return Err(Error::domain("radii", f64::NAN, "all radii >= 1"));
    }
    let dirs = direction_samples(x0.len() as u32, 64, seed);
    let mut inf = f64::INFINITY;
    for &r in radii {
        for d in &dirs {
            let x: Vec<f64> = x0.iter().zip(d).map(|(c, v)| c + r * v).collect();
            inf = inf.min(r.powf(nu) * u(&x));
        }
    }
    Ok(inf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params_312() -> ProblemParams {
        ProblemParams::critical(3, 0, 2.0, 2.0).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn bubble_center_and_scaling() {
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        assert_relative_eq!(b.value(&[0.0; 3]), b.normalization);
        assert_relative_eq!(b.normalization, 0.819_980_613_968_514, max_relative = 1e-12);
        // mu = 4, k = 1/2: value at centre doubles.
        let b4 = Bubble::scaled(&p, 4.0, vec![0.0; 3]).unwrap();
        assert_relative_eq!(
            b4.value(&[0.0; 3]),
            2.0 * b.normalization,
            max_relative = 1e-14
        );
        // Radial symmetry about x0.
        let bt = Bubble::scaled(&p, 1.0, vec![1.0, 0.0, 0.0]).unwrap();
        let a = bt.value(&[1.0, 0.7, 0.0]);
        let c = bt.value(&[1.0, 0.0, -0.7]);
        assert_relative_eq!(a, c, max_relative = 1e-14);
    }

    #[test]
    fn ie_residual_critical_pairs() {
        let radii = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        let r = ie_residual(&b, &p, &radii, &spec()).unwrap();
        assert!(r < 1e-3, "critical (3,1,2) residual {r:.3e}");

        let p5 = ProblemParams::critical(5, 0, 2.0, 4.0).unwrap();
        let b5 = Bubble::standard(&p5).unwrap();
        let r5 = ie_residual(&b5, &p5, &radii, &spec()).unwrap();
        assert!(r5 < 1e-3, "critical (5,1,4) residual {r5:.3e}");
    }

    #[test]
    fn ie_residual_flags_subcritical() {
        // q = 2 (critical is 3) with the critical-C bubble: not a solution.
        let p = ProblemParams::new(3, 0, 2.0, 2.0, 4.0, 2.0).unwrap();
        let b = Bubble {
            mu: 1.0,
            x0: vec![0.0; 3],
            normalization: bubble_normalization(&params_312()).unwrap(),
            k: 0.5,
        };
        let r = ie_residual(&b, &p, &[0.0, 0.5, 1.0, 2.0, 8.0], &spec()).unwrap();
        assert!(r > 0.05, "subcritical residual only {r:.3e}");
    }

    #[test]
    fn ie_residual_scale_covariance() {
        let radii = [0.0, 0.5, 1.0, 4.0];
        let p = params_312();
        let base = ie_residual(&Bubble::standard(&p).unwrap(), &p, &radii, &spec()).unwrap();
        for mu in [0.5, 2.0] {
            let b = Bubble::scaled(&p, mu, vec![0.0; 3]).unwrap();
            let scaled_radii: Vec<f64> = radii.iter().map(|r| r / mu).collect();
            let r = ie_residual(&b, &p, &scaled_radii, &spec()).unwrap();
            assert!(
                r < (2.0 * base).max(1e-3),
                "mu={mu}: residual {r:.3e} vs base {base:.3e}"
            );
        }
    }

    #[test]
    fn kelvin_involution_and_fixed_bubble() {
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        let f = |x: &[f64]| b.value(x);
        let x0 = vec![0.3, -0.2, 0.5];
        let kt = KelvinTransform::new(&f, x0.clone(), 0.8, 1.0).unwrap();
        // Involution.
        let g = |x: &[f64]| kt.eval(x).unwrap();
        let kt2 = KelvinTransform::new(&g, x0, 0.8, 1.0).unwrap();
        for pt in [[1.0, 0.2, -0.4], [0.5, 0.5, 0.5], [2.0, 0.0, 1.0]] {
            assert_relative_eq!(kt2.eval(&pt).unwrap(), f(&pt), max_relative = 1e-12);
        }
        // lambda = 1 about the origin fixes the standard bubble.
        let k1 = KelvinTransform::new(&f, vec![0.0; 3], 1.0, 1.0).unwrap();
        for pt in [[0.3, 0.0, 0.0], [1.0, 1.0, 0.0], [0.1, 0.2, 0.3]] {
            assert_relative_eq!(k1.eval(&pt).unwrap(), f(&pt), max_relative = 1e-13);
        }
        // Constant function, nu = 0.
        let one = |_: &[f64]| 1.0;
        let k0 = KelvinTransform::new(&one, vec![0.0; 3], 2.0, 0.0).unwrap();
        assert_relative_eq!(k0.eval(&[0.4, 0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn kelvin_singular_at_center() {
        let one = |_: &[f64]| 1.0;
        let kt = KelvinTransform::new(&one, vec![1.0, 0.0, 0.0], 1.0, 1.0).unwrap();
        assert!(matches!(
            kt.eval(&[1.0, 0.0, 0.0]),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn gap_signs_for_small_sphere() {
        // (1 - lambda^2)(lambda^2 - r^2) controls the sign for the
        // standard bubble about the origin.
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        let f = |x: &[f64]| b.value(x);
        let x0 = [0.0; 3];
        let inside = moving_sphere_gap(
            &f,
            &x0,
            0.5,
            1.0,
            &[vec![0.25, 0.0, 0.0]],
            1e-9,
        )
        .unwrap();
        assert!(inside.min_gap > 0.0);
        let outside = moving_sphere_gap(
            &f,
            &x0,
            0.5,
            1.0,
            &[vec![0.75, 0.0, 0.0]],
            1e-9,
        )
        .unwrap();
        assert!(outside.min_gap < 0.0);
    }

    #[test]
    fn gap_vanishes_at_unit_scale() {
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        let f = |x: &[f64]| b.value(x);
        let x0 = [0.0; 3];
        let pts = gap_sample_points(3, &x0, 1.0, 10, 7);
        let state = moving_sphere_gap(&f, &x0, 1.0, 1.0, &pts, 1e-9).unwrap();
        for g in &state.gaps {
            assert!(g.abs() < 1e-12, "gap {g:.3e}");
        }
    }

    #[test]
    fn critical_scale_matches_identity() {
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        let f = |x: &[f64]| b.value(x);
        for dist in [0.0, 0.5, 1.0, 2.0] {
            let x0 = [dist, 0.0, 0.0];
            let got = critical_scale(&f, &x0, 1.0, 10.0, 1e-9, 7).unwrap();
            let expect = (1.0 + dist * dist).sqrt();
            match got {
                CriticalScale::Finite(l) => {
                    assert_relative_eq!(l, expect, max_relative = 1e-5)
                }
                CriticalScale::Infinite => panic!("expected finite scale at |x0|={dist}"),
            }
        }
    }

    #[test]
    fn critical_scale_infinite_for_constants() {
        let one = |_: &[f64]| 2.5;
        let got = critical_scale(&one, &[0.0, 0.0, 0.0], 1.0, 8.0, 1e-9, 7).unwrap();
        assert_eq!(got, CriticalScale::Infinite);
    }

    #[test]
    fn asymptotic_coefficient_of_bubbles() {
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        let f = |x: &[f64]| b.value(x);
        let dirs = direction_samples(3, 8, 7);
        let a = asymptotic_coefficient(&f, 1.0, &dirs, 50.0).unwrap();
        assert_relative_eq!(a, b.normalization, max_relative = 1e-10);

        let b2 = Bubble::scaled(&p, 2.0, vec![0.0; 3]).unwrap();
        let f2 = |x: &[f64]| b2.value(x);
        let a2 = asymptotic_coefficient(&f2, 1.0, &dirs, 50.0).unwrap();
        assert_relative_eq!(a2, b2.asymptotic_limit(), max_relative = 1e-10);
        assert_relative_eq!(
            a2,
            b.normalization / 2.0f64.sqrt(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn asymptotic_flags_log_mismatch() {
        let g = |x: &[f64]| {
            let r = norm(x);
            r.ln().max(1.0) / r
        };
        let dirs = direction_samples(3, 0, 7);
        assert!(matches!(
            asymptotic_coefficient(&g, 1.0, &dirs, 50.0),
            Err(Error::Extrapolation(_))
        ));
    }

    #[test]
    fn lower_bound_of_bubble() {
        let p = params_312();
        let b = Bubble::standard(&p).unwrap();
        let f = |x: &[f64]| b.value(x);
        let radii: Vec<f64> = (0..40).map(|i| 1.0 + i as f64).collect();
        let inf = lower_bound_check(&f, &[0.0; 3], 1.0, &radii, 7).unwrap();
        // |x| u = C r (1+r^2)^{-1/2}, minimized over r >= 1 at r = 1.
        assert!(inf > 0.0);
        assert_relative_eq!(
            inf,
            b.normalization / 2.0f64.sqrt(),
            max_relative = 1e-12
        );
        // Monotone under enlarging the radius set.
        let more: Vec<f64> = (0..80).map(|i| 1.0 + 0.5 * i as f64).collect();
        let inf2 = lower_bound_check(&f, &[0.0; 3], 1.0, &more, 7).unwrap();
        assert!(inf2 <= inf + 1e-15);
    }

    #[test]
    fn kelvin_antisymmetry_identity() {
        // kelvin(u) evaluated inside equals the conformally weighted u at
        // the mapped exterior point: direct algebraic re-check at random
        // sample pairs.
        let p = params_312();
        let b = Bubble::scaled(&p, 1.3, vec![0.2, 0.0, -0.1]).unwrap();
        let f = |x: &[f64]| b.value(x);
        let x0 = vec![0.5, 0.5, 0.0];
        let lambda = 0.9;
        let kt = KelvinTransform::new(&f, x0.clone(), lambda, 1.0).unwrap();
        for t in [0.2, 0.5, 0.8] {
            let inside = [x0[0] + t * lambda, x0[1], x0[2]];
            let d = t * lambda;
            let outside = [x0[0] + lambda * lambda / d, x0[1], x0[2]];
            let got = kt.eval(&inside).unwrap();
            let expect = (lambda / d).powf(1.0) * f(&outside);
            assert_relative_eq!(got, expect, max_relative = 1e-10);
        }
    }
}
