//! Problem parameters and criticality classification.
//!
//! The equations under study couple a (possibly higher-order) fractional
//! Laplacian of order `s = m + alpha/2` with a convolution nonlinearity
//!
//! ```text
//! (-Delta)^s u = ( |x|^{-(n-sigma)} * u^p ) u^q,
//! ```
//!
//! and their qualitative theory is governed by two scaling exponents:
//!
//! ```text
//! tau = (n + 2s - sigma) - q (n - 2s),
//! mu  = (2n - sigma)     - p (n - 2s).
//! ```
//!
//! Both vanish exactly at the critical pair `(p_c, q_c)` where the problem
//! is conformally invariant and explicit bubble solutions exist.

use crate::error::{Error, Result};
use serde::Serialize;

/// Tolerance for "exactly critical" in the scaling exponents.
pub const CRITICALITY_EPS: f64 = 1e-12;

/// Operator order relative to the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderRegime {
    /// `s < n/2`: the natural energy space embeds into Lebesgue spaces.
    SubHalfDimension,
    /// `s = n/2` (borderline).
    HalfDimension,
    /// `s > n/2`: pointwise control comes for free; exponent bookkeeping
    /// below does not apply.
    SuperHalfDimension,
}

/// Position of `(p, q)` relative to the critical pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentRegime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Full classification output.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Criticality {
    pub order: OrderRegime,
    /// `None` when `s >= n/2` (the exponent taxonomy is vacuous there).
    pub exponents: Option<ExponentRegime>,
    pub tau: f64,
    pub mu: f64,
}

/// Validated parameter bundle for one problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    /// Spatial dimension (>= 2 for the numerics in this crate).
    pub n: u32,
    /// Integer part of the operator order.
    pub m: u32,
    /// Fractional part: the operator is `(-Delta)^m (-Delta)^{alpha/2}`,
    /// `alpha` in (0, 2]. `alpha = 2` means the purely polyharmonic case.
    pub alpha: f64,
    /// Kernel parameter: the convolution kernel is `|x|^{-(n-sigma)}`,
    /// `sigma` in (0, n).
    pub sigma: f64,
    /// Convolution-side exponent.
    pub p: f64,
    /// Local-side exponent.
    pub q: f64,
}

impl ProblemParams {
    pub fn new(n: u32, m: u32, alpha: f64, sigma: f64, p: f64, q: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("n", n as f64, "n >= 2"));
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain("alpha", alpha, "alpha in (0, 2]"));
        }
        if !(sigma > 0.0 && sigma < n as f64) {
            return Err(Error::domain("sigma", sigma, "sigma in (0, n)"));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::domain("p", p, "p > 0"));
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::domain("q", q, "q > 0"));
        }
        Ok(ProblemParams {
            n,
            m,
            alpha,
            sigma,
            p,
            q,
        })
    }

    /// Parameters at the critical exponent pair for the given operator data.
    pub fn critical(n: u32, m: u32, alpha: f64, sigma: f64) -> Result<Self> {
        let probe = ProblemParams::new(n, m, alpha, sigma, 1.0, 1.0)?;
        let (p_c, q_c) = probe.critical_exponents()?;
        ProblemParams::new(n, m, alpha, sigma, p_c, q_c)
    }

    /// Total operator order `s = m + alpha/2`.
    pub fn s(&self) -> f64 {
        self.m as f64 + self.alpha / 2.0
    }

    pub fn order_regime(&self) -> OrderRegime {
        let half_n = self.n as f64 / 2.0;
        let s = self.s();
        if (s - half_n).abs() < CRITICALITY_EPS {
            OrderRegime::HalfDimension
        } else if s < half_n {
            OrderRegime::SubHalfDimension
        } else {
            OrderRegime::SuperHalfDimension
        }
    }

    /// Scaling exponents `(tau, mu)`; finite for any valid parameters.
    pub fn scaling_exponents(&self) -> (f64, f64) {
        let n = self.n as f64;
        let s = self.s();
        let tau = (n + 2.0 * s - self.sigma) - self.q * (n - 2.0 * s);
        let mu = (2.0 * n - self.sigma) - self.p * (n - 2.0 * s);
        (tau, mu)
    }

    /// The critical pair `p_c = (2n - sigma)/(n - 2s)`,
    /// `q_c = (n + 2s - sigma)/(n - 2s)`. Requires `s < n/2`.
    pub fn critical_exponents(&self) -> Result<(f64, f64)> {
        let n = self.n as f64;
        let s = self.s();
        if s >= n / 2.0 - CRITICALITY_EPS {
            return Err(Error::domain(
                "s",
                s,
                "s < n/2 for critical exponents to exist",
            ));
        }
        let d = n - 2.0 * s;
        Ok(((2.0 * n - self.sigma) / d, (n + 2.0 * s - self.sigma) / d))
    }

    /// Classifies the instance. Total on valid parameters: the `s >= n/2`
    /// case reports `exponents: None` rather than failing.
    pub fn classify(&self) -> Criticality {
        let order = self.order_regime();
        let (tau, mu) = self.scaling_exponents();
        let exponents = match order {
            OrderRegime::SubHalfDimension => {
                let crit = tau.abs() < CRITICALITY_EPS && mu.abs() < CRITICALITY_EPS;
                Some(if crit {
                    ExponentRegime::Critical
                } else if tau >= 0.0 && mu >= 0.0 {
                    ExponentRegime::Subcritical
                } else {
                    // Any negative component puts the pair above critical.
                    ExponentRegime::Supercritical
                })
            }
            _ => None,
        };
        Criticality {
            order,
            exponents,
            tau,
            mu,
        }
    }

    /// True when `(p, q)` sits exactly on the critical pair.
    pub fn is_critical(&self) -> bool {
        matches!(
            self.classify().exponents,
            Some(ExponentRegime::Critical)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn critical_pairs_reference() {
        // (n, m, alpha, sigma) -> (p_c, q_c); s = m + alpha/2.
        let cases = [
            (3, 0, 2.0, 2.0, 4.0, 3.0), // s = 1
            (5, 0, 2.0, 4.0, 2.0, 1.0), // s = 1
            (5, 1, 1.0, 4.0, 3.0, 2.0), // s = 1.5
            (5, 1, 2.0, 4.0, 6.0, 5.0), // s = 2
        ];
        for &(n, m, alpha, sigma, p, q) in &cases {
            let params = ProblemParams::critical(n, m, alpha, sigma).unwrap();
            assert_relative_eq!(params.p, p, max_relative = 1e-14);
            assert_relative_eq!(params.q, q, max_relative = 1e-14);
            assert!(params.is_critical());
            let c = params.classify();
            assert!(c.tau.abs() < CRITICALITY_EPS && c.mu.abs() < CRITICALITY_EPS);
        }
    }

    #[test]
    fn order_decomposition() {
        let p = ProblemParams::new(5, 1, 1.0, 4.0, 3.0, 2.0).unwrap();
        assert_relative_eq!(p.s(), 1.5);
        assert_eq!(p.order_regime(), OrderRegime::SubHalfDimension);

        let p = ProblemParams::new(3, 1, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(p.s(), 2.0);
        assert_eq!(p.order_regime(), OrderRegime::SuperHalfDimension);
        assert!(p.classify().exponents.is_none());

        let p = ProblemParams::new(4, 1, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(p.order_regime(), OrderRegime::HalfDimension);
    }

    #[test]
    fn subcritical_detection() {
        // s = 1: critical pair is (4, 3); lowering both keeps tau, mu > 0.
        let p = ProblemParams::new(3, 0, 2.0, 2.0, 3.5, 2.5).unwrap();
        let c = p.classify();
        assert_eq!(c.exponents, Some(ExponentRegime::Subcritical));
        assert!(c.tau > 0.0 && c.mu > 0.0);
    }

    #[test]
    fn supercritical_detection() {
        let p = ProblemParams::new(3, 0, 2.0, 2.0, 4.5, 3.5).unwrap();
        assert_eq!(p.classify().exponents, Some(ExponentRegime::Supercritical));
        // Mixed signs count as supercritical too.
        let p = ProblemParams::new(3, 0, 2.0, 2.0, 4.5, 2.0).unwrap();
        assert_eq!(p.classify().exponents, Some(ExponentRegime::Supercritical));
    }

    #[test]
    fn domain_validation() {
        assert!(ProblemParams::new(1, 0, 1.0, 0.5, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 0, 0.0, 2.0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 0, 2.1, 2.0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 0, 1.0, 3.0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 0, 1.0, -0.1, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 0, 1.0, 2.0, 0.0, 1.0).is_err());
        assert!(ProblemParams::new(3, 0, 1.0, 2.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn scaling_exponents_formula() {
        // s = 1/2 here, so n - 2s = 2, n + 2s - sigma = 2, 2n - sigma = 4.
        let p = ProblemParams::new(3, 0, 1.0, 2.0, 4.0, 3.0).unwrap();
        let (tau, mu) = p.scaling_exponents();
        assert_relative_eq!(tau, 2.0 - 3.0 * 2.0);
        assert_relative_eq!(mu, 4.0 - 4.0 * 2.0);
    }
}
