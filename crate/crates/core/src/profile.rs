//! Radial data: sampled profiles with spline interpolation and algebraic
//! tail models, plus the trait the operators consume.
//!
//! A [`RadialProfile`] represents an even radial function by values on a
//! grid `0 = r_0 < r_1 < ... < r_N` (cubic spline in between) together with
//! a tail model `A r^{-kappa}` used verbatim for `r > r_N`. The pairing of
//! grid + explicit tail is what lets the integral operators treat sampled
//! data and closed-form profiles uniformly: every [`RadialFunction`] is
//! evaluable on all of `[0, inf)` and exposes its decay.

use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Leading algebraic behaviour `A r^{-kappa}` at infinity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailModel {
    /// Coefficient `A`.
    #[serde(rename = "A")]
    pub coefficient: f64,
    /// Decay exponent `kappa`.
    pub kappa: f64,
}

impl TailModel {
    pub fn new(coefficient: f64, kappa: f64) -> Self {
        TailModel { coefficient, kappa }
    }

    /// Tail pinned to pass through `(r, value)` with the given decay.
    pub fn through(r: f64, value: f64, kappa: f64) -> Self {
        TailModel {
            coefficient: value * r.powf(kappa),
            kappa,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.coefficient * r.powf(-self.kappa)
    }
}

/// A radial function evaluable on all of `[0, inf)`.
///
/// `value` must be finite for every `r > 0` (and at `r = 0` unless
/// `origin_exponent() > 0`); beyond `tail_start()` it must agree with the
/// algebraic model `tail()` to the accuracy the caller needs — the integral
/// operators switch to series forms of the kernels out there.
pub trait RadialFunction {
    fn value(&self, r: f64) -> f64;

    /// Leading behaviour at infinity.
    fn tail(&self) -> TailModel;

    /// Radius past which `value` is algebraic to high relative accuracy.
    fn tail_start(&self) -> f64;

    /// Growth rate at the origin: `value(r) ~ c r^{-origin_exponent}` as
    /// `r -> 0`. Zero (the default) means bounded at the origin. Only the
    /// semigroup-composition machinery feeds unbounded profiles in.
    fn origin_exponent(&self) -> f64 {
        0.0
    }
}

impl<'a, T: RadialFunction + ?Sized> RadialFunction for &'a T {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn tail(&self) -> TailModel {
        (**self).tail()
    }
    fn tail_start(&self) -> f64 {
        (**self).tail_start()
    }
    fn origin_exponent(&self) -> f64 {
        (**self).origin_exponent()
    }
}

/// Natural cubic-spline data with clamped ends (zero slope at the origin,
/// tail slope at the outer edge), stored as second derivatives.
#[derive(Debug, Clone)]
struct Spline {
    m: Vec<f64>, // second derivatives at the nodes
}

fn build_spline(x: &[f64], y: &[f64], d_left: f64, d_right: f64) -> Vec<f64> {
    // Clamped cubic spline: tridiagonal system for second derivatives.
    let n = x.len();
    debug_assert!(n >= 3);
    let mut a = vec![0.0; n]; // sub
    let mut b = vec![0.0; n]; // diag
    let mut c = vec![0.0; n]; // super
    let mut d = vec![0.0; n]; // rhs

    let h0 = x[1] - x[0];
    b[0] = 2.0 * h0;
    c[0] = h0;
    d[0] = 6.0 * ((y[1] - y[0]) / h0 - d_left);

    for i in 1..n - 1 {
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        a[i] = hm;
        b[i] = 2.0 * (hm + hp);
        c[i] = hp;
        d[i] = 6.0 * ((y[i + 1] - y[i]) / hp - (y[i] - y[i - 1]) / hm);
    }

    let hn = x[n - 1] - x[n - 2];
    a[n - 1] = hn;
    b[n - 1] = 2.0 * hn;
    d[n - 1] = 6.0 * (d_right - (y[n - 1] - y[n - 2]) / hn);

    // Thomas algorithm.
    for i in 1..n {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = d[n - 1] / b[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
    }
    m
}

/// Sampled radial profile: grid values + cubic spline + algebraic tail.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    tail: TailModel,
    spline: Spline,
}

impl RadialProfile {
    /// Builds a profile from grid data. Requirements: at least 3 nodes,
    /// `nodes[0] = 0`, strictly increasing, all values finite.
    ///
    /// The spline is clamped: slope 0 at the origin (even extension is C^1)
    /// and the tail-model slope at the outer edge (C^1 handoff to the tail).
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, tail: TailModel) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Profile(format!(
                "{} nodes vs {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.len() < 3 {
            return Err(Error::Profile("need at least 3 nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::Profile(format!(
                "grid must start at r = 0 (got {})",
                nodes[0]
            )));
        }
        if !nodes.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Profile("grid must be strictly increasing".into()));
        }
        if !nodes.iter().chain(values.iter()).all(|v| v.is_finite()) {
            return Err(Error::Profile("non-finite grid data".into()));
        }
        if !(tail.coefficient.is_finite() && tail.kappa.is_finite()) {
            return Err(Error::Profile("non-finite tail model".into()));
        }

        let r_edge = *nodes.last().unwrap();
        let edge_slope = -tail.kappa * tail.coefficient * r_edge.powf(-tail.kappa - 1.0);
        let m = build_spline(&nodes, &values, 0.0, edge_slope);
        Ok(RadialProfile {
            nodes,
            values,
            tail,
            spline: Spline { m },
        })
    }

    /// Samples a function on a grid and fits the tail through the last node.
    pub fn from_fn<F: Fn(f64) -> f64>(
        f: F,
        nodes: Vec<f64>,
        kappa: f64,
    ) -> Result<Self> {
        let values: Vec<f64> = nodes.iter().map(|&r| f(r)).collect();
        let r_edge = *nodes.last().ok_or_else(|| Error::Profile("empty grid".into()))?;
        let v_edge = *values.last().unwrap();
        RadialProfile::new(nodes, values, TailModel::through(r_edge, v_edge, kappa))
    }

    /// Default evaluation grid: `count` nodes on `[0, r_max]`, linear up to
    /// r = 1 and geometric beyond (radial operators need resolution near the
    /// origin and reach in the tail).
    pub fn default_grid(r_max: f64, count: usize) -> Vec<f64> {
        assert!(r_max > 1.0 && count >= 8);
        let n_lin = count / 2;
        let n_log = count - n_lin;
        let mut g = Vec::with_capacity(count);
        for i in 0..n_lin {
            g.push(i as f64 / n_lin as f64);
        }
        let ratio = r_max.ln();
        for i in 0..n_log {
            g.push((ratio * (i + 1) as f64 / n_log as f64).exp());
        }
        g
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_model(&self) -> TailModel {
        self.tail
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    fn segment_of(&self, r: f64) -> usize {
        match self
            .nodes
            .binary_search_by(|probe| probe.total_cmp(&r))
        {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.nodes.len() - 2),
        }
    }

    /// Spline derivative at `r` (tail-model derivative beyond the grid).
    pub fn derivative(&self, r: f64) -> f64 {
        if r > self.r_max() {
            let t = self.tail;
            return -t.kappa * t.coefficient * r.powf(-t.kappa - 1.0);
        }
        let i = self.segment_of(r);
        let h = self.nodes[i + 1] - self.nodes[i];
        let a = (self.nodes[i + 1] - r) / h;
        let b = (r - self.nodes[i]) / h;
        (self.values[i + 1] - self.values[i]) / h
            + h / 6.0
                * (-(3.0 * a * a - 1.0) * self.spline.m[i]
                    + (3.0 * b * b - 1.0) * self.spline.m[i + 1])
    }

    /// Spline second derivative at `r`.
    pub fn second_derivative(&self, r: f64) -> f64 {
        if r > self.r_max() {
            let t = self.tail;
            return t.kappa * (t.kappa + 1.0) * t.coefficient * r.powf(-t.kappa - 2.0);
        }
        let i = self.segment_of(r);
        let h = self.nodes[i + 1] - self.nodes[i];
        let a = (self.nodes[i + 1] - r) / h;
        let b = (r - self.nodes[i]) / h;
        a * self.spline.m[i] + b * self.spline.m[i + 1]
    }

    /// Whether the profile decays fast enough for the convolution with the
    /// kernel `|x|^{-(n-sigma)}` to converge: `kappa + (n - sigma) > n`,
    /// i.e. `kappa > sigma`.
    pub fn tail_integrable_against(&self, sigma: f64) -> bool {
        self.tail.kappa > sigma
    }

    /// Writes `r,value` CSV plus a JSON sidecar `{"A": ..., "kappa": ...}`
    /// describing the tail (same path with extension replaced by `json`).
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "r,value")?;
        for (r, v) in self.nodes.iter().zip(&self.values) {
            writeln!(f, "{:.17e},{:.17e}", r, v)?;
        }
        let sidecar = path.with_extension("json");
        let json = serde_json::to_string_pretty(&self.tail)
            .map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(sidecar, json)?;
        Ok(())
    }

    /// Reads a profile written by [`write_csv`](Self::write_csv).
    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path)?;
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 {
                if line != "r,value" {
                    return Err(Error::Parse(format!(
                        "expected header 'r,value', got '{line}'"
                    )));
                }
                continue;
            }
            let mut parts = line.split(',');
            let (r, v) = match (parts.next(), parts.next(), parts.next()) {
                (Some(r), Some(v), None) => (r, v),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected two comma-separated fields",
                        lineno + 1
                    )))
                }
            };
            nodes.push(
                r.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?,
            );
            values.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?,
            );
        }
        let sidecar = path.with_extension("json");
        let tail: TailModel = serde_json::from_str(&std::fs::read_to_string(&sidecar)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", sidecar.display())))?;
        RadialProfile::new(nodes, values, tail)
    }
}

impl RadialFunction for RadialProfile {
    fn value(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        if r > self.r_max() {
            return self.tail.value(r);
        }
        let i = self.segment_of(r);
        let h = self.nodes[i + 1] - self.nodes[i];
        let a = (self.nodes[i + 1] - r) / h;
        let b = (r - self.nodes[i]) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.spline.m[i] + (b * b * b - b) * self.spline.m[i + 1])
                * (h * h)
                / 6.0
    }

    fn tail(&self) -> TailModel {
        self.tail
    }

    fn tail_start(&self) -> f64 {
        self.r_max()
    }
}

/// Closed-form profile `amplitude * (1 + (scale r)^2)^{-power}` — the shape
/// of every extremal bubble and of the test profiles for the convolution
/// identities.
#[derive(Debug, Clone, Copy)]
pub struct AlgebraicBump {
    pub amplitude: f64,
    pub scale: f64,
    pub power: f64,
}

impl AlgebraicBump {
    pub fn new(amplitude: f64, scale: f64, power: f64) -> Self {
        debug_assert!(scale > 0.0 && power > 0.0);
        AlgebraicBump {
            amplitude,
            scale,
            power,
        }
    }

    /// d/dr value.
    pub fn derivative(&self, r: f64) -> f64 {
        let s2 = self.scale * self.scale;
        -2.0 * self.power * self.amplitude * s2 * r * (1.0 + s2 * r * r).powf(-self.power - 1.0)
    }
}

impl RadialFunction for AlgebraicBump {
    fn value(&self, r: f64) -> f64 {
        let sr = self.scale * r;
        self.amplitude * (1.0 + sr * sr).powf(-self.power)
    }

    fn tail(&self) -> TailModel {
        TailModel {
            coefficient: self.amplitude * self.scale.powf(-2.0 * self.power),
            kappa: 2.0 * self.power,
        }
    }

    fn tail_start(&self) -> f64 {
        // (1 + x^2)^{-p} = x^{-2p}(1 + x^{-2})^{-p}: relative model error
        // ~ p/x^2, kept below ~1e-6.
        1e3 * self.power.max(1.0).sqrt() / self.scale
    }
}

/// Pure power law `amplitude * r^{-exponent}` (singular at the origin).
/// Only the semigroup-composition identity uses this; it is its own tail.
#[derive(Debug, Clone, Copy)]
pub struct PowerLaw {
    pub amplitude: f64,
    pub exponent: f64,
}

impl RadialFunction for PowerLaw {
    fn value(&self, r: f64) -> f64 {
        self.amplitude * r.powf(-self.exponent)
    }

    fn tail(&self) -> TailModel {
        TailModel {
            coefficient: self.amplitude,
            kappa: self.exponent,
        }
    }

    fn tail_start(&self) -> f64 {
        1.0
    }

    fn origin_exponent(&self) -> f64 {
        self.exponent
    }
}
