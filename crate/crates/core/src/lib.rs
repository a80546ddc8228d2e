//! Numerical verification toolkit for nonlocal elliptic equations with
//! convolution nonlinearities.
//!
//! The crate evaluates, to controlled accuracy, the objects that appear in
//! the classification theory of
//!
//! ```text
//! (-Delta)^{m + alpha/2} u = ( |x|^{-(n-sigma)} * u^p ) u^q   in R^n,
//! ```
//!
//! and checks the exact identities they satisfy:
//!
//! * sharp constants (Riesz normalizations, Sobolev / convolution-energy
//!   constants, the fractional Laplacian normalization) — [`constants`];
//! * Riesz potentials of radial functions, convolution and semigroup
//!   identities — [`riesz`];
//! * fractional Laplacians of radial functions and superharmonicity chains —
//!   [`radial_ops`];
//! * Green and Poisson kernels of balls and the interior representation
//!   formula — [`ball`];
//! * extremal "bubble" profiles, their integral-equation residual, Kelvin
//!   transforms and the moving-spheres procedure — [`extremal`].
//!
//! Everything reduces to 1-D adaptive Gauss–Kronrod quadrature ([`quad`])
//! through angular kernel averages ([`angular`]); radial data is carried by
//! [`profile::RadialProfile`] (cubic spline + algebraic tail model).
//!
//! Conventions: the fractional Laplacian normalization uses the `2 pi`
//! cosine convention (see [`constants::frac_lap_normalization`]); all ball
//! kernels are calibrated to the same convention.

pub mod angular;
pub mod ball;
pub mod constants;
pub mod error;
pub mod extremal;
pub mod gamma;
pub mod params;
pub mod profile;
pub mod quad;
pub mod radial_ops;
pub mod report;
pub mod riesz;

pub use error::{Error, Result};
pub use extremal::{Bubble, CriticalScale, KelvinTransform, MovingSphereState};
pub use params::{Criticality, ExponentRegime, OrderRegime, ProblemParams};
pub use profile::{RadialFunction, RadialProfile, TailModel};
pub use quad::{Integral, QuadStats, QuadratureSpec, SingularityHint};
pub use report::{Check, VerificationReport};
