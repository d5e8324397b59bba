//! Classical integrable systems on the Cayley–Klein family of
//! N-dimensional spaces of constant curvature: the three Riemannian spaces
//! (κ2 > 0) and the three relativistic spacetimes (κ2 < 0).
//!
//! Geometry and observables are generic over a [`Scalar`], so the same
//! code evaluates values, gradients and Hessians through nested dual
//! numbers. Exact polynomial certificates live in [`exact_poisson`],
//! randomized ones in [`harness`].

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod exact_poisson;
pub mod generators;
pub mod geometry;
pub mod harness;
pub mod kappa_trig;
pub mod observable;
pub mod observables;
pub mod scalar;

pub use algebra::Gen;
pub use dynamics::{integrate, IntegratorConfig, Method, Trajectory};
pub use error::{Error, Result};
pub use geometry::SpaceSpec;
pub use harness::{SampleConfig, SuiteReport, VerificationReport};
pub use observable::{Observable, PhasePoint};
pub use observables::{Betas, Chain, RadialFn, SystemKind};
pub use scalar::{Dual, Scalar};

/// First-order dual over `f64`: value and one directional derivative.
pub type Dual64 = Dual<f64>;
/// Second-order dual over `f64`, used for Hessian entries.
pub type HyperDual64 = Dual<Dual<f64>>;
pub type PhasePoint64 = PhasePoint<f64>;
pub type PolarCoords64 = geometry::PolarCoords<f64>;
pub type AmbientPoint64 = geometry::AmbientPoint<f64>;
