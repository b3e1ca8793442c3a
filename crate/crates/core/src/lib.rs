//! Numerical laboratory for convex Tikhonov regularisation of linear inverse
//! problems.
//!
//! The crate provides, bottom to top:
//!
//! - [`linalg`]: dense operators with a cached singular-value factorization and
//!   the spectral calculus for fractional Gram powers (F*F)^ν;
//! - [`regulariser`]: the regularisation functionals (quadratic, power sums,
//!   1D total variation, Huber) with values, proximal maps, subgradients and
//!   Bregman distances;
//! - [`solver`]: an accelerated proximal-gradient minimiser of
//!   T_α(u, v) = ½‖Fu − v‖² + αR(u) that returns the dual certificate
//!   (ω_α^δ, ξ_α^δ) with ω_α^δ = −(Fu_α^δ − v^δ)/α, ξ_α^δ = F*ω_α^δ;
//! - [`source`]: synthesis of problem instances satisfying the fractional
//!   source condition ξ† = (F*F)^ν ω† ∈ ∂R(u†), plus exact-norm noise and
//!   preset operators;
//! - [`harness`]: the exponent algebra of the three rate regimes, δ sweeps and
//!   log–log slope fitting;
//! - [`verify`]: seeded property suites (interpolation inequality, prox
//!   optimality, KKT consistency, Huber coconvexity, TV homogeneity witness).

pub mod error;
pub mod harness;
pub mod linalg;
pub mod regulariser;
pub mod solver;
pub mod source;
pub mod tv1d;
pub mod verify;

pub use error::{LabError, Result};
pub use linalg::{SpectralOperator, Vector};
pub use regulariser::{sym_bregman, ConvexityProfile, RegulariserSpec};
pub use solver::{SolveOptions, SolveResult};
pub use source::{NoisyData, OperatorKind, SourceInstance};
