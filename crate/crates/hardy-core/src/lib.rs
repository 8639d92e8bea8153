//! Numerical verification of Hardy-type inequalities on homogeneous
//! groups.
//!
//! The crate provides the group/gauge layer (dilations, quasi-norms,
//! polar decomposition), certified quadrature for single and double
//! integrals, the weight and test-function vocabulary, closed-form and
//! quadrature routes for the sharp constants, and a verdict engine that
//! compares both sides of each inequality with explicit error margins.

pub mod error;
pub mod geometry;
pub mod group;
pub mod point;
pub mod qnorm;
pub mod quad;
pub mod constants;
pub mod functionals;
pub mod functions;
pub mod report;
pub mod search;
pub mod space;
pub mod verifier;
pub mod weights;

pub use error::{Error, Result};
pub use group::{GroupLaw, GroupSpec};
pub use point::Point;
pub use qnorm::{QuasiNormKind, QuasiNormSpec};
pub use quad::{EvalBudget, IntegralResult};
pub use space::Space;
pub use verifier::{Scenario, TheoremKind, Verdict, VerificationReport, WeightSet};
