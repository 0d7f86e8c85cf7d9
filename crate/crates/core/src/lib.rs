//! Pointwise curvature engine and inequality verifier for C-totally real
//! submanifolds of generalized (κ,μ)-space forms with divided R5.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] – dense symmetric/skew operators, subspaces, seeded randomness.
//! * [`ambient`] – the ambient tangent space (φ, ξ, η, h, f-coefficients) and
//!   its curvature tensor.
//! * [`submanifold`] – a C-totally real tangent plane with its second
//!   fundamental form, shape operators and Gauss-equation curvature.
//! * [`invariants`] – τ, K(π), k-Ricci, Ricci tensor, θ_k, δ-invariants and
//!   the Grassmannian searches behind the infima.
//! * [`inequalities`] – both sides of every Chen-type inequality, slack
//!   reports and equality-form detectors.
//! * [`forge`] – deterministic instance generators and brute-force oracles.
//! * [`cli`] – batch commands (`gen`, `check`, `sweep`, `oracle`, `report`).

pub mod ambient;
pub mod cli;
pub mod error;
pub mod forge;
pub mod inequalities;
pub mod invariants;
pub mod linalg;
pub mod submanifold;

pub use ambient::{
    ambient_curvature, classify_sasakian, curvature_component, kappa_mu_coefficients,
    non_sasakian_divided_coefficients, validate_ambient, AmbientPoint, CurvatureTerm,
    FCoefficients, Violation,
};
pub use error::{Error, Result};
pub use linalg::{min_eigenvalue, orthonormalize, random_orthogonal, SkewOp, Subspace, SymOp, Vector};
pub use submanifold::{build_submanifold, ShapeOperatorSet, SubmanifoldPoint};
