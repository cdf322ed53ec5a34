//! Spectra of locally perturbed waveguides and Lieb–Thirring-type bounds on
//! their Riesz means.
//!
//! The guide Ω is a strip (with a bump or a Neumann window) or an
//! axisymmetric tube. For `H = −Δ − λ₁(ω₀)` the crate computes both sides of
//!
//! ```text
//! tr H₋^σ ≤ r(σ,1) · L^cl_{σ,1} · ∫ Σ_j (λ_j(ω(ξ)) − λ₁(ω₀))₋^{σ+1/2} dξ
//! ```
//!
//! the left side from a certified finite-difference eigensolve, the right
//! side from exact transverse spectra and adaptive quadrature.

pub mod discretize;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod ltbound;
pub mod quadrature;
pub mod scenario;
pub mod sparse;
pub mod special;
pub mod transverse;

pub use discretize::{assemble_strip, assemble_tube_axisym, GridSpec, SparseSymOperator};
pub use eigensolve::{eigen_below, sturm_count, EigenOptions, Spectrum, Tridiagonal};
pub use error::{Error, Result};
pub use geometry::{domain_truncation, profile_moments, CrossSection, Profile, WaveguideGeometry};
pub use quadrature::QuadratureConfig;
pub use special::bessel_zero;
pub use transverse::TransverseSpectrum;
pub use ltbound::{lt_bound, riesz_mean, BoundReport, BoundSpec};
pub use scenario::{bound_only, run_asymptotics, run_convergence, run_scenario, AsymptoticsConfig, Family, GridConfig, Scenario, ScenarioOutcome};
