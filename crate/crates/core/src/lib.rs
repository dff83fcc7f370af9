//! Verification laboratory for mixed complex Monge-Ampère inequalities.
//!
//! The crate computes Monge-Ampère and mixed Monge-Ampère measures in two
//! regimes and checks the determinant-type inequalities between them:
//!
//! * [`hermitian`]: determinants, mixed determinants and PSD tests for
//!   complex Hessians, plus the pointwise Gårding and Minkowski gaps.
//! * [`grid`]: finite-difference complex Hessians and (mixed) Monge-Ampère
//!   densities of smooth functions sampled on uniform grids in ℂⁿ.
//! * [`toric`]: exact Dirac masses at the origin for toric (piecewise
//!   log-linear) plurisubharmonic functions via gradient images, including
//!   the two-function counterexample family where the mixed inequalities fail.
//! * [`measure`]: discrete measures, the triadic canonical approximation and
//!   cellwise domination / Hölder checks.
//!
//! Floating-point code is generic over [`Real`] (`f32`, `f64`); exact code is
//! generic over [`Field`] and instantiated with [`Rational`].

pub mod error;
pub mod geometry;
pub mod grid;
pub mod hermitian;
pub mod measure;
pub mod rational;
pub mod scalar;
pub mod toric;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Arbitrary-precision rational, the exact scalar used throughout.
pub type Rational = num_rational::BigRational;

pub type HermitianMatrix64 = hermitian::HermitianMatrix<f64>;
pub type HermitianMatrix32 = hermitian::HermitianMatrix<f32>;
pub type GridFunction64 = grid::GridFunction<f64>;
pub type GridDensity64 = grid::GridDensity<f64>;
pub type RationalPolytope = geometry::Polytope<Rational>;
pub type ExactMeasure = measure::DiscreteMeasure<Rational>;
pub type FloatMeasure = measure::DiscreteMeasure<f64>;
