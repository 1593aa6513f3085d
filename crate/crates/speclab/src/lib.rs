//! speclab: a numerical laboratory for spectral decomposition of finite
//! operator models with purely imaginary spectrum.
//!
//! The crate builds operator models A = T (⊕ Jordan blocks at i·λ_k) T⁻¹,
//! computes Riesz spectral projectors by contour integration of the resolvent,
//! exercises weighted partial-sum operators and a positive/negative spectral
//! separation integral, simulates n-times integrated groups with polynomial
//! bound fitting, and analyzes exact spectrum sequences (sphere, oscillator,
//! flat torus) for gap decay, summability, Weyl growth, and Diophantine gap
//! bounds.
//!
//! Modules mirror that pipeline:
//! - [`numerics`] — dense complex kernels (LU, spectral norm, expm, eigenvalues)
//! - [`contours`] — trapezoid-on-circle and separation-path quadrature
//! - [`projectors`] — Riesz/weighted projectors, partial sums, separation operator
//! - [`groups`] — integrated group simulation, Laplace checks, bound fitting
//! - [`spectra`] — spectrum models, gaps, summability, Diophantine estimates
//! - [`models`] — concrete matrix models and decomposition experiments
//! - [`acceptance`] — the criteria table the `verify` subcommand and the
//!   acceptance test suite both run

pub mod acceptance;
pub mod cli;
pub mod contours;
pub mod groups;
pub mod models;
pub mod numerics;
pub mod projectors;
pub mod spectra;

pub use numerics::{ComplexMatrix, ComplexVector, NumericsError};
