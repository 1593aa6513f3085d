//! Dense complex linear algebra kernels.
//!
//! Everything downstream (contour quadrature, spectral projectors, integrated
//! groups) reduces to a handful of desk-scale dense operations collected here:
//! LU solves with partial pivoting, the spectral norm (largest singular
//! value), the matrix exponential, and an eigenvalue routine used for
//! diagnostics and safety pre-checks. Dimensions in this crate are tens, not
//! thousands, so the implementations are the classical dense ones with no
//! attempt at blocking or sparsity.
//!
//! The operator norm used for every tolerance in the crate is the spectral
//! norm; `one_norm`/`inf_norm` exist as cheap diagnostics only.

mod eig;
mod expm;
mod fitting;
mod lu;
mod matrix;
mod qr;
mod svd;

pub use eig::eigenvalues;
pub use expm::mat_exp;
pub use fitting::{linear_fit, log_log_fit_top_decade, LineFit};
pub use lu::{lu_solve, LuFactorization};
pub use matrix::{ComplexMatrix, ComplexVector};
pub use qr::qr_unitary;
pub use svd::{condition_number, op_norm, range_basis, singular_values};

use thiserror::Error;

/// numeric scalar used everywhere in the crate.
pub type Scalar = num_complex::Complex64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    /// a constructor was handed NaN or infinity.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// operand shapes do not line up.
    #[error("dimension mismatch in {op}: left is {lhs_rows}x{lhs_cols}, right is {rhs_rows}x{rhs_cols}")]
    DimensionMismatch {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },

    /// a square-only operation was handed a rectangular matrix.
    #[error("matrix is {rows}x{cols} but the operation needs a square matrix")]
    NotSquare { rows: usize, cols: usize },

    /// elimination hit a pivot below the deflation floor (1e-300).
    #[error("singular matrix: pivot {pivot_index} collapsed")]
    SingularMatrix { pivot_index: usize },

    /// an intermediate quantity left the representable range of f64.
    #[error("overflow: intermediate result exceeded the floating-point range")]
    Overflow,

    /// an iteration failed to converge within its budget; desk-scale inputs
    /// should never get here, so this generally indicates a malformed model.
    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },
}
