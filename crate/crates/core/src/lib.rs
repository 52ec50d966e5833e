//! Dense complex linear algebra built around blocked multi-shift triangular
//! solves.
//!
//! The central primitive is back substitution against one upper triangular
//! matrix `U` and many shifted systems `(U - lambda_j I) x_j = b_j`, organized
//! so that almost all floating-point work lands in matrix-matrix products.
//! On top of that sit:
//!
//! * safeguarded (overflow-proof) solve variants that return a per-column
//!   scale `s_j` in `(0, 1]` with `(U - lambda_j I) x_j = s_j b_j`,
//! * triangular and general eigensolvers driven by the safeguarded solver,
//! * resolvent-norm fields over complex-plane grids (pseudospectra) computed
//!   with batched Lanczos iterations whose inner loop is a pair of
//!   multi-shift triangular solves.
//!
//! Everything is double-precision complex ([`num_complex::Complex64`]) in
//! column-major storage.

pub mod eig;
pub mod error;
pub mod flops;
pub mod gemm;
pub mod generators;
pub mod matrix;
pub mod multishift;
pub mod pseudo;
pub mod safe;
pub mod schur;
pub mod svd;
pub mod triangular;

pub mod util;

pub use error::{Error, Result};
pub use matrix::{ColumnNorms, DenseMatrix, MatMut, MatRef, TriangularRef, Uplo};
pub use num_complex::Complex64;
