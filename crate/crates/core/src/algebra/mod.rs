//! Exact complex-rational linear algebra.
//!
//! Every amplitude in this crate is a Gaussian rational ([`Scalar`]); vectors and
//! matrices are dense. Tensor products use the leftmost-factor-slowest convention:
//! the flat index of `|i₁ i₂ … iₙ⟩` in `d₁ ⊗ … ⊗ dₙ` is `(…(i₁·d₂ + i₂)·d₃ + …)+iₙ`.

mod matrix;
mod scalar;
mod vector;

pub use matrix::CMat;
pub use scalar::Scalar;
pub use vector::CVec;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: cannot view {len} entries as {rows}x{cols}")]
    Shape { len: usize, rows: usize, cols: usize },
    #[error("zero-dimensional objects are not allowed")]
    Empty,
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<(), AlgebraError> {
    if expected == found {
        Ok(())
    } else {
        Err(AlgebraError::DimensionMismatch { expected, found })
    }
}
