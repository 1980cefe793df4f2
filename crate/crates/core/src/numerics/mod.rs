//! Small numerical kernel: dense complex matrices, Hermitian eigensystems,
//! special functions and a bracketed scalar maximiser.
//!
//! Everything here is a pure function of its inputs.

mod eig;
mod matrix;
mod optimize;
mod special;

pub use eig::{herm_eig2, herm_eig2_entries, herm_eig_n, EigSys2, HermEig, MAX_EIG_DIM};
pub use matrix::ComplexMat;
pub use optimize::{maximize_scalar, COARSE_POINTS};
pub use special::{bessel_j0, expint_e1, expint_en, expint_scaled_all};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e} exceeds tolerance {tolerance:.3e})")]
    NonHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix is indefinite: eigenvalue {eigenvalue:.3e} is below the clamping threshold")]
    IndefiniteMatrix { eigenvalue: f64 },
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("singular linear system")]
    Singular,
    #[error("invalid bracket [{lo}, {hi}]")]
    BadBracket { lo: f64, hi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
}
