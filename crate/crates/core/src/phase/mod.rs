//! Phase values: rational angles in `ℚ/ℤ`, and exact cyclotomic scalars and
//! matrices for the module decomposition.

mod angle;
mod cyclotomic;
mod matrix;

use thiserror::Error;

pub use angle::{Angle, AngleParseError};
pub(crate) use cyclotomic::rat;
pub use cyclotomic::{
    conductor_for, cyclotomic_polynomial, embed_angle, euler_phi, CyclotomicField, CyclotomicScalar, Polynomial,
    Rational, MAX_CONDUCTOR,
};
pub use matrix::{CycloMatrix, RowEchelon};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("incompatible conductor: working in conductor {expected}, got {found}")]
    IncompatibleConductor { expected: u64, found: u64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("malformed scalar '{0}'")]
    MalformedScalar(String),
}
