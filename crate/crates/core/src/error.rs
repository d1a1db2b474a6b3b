use thiserror::Error;

use crate::bilaurent::Region;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot invert a series without a leading term")]
    NotInvertible,

    #[error("product does not converge: {0}")]
    Convergence(String),

    #[error("region mismatch: {0:?} vs {1:?}")]
    RegionMismatch(Region, Region),

    #[error("unsupported expansion: {0}")]
    UnsupportedExpansion(String),

    #[error("operation requires a finite z-window")]
    WindowRequired,

    #[error("z-window exhausted: {0}")]
    WindowExhausted(String),

    #[error("key ({0}, {1}) lies outside the exact window")]
    OutsideWindow(String, String),

    #[error("monomial matrix is singular")]
    SingularMatrix,

    #[error("not a Laurent polynomial: {0}")]
    NotLaurentPolynomial(String),

    #[error("division is not exact, remainder term at zeta1^{0} zeta2^{1}")]
    InexactDivision(String, String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("{0}")]
    Parse(String),

    #[error("matrix not in the required subgroup: {0}")]
    NotInSubgroup(String),

    #[error("shift not in the required lattice: {0}")]
    NotInLattice(String),

    #[error("sample point too close to a theta zero (|theta| = {0:e})")]
    NearThetaZero(f64),

    #[error("eta multiplier failed self-validation (residual {0:e})")]
    MultiplierValidation(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
