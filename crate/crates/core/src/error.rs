use thiserror::Error;

/// Errors raised by witness construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error(
        "Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})"
    )]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("linear system is singular or ill-conditioned (condition estimate {0:e})")]
    Singular(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("parameter {name} = {value} lies outside the family range [{min}, {max}]")]
    OutOfFamily {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("degenerate denominator ({0:e})")]
    DegenerateDenominator(f64),

    #[error("POVM effect violates 0 <= E <= I (eigenvalues in [{min:e}, {max:e}])")]
    EffectViolation { min: f64, max: f64 },

    #[error("filter normalization K = {0:e} vanishes")]
    ZeroFilter(f64),

    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("invalid state basis: {0}")]
    InvalidBasis(String),

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),
}

pub type Result<T> = std::result::Result<T, Error>;
