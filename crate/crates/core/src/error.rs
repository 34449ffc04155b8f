use thiserror::Error;

/// Errors raised by the construction and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TodaError {
    #[error("rank must be at least 1, got {0}")]
    InvalidRank(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial expected to be real-valued has imaginary residue {residue:e} at the evaluation point")]
    NotReal { residue: f64 },

    #[error("group element is singular (|det| = {det_abs:e})")]
    SingularGroupElement { det_abs: f64 },

    #[error("curve is degenerate: {0}")]
    DegenerateCurve(DegeneracyCertificate),

    #[error("normalization unavailable: Wronskian is not constant (degree {degree}); the curve is ramified")]
    NormalizationUnavailable { degree: usize },

    #[error("ladder is not normalized")]
    NotNormalized,

    #[error("point {re} + {im}i lies outside the field domain or on a singularity")]
    SingularPoint { re: f64, im: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singularity exponent mu_{index} = {value} violates mu < 2")]
    ExponentTooLarge { index: usize, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

/// Evidence that the components of a curve are linearly dependent.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyCertificate {
    /// Largest coefficient modulus of the Wronskian.
    pub wronskian_max_coeff: f64,
    /// Numerical rank of the coefficient matrix of the components.
    pub rank: usize,
    /// Coefficients c_m (as `[re, im]`) with sum_m c_m p_m = 0.
    pub relation: Vec<[f64; 2]>,
}

impl std::fmt::Display for DegeneracyCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Wronskian vanishes identically (max |coeff| = {:e}), component rank {}, relation {:?}",
            self.wronskian_max_coeff, self.rank, self.relation
        )
    }
}

pub type Result<T> = std::result::Result<T, TodaError>;
