use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("letter `{letter}` appears in an image but has no rule")]
    UnknownLetter { letter: String },

    #[error("letter `{letter}` has an empty image")]
    EmptyImage { letter: String },

    #[error("letter `{letter}` has more than one rule")]
    DuplicateRule { letter: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,

    #[error("polynomial {0} is not irreducible over the rationals")]
    Reducible(String),

    #[error("polynomial {0} is not monic")]
    NotMonic(String),

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("complex is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("submodule is not invariant under the endomorphism")]
    InvarianceViolation,

    #[error("division by zero in a number field")]
    DivisionByZero,

    #[error("eigenvalue {0} is not expanding")]
    NonExpanding(String),

    #[error("minimal polynomial {0} does not divide the characteristic polynomial")]
    MinpolyNotDivisor(String),

    #[error("not unimodular: {0}")]
    NotUnimodular(String),

    #[error("matrix is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("hypotheses not met: {0}")]
    HypothesisNotMet(String),

    #[error("tiling point needs {needed} digits, has {available}")]
    InsufficientDigits { needed: usize, available: usize },

    #[error("invalid tiling point: {0}")]
    InvalidPoint(String),

    #[error("A^m - I is singular for m = {0}")]
    SingularFixedPointSystem(usize),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    // Everything below signals an upstream bug rather than bad input.
    #[error("return homomorphism violates l(f_* h) = lambda l(h) on basis cycle {0}")]
    EigenIdentity(usize),

    #[error("K_hyp is not contained in K_lambda")]
    Containment,

    #[error("shadowing series diverges (partial sum norm {0:.3e})")]
    Divergence(f64),

    #[error("increment norm {norm:.6e} exceeds the digit bound {bound:.6e}")]
    DigitBound { norm: f64, bound: f64 },

    #[error("G value does not snap to an exact periodic point (distance {0:.3e})")]
    SnapFailure(f64),

    #[error("numerical splitting failed: {0}")]
    Splitting(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for rejected input, 3 for broken invariants.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::EigenIdentity(_)
            | Error::Containment
            | Error::Divergence(_)
            | Error::DigitBound { .. }
            | Error::SnapFailure(_)
            | Error::Splitting(_)
            | Error::Internal(_)
            | Error::InvarianceViolation => 3,
            _ => 2,
        }
    }
}
