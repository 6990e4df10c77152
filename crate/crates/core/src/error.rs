//! Error taxonomy for the whole library.
//!
//! Each subsystem gets its own enum so callers can match on the exact
//! failure; `Error` is the catch-all used at the CLI boundary.

use thiserror::Error;

/// Errors from exact scalar arithmetic.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor {0} exceeds the configured cap {1}")]
    ConductorCap(u64, u64),
    #[error("cannot parse scalar literal `{0}`: {1}")]
    Parse(String, String),
}

/// Errors from Lie algebra construction and validation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("inconsistent shapes: {0}")]
    Shape(String),
    #[error("antisymmetry fails on basis pair ({0}, {1})")]
    Antisymmetry(usize, usize),
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("bilinear form is not symmetric at ({0}, {1})")]
    FormAsymmetric(usize, usize),
    #[error("bilinear form is not invariant on basis triple ({0}, {1}, {2})")]
    FormNotInvariant(usize, usize, usize),
    #[error("bilinear form is degenerate (rank {0} < dim {1})")]
    FormDegenerate(usize, usize),
    #[error("Casimir operator on the adjoint is not a positive rational scalar; the algebra is not simple or the form is not normalized")]
    CasimirNotScalar,
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
}

/// Errors from automorphism analysis.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AutError {
    #[error("matrix is not a Lie algebra automorphism: bracket mismatch on basis pair ({0}, {1})")]
    NotAutomorphism(usize, usize),
    #[error("matrix does not preserve the bilinear form on basis pair ({0}, {1})")]
    FormNotPreserved(usize, usize),
    #[error("matrix is not invertible")]
    Singular,
    #[error("eigenvalue is not a root of unity; only rational spectral exponents are supported")]
    UnsupportedAlpha,
    #[error("constant part of the matrix is not semisimple; supply the unipotent factor as an exponential in 2*pi*i")]
    NonSemisimpleConstantPart,
    #[error("matrix is not of the form (semisimple) * exp(2*pi*i * nilpotent)")]
    NotExponentialForm,
    #[error("eigenvalue of ad(x) is not rational")]
    IrrationalAdEigenvalue,
    #[error("no inner generator: ad(y) = N has no solution")]
    NoInnerGenerator,
    #[error("algebra is not semisimple (degenerate Killing form)")]
    NotSemisimple,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Errors from twisted affine algebra and module computations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModuleError {
    #[error("degree {degree} does not lie in the coset {coset} + Z of generator {index}")]
    CosetMismatch {
        index: usize,
        degree: String,
        coset: String,
    },
    #[error("level equals -h^v = {0}; Sugawara operators are undefined")]
    CriticalLevel(String),
    #[error("mode `{0}` requires an iota action on the generator space")]
    MissingIotaAction(String),
    #[error("iota action is not a representation of the degree-zero subalgebra at this level: defect on ({0}, {1})")]
    BadIotaAction(usize, usize),
    #[error("generator space is not compatible with the automorphism: {0}")]
    BadGeneratorSpace(String),
    #[error("generator weight is not rational: {0}")]
    NonRationalWeight(String),
    #[error("generator {0} has no well-defined weight: it mixes distinct generalized eigenspaces")]
    AmbiguousWeight(usize),
    #[error("result of weight {0} exceeds the cutoff {1}")]
    CutoffExceeded(String, String),
    #[error("mode `{0}` does not support this operation")]
    WrongMode(String),
    #[error("requested weight {0} is beyond the certified margin {1}")]
    MarginViolation(String, String),
    #[error("quotient construction requires a positive integer level, got {0}")]
    NonIntegralLevel(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Errors from config parsing and the CLI boundary.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Toml(String),
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("cannot parse element expression `{0}`: {1}")]
    Element(String, String),
}

/// Top-level error wrapper.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl Error {
    /// Process exit code classification: 1 usage, 2 math-domain, 3 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Scalar(ScalarError::Parse(..)) => 1,
            Error::Lie(LieError::UnknownLabel(_)) => 1,
            _ => 2,
        }
    }
}
