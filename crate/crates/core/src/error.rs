use thiserror::Error;

/// Failures while reading one of the text forms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational `{0}` (expected `num` or `num/den`)")]
    Rational(String),
    #[error("malformed basis symbol `{0}`")]
    Symbol(String),
    #[error("malformed algebra element `{0}`")]
    Element(String),
    #[error("malformed Fock vector `{0}`")]
    Fock(String),
    #[error("malformed module family `{0}`")]
    Family(String),
    #[error("malformed case `{0}`")]
    Case(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("zero element has no grade")]
    ZeroElement,

    #[error("zero vector has no t-degree")]
    ZeroVector,

    #[error("family {family} expects parameters {{{expected}}}, got {{{got}}}")]
    Arity {
        family: String,
        expected: String,
        got: String,
    },

    #[error("parameter {param} of {family} must be nonzero")]
    ParameterDomain { family: String, param: &'static str },

    #[error("no simplicity criterion is available for family {0}")]
    UnsupportedFamily(String),

    #[error("window too small: {0}")]
    Window(String),

    #[error("scale factor vanishes at index {0}")]
    VanishingScale(i64),

    #[error("index set is neither a submodule nor the complement of one: {0}")]
    InvalidSubquotient(String),

    #[error("classification mismatch in {case}: {detail}")]
    ClassificationMismatch { case: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
