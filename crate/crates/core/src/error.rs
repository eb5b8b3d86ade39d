use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("substitution image for `{0}` mentions `{0}` itself")]
    SelfSubstitution(String),
    #[error("Grassmann algebras differ: Λ({0}) vs Λ({1})")]
    GrassmannMismatch(usize, usize),
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown module basis element `{0}`")]
    UnknownBasis(String),
    #[error("invalid algebra data: {0}")]
    InvalidAlgebra(String),
    #[error("invalid module data: {0}")]
    InvalidModule(String),
    #[error("{0} is outside the supported range")]
    Unsupported(String),
    #[error("map is not conformal-linear: {0}")]
    NotConformalLinear(String),
    #[error("degree bound {requested} is not allowed: {reason}")]
    DegreeBound { requested: u32, reason: String },
    #[error("cochain component ({n}, {weight}) has {size} basis elements, above the limit {limit}")]
    ComponentTooLarge {
        n: usize,
        weight: String,
        size: usize,
        limit: usize,
    },
    #[error("grading error: {0}")]
    Grading(String),
    #[error("window exhausted: {0}")]
    WindowExhausted(String),
    #[error("distribution is not local within the window")]
    NotLocal,
    #[error("mismatched operands: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
