//! Error type shared across the engine.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("basis mismatch: operands live over different coframes")]
    BasisMismatch,

    #[error("form is in a real coframe with no complex structure attached")]
    NoComplexStructure,

    #[error("matrix is not positive definite: leading principal minor {index} is {value}")]
    NotPositiveDefinite { index: usize, value: String },

    #[error("deformed coframe is degenerate (change of basis not invertible)")]
    DegenerateDeformation,

    #[error("parameter outside the declared domain: {0}")]
    DomainError(String),

    #[error("instanton model not supported on this family point: {0}")]
    UnsupportedModel(String),

    #[error("(3,0)-form is not closed, hence not holomorphic")]
    NotHolomorphic,

    #[error("torsion input must be a real 3-form")]
    ConventionError,

    #[error("(2,2)-form is not strictly positive")]
    NotPositive,

    #[error("unbound parameter `{0}` at compute time")]
    UnboundParameter(String),

    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("non-rational literal in exact mode at line {line}, column {col}")]
    NonRationalLiteral { line: usize, col: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("scalar is not real where a real value is required")]
    NotReal,

    #[error("no exact rational square root of {0}")]
    IrrationalSqrt(String),

    #[error("cannot parse scalar literal `{0}`")]
    ScalarParse(String),

    #[error("linear system is singular")]
    SingularSystem,
}
