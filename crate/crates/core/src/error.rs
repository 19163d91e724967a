use thiserror::Error;

/// Errors produced by the symbolic and numeric layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("exponent at position {pos} is not a non-negative integer")]
    NonIntegerExponent { pos: usize },

    #[error("division by a non-constant expression at position {pos}")]
    NonConstantDivisor { pos: usize },

    #[error("division by zero at position {pos}")]
    DivisionByZero { pos: usize },

    #[error("cyclic substitution: `{0}` is bound and also appears in a replacement")]
    CyclicBinding(String),

    #[error("jet order {needed} exceeds the maximum order {max} of the jet space")]
    HeadroomExhausted { needed: u32, max: u32 },

    #[error("invalid jet space: {0}")]
    InvalidSpace(String),

    #[error("invalid Lagrangian: {0}")]
    InvalidLagrangian(String),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("gauge term has {got} components but the problem has {expected} independent variables")]
    GaugeDimension { expected: usize, got: usize },

    #[error("not a Noether symmetry, condition residual is {0}")]
    NotASymmetry(String),

    #[error("conservation law does not verify, divergence reduces to {0}")]
    NotConserved(String),

    #[error("reduction modulo the Euler-Lagrange equations is unavailable: {0}")]
    ReductionUnavailable(String),

    #[error("reduction did not reach a fixpoint within {0} substitutions")]
    ReductionDiverged(usize),

    #[error("invalid numeric configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
