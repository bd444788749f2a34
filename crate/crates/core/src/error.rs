use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("root not bracketed on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("non-finite function value at {0}")]
    Eval(f64),
    #[error("out of range: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("point too close to the contour: {0}")]
    NearSingular(String),
    #[error("point too close to a branch cut: {0}")]
    NearCut(String),
    #[error("regularity failure: {0}")]
    Regularity(String),
    #[error("degenerate linear system: {0}")]
    Degeneracy(String),
    #[error("saddle points coalesce: {0}")]
    Coalescence(String),
}

impl Error {
    /// Short kebab-case name, used by the CLI for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Bracket { .. } => "bracket-error",
            Error::Eval(_) => "eval-error",
            Error::Range(_) => "range-error",
            Error::Domain(_) => "domain-error",
            Error::Convergence(_) => "convergence-error",
            Error::NoSolution(_) => "no-solution-error",
            Error::NearSingular(_) => "near-singular-error",
            Error::NearCut(_) => "near-cut-error",
            Error::Regularity(_) => "regularity-error",
            Error::Degeneracy(_) => "degeneracy-error",
            Error::Coalescence(_) => "coalescence-error",
        }
    }
}
