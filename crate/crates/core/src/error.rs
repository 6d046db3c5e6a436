use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("polynomial of degree {0} has no roots to find")]
    DegreeZero(usize),

    #[error("point is not a root: residual {residual:e} exceeds {bound:e}")]
    NotARoot { residual: f64, bound: f64 },

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("rational map has degree {0}; maps of degree at least two are required")]
    DegreeTooLow(usize),

    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,

    #[error("seed point lies in the exceptional set")]
    ExceptionalSeed,

    #[error("beta = {beta} is outside the regime where this state exists: {reason}")]
    OutOfRegime { beta: f64, reason: String },

    #[error("point is not a branched point")]
    NotABranchPoint,

    #[error("atom budget of {0} exceeded")]
    AtomBudgetExceeded(usize),

    #[error("measure is not F_beta-subinvariant: atom weight {weight:e} after subtraction")]
    NotSubinvariant { weight: f64 },

    #[error("no divergence witness found within depth {0} (inconclusive)")]
    WitnessNotFoundAtDepth(usize),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::DegreeZero(_) => "DegreeZero",
            Error::NotARoot { .. } => "NotARoot",
            Error::Syntax { .. } => "SyntaxError",
            Error::DegreeTooLow(_) => "DegreeTooLow",
            Error::DivisionByZeroPolynomial => "DivisionByZeroPolynomial",
            Error::ExceptionalSeed => "ExceptionalSeed",
            Error::OutOfRegime { .. } => "OutOfRegime",
            Error::NotABranchPoint => "NotABranchPoint",
            Error::AtomBudgetExceeded(_) => "AtomBudgetExceeded",
            Error::NotSubinvariant { .. } => "NotSubinvariant",
            Error::WitnessNotFoundAtDepth(_) => "WitnessNotFoundAtDepth",
            Error::InternalConsistency(_) => "InternalConsistency",
            Error::InvalidSystem(_) => "InvalidSystem",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
