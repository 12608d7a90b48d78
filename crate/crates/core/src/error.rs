use thiserror::Error;

use crate::word_algebra::Letter;

/// Errors raised by the expansion engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("letter {letter} is outside the alphabet (d={d}, e={e}, m={m})")]
    InvalidLetter { letter: Letter, d: u16, e: u16, m: u16 },

    #[error("invalid alphabet configuration: {0}")]
    Configuration(String),

    #[error("word {word} contains jump letters; use the bar-star product")]
    JumpLetterInStar { word: String },

    #[error("jump power {power} of driver {driver} exceeds depth m = {m}; raise m and retry")]
    DepthOverflow { driver: u16, power: u16, m: u16 },

    #[error("no value assigned to symbol `{0}`")]
    MissingSymbol(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("moment order {k} requires integrability N with k < 2N (N = {n_integrability})")]
    Integrability { k: u32, n_integrability: String },

    #[error("f supplies derivatives up to order {available}, but order {needed} is required")]
    DerivativeOrder { needed: usize, available: usize },

    #[error("combinatorial budget exceeded: about {estimate} evaluations requested, budget is {budget}")]
    Resource { estimate: u128, budget: u128 },

    #[error("structure check failed; offending words: {violators:?}")]
    Structure { violators: Vec<String>, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLetter { .. } => "invalid_letter",
            Error::Configuration(_) => "configuration",
            Error::JumpLetterInStar { .. } => "alphabet",
            Error::DepthOverflow { .. } => "depth_overflow",
            Error::MissingSymbol(_) => "missing_symbol",
            Error::Precondition(_) => "precondition",
            Error::Integrability { .. } => "integrability",
            Error::DerivativeOrder { .. } => "derivative_order",
            Error::Resource { .. } => "resource",
            Error::Structure { .. } => "structure",
            Error::Parse(_) => "parse",
        }
    }
}
