use thiserror::Error;

/// Errors raised by the library. Each variant names the violated contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("invalid sequence descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("explicit terms are not a divisibility chain: {prev} does not divide {next} (index {index})")]
    NotDivisibilityChain { index: usize, prev: String, next: String },

    #[error("finite chain has {available} terms, {requested} requested")]
    ChainExhausted { available: usize, requested: usize },

    #[error("index {index} is beyond the materialized horizon {horizon}")]
    OutOfHorizon { index: u64, horizon: u64 },

    #[error("index arithmetic overflowed u64 at block {block}")]
    IndexOverflow { block: usize },

    #[error("interval width {width} is at least 1/2; enclosure would be vacuous")]
    ImpreciseInput { width: String },

    #[error("epsilon {0} violates 0 < eps < 1/9")]
    InvalidEpsilon(String),

    #[error("ratio sup {sup} exceeds cap {cap} on the prefix up to index {horizon}")]
    UnboundedRatiosAtHorizon { sup: String, cap: String, horizon: u64 },

    #[error("no witness within horizon {horizon}")]
    HorizonExhausted { horizon: u64 },

    #[error("denominator {0} does not fit in 64 bits")]
    DenominatorTooLarge(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ParseRational(_) => "parse_rational",
            Error::InvalidDescriptor(_) => "invalid_descriptor",
            Error::NotDivisibilityChain { .. } => "not_divisibility_chain",
            Error::ChainExhausted { .. } => "chain_exhausted",
            Error::OutOfHorizon { .. } => "out_of_horizon",
            Error::IndexOverflow { .. } => "index_overflow",
            Error::ImpreciseInput { .. } => "imprecise_input",
            Error::InvalidEpsilon(_) => "invalid_epsilon",
            Error::UnboundedRatiosAtHorizon { .. } => "unbounded_ratios_at_horizon",
            Error::HorizonExhausted { .. } => "horizon_exhausted",
            Error::DenominatorTooLarge(_) => "denominator_too_large",
            Error::Hypothesis(_) => "hypothesis",
        }
    }
}
