use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not invertible: constant term is not a unit (valuation {valuation:?})")]
    NotInvertible { valuation: Option<usize> },

    #[error("nonzero constant term: exp is only defined for series vanishing at 0")]
    NonzeroConstantTerm,

    #[error("composition undefined: inner series has nonzero constant term")]
    CompositionUndefined,

    #[error("not invertible for composition: linear coefficient is not a unit")]
    NotInvertibleForComposition,

    #[error("exact scalar division failed: {0}")]
    InexactDivision(String),

    #[error("series not divisible: dividend valuation below divisor valuation")]
    NotDivisible,

    #[error("not in span at available order (residual valuation {residual_valuation:?})")]
    NotInSpan { residual_valuation: Option<usize> },

    #[error("effective order exhausted: valuation loss {loss} meets truncation order {order}")]
    OrderExhausted { loss: usize, order: usize },

    #[error("zero generator")]
    ZeroGenerator,

    #[error("insufficient weight cap: need {needed}, have {have}")]
    InsufficientWeightCap { needed: usize, have: usize },

    #[error("unit normalization violated: S_{index}(0) != 1")]
    UnitNormalization { index: usize },

    #[error("not a theme: {0}")]
    NotATheme(String),

    #[error("generator does not have rank {rank} at this order")]
    RankMismatch { rank: usize },

    #[error("input not regular at this order (saturation did not stabilize)")]
    NotRegular,

    #[error("not a simple-pole module: action matrix entry has valuation 0")]
    NotSimplePole,

    #[error("derivation/truncation fault: {0}")]
    DerivationFault(String),

    #[error("order insufficient: reports at order {0} and {1} disagree")]
    OrderInsufficient(usize, usize),

    #[error("not k-thematic: a^k does not lie in the series span of lower powers")]
    NotThematic,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
