use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("payoffs violate the prisoner's dilemma ordering: {0}")]
    PayoffOrdering(String),
    #[error("probability {value} for {what} is outside [0, 1]")]
    ProbabilityOutOfRange { what: String, value: f64 },
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("invalid strategy literal `{0}`")]
    MalformedStrategy(String),
    #[error("power transform needs k >= 1, got {0}")]
    ZeroPower(u32),
    #[error("exponential transform needs h != 0")]
    ZeroExponent,
    #[error("exp(h * payoff) out of range: |h| * max|payoff| = {0} exceeds 700")]
    ExponentRange(f64),
    #[error("transform {0} is only defined on raw payoff vectors")]
    UnsupportedTransform(String),
    #[error("denominator T^k - S^k vanishes at k = {0}")]
    DegenerateDenominator(u32),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("singular system (rank {rank} < {size})")]
    Singular { rank: usize, size: usize },
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("empty sample: burn-in {burn_in} leaves no rounds out of {rounds}")]
    EmptySample { rounds: u64, burn_in: u64 },
    #[error("noise epsilon {0} outside [0, 0.5]")]
    EpsilonOutOfRange(f64),
    #[error("invalid joint state `{0}`")]
    UnknownState(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
