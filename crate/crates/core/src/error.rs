use thiserror::Error;

/// Errors raised by the channel model, the divergence kernel, the encoders and the session loop.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("channel matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("row {row} sums to {sum}, not 1")]
    NonStochasticRow { row: usize, sum: f64 },
    #[error("entry ({row}, {col}) is negative or not finite: {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("all rows of the channel are identical, capacity is zero")]
    DegenerateChannel,
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("capacity iteration did not converge after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("channel has a zero transition probability, C2 is infinite")]
    InfiniteC2,
    #[error("search space of {size} candidates exceeds the limit {limit}")]
    SearchSpaceTooLarge { size: f64, limit: usize },
    #[error("distributions have different support sizes ({left} vs {right})")]
    SupportMismatch { left: usize, right: usize },
    #[error("weight vector has {weights} entries but the family has {family} distributions")]
    WeightDimensionMismatch { weights: usize, family: usize },
    #[error("EJS divergence needs at least two distributions, got {0}")]
    DegenerateM(usize),
    #[error("not a probability vector: {0}")]
    InvalidDistribution(String),
    #[error("explicit support has {size} atoms, limit is {limit}")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("Monte Carlo estimate requested with zero samples")]
    ZeroSamples,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("output {y} has zero predictive probability")]
    ImpossibleObservation { y: usize },
    #[error("scheme requires a binary-input channel, channel has {0} inputs")]
    NotBinaryInput(usize),
    #[error("no valid {k}-ary partition found")]
    NoValidPartitionFound { k: usize },
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("scheme `{scheme}` cannot run on this channel: {reason}")]
    SchemeChannelMismatch { scheme: String, reason: String },
    #[error("unknown scheme identifier `{0}`")]
    UnknownScheme(String),
    #[error("session reached the step cap of {steps} without crossing the threshold")]
    MaxStepsExceeded { steps: usize },
    #[error("channel file: {0}")]
    ChannelFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
