use alloc::string::String;

/// Errors raised by the core kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid detector config: {0}")]
    Config(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("empty sample")]
    EmptySample,
    #[error("both classes must be present (positives={positives}, negatives={negatives})")]
    SingleClass { positives: usize, negatives: usize },
    #[error("zero-norm vector")]
    ZeroNorm,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("confidence {value} out of [0,1] for tweet {tweet_id}, column {column}")]
    ConfidenceRange {
        tweet_id: String,
        column: String,
        value: f64,
    },
    #[error("duplicate tweet id {0}")]
    DuplicateTweet(String),
    #[error("unknown characteristic {0}")]
    UnknownCharacteristic(String),
    #[error("invalid record {tweet_id}: {reason}")]
    InvalidRecord { tweet_id: String, reason: String },
}

pub type Result<T> = core::result::Result<T, Error>;
