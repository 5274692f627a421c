use thiserror::Error;

use crate::enumeration::Ball;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid preset{}: {message}", generator.as_ref().map(|g| format!(" (generator '{g}')")).unwrap_or_default())]
    Validation {
        generator: Option<String>,
        message: String,
    },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("cannot parse word '{word}': {message}")]
    WordParse { word: String, message: String },
    #[error("undecided: recursion exceeded depth {0} (preset may not be contracting)")]
    Undecided(usize),
    #[error("elements belong to different presets")]
    MixedPresets,
    #[error("path symbol {symbol} is not below arity {arity}")]
    InvalidPath { symbol: usize, arity: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("ball budget exceeded after radius {last_complete_radius}")]
    BallBudget {
        last_complete_radius: usize,
        partial: Box<Ball>,
    },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("element is outside the ball of radius {0}")]
    NotInBall(usize),
    #[error("quotient model not stabilized up to level {0}")]
    Unstabilized(usize),
    #[error("no lift available for {0}")]
    LiftUnavailable(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no data rows")]
    EmptyData,
    #[error(
        "growth mismatch at n={n}: canonical keys give {by_key}, level action gives {by_action}"
    )]
    DedupMismatch {
        n: usize,
        by_key: u64,
        by_action: u64,
    },
    #[error("soundness violation: {0}")]
    Soundness(String),
    #[error("cache file error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
