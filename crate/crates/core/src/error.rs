use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Rank outside the supported range (the surface alphabet is `a`..`z`).
    #[error("rank must be between 1 and 26, got {0}")]
    InvalidRank(usize),

    /// A letter refers to a generator the ambient rank does not have.
    #[error("letter index {index} out of range for rank {rank}")]
    LetterOutOfRange { index: usize, rank: usize },

    /// A surface string could not be read as a word.
    #[error("cannot parse word {text:?}: {reason}")]
    InvalidWord { text: String, reason: String },

    /// The folded subgroup graph is incomplete, so the subgroup has
    /// infinite index and no Schreier automaton.
    #[error("subgroup has infinite index (folded graph is not complete)")]
    InfiniteIndex,

    /// A product construction grew past its configured bound.
    #[error("resource limit exceeded: {0}")]
    ResourceExceeded(String),

    /// A set of coset pairs cannot form a partition point.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// Malformed partition file.
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    /// A parameter outside its documented range (for example `r`).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
