use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("perturbation failed after {0} attempts")]
    PerturbationFailed(usize),
    #[error("ray casting stayed degenerate after {0} retries")]
    RayDegeneracy(usize),
    #[error("disks do not separate the query points")]
    NotSeparated,
    #[error("no path between the terminals")]
    NoPath,
    #[error("cutting path construction failed: {0}")]
    PiConstructionFailed(String),
    #[error("no piece cycle exists in the piece graph")]
    NoPieceCycle,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("internal error: {0}")]
    InternalError(String),
    #[error("a target point lies in no disk")]
    Uncoverable,
    #[error("{0} disks exceed the enumeration limit of {1}")]
    TooLarge(usize, usize),
    #[error("grid verifier could not certify an answer at any resolution")]
    ResolutionExhausted,
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
