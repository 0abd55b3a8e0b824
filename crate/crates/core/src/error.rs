//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no registered optimum has label {0}")]
    UnknownOptimum(usize),

    #[error(
        "bump support (radius {radius}) at optimum {target} reaches optimum {other} \
         (distance {distance})"
    )]
    OverlappingSupport {
        target: usize,
        other: usize,
        radius: f64,
        distance: f64,
    },

    #[error("point or range outside the function domain: {0}")]
    OutOfDomain(String),

    #[error("group size {m} exceeds the number of outcomes {len}")]
    GroupTooLarge { m: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
