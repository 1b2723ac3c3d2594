use thiserror::Error;

/// Which end of the radial interval a boundary condition refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Inner,
    Outer,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("dimension n = {0} is not supported by this operation")]
    UnsupportedDimension(usize),
    #[error("invalid state: {0}")]
    InvalidState(&'static str),
    #[error("no admissible boundary values at the {0:?} boundary")]
    BoundaryFailure(Side),
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("run record carries no snapshots")]
    NeedsSnapshots,
    #[error("runs do not match figure {figure}: {reason}")]
    FigureMismatch { figure: u8, reason: &'static str },
    #[error("linear solve failed: singular matrix")]
    Singular,
}
