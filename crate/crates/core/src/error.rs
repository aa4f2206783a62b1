use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} contains a non-finite entry")]
    NonFinite { what: &'static str },

    #[error("matrix is not symmetric: max asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    Asymmetric { asymmetry: f64, tolerance: f64 },

    #[error("symmetric eigensolver failed to converge on a {n}x{n} matrix")]
    NoConvergence { n: usize },

    #[error("dimension error in {what}: {detail}")]
    Dimension { what: &'static str, detail: String },

    #[error("{what} is not column-orthonormal (deviation {deviation:e})")]
    NotOrthonormal { what: &'static str, deviation: f64 },

    #[error("invalid edge probability {value} in layer {layer}")]
    InvalidProbability { layer: usize, value: f64 },

    #[error("degenerate partition: community {community} has {size} member(s)")]
    DegeneratePartition { community: usize, size: usize },

    #[error("exhaustive search refused: {what} = {value} exceeds the cap of {cap}")]
    TooLarge { what: &'static str, value: usize, cap: usize },

    #[error("cannot form {clusters} clusters from {points} points")]
    Infeasible { points: usize, clusters: usize },

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("gene `{gene}` has zero variance")]
    ZeroVariance { gene: String },

    #[error("statistic undefined: {0}")]
    Undefined(&'static str),

    #[error("every node was removed by the filter")]
    EmptyResult,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
