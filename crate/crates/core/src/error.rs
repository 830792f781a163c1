use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} is constant (zero vector after centering)")]
    ConstantPoint(usize),
    #[error("column {0} has zero variance")]
    ZeroVarianceColumn(usize),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("k = {k} requires at least k + 1 points, cloud has {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("covariance has rank {rank}, fewer than the {dims} lens dimensions requested")]
    DegenerateCovariance { rank: usize, dims: usize },
    #[error("lens axis {axis} has zero range")]
    ZeroRange { axis: usize },
    #[error("Rips complex has {edges} edges under maxscale (cap {cap}); lower maxscale or filter the cloud")]
    ComplexTooLarge { edges: usize, cap: usize },
    #[error("expected {expected} image channel(s), found {found}")]
    ChannelMismatch { expected: usize, found: usize },
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("parse error at {location}: {reason}")]
    ParseError { location: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
