use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("geometry is disconnected")]
    Disconnected,
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("not a near polygon: point {point} has no unique nearest point on line {line}")]
    NotNearPolygon { point: usize, line: usize },
    #[error("structure violation: {0}")]
    Structure(String),
    #[error("unclassified hyperplane signature: {0}")]
    OrphanSignature(String),
    #[error("unknown geometry '{0}'")]
    UnknownGeometry(String),
    #[error("expected-table data: {0}")]
    ExpectedData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
