use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-manifold mesh: {0}")]
    NonManifold(String),

    #[error("degenerate triangle {0} (area {1:e})")]
    DegenerateTriangle(usize, f64),

    #[error("edge {0} lies on the outer boundary and cannot be part of a cut")]
    BoundaryEdgeInCut(usize),

    #[error("vertex pair ({0}, {1}) is not an edge of the mesh")]
    NotAnEdge(usize, usize),

    #[error("objects belong to different meshes")]
    MismatchedMesh,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver did not converge: {0}")]
    Convergence(String),

    #[error("subdomain is empty")]
    EmptySubdomain,

    #[error("subdomain is not dual-connected ({0} components)")]
    DisconnectedSubdomain(usize),

    #[error("field vanishes identically")]
    ZeroField,

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for failures of the numerical pipeline (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Factorization(_) | Error::Convergence(_))
    }
}
