use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type. Every variant carries enough context to print a
/// single actionable line on stderr.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line_no}: expected at least two vertex tokens, got {content:?}")]
    MalformedLine { line_no: usize, content: String },

    #[error("graph is empty after cleaning")]
    EmptyGraph,

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },

    #[error("self-loop ({0},{0}) is not allowed")]
    SelfLoop(u32),

    #[error("edge ({0},{1}) already present")]
    EdgeExists(u32, u32),

    #[error("edge ({0},{1}) not present")]
    EdgeMissing(u32, u32),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("removing edge ({0},{1}) disconnects the graph")]
    BridgeEdge(u32, u32),

    #[error(
        "no remaining edge-disjoint shortest path (P2 for non-adjacent pairs, P3 for edges) \
         for {} pair(s), first {:?}; the graph is not sufficiently edge-connected \
         for the remove-edge mechanism",
        pairs.len(),
        pairs.first()
    )]
    AbsentPaths { pairs: Vec<(u32, u32)> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    /// Stable machine-readable code, printed as a prefix on stderr by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "E_IO",
            Error::MalformedLine { .. } => "E_PARSE",
            Error::EmptyGraph => "E_EMPTY",
            Error::VertexOutOfRange { .. } => "E_VERTEX",
            Error::SelfLoop(_) => "E_SELF_LOOP",
            Error::EdgeExists(..) => "E_EDGE_EXISTS",
            Error::EdgeMissing(..) => "E_EDGE_MISSING",
            Error::Disconnected => "E_DISCONNECTED",
            Error::BridgeEdge(..) => "E_BRIDGE",
            Error::AbsentPaths { .. } => "E_ABSENT_PATHS",
            Error::InvalidParameter(_) => "E_PARAM",
            Error::Csv(_) => "E_CSV",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
