use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image decode failed: {0}")]
    Decode(String),
    #[error("invalid image dimensions {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },
    #[error("no text content on page")]
    NoTextContent,
    #[error("duplicate block id {0}")]
    DuplicateBlockId(u32),
    #[error("unknown block id {0}")]
    UnknownBlock(u32),
    #[error("document `{0}` already indexed")]
    DuplicateDocument(String),
    #[error("unknown document `{0}`")]
    UnknownDocument(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid query: {0}")]
    Query(#[from] QueryError),
    #[error("corpus line {line}: {message}")]
    CorpusLine { line: usize, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Query validation failures. `code()` gives a stable machine-readable reason.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("malformed query document: {0}")]
    Malformed(String),
    #[error("layout `{0}` has no blocks")]
    EmptyLayout(String),
    #[error("layout `{layout}`: block {block} lies outside the canvas or has no area")]
    BadBlock { layout: String, block: usize },
    #[error("layout `{layout}`: blocks {a} and {b} overlap")]
    Overlap { layout: String, a: usize, b: usize },
    #[error("layout `{0}`: blocks do not form a connected arrangement")]
    Disconnected(String),
    #[error("expression syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("expression references unknown layout `{0}`")]
    UnknownLayout(String),
    #[error("expression has no positive sub-layout (NOT-only query)")]
    NotOnly,
}

impl QueryError {
    pub fn code(&self) -> &'static str {
        match self {
            QueryError::Malformed(_) => "malformed",
            QueryError::EmptyLayout(_) => "empty_layout",
            QueryError::BadBlock { .. } => "bad_block",
            QueryError::Overlap { .. } => "overlapping_blocks",
            QueryError::Disconnected(_) => "disconnected_layout",
            QueryError::Syntax { .. } => "syntax",
            QueryError::UnknownLayout(_) => "unknown_layout",
            QueryError::NotOnly => "not_only",
        }
    }
}
