use thiserror::Error;

use crate::id::Id;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("null graph has no path length")]
    NullGraph,
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(Id),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(Id),
    #[error("unknown vertex {0}")]
    UnknownVertex(Id),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("graphs are limited to {max} vertices, got {got}")]
    TooManyVertices { got: usize, max: usize },
    #[error("insufficient terminals: k = {k} but |U| = {from} and |V| = {to}")]
    InsufficientTerminals { k: usize, from: usize, to: usize },
    #[error("k must be positive")]
    ZeroPaths,
    #[error("unknown tree node {0}")]
    UnknownNode(Id),
    #[error("duplicate tree node {0}")]
    DuplicateNode(Id),
    #[error("not a tree path: {0}")]
    NotATreePath(String),
    #[error("path must have at least one edge")]
    EmptyPath,
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("empty decomposition list")]
    EmptyList,
    #[error("host graphs are not vertex-disjoint: {0} occurs twice")]
    OverlappingHosts(Id),
    #[error("m must be positive")]
    NonPositiveM,
    #[error("bound overflows 128 bits for m = {0}")]
    BoundOverflow(u64),
    #[error("oracle limit: {0}")]
    OracleLimit(String),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error("unknown label {0} in quasi-order")]
    UnknownLabel(Id),
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("rejection budget of {budget} attempts exhausted for n = {n}, mult = {mult}, m = {m}")]
    RejectionBudget { budget: usize, n: usize, mult: usize, m: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
