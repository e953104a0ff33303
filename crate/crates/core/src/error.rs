use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by graph construction, generation, simulation, and
/// dataset handling.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("graph must have at least one node (got {n})")]
    InvalidNodeCount { n: usize },

    #[error("node {index} out of range for graph of {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {node} is not allowed")]
    SelfLoop { node: usize },

    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("edge weight {weight} outside (0, 1]")]
    InvalidWeight { weight: f64 },

    #[error("cannot remove the last remaining node")]
    LastNode,

    #[error("target edge count {requested} exceeds the {max} distinct arcs of a {n}-node graph")]
    EdgeCountExceedsCapacity {
        requested: usize,
        max: usize,
        n: usize,
    },

    #[error("generator parameter {name} invalid: {detail}")]
    InvalidGenParam { name: &'static str, detail: String },

    #[error("snapback probability {q} required to hit the target density lies outside [0, 1]")]
    SnapbackProbability { q: f64 },

    #[error("ring construction needs {ring} edges but the target count is {target}")]
    RingExceedsTarget { ring: usize, target: usize },

    #[error("could not place {target} distinct edges after {attempts} draws ({placed} placed)")]
    DensityUnreachable {
        target: usize,
        placed: usize,
        attempts: usize,
    },

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("rank tolerance must be positive (got {tol})")]
    InvalidTolerance { tol: f64 },

    #[error("attack seeds must be distinct per sample (indices {first} and {second} collide)")]
    SeedCollision { first: usize, second: usize },

    #[error("batch has {specs} specs but {seeds} seeds")]
    BatchLengthMismatch { specs: usize, seeds: usize },

    #[error("edge-list parse error at line {line}: {detail}")]
    ParseEdgeList { line: usize, detail: String },

    #[error("manifest parse error at line {line}: {detail}")]
    ParseManifest { line: usize, detail: String },

    #[error("checksum mismatch for {file}: manifest says {expected:08x}, file hashes to {actual:08x}")]
    ChecksumMismatch {
        file: PathBuf,
        expected: u32,
        actual: u32,
    },

    #[error("sample file {file} is malformed: {detail}")]
    BadSampleFile { file: PathBuf, detail: String },

    #[error("sample {file} does not match its manifest entry: {detail}")]
    SampleShape { file: PathBuf, detail: String },

    #[error("png encoding failed: {0}")]
    Png(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
