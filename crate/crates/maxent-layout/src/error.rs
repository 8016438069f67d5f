use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}): node index out of range for a graph with {n} nodes")]
    NodeOutOfRange { u: usize, v: usize, n: usize },

    #[error("edge ({u}, {v}): target length must be strictly positive, got {d}")]
    NonPositiveTargetLength { u: usize, v: usize, d: f64 },

    #[error("edge ({u}, {v}): edge weight must be finite and non-negative, got {w}")]
    InvalidEdgeWeight { u: usize, v: usize, w: f64 },

    #[error("graph is disconnected; extract the largest connected component first")]
    Disconnected,

    #[error("node {node} has no incident edges; iteration requires degree >= 1")]
    IsolatedNode { node: usize },

    #[error("coarsest graph has {n} nodes; initial placement handles at most 2")]
    CoarsestTooLarge { n: usize },

    #[error("layout has {len} coordinates for a graph with {n} nodes")]
    LayoutLengthMismatch { len: usize, n: usize },

    #[error("non-finite coordinate at node {node}")]
    NonFiniteCoordinate { node: usize },

    #[error("nodes {u} and {v} occupy the same exact position; jitter the layout first")]
    CoincidentPair { u: usize, v: usize },

    #[error("jitter failed to separate all coincident nodes after {attempts} attempts")]
    JitterFailed { attempts: usize },

    #[error(
        "graph has {n} nodes, above the all-pairs distance limit of {limit}; \
         raise the limit explicitly to override"
    )]
    ApspLimitExceeded { n: usize, limit: usize },

    #[error("optimal scale is undefined: all layout positions coincide")]
    DegenerateScale,

    #[error("graph has {graph_n} nodes but the prior layout has {prior_n}")]
    NodeSetMismatch { graph_n: usize, prior_n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
