//! Min-Max normalized organization matrices, threshold binarization and
//! node-level graph metrics on the resulting undirected graphs.

mod adjacency;
mod metrics;
mod nom;

pub use adjacency::{binarize, BinaryAdjacency};
pub use metrics::{
    betweenness, clustering, coreness_centrality, degree, eigenvector_centrality, metric_vector, node_metrics, shell_indices, MetricKind,
    NodeMetrics,
};
pub use nom::{invert_nom, minmax_normalize, Nom};
