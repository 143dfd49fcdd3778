//! Detection of multicore-periphery structure in weighted undirected
//! networks.
//!
//! The pipeline turns edge weights into distances, builds an average-linkage
//! dendrogram, scores every dendrogram cut by its cores-periphery density
//! ratio, normalizes each score against a degree-preserving null ensemble,
//! and keeps the cut with the largest z-score.
//!
//! ```no_run
//! use mcp_core::{find_optimal, parse_edge_list, DistanceTransform, EdgeFormat, RandomizationConfig};
//!
//! let g = parse_edge_list(mcp_core::fixtures::KARATE, EdgeFormat::Whitespace).unwrap();
//! let result = find_optimal(&g, DistanceTransform::SimComplement, &RandomizationConfig::default()).unwrap();
//! println!("{} cores, z = {}", result.optimal_partition.n_cores(), result.optimal_z);
//! ```

pub mod fixtures;
pub mod graph;
pub mod hclust;
pub mod metrics;
pub mod null_model;
pub mod optimizer;
pub mod planted;
pub mod report;

pub use graph::{graph_stats, parse_edge_list, write_edge_list, Edge, EdgeFormat, GraphError, GraphStats, WeightedGraph};
pub use hclust::{
    average_linkage, build_distance_matrix, enumerate_partitions, ClusterError, Dendrogram, DistanceMatrix,
    DistanceTransform, Merge, Partition, TieBreak,
};
pub use metrics::{compute_metrics, core_weight, periphery_weight, PartitionMetrics};
pub use null_model::{
    evaluate_ensemble, randomize, randomize_counted, replica, ConfigError, EnsembleMode, EnsembleResult,
    PartitionStats, RandomizationConfig, ReplicaDiagnostic,
};
pub use optimizer::{
    analyze, analyze_timed, find_optimal, pair_agreement, sweep_transforms, sweep_with, AnalysisConfig,
    AnalysisError, AnalysisResult, StageTimings, SweepResult,
};
pub use report::{export_matrix_order, OutputFormat, RunReport};
