//! Scoring, consistency checking and benchmarking.

mod bench;
mod consistency;
mod score;

pub use bench::{fit_loglog_slope, scaling_benchmark, BenchConfig, BenchReport, BenchRow};
pub use consistency::{
    check_consistency, check_consistency_matrix, cluster_separations, global_separation,
    ClusterSeparation, ConsistencyReport, ConsistencyWitness,
};
pub use score::{error_rate, EvalReport};

use crate::clustering::{cluster_duality_raw, cluster_kmeans_baseline};
use crate::dataset::DataSet;
use crate::distance::Metric;
use crate::error::Result;
use crate::kmeans::KMeansConfig;

/// Fraction of samples labelled differently by K-means on the coordinates
/// and K-means on the rows of the raw distance matrix, after optimal label
/// matching.
pub fn duality_difference(data: &DataSet, cfg: &KMeansConfig, metric: Metric) -> Result<f64> {
    let base = cluster_kmeans_baseline(data, cfg)?;
    let raw = cluster_duality_raw(data, cfg, metric)?;
    Ok(error_rate(&raw.labels, &base.labels)?.error_rate)
}
