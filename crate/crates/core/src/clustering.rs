//! End-to-end clustering methods.
//!
//! The transitive method builds the distance matrix, its minimum spanning
//! tree and the transitive distance matrix, then runs K-means on the rows of
//! that matrix and hands each row's label back to its sample. The other
//! methods are baselines: K-means on the rows of the raw distance matrix,
//! plain K-means on the coordinates, and cutting the `c - 1` largest tree
//! edges.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::DataSet;
use crate::distance::{build_distance_matrix, DistanceMatrix, Metric};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, ClusterAssignment, KMeansConfig};
use crate::mst::{build_mst, SpanningTree};
use crate::transitive::{forest_cut, TransitiveMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Transitive,
    #[serde(rename = "kmeans")]
    KMeans,
    Hierarchical,
    DualityRaw,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Transitive => "transitive",
            Method::KMeans => "kmeans",
            Method::Hierarchical => "hierarchical",
            Method::DualityRaw => "duality-raw",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transitive" => Ok(Method::Transitive),
            "kmeans" => Ok(Method::KMeans),
            "hierarchical" => Ok(Method::Hierarchical),
            "duality-raw" => Ok(Method::DualityRaw),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Wall-clock time of one pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub ms: f64,
}

/// Intermediate products of the transitive pipeline.
#[derive(Debug, Clone)]
pub struct TransitiveRun {
    pub distances: DistanceMatrix,
    pub tree: SpanningTree,
    pub transitive: TransitiveMatrix,
    pub assignment: ClusterAssignment,
    pub timings: Vec<StageTiming>,
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: &'static str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push(StageTiming {
        stage,
        ms: start.elapsed().as_secs_f64() * 1e3,
    });
    out
}

/// Runs the transitive pipeline and keeps every intermediate.
pub fn run_transitive(data: &DataSet, cfg: &KMeansConfig, metric: Metric) -> Result<TransitiveRun> {
    let mut timings = Vec::with_capacity(4);
    let distances = timed(&mut timings, "distance", || {
        build_distance_matrix(data, metric)
    })?;
    let tree = timed(&mut timings, "mst", || build_mst(&distances))?;
    let transitive = timed(&mut timings, "forest_cut", || forest_cut(&tree));
    let assignment = timed(&mut timings, "kmeans", || {
        kmeans(transitive.matrix().view(), cfg)
    })?;
    Ok(TransitiveRun {
        distances,
        tree,
        transitive,
        assignment,
        timings,
    })
}

/// K-means on the rows of the transitive distance matrix.
pub fn cluster_transitive(
    data: &DataSet,
    cfg: &KMeansConfig,
    metric: Metric,
) -> Result<ClusterAssignment> {
    run_transitive(data, cfg, metric).map(|run| run.assignment)
}

/// K-means on the rows of the raw distance matrix.
pub fn cluster_duality_raw(
    data: &DataSet,
    cfg: &KMeansConfig,
    metric: Metric,
) -> Result<ClusterAssignment> {
    let e = build_distance_matrix(data, metric)?;
    kmeans(e.view(), cfg)
}

/// K-means on the original coordinates.
pub fn cluster_kmeans_baseline(data: &DataSet, cfg: &KMeansConfig) -> Result<ClusterAssignment> {
    kmeans(data.points(), cfg)
}

/// Single-linkage style clustering: delete the `c - 1` largest edges of the
/// minimum spanning tree and label the connected components.
pub fn cluster_hierarchical_mstcut(
    data: &DataSet,
    c: usize,
    metric: Metric,
) -> Result<ClusterAssignment> {
    if c == 0 {
        return Err(Error::InvalidParameter(
            "number of clusters must be at least 1".into(),
        ));
    }
    if c > data.n() {
        return Err(Error::InvalidParameter(format!(
            "{c} clusters requested for {} samples",
            data.n()
        )));
    }
    let tree = build_mst(&build_distance_matrix(data, metric)?)?;
    Ok(ClusterAssignment::from_labels(
        tree.components_after_cutting(c - 1)?,
    ))
}

/// Dispatches on `method`; `cfg.k` is the number of clusters for all of them.
pub fn cluster(
    data: &DataSet,
    method: Method,
    cfg: &KMeansConfig,
    metric: Metric,
) -> Result<ClusterAssignment> {
    match method {
        Method::Transitive => cluster_transitive(data, cfg, metric),
        Method::KMeans => cluster_kmeans_baseline(data, cfg),
        Method::Hierarchical => cluster_hierarchical_mstcut(data, cfg.k, metric),
        Method::DualityRaw => cluster_duality_raw(data, cfg, metric),
    }
}

/// JSON form of a clustering result.
#[derive(Debug, Clone, Serialize)]
pub struct AssignmentRecord<'a> {
    pub method: Method,
    pub metric: Option<Metric>,
    pub k: usize,
    pub labels: &'a [usize],
    pub inertia: Option<f64>,
    pub iterations: usize,
    pub restarts_used: usize,
    pub config: &'a KMeansConfig,
}

impl<'a> AssignmentRecord<'a> {
    pub fn new(
        assignment: &'a ClusterAssignment,
        method: Method,
        metric: Metric,
        config: &'a KMeansConfig,
    ) -> Self {
        Self {
            method,
            metric: (method != Method::KMeans).then_some(metric),
            k: assignment.k,
            labels: &assignment.labels,
            inertia: assignment.inertia,
            iterations: assignment.iterations,
            restarts_used: assignment.restarts_used,
            config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn blobs() -> DataSet {
        let pts = array![
            [0.10, 0.10],
            [0.12, 0.11],
            [0.11, 0.13],
            [0.80, 0.80],
            [0.82, 0.79],
            [0.81, 0.83]
        ];
        DataSet::new("blobs", pts, Some(vec![0, 0, 0, 1, 1, 1])).unwrap()
    }

    fn same_partition(a: &[usize], b: &[usize]) -> bool {
        a.len() == b.len()
            && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
    }

    #[test]
    fn every_method_separates_blobs() {
        let ds = blobs();
        let cfg = KMeansConfig::new(2, 5);
        for method in [
            Method::Transitive,
            Method::KMeans,
            Method::Hierarchical,
            Method::DualityRaw,
        ] {
            let a = cluster(&ds, method, &cfg, Metric::Euclidean).unwrap();
            assert!(same_partition(&a.labels, ds.labels().unwrap()), "{method}");
        }
    }

    #[test]
    fn n_equals_k_is_all_singletons() {
        let ds = blobs();
        let a = cluster_transitive(&ds, &KMeansConfig::new(6, 1), Metric::Euclidean).unwrap();
        assert_eq!(a.cluster_sizes(), vec![1; 6]);
    }

    #[test]
    fn hierarchical_extremes() {
        let ds = blobs();
        let one = cluster_hierarchical_mstcut(&ds, 1, Metric::Euclidean).unwrap();
        assert_eq!(one.labels, vec![0; 6]);
        let all = cluster_hierarchical_mstcut(&ds, 6, Metric::Euclidean).unwrap();
        assert_eq!(all.labels, vec![0, 1, 2, 3, 4, 5]);
        assert!(cluster_hierarchical_mstcut(&ds, 7, Metric::Euclidean).is_err());
        assert!(cluster_hierarchical_mstcut(&ds, 0, Metric::Euclidean).is_err());
    }

    #[test]
    fn duality_raw_single_cluster() {
        let ds = blobs();
        let a = cluster_duality_raw(&ds, &KMeansConfig::new(1, 0), Metric::Euclidean).unwrap();
        assert!(a.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn ideal_block_matrix_matches_coordinate_kmeans() {
        // Three groups of coincident points: zero intra-cluster distance.
        let mut pts = Array2::zeros((9, 2));
        for (i, (x, y)) in [(0.1, 0.1), (0.9, 0.2), (0.4, 0.9)].iter().enumerate() {
            for r in 0..3 {
                pts[[3 * i + r, 0]] = *x;
                pts[[3 * i + r, 1]] = *y;
            }
        }
        let ds = DataSet::new("block", pts, None).unwrap();
        let cfg = KMeansConfig::new(3, 2);
        let raw = cluster_duality_raw(&ds, &cfg, Metric::Euclidean).unwrap();
        let base = cluster_kmeans_baseline(&ds, &cfg).unwrap();
        assert!(same_partition(&raw.labels, &base.labels));
    }

    #[test]
    fn pipeline_records_stage_timings() {
        let run = run_transitive(&blobs(), &KMeansConfig::new(2, 0), Metric::Euclidean).unwrap();
        let stages: Vec<_> = run.timings.iter().map(|t| t.stage).collect();
        assert_eq!(stages, vec!["distance", "mst", "forest_cut", "kmeans"]);
        assert_eq!(run.tree.edges().len(), 5);
    }

    #[test]
    fn record_serializes() {
        let ds = blobs();
        let cfg = KMeansConfig::new(2, 5);
        let a = cluster_transitive(&ds, &cfg, Metric::Euclidean).unwrap();
        let json = serde_json::to_value(AssignmentRecord::new(
            &a,
            Method::Transitive,
            Metric::Euclidean,
            &cfg,
        ))
        .unwrap();
        assert_eq!(json["method"], "transitive");
        assert_eq!(json["k"], 2);
        assert_eq!(json["labels"].as_array().unwrap().len(), 6);
        assert_eq!(json["config"]["restarts"], 10);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Transitive,
            Method::KMeans,
            Method::Hierarchical,
            Method::DualityRaw,
        ] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("spectral".parse::<Method>().is_err());
    }
}
