//! Clustering with transitive distances.
//!
//! The transitive distance between two samples is the smallest possible
//! largest hop over all paths connecting them. It turns any metric into an
//! ultrametric in which clusters of arbitrary shape become compact. Running
//! K-means on the rows of the transitive distance matrix then recovers the
//! clusters without an eigen-decomposition. The pipeline is `O(n^2)`:
//!
//! 1. [`distance::build_distance_matrix`]: dense pairwise distances;
//! 2. [`mst::build_mst`]: Prim's algorithm on the complete graph;
//! 3. [`transitive::forest_cut`]: the full transitive matrix from the tree;
//! 4. [`kmeans::kmeans`] on its rows.
//!
//! [`clustering::cluster_transitive`] runs all four steps.
//!
//! ```
//! use transclust::prelude::*;
//!
//! let data = generate(&SyntheticSpec::two_moon(25, 7)).unwrap();
//! let cfg = KMeansConfig::new(2, 1);
//! let assignment = cluster_transitive(&data, &cfg, Metric::Euclidean).unwrap();
//! let report = error_rate(&assignment.labels, data.labels().unwrap()).unwrap();
//! assert_eq!(report.error_rate, 0.0);
//! ```

pub mod clustering;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod eval;
pub mod kmeans;
pub mod mst;
pub mod rng;
pub mod transitive;
pub mod union_find;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::clustering::{
        cluster, cluster_duality_raw, cluster_hierarchical_mstcut, cluster_kmeans_baseline,
        cluster_transitive, run_transitive, Method,
    };
    pub use crate::dataset::{generate, load_csv, DataSet, Shape, SyntheticSpec};
    pub use crate::distance::{build_distance_matrix, DistanceMatrix, Metric};
    pub use crate::eval::{check_consistency, duality_difference, error_rate, EvalReport};
    pub use crate::kmeans::{kmeans, ClusterAssignment, KMeansConfig, Seeding};
    pub use crate::mst::{build_mst, Edge, SpanningTree};
    pub use crate::transitive::{
        check_ultrametric, floyd_minimax, forest_cut, order_k_distance, path_max_matrix,
        TransitiveMatrix, TransitiveSource,
    };
}
