//! Lloyd's K-means with k-means++ seeding and best-of-restarts selection.
//!
//! Restarts run on independent RNG streams derived from one seed, the
//! assignment step is parallel over samples and the update step over clusters,
//! each centroid being summed in sample order. The result is therefore the
//! same bit for bit regardless of the number of worker threads.

use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seeding {
    /// k-means++: D^2-weighted sampling of initial centres.
    PlusPlus,
    /// Uniformly random initial labels.
    RandomPartition,
}

impl FromStr for Seeding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus-plus" | "plusplus" | "kmeans++" | "plus_plus" => Ok(Seeding::PlusPlus),
            "random" | "random-partition" | "random_partition" => Ok(Seeding::RandomPartition),
            other => Err(Error::InvalidParameter(format!(
                "unknown seeding {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seeding: Seeding,
    pub seed: u64,
}

impl KMeansConfig {
    /// k-means++ seeding, 10 restarts, at most 100 iterations each.
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            restarts: 10,
            max_iterations: 100,
            seeding: Seeding::PlusPlus,
            seed,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_seeding(mut self, seeding: Seeding) -> Self {
        self.seeding = seeding;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.k > n {
            return Err(Error::InvalidParameter(format!(
                "k = {} exceeds the number of samples {n}",
                self.k
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter(
                "restarts must be at least 1".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-sample labels in `0..k`, plus the centroids when the method has them.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
    /// `k x m` centroids in the space that was clustered.
    pub centroids: Option<Array2<f64>>,
    /// Sum of squared sample-to-centroid distances.
    pub inertia: Option<f64>,
    pub iterations: usize,
    pub restarts_used: usize,
    /// Inertia after each assignment step of the selected restart.
    pub inertia_history: Vec<f64>,
}

impl ClusterAssignment {
    /// Assignment carrying labels only (e.g. from cutting a tree).
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        Self {
            labels,
            k,
            centroids: None,
            inertia: None,
            iterations: 0,
            restarts_used: 0,
            inertia_history: Vec::new(),
        }
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Clusters the rows of `rows` into `cfg.k` groups.
pub fn kmeans(rows: ArrayView2<'_, f64>, cfg: &KMeansConfig) -> Result<ClusterAssignment> {
    let n = rows.nrows();
    cfg.validate(n)?;
    if rows.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData(
            "k-means input has non-finite values".into(),
        ));
    }
    let runs: Vec<ClusterAssignment> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|stream| lloyd(rows, cfg, SeededRng::with_stream(cfg.seed, stream)))
        .collect();
    let mut best = runs
        .into_iter()
        .reduce(|best, run| {
            if run.inertia < best.inertia {
                run
            } else {
                best
            }
        })
        .expect("at least one restart");
    best.restarts_used = cfg.restarts;
    Ok(best)
}

fn lloyd(rows: ArrayView2<'_, f64>, cfg: &KMeansConfig, mut rng: SeededRng) -> ClusterAssignment {
    let k = cfg.k;
    let mut labels = match cfg.seeding {
        Seeding::PlusPlus => assign(rows, &plus_plus(rows, k, &mut rng)).0,
        Seeding::RandomPartition => (0..rows.nrows()).map(|_| rng.below(k)).collect(),
    };
    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let centroids = update(rows, &mut labels, k);
        let (next, inertia) = assign(rows, &centroids);
        if let Some(&prev) = history.last() {
            debug_assert!(
                inertia <= prev + 1e-9 * prev.abs().max(1e-300),
                "inertia rose from {prev} to {inertia}"
            );
        }
        history.push(inertia);
        let changed = next != labels;
        labels = next;
        if !changed || iterations >= cfg.max_iterations {
            break;
        }
    }
    let centroids = update(rows, &mut labels, k);
    let inertia = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(rows.row(i), centroids.row(l)))
        .sum();
    ClusterAssignment {
        labels,
        k,
        centroids: Some(centroids),
        inertia: Some(inertia),
        iterations,
        restarts_used: 1,
        inertia_history: history,
    }
}

/// k-means++ initial centres.
fn plus_plus(rows: ArrayView2<'_, f64>, k: usize, rng: &mut SeededRng) -> Array2<f64> {
    let n = rows.nrows();
    let mut chosen = Vec::with_capacity(k);
    let first = rng.below(n);
    chosen.push(first);
    let mut weight: Vec<f64> = (0..n)
        .map(|i| sq_dist(rows.row(i), rows.row(first)))
        .collect();
    while chosen.len() < k {
        let total: f64 = weight.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in weight.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total weight")
        } else {
            // Every sample coincides with a centre; fall back to a uniform
            // choice among the unused ones.
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.below(free.len())]
        };
        chosen.push(pick);
        for (i, w) in weight.iter_mut().enumerate() {
            *w = w.min(sq_dist(rows.row(i), rows.row(pick)));
        }
    }
    let mut centroids = Array2::zeros((k, rows.ncols()));
    for (c, &i) in chosen.iter().enumerate() {
        centroids.row_mut(c).assign(&rows.row(i));
    }
    centroids
}

/// Nearest-centroid labels (lowest index on ties) and the resulting inertia.
fn assign(rows: ArrayView2<'_, f64>, centroids: &Array2<f64>) -> (Vec<usize>, f64) {
    let nearest: Vec<(usize, f64)> = (0..rows.nrows())
        .into_par_iter()
        .map(|i| {
            let x = rows.row(i);
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.rows().into_iter().enumerate() {
                let d = sq_dist(x, centroid);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .collect();
    let inertia = nearest.iter().map(|&(_, d)| d).sum();
    (nearest.into_iter().map(|(c, _)| c).collect(), inertia)
}

/// Cluster means of `labels`. Empty clusters are refilled with the sample
/// farthest from its own centroid (taken from a cluster that keeps at least
/// one member), which may rewrite `labels`.
fn update(rows: ArrayView2<'_, f64>, labels: &mut [usize], k: usize) -> Array2<f64> {
    let mut centroids = means(rows, labels, k);
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return centroids;
        };
        let mut donor = None;
        let mut farthest = f64::NEG_INFINITY;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 {
                continue;
            }
            let d = sq_dist(rows.row(i), centroids.row(l));
            if d > farthest {
                farthest = d;
                donor = Some(i);
            }
        }
        let donor = donor.expect("k <= n leaves a cluster with two members");
        labels[donor] = empty;
        centroids = means(rows, labels, k);
    }
}

fn means(rows: ArrayView2<'_, f64>, labels: &[usize], k: usize) -> Array2<f64> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    let m = rows.ncols();
    let sums: Vec<Vec<f64>> = members
        .par_iter()
        .map(|idx| {
            let mut sum = vec![0.0; m];
            for &i in idx {
                for (s, &v) in sum.iter_mut().zip(rows.row(i).iter()) {
                    *s += v;
                }
            }
            if !idx.is_empty() {
                let count = idx.len() as f64;
                sum.iter_mut().for_each(|s| *s /= count);
            }
            sum
        })
        .collect();
    Array2::from_shape_vec((k, m), sums.concat()).expect("k rows of m values")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn two_tight_groups() {
        let rows = array![[0.0, 0.0], [0.0, 0.1], [9.0, 9.0], [9.0, 9.1]];
        let a = kmeans(rows.view(), &KMeansConfig::new(2, 1)).unwrap();
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.labels[2], a.labels[3]);
        assert_ne!(a.labels[0], a.labels[2]);
        // Each pair sits 0.05 from its mean: 4 * 0.05^2.
        let expected = 4.0 * 0.05f64.powi(2);
        assert!((a.inertia.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let rows = array![[0.0], [1.0], [5.0], [5.5], [7.0]];
        let a = kmeans(rows.view(), &KMeansConfig::new(5, 3)).unwrap();
        let mut sorted = a.labels.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert_eq!(a.inertia.unwrap(), 0.0);
    }

    #[test]
    fn k_equals_n_with_duplicates() {
        let rows = array![[1.0], [1.0], [1.0]];
        for seeding in [Seeding::PlusPlus, Seeding::RandomPartition] {
            let cfg = KMeansConfig::new(3, 3).with_seeding(seeding);
            let a = kmeans(rows.view(), &cfg).unwrap();
            assert_eq!(a.cluster_sizes(), vec![1, 1, 1]);
        }
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let rows = array![[0.0, 1.0], [2.0, 3.0], [4.0, 8.0]];
        let a = kmeans(rows.view(), &KMeansConfig::new(1, 0)).unwrap();
        assert_eq!(a.labels, vec![0, 0, 0]);
        let c = a.centroids.unwrap();
        assert!((c[[0, 0]] - 2.0).abs() < 1e-12);
        assert!((c[[0, 1]] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_k() {
        let rows = array![[0.0], [1.0]];
        assert!(kmeans(rows.view(), &KMeansConfig::new(0, 0)).is_err());
        assert!(kmeans(rows.view(), &KMeansConfig::new(3, 0)).is_err());
        assert!(kmeans(rows.view(), &KMeansConfig::new(1, 0).with_restarts(0)).is_err());
    }

    #[test]
    fn random_partition_repairs_empty_clusters() {
        let rows = Array2::from_shape_fn((30, 2), |(i, j)| (i * (j + 1)) as f64 * 0.1);
        let cfg = KMeansConfig::new(6, 9).with_seeding(Seeding::RandomPartition);
        let a = kmeans(rows.view(), &cfg).unwrap();
        assert!(a.cluster_sizes().iter().all(|&s| s > 0));
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let rows = Array2::from_shape_fn((200, 3), |(i, j)| {
            ((i * 7919 + j * 104_729) % 997) as f64 / 997.0
        });
        let cfg = KMeansConfig::new(4, 42);
        let pool = |t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
        };
        let a = pool(1).install(|| kmeans(rows.view(), &cfg).unwrap());
        let b = pool(4).install(|| kmeans(rows.view(), &cfg).unwrap());
        assert_eq!(a, b);
    }

    fn point_cloud() -> impl Strategy<Value = (Array2<f64>, usize, u64)> {
        (2usize..40, 1usize..4, 1usize..6, any::<u64>()).prop_flat_map(|(n, m, k, seed)| {
            prop::collection::vec(-5.0..5.0f64, n * m)
                .prop_map(move |v| (Array2::from_shape_vec((n, m), v).unwrap(), k.min(n), seed))
        })
    }

    proptest! {
        #[test]
        fn invariants_hold((rows, k, seed) in point_cloud()) {
            let cfg = KMeansConfig::new(k, seed).with_restarts(3);
            let a = kmeans(rows.view(), &cfg).unwrap();
            prop_assert!(a.cluster_sizes().iter().all(|&s| s > 0));
            for w in a.inertia_history.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1e-300));
            }
            let c = a.centroids.as_ref().unwrap();
            let recomputed: f64 = a
                .labels
                .iter()
                .enumerate()
                .map(|(i, &l)| sq_dist(rows.row(i), c.row(l)))
                .sum();
            let inertia = a.inertia.unwrap();
            prop_assert!((recomputed - inertia).abs() <= 1e-9 * inertia.max(1e-12));
            let again = kmeans(rows.view(), &cfg).unwrap();
            prop_assert_eq!(a, again);
        }
    }
}
