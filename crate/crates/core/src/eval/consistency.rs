//! Consistency of a labelling with a distance.
//!
//! A labelling is consistent when, for every cluster `C`, every split
//! `C = C1 ∪ C2` into non-empty parts and every sample `y` outside `C`,
//! `d(C1, C2) < d(y, C)`. Here `d(A, B)` is the smallest distance between a
//! member of `A` and a member of `B`.
//!
//! The split quantifier is exponential, but it collapses to one number per
//! cluster: the largest edge `w*` of the minimum spanning tree of `C` alone
//! (built on the distances inside `C`).
//!
//! *Claim.* `max over splits of d(C1, C2) = w*`.
//!
//! * Every split is crossed by at least one tree edge, and that edge weighs
//!   at most `w*`, so `d(C1, C2) <= w*`.
//! * Deleting the `w*` edge from the tree gives a split. If some pair across
//!   it were closer than `w*`, swapping that pair's edge in for the `w*` edge
//!   would give a lighter spanning tree. So this split has `d(C1, C2) = w*`.
//!
//! So `C` satisfies the condition iff `w* < d(y, C)` for every `y` outside
//! `C`. This takes `O(|C|^2)` per cluster plus `O(n |C|)` for the outside
//! distances, `O(n^2)` overall. Singleton clusters admit no split and
//! are vacuously fine.

use serde::Serialize;

use crate::dataset::DataSet;
use crate::distance::{build_distance_matrix, DistanceMatrix, Metric};
use crate::error::{Error, Result};
use crate::mst::build_mst;

/// A sample that lies no farther from a cluster than the cluster's widest
/// internal gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyWitness {
    pub cluster: usize,
    /// Largest internal spanning-tree edge, i.e. the widest split gap.
    pub partition_gap: f64,
    pub outside_point: usize,
    pub distance_to_cluster: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub witness: Option<ConsistencyWitness>,
}

/// Decides consistency of `data`'s labels under `metric`.
pub fn check_consistency(data: &DataSet, metric: Metric) -> Result<ConsistencyReport> {
    let labels = data.labels().ok_or(Error::MissingLabels)?;
    let e = build_distance_matrix(data, metric)?;
    check_consistency_matrix(&e, labels)
}

/// Same as [`check_consistency`] on a precomputed distance matrix.
///
/// The witness reported is the closest outside sample of the first failing
/// cluster.
pub fn check_consistency_matrix(e: &DistanceMatrix, labels: &[usize]) -> Result<ConsistencyReport> {
    if labels.len() != e.n() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: e.n(),
        });
    }
    for (cluster, members) in members_by_label(labels).iter().enumerate() {
        let Some(gap) = widest_internal_gap(e, members)? else {
            continue;
        };
        let mut closest: Option<(usize, f64)> = None;
        for y in (0..e.n()).filter(|&y| labels[y] != cluster) {
            let d = members
                .iter()
                .map(|&x| e.get(y, x))
                .fold(f64::INFINITY, f64::min);
            if closest.is_none_or(|(_, best)| d < best) {
                closest = Some((y, d));
            }
        }
        if let Some((y, d)) = closest {
            if d <= gap {
                return Ok(ConsistencyReport {
                    consistent: false,
                    witness: Some(ConsistencyWitness {
                        cluster,
                        partition_gap: gap,
                        outside_point: y,
                        distance_to_cluster: d,
                    }),
                });
            }
        }
    }
    Ok(ConsistencyReport {
        consistent: true,
        witness: None,
    })
}

fn members_by_label(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut members = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    members
}

/// Largest edge of the spanning tree of `members`; `None` below two members.
fn widest_internal_gap(e: &DistanceMatrix, members: &[usize]) -> Result<Option<f64>> {
    if members.len() < 2 {
        return Ok(None);
    }
    let sub = ndarray::Array2::from_shape_fn((members.len(), members.len()), |(a, b)| {
        e.get(members[a], members[b])
    });
    let tree = build_mst(&DistanceMatrix::from_array_unchecked(sub, e.metric_name()))?;
    Ok(tree.edges().last().map(|edge| edge.w))
}

/// Within-cluster spread and distance to the rest for one cluster, measured
/// in some (typically transitive) distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterSeparation {
    pub cluster: usize,
    /// Largest distance between two members (0 for a singleton).
    pub max_intra: f64,
    /// Smallest distance from a member to a non-member (infinite if `k = 1`).
    pub min_to_outside: f64,
}

impl ClusterSeparation {
    pub fn is_separated(&self) -> bool {
        self.max_intra < self.min_to_outside
    }
}

/// Separation of each cluster in `d`.
pub fn cluster_separations(d: &DistanceMatrix, labels: &[usize]) -> Vec<ClusterSeparation> {
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut out: Vec<ClusterSeparation> = (0..k)
        .map(|cluster| ClusterSeparation {
            cluster,
            max_intra: 0.0,
            min_to_outside: f64::INFINITY,
        })
        .collect();
    for i in 0..d.n() {
        for j in (i + 1)..d.n() {
            let v = d.get(i, j);
            let (a, b) = (labels[i], labels[j]);
            if a == b {
                out[a].max_intra = out[a].max_intra.max(v);
            } else {
                out[a].min_to_outside = out[a].min_to_outside.min(v);
                out[b].min_to_outside = out[b].min_to_outside.min(v);
            }
        }
    }
    out
}

/// `(largest intra-cluster distance, smallest inter-cluster distance)` over
/// all clusters at once.
pub fn global_separation(d: &DistanceMatrix, labels: &[usize]) -> (f64, f64) {
    cluster_separations(d, labels)
        .iter()
        .fold((0.0f64, f64::INFINITY), |(intra, inter), s| {
            (intra.max(s.max_intra), inter.min(s.min_to_outside))
        })
}
