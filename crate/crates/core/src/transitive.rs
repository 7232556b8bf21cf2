//! Transitive (minimax path) distances.
//!
//! The transitive distance between two samples is the smallest achievable
//! "largest hop" over all paths joining them in the complete graph. At full
//! order it is the subdominant ultrametric of the input metric, and every
//! value is the weight of some minimum-spanning-tree edge.
//!
//! Three independent routes compute the full matrix:
//!
//! * [`forest_cut`]: cut the spanning forest's largest edges one at a time
//!   and stamp the cut weight on every pair it separates, `O(n^2)`;
//! * [`path_max_matrix`]: largest edge on each tree path, `O(n^2)`;
//! * [`floyd_minimax`]: the `(min, max)` closure over all pivots, `O(n^3)`.
//!
//! [`order_k_distance`] restricts paths to at most `k` vertices.

use ndarray::{Array2, Axis, Zip};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::mst::SpanningTree;

/// How a [`TransitiveMatrix`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitiveSource {
    ForestCut,
    MstPath,
    Oracle,
    /// Paths restricted to at most this many vertices.
    OrderK(usize),
}

/// A distance matrix of transitive distances.
///
/// Except for [`TransitiveSource::OrderK`] the matrix is an ultrametric.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitiveMatrix {
    matrix: DistanceMatrix,
    source: TransitiveSource,
}

impl TransitiveMatrix {
    pub fn matrix(&self) -> &DistanceMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DistanceMatrix {
        self.matrix
    }

    pub fn source(&self) -> TransitiveSource {
        self.source
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    fn new(values: Array2<f64>, source: TransitiveSource) -> Self {
        let name = match source {
            TransitiveSource::ForestCut => "transitive(forest-cut)".to_string(),
            TransitiveSource::MstPath => "transitive(mst-path)".to_string(),
            TransitiveSource::Oracle => "transitive(oracle)".to_string(),
            TransitiveSource::OrderK(k) => format!("transitive(order-{k})"),
        };
        Self {
            matrix: DistanceMatrix::from_array_unchecked(values, name),
            source,
        }
    }
}

/// Visits every unordered pair `(i, j)` exactly once together with its
/// transitive distance, in the order the forest-cutting procedure discovers
/// them.
///
/// Edges are cut in descending key order. At the moment an edge is cut it is
/// the largest remaining edge of its tree, so this is the same as cutting
/// every tree's largest edge round by round. The two sides of a cut are found
/// by walking the surviving edges, which costs `O(|T|)` per cut; the pair
/// callbacks are `n(n-1)/2` in total.
pub fn for_each_cut_pair(tree: &SpanningTree, mut visit: impl FnMut(usize, usize, f64)) {
    let n = tree.n();
    let edges = tree.edges();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, e) in edges.iter().enumerate() {
        adjacency[e.u].push((e.v, id));
        adjacency[e.v].push((e.u, id));
    }
    let mut removed = vec![false; edges.len()];
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut side_a = Vec::new();
    let mut side_b = Vec::new();

    let mut collect = |start: usize, out: &mut Vec<usize>, removed: &[bool], seen: &mut [bool]| {
        out.clear();
        stack.clear();
        stack.push(start);
        seen[start] = true;
        while let Some(x) = stack.pop() {
            out.push(x);
            for &(y, id) in &adjacency[x] {
                if !removed[id] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    };

    for id in (0..edges.len()).rev() {
        let e = edges[id];
        removed[id] = true;
        collect(e.u, &mut side_a, &removed, &mut seen);
        collect(e.v, &mut side_b, &removed, &mut seen);
        for &x in side_a.iter().chain(side_b.iter()) {
            seen[x] = false;
        }
        for &a in &side_a {
            for &b in &side_b {
                visit(a, b, e.w);
            }
        }
    }
}

/// Transitive distance matrix by cutting the spanning tree's edges from the
/// largest down.
pub fn forest_cut(tree: &SpanningTree) -> TransitiveMatrix {
    let n = tree.n();
    let mut d = Array2::<f64>::zeros((n, n));
    for_each_cut_pair(tree, |a, b, w| {
        d[[a, b]] = w;
        d[[b, a]] = w;
    });
    TransitiveMatrix::new(d, TransitiveSource::ForestCut)
}

/// Transitive distance matrix as the largest edge on each tree path.
pub fn path_max_matrix(tree: &SpanningTree) -> TransitiveMatrix {
    let n = tree.n();
    let mut d = Array2::<f64>::zeros((n, n));
    d.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(source, mut row)| {
            let mut stack = vec![(source, usize::MAX, 0.0f64)];
            while let Some((x, parent, best)) = stack.pop() {
                row[x] = best;
                for &(y, w) in tree.neighbors(x) {
                    if y != parent {
                        stack.push((y, x, best.max(w)));
                    }
                }
            }
        });
    TransitiveMatrix::new(d, TransitiveSource::MstPath)
}

/// `(min, max)` closure over every pivot: `O(n^3)` reference implementation.
pub fn floyd_minimax(e: &DistanceMatrix) -> TransitiveMatrix {
    let mut d = e.view().to_owned();
    let n = d.nrows();
    for k in 0..n {
        // Row k is a fixpoint of its own pivot step since d[k][k] = 0.
        let pivot = d.row(k).to_owned();
        d.axis_iter_mut(Axis(0))
            .into_par_iter()
            .for_each(|mut row| {
                let through = row[k];
                Zip::from(&mut row).and(&pivot).for_each(|dij, &dkj| {
                    let via = through.max(dkj);
                    if via < *dij {
                        *dij = via;
                    }
                });
            });
    }
    TransitiveMatrix::new(d, TransitiveSource::Oracle)
}

/// Transitive distance restricted to paths of at most `k` vertices.
///
/// `D_2 = E` and `D_{m+1}[i][j] = min(D_m[i][j], min_u max(D_m[i][u], E[u][j]))`,
/// one `O(n^3)` `(min, max)` product per step. Iteration stops early once a
/// product leaves the matrix unchanged, since every later one would too.
pub fn order_k_distance(e: &DistanceMatrix, k: usize) -> Result<TransitiveMatrix> {
    let n = e.n();
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "order must be at least 2, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "order {k} exceeds the number of samples {n}"
        )));
    }
    let edges = e.view();
    let mut d = edges.to_owned();
    for _ in 2..k {
        let next = minmax_step(&d, &edges);
        if next == d {
            break;
        }
        d = next;
    }
    Ok(TransitiveMatrix::new(d, TransitiveSource::OrderK(k)))
}

fn minmax_step(d: &Array2<f64>, e: &ndarray::ArrayView2<'_, f64>) -> Array2<f64> {
    let n = d.nrows();
    let mut out = d.clone();
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let di = d.row(i);
            for u in 0..n {
                let diu = di[u];
                Zip::from(&mut row).and(e.row(u)).for_each(|dij, &euj| {
                    let via = diu.max(euj);
                    if via < *dij {
                        *dij = via;
                    }
                });
            }
        });
    out
}

/// A triple breaking `M[i][j] <= max(M[i][k], M[k][j])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UltrametricViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub direct: f64,
    pub via: f64,
}

/// Checks the ultrametric inequality on every triple, within additive `tol`.
///
/// Returns the first violation in `(i, j, k)` lexicographic order.
pub fn check_ultrametric(m: &DistanceMatrix, tol: f64) -> Option<UltrametricViolation> {
    let n = m.n();
    let v = m.view();
    (0..n).into_par_iter().find_map_first(|i| {
        for j in (i + 1)..n {
            let direct = v[[i, j]];
            for k in 0..n {
                let via = v[[i, k]].max(v[[k, j]]);
                if direct > via + tol {
                    return Some(UltrametricViolation {
                        i,
                        j,
                        k,
                        direct,
                        via,
                    });
                }
            }
        }
        None
    })
}
