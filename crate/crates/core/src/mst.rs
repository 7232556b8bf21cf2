//! Minimum spanning tree of the complete graph over a distance matrix.
//!
//! Edges are totally ordered by `(weight, min(u, v), max(u, v))`. Under that
//! order the minimum spanning tree is unique, so equal weights never make the
//! result depend on iteration order, and every routine that has to pick "the
//! largest edge" uses the same order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// Undirected weighted edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(a: usize, b: usize, w: f64) -> Self {
        Self {
            u: a.min(b),
            v: a.max(b),
            w,
        }
    }

    /// Total order used for every tie-break in the crate.
    pub fn key_cmp(&self, other: &Self) -> Ordering {
        self.w
            .total_cmp(&other.w)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }
}

/// Compares the keys of edges `(a, b)` and `(c, d)` of weights `w1`, `w2`.
fn key_less(w1: f64, a: usize, b: usize, w2: f64, c: usize, d: usize) -> bool {
    Edge::new(a, b, w1).key_cmp(&Edge::new(c, d, w2)) == Ordering::Less
}

/// Spanning tree over `n` vertices; edges sorted ascending by key.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl SpanningTree {
    /// Builds a tree from an edge list, checking that it spans `n` vertices
    /// without cycles.
    pub fn new(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty(
                "spanning tree needs at least one vertex".into(),
            ));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidData(format!(
                "{} edges cannot span {n} vertices",
                edges.len()
            )));
        }
        let mut uf = UnionFind::new(n);
        for e in &edges {
            for x in [e.u, e.v] {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, n });
                }
            }
            if !uf.union(e.u, e.v) {
                return Err(Error::InvalidData(format!(
                    "edge ({}, {}) closes a cycle",
                    e.u, e.v
                )));
            }
        }
        edges.sort_by(Edge::key_cmp);
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        Ok(Self {
            n,
            edges,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in ascending key order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub(crate) fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    /// Largest edge weight on the tree path from `i` to `j` (0 when `i == j`).
    pub fn path_max(&self, i: usize, j: usize) -> Result<f64> {
        for x in [i, j] {
            if x >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    n: self.n,
                });
            }
        }
        if i == j {
            return Ok(0.0);
        }
        // Iterative DFS carrying the running maximum.
        let mut stack = vec![(i, usize::MAX, 0.0f64)];
        while let Some((x, parent, best)) = stack.pop() {
            for &(y, w) in &self.adjacency[x] {
                if y == parent {
                    continue;
                }
                let m = best.max(w);
                if y == j {
                    return Ok(m);
                }
                stack.push((y, x, m));
            }
        }
        unreachable!("spanning tree is connected")
    }

    /// Cluster labels from deleting the `cuts` largest edges.
    ///
    /// Components are numbered by their smallest vertex.
    pub fn components_after_cutting(&self, cuts: usize) -> Result<Vec<usize>> {
        if cuts > self.edges.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot cut {cuts} edges from a tree with {}",
                self.edges.len()
            )));
        }
        let keep = self.edges.len() - cuts;
        let mut uf = UnionFind::new(self.n);
        for e in &self.edges[..keep] {
            uf.union(e.u, e.v);
        }
        Ok(uf.component_labels())
    }

    /// Writes one `u,v,w` line per edge.
    pub fn write_edge_list<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(out, "{},{},{}", e.u, e.v, e.w)?;
        }
        Ok(())
    }
}

/// Prim's algorithm over the dense matrix: `O(n^2)` time, `O(n)` extra space.
pub fn build_mst(e: &DistanceMatrix) -> Result<SpanningTree> {
    let n = e.n();
    if n == 0 {
        return Err(Error::Empty("no vertices".into()));
    }
    let mut in_tree = vec![false; n];
    // Cheapest known connection of each outside vertex: (weight, tree endpoint).
    let mut best_w = vec![f64::INFINITY; n];
    let mut best_from = vec![usize::MAX; n];
    let mut edges = Vec::with_capacity(n - 1);

    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let row = e.row(current);
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let w = row[v];
            if best_from[v] == usize::MAX || key_less(w, current, v, best_w[v], best_from[v], v) {
                best_w[v] = w;
                best_from[v] = current;
            }
            if next == usize::MAX
                || key_less(
                    best_w[v],
                    best_from[v],
                    v,
                    best_w[next],
                    best_from[next],
                    next,
                )
            {
                next = v;
            }
        }
        in_tree[next] = true;
        edges.push(Edge::new(best_from[next], next, best_w[next]));
        current = next;
    }
    SpanningTree::new(n, edges)
}
