//! Dense pairwise distance matrices.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DataSet;
use crate::error::{Error, Result};

/// Dissimilarity between two samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Manhattan,
    /// `1 - cos(angle)`; undefined for zero vectors.
    Cosine,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Cosine => "cosine",
        }
    }

    pub fn distance(self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Manhattan => a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Cosine => {
                let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                let na = a.dot(&a).sqrt();
                let nb = b.dot(&b).sqrt();
                // Rounding can push the cosine a hair past 1.
                (1.0 - dot / (na * nb)).max(0.0)
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "manhattan" | "cityblock" => Ok(Metric::Manhattan),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

/// Symmetric `n x n` matrix with zero diagonal and finite non-negative
/// entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Array2<f64>,
    metric: String,
}

impl DistanceMatrix {
    /// Wraps a raw matrix after checking symmetry, the diagonal and the sign of
    /// every entry.
    pub fn from_array(values: Array2<f64>, metric: impl Into<String>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::InvalidData(format!(
                "matrix is {rows}x{cols}, not square"
            )));
        }
        if rows == 0 {
            return Err(Error::Empty("distance matrix has no rows".into()));
        }
        for i in 0..rows {
            if values[[i, i]] != 0.0 {
                return Err(Error::InvalidData(format!(
                    "diagonal entry {i} is not zero"
                )));
            }
            for j in (i + 1)..rows {
                let v = values[[i, j]];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidData(format!(
                        "entry ({i}, {j}) = {v} is not a finite non-negative distance"
                    )));
                }
                if v != values[[j, i]] {
                    return Err(Error::InvalidData(format!(
                        "entry ({i}, {j}) is not symmetric"
                    )));
                }
            }
        }
        Ok(Self {
            values,
            metric: metric.into(),
        })
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_array_unchecked(values: Array2<f64>, metric: impl Into<String>) -> Self {
        debug_assert_eq!(values.nrows(), values.ncols());
        Self {
            values,
            metric: metric.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    pub fn metric_name(&self) -> &str {
        &self.metric
    }

    pub fn into_array(self) -> Array2<f64> {
        self.values
    }

    /// Largest entry (0 for a single sample).
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Writes the matrix as whitespace-separated rows.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.values.rows() {
            let line = row
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Builds the pairwise distance matrix of `data`.
///
/// Only the strict upper triangle is evaluated (rows in parallel); the lower
/// triangle is a bitwise mirror.
pub fn build_distance_matrix(data: &DataSet, metric: Metric) -> Result<DistanceMatrix> {
    let points = data.points();
    if metric == Metric::Cosine {
        if let Some(index) = points
            .rows()
            .into_iter()
            .position(|r| r.iter().all(|&v| v == 0.0))
        {
            return Err(Error::ZeroVector { index });
        }
    }
    let n = data.n();
    let mut values = Array2::<f64>::zeros((n, n));
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let a = points.row(i);
            for j in (i + 1)..n {
                row[j] = metric.distance(a, points.row(j));
            }
        });
    for i in 0..n {
        for j in (i + 1)..n {
            values[[j, i]] = values[[i, j]];
        }
    }
    Ok(DistanceMatrix::from_array_unchecked(values, metric.name()))
}
