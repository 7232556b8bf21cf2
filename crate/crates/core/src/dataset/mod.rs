//! Sample storage, CSV ingestion and synthetic generators.

mod csv;
mod synthetic;

pub use self::csv::{load_csv, parse_csv, write_csv, write_csv_to, CsvLoad};
pub use self::synthetic::{generate, Shape, SyntheticSpec};

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// `n` samples in `R^l` with optional ground-truth labels.
///
/// Labels, when present, always form the contiguous range `0..k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    name: String,
    points: Array2<f64>,
    labels: Option<Vec<usize>>,
}

impl DataSet {
    pub fn new(
        name: impl Into<String>,
        points: Array2<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let (n, l) = points.dim();
        if n == 0 {
            return Err(Error::Empty("dataset has no samples".into()));
        }
        if l == 0 {
            return Err(Error::InvalidData("samples have no coordinates".into()));
        }
        if let Some((idx, _)) = points.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite coordinate at sample {}, column {}",
                idx / l,
                idx % l
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::LengthMismatch {
                    left: labels.len(),
                    right: n,
                });
            }
            check_contiguous(labels)?;
        }
        Ok(Self {
            name: name.into(),
            points,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    /// Dimension of the sample space.
    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Number of ground-truth classes, if labelled.
    pub fn num_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|ls| ls.iter().max().map_or(0, |&m| m + 1))
    }

    /// Drops the ground-truth labels.
    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }
}

fn check_contiguous(labels: &[usize]) -> Result<()> {
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut seen = vec![false; k];
    for &l in labels {
        seen[l] = true;
    }
    match seen.iter().position(|&s| !s) {
        Some(missing) => Err(Error::InvalidData(format!(
            "labels are not contiguous: {missing} unused in 0..{k}"
        ))),
        None => Ok(()),
    }
}
