use std::collections::BTreeMap;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use serde::Serialize;

use crate::clustering::StageTiming;
use crate::error::{Error, Result};

/// Agreement between a predicted labelling and the ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub error_rate: f64,
    pub mismatches: usize,
    /// `confusion[t][p]`: samples of true class `t` whose predicted label was
    /// matched to class `p`. Square, sized by the larger label count.
    pub confusion: Vec<Vec<usize>>,
    /// Class matched to each predicted label.
    pub matched_permutation: Vec<usize>,
    pub stage_ms: Vec<StageTiming>,
    pub config: BTreeMap<String, serde_json::Value>,
}

/// Error rate under the best one-to-one matching of predicted labels to true
/// classes, found exactly with the Hungarian method.
pub fn error_rate(predicted: &[usize], truth: &[usize]) -> Result<EvalReport> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let n = truth.len();
    if n == 0 {
        return Err(Error::Empty("no labels to compare".into()));
    }
    let kp = predicted.iter().max().map_or(0, |&m| m + 1);
    let kt = truth.iter().max().map_or(0, |&m| m + 1);
    let size = kp.max(kt);

    // counts[p][t]
    let mut counts = Matrix::new(size, size, 0i64);
    for (&p, &t) in predicted.iter().zip(truth) {
        counts[(p, t)] += 1;
    }
    let (matched, assignment) = kuhn_munkres(&counts);
    let mismatches = n - matched as usize;

    let mut confusion = vec![vec![0usize; size]; size];
    for (&p, &t) in predicted.iter().zip(truth) {
        confusion[t][assignment[p]] += 1;
    }
    Ok(EvalReport {
        n,
        error_rate: mismatches as f64 / n as f64,
        mismatches,
        confusion,
        matched_permutation: assignment[..kp].to_vec(),
        stage_ms: Vec::new(),
        config: BTreeMap::new(),
    })
}
