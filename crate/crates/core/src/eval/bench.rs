//! Per-stage timing of the transitive pipeline across problem sizes.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::dataset::{generate, SyntheticSpec};
use crate::distance::{build_distance_matrix, Metric};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansConfig};
use crate::mst::build_mst;
use crate::transitive::forest_cut;

/// Stages whose summed time is fitted against `n`.
pub const TRANSITIVE_STAGES: [&str; 3] = ["distance", "mst", "forest_cut"];

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Strictly ascending sample counts; at least three.
    pub sizes: Vec<usize>,
    /// Dataset shape; cluster sizes are rescaled to each `n`.
    pub template: SyntheticSpec,
    pub repeats: usize,
    pub metric: Metric,
    /// K-means settings for the optional `kmeans` stage; `k` is taken from
    /// the template.
    pub kmeans: Option<KMeansConfig>,
    /// Use the ambient rayon pool instead of a single worker thread.
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub stage: String,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Slope of `log(time)` against `log(n)` for distance + MST + forest cut.
    pub transitive_slope: f64,
    /// The same fit for each stage separately.
    pub stage_slopes: Vec<(String, f64)>,
}

impl BenchReport {
    pub fn median(&self, n: usize, stage: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.stage == stage)
            .map(|r| r.median_ms)
    }

    /// Writes `n,stage,ms` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,stage,ms")?;
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.n, r.stage, r.median_ms)?;
        }
        Ok(())
    }
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(1e-9).ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Times each pipeline stage at every size and fits the scaling exponent.
pub fn scaling_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.sizes.len() < 3 {
        return Err(Error::InvalidParameter(
            "scaling benchmark needs at least three sizes".into(),
        ));
    }
    if cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "sizes must be strictly ascending".into(),
        ));
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    if cfg.parallel {
        run(cfg)
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(|| run(cfg))
    }
}

fn run(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut stages: Vec<&str> = TRANSITIVE_STAGES.to_vec();
    if cfg.kmeans.is_some() {
        stages.push("kmeans");
    }
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let data = generate(&cfg.template.scaled_to(n))?;
        let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.repeats); stages.len()];
        for _ in 0..cfg.repeats {
            let t = Instant::now();
            let e = build_distance_matrix(&data, cfg.metric)?;
            samples[0].push(ms_since(t));
            let t = Instant::now();
            let tree = build_mst(&e)?;
            samples[1].push(ms_since(t));
            drop(e);
            let t = Instant::now();
            let d = forest_cut(&tree);
            samples[2].push(ms_since(t));
            if let Some(km) = &cfg.kmeans {
                let km = KMeansConfig {
                    k: cfg.template.samples_per_cluster.len(),
                    ..km.clone()
                };
                let t = Instant::now();
                kmeans(d.matrix().view(), &km)?;
                samples[3].push(ms_since(t));
            }
        }
        for (stage, s) in stages.iter().zip(samples) {
            rows.push(BenchRow {
                n,
                stage: stage.to_string(),
                median_ms: median(s),
            });
        }
    }

    let xs: Vec<f64> = cfg.sizes.iter().map(|&n| n as f64).collect();
    let per_size = |filter: &dyn Fn(&str) -> bool| -> Vec<f64> {
        cfg.sizes
            .iter()
            .map(|&n| {
                rows.iter()
                    .filter(|r| r.n == n && filter(&r.stage))
                    .map(|r| r.median_ms)
                    .sum()
            })
            .collect()
    };
    let transitive_slope = fit_loglog_slope(&xs, &per_size(&|s| TRANSITIVE_STAGES.contains(&s)));
    let stage_slopes = stages
        .iter()
        .map(|&stage| {
            (
                stage.to_string(),
                fit_loglog_slope(&xs, &per_size(&|s| s == stage)),
            )
        })
        .collect();
    Ok(BenchReport {
        rows,
        transitive_slope,
        stage_slopes,
    })
}
