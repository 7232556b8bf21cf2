//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero when any of them fails.

use std::path::PathBuf;
use std::time::Instant;

use ndarray::Array2;
use transclust::dataset::write_csv;
use transclust::eval::{global_separation, scaling_benchmark, BenchConfig};
use transclust::prelude::*;
use transclust::rng::SeededRng;

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn random_dataset(rng: &mut SeededRng, n: usize, l: usize, quantized: bool) -> DataSet {
    let pts = Array2::from_shape_fn((n, l), |_| {
        let v = rng.uniform();
        if quantized {
            (v * 8.0).floor()
        } else {
            v
        }
    });
    DataSet::new("random", pts, None).unwrap()
}

/// The 50 random datasets shared by the first two criteria. Every fifth one
/// sits on an integer grid so that tied distances occur.
fn random_corpus() -> Vec<DataSet> {
    let mut rng = SeededRng::new(2024);
    (0..50)
        .map(|i| {
            let n = 10 + rng.below(191);
            let l = 2 + rng.below(7);
            random_dataset(&mut rng, n, l, i % 5 == 4)
        })
        .collect()
}

fn same_bits(a: &DistanceMatrix, b: &DistanceMatrix) -> bool {
    a.view()
        .iter()
        .zip(b.view().iter())
        .all(|(x, y)| x.to_bits() == y.to_bits())
}

fn oracle_equivalence(corpus: &[DataSet]) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (i, data) in corpus.iter().enumerate() {
        let e = build_distance_matrix(data, Metric::Euclidean).unwrap();
        let tree = build_mst(&e).unwrap();
        let fc = forest_cut(&tree);
        let fl = floyd_minimax(&e);
        let pm = path_max_matrix(&tree);
        if !same_bits(fc.matrix(), fl.matrix()) || !same_bits(fc.matrix(), pm.matrix()) {
            bad.push(i);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 30.0,
        format!(
            "{} datasets, {} mismatching, {secs:.2} s (limit 30 s)",
            corpus.len(),
            bad.len()
        ),
    )
}

fn ultrametric(corpus: &[DataSet]) -> Outcome {
    let mut violations = 0;
    let mut first = None;
    for data in corpus {
        let e = build_distance_matrix(data, Metric::Euclidean).unwrap();
        let d = forest_cut(&build_mst(&e).unwrap());
        if let Some(v) = check_ultrametric(d.matrix(), 0.0) {
            violations += 1;
            first.get_or_insert(v);
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} datasets, {violations} violating, first {first:?}",
            corpus.len()
        ),
    )
}

fn exhaustive_minimax(e: &DistanceMatrix, s: usize, t: usize) -> f64 {
    fn walk(
        e: &DistanceMatrix,
        at: usize,
        t: usize,
        worst: f64,
        seen: &mut Vec<bool>,
        best: &mut f64,
    ) {
        if at == t {
            *best = best.min(worst);
            return;
        }
        for next in 0..e.n() {
            if !seen[next] {
                seen[next] = true;
                walk(e, next, t, worst.max(e.get(at, next)), seen, best);
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; e.n()];
    seen[s] = true;
    let mut best = f64::INFINITY;
    walk(e, s, t, 0.0, &mut seen, &mut best);
    best
}

fn paths_through_tree() -> Outcome {
    let mut rng = SeededRng::new(99);
    let mut pairs = 0;
    let mut bad = 0;
    for inst in 0..20 {
        let n = 3 + rng.below(7);
        let data = random_dataset(&mut rng, n, 2, inst % 4 == 3);
        let e = build_distance_matrix(&data, Metric::Euclidean).unwrap();
        let tree = build_mst(&e).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                pairs += 1;
                if exhaustive_minimax(&e, i, j).to_bits() != tree.path_max(i, j).unwrap().to_bits()
                {
                    bad += 1;
                }
            }
        }
    }
    outcome(
        bad == 0,
        format!("20 instances, {pairs} pairs, {bad} mismatching"),
    )
}

fn consistent_separation() -> Outcome {
    let mut candidates = Vec::new();
    for seed in 0..10 {
        candidates.push(SyntheticSpec::two_moon(25, seed));
    }
    for seed in 0..10 {
        candidates.push(SyntheticSpec::gaussian_mixture(
            vec![(0.2, 0.2), (0.8, 0.25), (0.5, 0.8)],
            vec![0.03; 3],
            vec![40, 40, 40],
            seed,
        ));
    }
    let mut checked = 0;
    let mut failures = Vec::new();
    for spec in candidates {
        let data = generate(&spec).unwrap();
        let truth = data.labels().unwrap().to_vec();
        if !check_consistency(&data, Metric::Euclidean)
            .unwrap()
            .consistent
        {
            failures.push(format!("seed {} inconsistent", spec.seed));
            continue;
        }
        checked += 1;
        let k = data.num_classes().unwrap();
        let run =
            run_transitive(&data, &KMeansConfig::new(k, spec.seed), Metric::Euclidean).unwrap();
        let (max_intra, min_inter) = global_separation(run.transitive.matrix(), &truth);
        let err = error_rate(&run.assignment.labels, &truth)
            .unwrap()
            .error_rate;
        if max_intra >= min_inter || err != 0.0 {
            failures.push(format!(
                "seed {}: intra {max_intra:.4} inter {min_inter:.4} error {err}",
                spec.seed
            ));
        }
    }
    outcome(
        checked == 20 && failures.is_empty(),
        format!("{checked}/20 consistent datasets checked; problems: {failures:?}"),
    )
}

fn uci_error(file: &str, label_col: usize) -> (f64, f64, f64) {
    let start = Instant::now();
    let data = load_csv(data_dir().join(file), Some(label_col))
        .unwrap()
        .dataset;
    let truth = data.labels().unwrap().to_vec();
    let cfg = KMeansConfig::new(data.num_classes().unwrap(), 0);
    let tr = cluster_transitive(&data, &cfg, Metric::Euclidean).unwrap();
    let base = cluster_kmeans_baseline(&data, &cfg).unwrap();
    (
        error_rate(&tr.labels, &truth).unwrap().error_rate,
        error_rate(&base.labels, &truth).unwrap().error_rate,
        start.elapsed().as_secs_f64(),
    )
}

fn uci_table() -> Outcome {
    let (iris_t, iris_b, iris_s) = uci_error("iris.csv", 4);
    let (iono_t, iono_b, iono_s) = uci_error("ionosphere.csv", 34);
    let checks = [
        iris_t <= 0.10,
        (0.08..=0.18).contains(&iris_b),
        iris_s < 10.0,
        iono_t <= 0.25,
        (0.25..=0.35).contains(&iono_b),
        iono_s < 10.0,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "iris transitive {iris_t:.3} (<= 0.10) baseline {iris_b:.3} ([0.08, 0.18]) {iris_s:.2} s; \
             ionosphere transitive {iono_t:.3} (<= 0.25) baseline {iono_b:.3} ([0.25, 0.35]) {iono_s:.2} s"
        ),
    )
}

fn duality() -> Outcome {
    let mut diffs = Vec::new();
    for seed in 0..20 {
        let spec = SyntheticSpec::gaussian_mixture(
            vec![(0.3, 0.3), (0.7, 0.3), (0.5, 0.7)],
            vec![0.08; 3],
            vec![67, 67, 66],
            seed,
        );
        let data = generate(&spec).unwrap();
        diffs.push(
            duality_difference(&data, &KMeansConfig::new(3, seed), Metric::Euclidean).unwrap(),
        );
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let mut ideal_max: f64 = 0.0;
    for seed in 0..5 {
        let spec = SyntheticSpec::gaussian_mixture(
            vec![(0.15, 0.15), (0.85, 0.2), (0.5, 0.85)],
            vec![0.02; 3],
            vec![67, 67, 66],
            seed,
        );
        let data = generate(&spec).unwrap();
        ideal_max = ideal_max.max(
            duality_difference(&data, &KMeansConfig::new(3, seed), Metric::Euclidean).unwrap(),
        );
    }
    outcome(
        mean <= 0.03 && ideal_max == 0.0,
        format!("mean difference {mean:.4} over 20 sets (<= 0.03), well-separated max {ideal_max}"),
    )
}

fn multi_scale() -> Outcome {
    let data = generate(&SyntheticSpec::multi_scale(0)).unwrap();
    let truth = data.labels().unwrap().to_vec();
    let cfg = KMeansConfig::new(3, 0);
    let tr = cluster_transitive(&data, &cfg, Metric::Euclidean).unwrap();
    let hi = cluster_hierarchical_mstcut(&data, 3, Metric::Euclidean).unwrap();
    let tr_err = error_rate(&tr.labels, &truth).unwrap().error_rate;
    let diff = error_rate(&hi.labels, &tr.labels).unwrap().error_rate;
    outcome(
        diff > 0.0 && tr_err == 0.0,
        format!("transitive error {tr_err}, hierarchical vs transitive difference {diff:.3}"),
    )
}

fn order_k() -> Outcome {
    let data = generate(&SyntheticSpec::two_moon(25, 7)).unwrap();
    let truth = data.labels().unwrap().to_vec();
    let e = build_distance_matrix(&data, Metric::Euclidean).unwrap();
    let ratios: Vec<f64> = (2..=6)
        .map(|k| {
            let d = order_k_distance(&e, k).unwrap();
            let (intra, inter) = global_separation(d.matrix(), &truth);
            inter / intra
        })
        .collect();
    let monotone = ratios.windows(2).all(|w| w[0] <= w[1]);
    let full = order_k_distance(&e, e.n()).unwrap();
    let exact = same_bits(full.matrix(), floyd_minimax(&e).matrix());
    outcome(
        monotone && exact,
        format!("ratios k=2..6 {ratios:.4?}, D_n equals closure: {exact}"),
    )
}

fn complexity() -> Outcome {
    let cfg = BenchConfig {
        sizes: vec![500, 1000, 2000, 4000],
        template: SyntheticSpec::gaussian_mixture(
            vec![(0.3, 0.3), (0.7, 0.3), (0.5, 0.7)],
            vec![0.08; 3],
            vec![100, 100, 100],
            1,
        ),
        repeats: 3,
        metric: Metric::Euclidean,
        kmeans: None,
        parallel: false,
    };
    let report = scaling_benchmark(&cfg).unwrap();
    let fc = report.median(4000, "forest_cut").unwrap();
    let slope = report.transitive_slope;
    outcome(
        (1.7..=2.4).contains(&slope) && fc < 5000.0,
        format!("slope {slope:.3} ([1.7, 2.4]), forest cut at n=4000 {fc:.1} ms (< 5000)"),
    )
}

fn shapes() -> Outcome {
    let mut errors = Vec::new();
    for seed in 0..5 {
        for spec in [
            SyntheticSpec::two_moon(25, seed),
            SyntheticSpec::rings(100, 0, seed),
        ] {
            let data = generate(&spec).unwrap();
            let k = data.num_classes().unwrap();
            let a =
                cluster_transitive(&data, &KMeansConfig::new(k, seed), Metric::Euclidean).unwrap();
            errors.push(
                error_rate(&a.labels, data.labels().unwrap())
                    .unwrap()
                    .error_rate,
            );
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labelled.csv");
    let source = generate(&SyntheticSpec::rings(80, 0, 11)).unwrap();
    write_csv(&source, &path).unwrap();
    let loaded = load_csv(&path, Some(source.dim())).unwrap().dataset;
    let a = cluster_transitive(&loaded, &KMeansConfig::new(2, 11), Metric::Euclidean).unwrap();
    let csv_err = error_rate(&a.labels, loaded.labels().unwrap())
        .unwrap()
        .error_rate;

    let worst = errors.iter().copied().fold(0.0, f64::max);
    outcome(
        worst == 0.0 && csv_err == 0.0,
        format!(
            "worst error over 5 seeds x 2 shapes {worst}, labelled CSV round trip error {csv_err}"
        ),
    )
}

fn main() {
    let corpus = random_corpus();
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "oracle equivalence",
            Box::new(|| oracle_equivalence(&corpus)),
        ),
        ("ultrametric property", Box::new(|| ultrametric(&corpus))),
        ("minimax paths lie on the MST", Box::new(paths_through_tree)),
        (
            "separation on consistent data",
            Box::new(consistent_separation),
        ),
        ("UCI error rates", Box::new(uci_table)),
        ("K-means duality", Box::new(duality)),
        ("multi-scale clusters", Box::new(multi_scale)),
        ("order-k monotonicity", Box::new(order_k)),
        ("quadratic scaling", Box::new(complexity)),
        ("arbitrary-shape clusters", Box::new(shapes)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
