//! The `transclust` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 1 for usage errors, 2 for data errors.

pub mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use transclust::clustering::{AssignmentRecord, StageTiming};
use transclust::dataset::write_csv_to;
use transclust::eval::{scaling_benchmark, BenchConfig};
use transclust::prelude::*;

use crate::render::{heatmap_pgm, heatmap_svg, scatter_svg, RenderError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] transclust::Error),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "transclust",
    version,
    about = "Clustering with transitive distances"
)]
pub struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true, env = "TRANSCLUST_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic labelled dataset as CSV (label in the last column).
    Generate(GenerateArgs),
    /// Cluster a CSV dataset and write the assignment as JSON.
    Cluster(ClusterArgs),
    /// Cluster a labelled dataset and score it against the labels.
    Evaluate(EvaluateArgs),
    /// Render a distance matrix as an SVG or PGM heatmap.
    Heatmap(HeatmapArgs),
    /// Render a 2-D dataset as a coloured SVG scatter plot.
    Scatter(ScatterArgs),
    /// Time the pipeline stages over growing sizes.
    Bench(BenchArgs),
    /// Compare K-means on coordinates with K-means on distance rows.
    Duality(DualityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    TwoMoon,
    MultiScale,
    Rings,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file of samples, one per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Zero-based column holding class labels.
    #[arg(long)]
    pub label_col: Option<usize>,
}

#[derive(Debug, Args)]
pub struct KMeansArgs {
    /// Number of clusters (default: number of classes in the labels).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value = "plus-plus", value_parser = parse_seeding)]
    pub seeding: Seeding,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "two-moon")]
    pub shape: ShapeArg,
    /// Points per cluster, comma separated (default depends on the shape).
    #[arg(long, value_delimiter = ',')]
    pub samples: Option<Vec<usize>>,
    /// Uniform background points, labelled as one extra cluster.
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Destination CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kmeans: KMeansArgs,
    #[arg(long, default_value = "transitive")]
    pub method: Method,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    /// Destination JSON (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the transitive distance matrix as text.
    #[arg(long)]
    pub dump_distance: Option<PathBuf>,
    /// Also write the minimum spanning tree as `u,v,w` lines.
    #[arg(long)]
    pub mst_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub label_col: usize,
    #[command(flatten)]
    pub kmeans: KMeansArgs,
    #[arg(long, default_value = "transitive")]
    pub method: Method,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    /// Include per-stage wall times in the report.
    #[arg(long)]
    pub timings: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    /// Path order: 1 draws the raw distances, 2 or more the order-k
    /// transitive distance; omitted draws the full transitive distance.
    #[arg(long)]
    pub order: Option<usize>,
    /// Output file; `.pgm` selects a binary greymap, anything else SVG.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Assignment JSON written by `cluster`; otherwise the dataset labels
    /// are used, or the data is clustered when `--k` is given.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub kmeans: KMeansArgs,
    #[arg(long, default_value = "transitive")]
    pub method: Method,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    /// Overlay the minimum spanning tree.
    #[arg(long)]
    pub mst: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub shape: ShapeArg,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also time K-means on the transitive rows.
    #[arg(long)]
    pub kmeans: bool,
    /// Let the kernels use the thread pool instead of one thread.
    #[arg(long)]
    pub parallel: bool,
    /// Destination for the `n,stage,ms` table (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    /// Dataset to measure; without it, seeded three-cluster Gaussian
    /// mixtures are generated.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub label_col: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of generated mixtures.
    #[arg(long, default_value_t = 20)]
    pub sets: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_seeding(s: &str) -> Result<Seeding, String> {
    s.parse().map_err(|e: transclust::Error| e.to_string())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> CliResult {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Generate(a) => generate_cmd(a),
        Command::Cluster(a) => cluster_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Heatmap(a) => heatmap_cmd(a),
        Command::Scatter(a) => scatter_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Duality(a) => duality_cmd(a),
    })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs `body` against the file at `path`, or stdout when absent.
fn with_output(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            body(&mut w).and_then(|()| w.flush()).map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match body(&mut lock) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    Err(io_err(Path::new("<stdout>"))(e))
                }
                _ => Ok(()),
            }
        }
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.unwrap_or(Path::new("<stdout>")).to_path_buf(),
        source,
    })?;
    with_output(path, |w| writeln!(w, "{text}"))
}

fn load(path: &Path, label_col: Option<usize>) -> CliResult<DataSet> {
    Ok(load_csv(path, label_col)?.dataset)
}

fn kmeans_config(args: &KMeansArgs, data: &DataSet) -> CliResult<KMeansConfig> {
    let k = match (args.k, data.num_classes()) {
        (Some(k), _) => k,
        (None, Some(k)) => k,
        (None, None) => {
            return Err(CliError::Usage(
                "--k is required when the dataset has no labels".into(),
            ))
        }
    };
    let cfg = KMeansConfig::new(k, args.seed)
        .with_restarts(args.restarts)
        .with_seeding(args.seeding);
    Ok(cfg)
}

fn spec_for(
    shape: ShapeArg,
    samples: Option<Vec<usize>>,
    noise: usize,
    seed: u64,
) -> SyntheticSpec {
    let mut spec = match shape {
        ShapeArg::TwoMoon => SyntheticSpec::two_moon(25, seed),
        ShapeArg::MultiScale => SyntheticSpec::multi_scale(seed),
        ShapeArg::Rings => SyntheticSpec::rings(100, 0, seed),
        ShapeArg::Gaussian => SyntheticSpec::gaussian_mixture(
            vec![(0.3, 0.3), (0.7, 0.3), (0.5, 0.7)],
            vec![0.08; 3],
            vec![67, 67, 66],
            seed,
        ),
    };
    if let Some(s) = samples {
        spec.samples_per_cluster = s;
    }
    spec.noise_count = noise;
    spec
}

fn generate_cmd(a: GenerateArgs) -> CliResult {
    let data = generate(&spec_for(a.shape, a.samples, a.noise, a.seed))?;
    with_output(a.out.as_deref(), |w| write_csv_to(&data, w))
}

fn cluster_cmd(a: ClusterArgs) -> CliResult {
    let data = load(&a.input.input, a.input.label_col)?;
    let cfg = kmeans_config(&a.kmeans, &data)?;
    let assignment = if a.method == Method::Transitive {
        let run = run_transitive(&data, &cfg, a.metric)?;
        if let Some(p) = &a.dump_distance {
            with_output(Some(p), |w| run.transitive.matrix().write_text(w))?;
        }
        if let Some(p) = &a.mst_out {
            with_output(Some(p), |w| run.tree.write_edge_list(w))?;
        }
        run.assignment
    } else {
        if a.dump_distance.is_some() || a.mst_out.is_some() {
            let e = build_distance_matrix(&data, a.metric)?;
            let tree = build_mst(&e)?;
            if let Some(p) = &a.dump_distance {
                with_output(Some(p), |w| forest_cut(&tree).matrix().write_text(w))?;
            }
            if let Some(p) = &a.mst_out {
                with_output(Some(p), |w| tree.write_edge_list(w))?;
            }
        }
        cluster(&data, a.method, &cfg, a.metric)?
    };
    let record = AssignmentRecord::new(&assignment, a.method, a.metric, &cfg);
    write_json(a.out.as_deref(), &record)
}

fn evaluate_cmd(a: EvaluateArgs) -> CliResult {
    let data = load(&a.input, Some(a.label_col))?;
    let cfg = kmeans_config(&a.kmeans, &data)?;
    let (assignment, timings) = if a.method == Method::Transitive {
        let run = run_transitive(&data, &cfg, a.metric)?;
        (run.assignment, run.timings)
    } else {
        let start = Instant::now();
        let assignment = cluster(&data, a.method, &cfg, a.metric)?;
        let t = StageTiming {
            stage: "cluster",
            ms: start.elapsed().as_secs_f64() * 1e3,
        };
        (assignment, vec![t])
    };
    let truth = data.labels().ok_or(transclust::Error::MissingLabels)?;
    let mut report = error_rate(&assignment.labels, truth)?;
    if a.timings {
        report.stage_ms = timings;
    }
    report.config = BTreeMap::from([
        ("input".to_string(), json!(a.input.display().to_string())),
        ("label_col".to_string(), json!(a.label_col)),
        ("method".to_string(), json!(a.method)),
        ("metric".to_string(), json!(a.metric)),
        ("kmeans".to_string(), json!(cfg)),
    ]);
    write_json(a.out.as_deref(), &report)
}

fn heatmap_cmd(a: HeatmapArgs) -> CliResult {
    let data = load(&a.input.input, a.input.label_col)?;
    let e = build_distance_matrix(&data, a.metric)?;
    let m = match a.order {
        Some(0) => return Err(CliError::Usage("--order must be at least 1".into())),
        Some(1) => e,
        Some(k) if k > data.n() => {
            return Err(CliError::Usage(format!(
                "--order {k} exceeds the number of samples ({})",
                data.n()
            )))
        }
        Some(k) => order_k_distance(&e, k)?.into_matrix(),
        None => forest_cut(&build_mst(&e)?).into_matrix(),
    };
    let pgm = a
        .out
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"));
    if pgm {
        with_output(Some(&a.out), |w| w.write_all(&heatmap_pgm(&m)))
    } else {
        with_output(Some(&a.out), |w| w.write_all(heatmap_svg(&m).as_bytes()))
    }
}

#[derive(serde::Deserialize)]
struct LabelsFile {
    labels: Vec<usize>,
}

fn scatter_cmd(a: ScatterArgs) -> CliResult {
    let data = load(&a.input.input, a.input.label_col)?;
    if data.dim() != 2 {
        return Err(RenderError::NotPlanar(data.dim()).into());
    }
    let labels = if let Some(p) = &a.labels {
        let text = fs::read_to_string(p).map_err(io_err(p))?;
        let file: LabelsFile = serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: p.clone(),
            source,
        })?;
        file.labels
    } else if a.kmeans.k.is_some() {
        let cfg = kmeans_config(&a.kmeans, &data)?;
        cluster(&data, a.method, &cfg, a.metric)?.labels
    } else if let Some(l) = data.labels() {
        l.to_vec()
    } else {
        vec![0; data.n()]
    };
    let tree = if a.mst {
        Some(build_mst(&build_distance_matrix(&data, a.metric)?)?)
    } else {
        None
    };
    let svg = scatter_svg(&data, &labels, tree.as_ref())?;
    with_output(Some(&a.out), |w| w.write_all(svg.as_bytes()))
}

fn bench_cmd(a: BenchArgs) -> CliResult {
    let template = spec_for(a.shape, None, 0, a.seed);
    let k = template.samples_per_cluster.len();
    let cfg = BenchConfig {
        sizes: a.sizes,
        template,
        repeats: a.repeats,
        metric: a.metric,
        kmeans: a.kmeans.then(|| KMeansConfig::new(k, a.seed)),
        parallel: a.parallel,
    };
    let report = scaling_benchmark(&cfg)?;
    with_output(a.out.as_deref(), |w| report.write_csv(w))?;
    let mut stdout = io::stdout().lock();
    let _ = writeln!(stdout, "slope {:.3}", report.transitive_slope);
    for (stage, slope) in &report.stage_slopes {
        let _ = writeln!(stdout, "slope[{stage}] {slope:.3}");
    }
    Ok(())
}

#[derive(Serialize)]
struct DualityReport {
    metric: Metric,
    k: usize,
    seed: u64,
    differences: Vec<f64>,
    mean: f64,
}

fn duality_cmd(a: DualityArgs) -> CliResult {
    let (k, differences) = if let Some(input) = &a.input {
        let data = load(input, a.label_col)?;
        let args = KMeansArgs {
            k: a.k,
            seed: a.seed,
            restarts: 10,
            seeding: Seeding::PlusPlus,
        };
        let cfg = kmeans_config(&args, &data)?;
        (cfg.k, vec![duality_difference(&data, &cfg, a.metric)?])
    } else {
        if a.sets == 0 {
            return Err(CliError::Usage("--sets must be at least 1".into()));
        }
        let k = a.k.unwrap_or(3);
        let diffs = (0..a.sets as u64)
            .map(|i| {
                let data = generate(&spec_for(ShapeArg::Gaussian, None, 0, a.seed + i))?;
                duality_difference(&data, &KMeansConfig::new(k, a.seed + i), a.metric)
            })
            .collect::<transclust::Result<Vec<_>>>()?;
        (k, diffs)
    };
    let mean = differences.iter().sum::<f64>() / differences.len() as f64;
    write_json(
        a.out.as_deref(),
        &DualityReport {
            metric: a.metric,
            k,
            seed: a.seed,
            differences,
            mean,
        },
    )
}
