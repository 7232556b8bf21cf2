//! SVG and PGM figure output.

use std::fmt::Write as _;

use transclust::dataset::DataSet;
use transclust::distance::DistanceMatrix;
use transclust::mst::SpanningTree;

/// Categorical palette, cycled when there are more clusters than colours.
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("scatter plots need 2-D samples, got {0} dimensions; use `heatmap` instead")]
    NotPlanar(usize),
    #[error("{labels} labels for {n} samples")]
    LabelCount { labels: usize, n: usize },
}

/// Maps sample coordinates into the unit square. Data already inside it is
/// left untouched; anything else is scaled by its bounding box.
fn unit_square_transform(data: &DataSet) -> impl Fn(f64, f64) -> (f64, f64) {
    let pts = data.points();
    let inside = pts.iter().all(|&v| (0.0..=1.0).contains(&v));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for row in pts.rows() {
        for d in 0..2 {
            lo[d] = lo[d].min(row[d]);
            hi[d] = hi[d].max(row[d]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    move |x, y| {
        if inside {
            (x, y)
        } else {
            (
                0.05 + 0.9 * (x - lo[0]) / span,
                0.05 + 0.9 * (y - lo[1]) / span,
            )
        }
    }
}

/// Coloured scatter plot of a 2-D dataset, one colour per label, with an
/// optional spanning-tree overlay. The y axis points up.
pub fn scatter_svg(
    data: &DataSet,
    labels: &[usize],
    tree: Option<&SpanningTree>,
) -> Result<String, RenderError> {
    if data.dim() != 2 {
        return Err(RenderError::NotPlanar(data.dim()));
    }
    if labels.len() != data.n() {
        return Err(RenderError::LabelCount {
            labels: labels.len(),
            n: data.n(),
        });
    }
    let map = unit_square_transform(data);
    let pos = |i: usize| {
        let p = data.point(i);
        let (x, y) = map(p[0], p[1]);
        (x, 1.0 - y)
    };

    let mut svg = String::new();
    svg.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 1 1\">\n",
    );
    svg.push_str("<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"white\"/>\n");
    if let Some(tree) = tree {
        svg.push_str("<g stroke=\"#999999\" stroke-width=\"0.002\">\n");
        for e in tree.edges() {
            let (x1, y1) = pos(e.u);
            let (x2, y2) = pos(e.v);
            let _ = writeln!(
                svg,
                "<line x1=\"{x1:.5}\" y1=\"{y1:.5}\" x2=\"{x2:.5}\" y2=\"{y2:.5}\"/>"
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("<g stroke=\"black\" stroke-width=\"0.001\">\n");
    for (i, &label) in labels.iter().enumerate() {
        let (x, y) = pos(i);
        let _ = writeln!(
            svg,
            "<circle cx=\"{x:.5}\" cy=\"{y:.5}\" r=\"0.006\" fill=\"{}\"/>",
            PALETTE[label % PALETTE.len()]
        );
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

/// Grey level of each cell: `255 * (1 - D / max D)`, so small distances are
/// bright.
fn intensities(m: &DistanceMatrix) -> Vec<u8> {
    let max = m.max_value();
    m.view()
        .iter()
        .map(|&d| {
            let intensity = if max > 0.0 { 1.0 - d / max } else { 1.0 };
            (255.0 * intensity).round() as u8
        })
        .collect()
}

/// Matrix heatmap as an SVG grid of `n x n` unit squares.
pub fn heatmap_svg(m: &DistanceMatrix) -> String {
    let n = m.n();
    let grey = intensities(m);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 {n} {n}\" shape-rendering=\"crispEdges\">\n"
    );
    for i in 0..n {
        for j in 0..n {
            let g = grey[i * n + j];
            let _ = writeln!(
                svg,
                "<rect x=\"{j}\" y=\"{i}\" width=\"1\" height=\"1\" fill=\"rgb({g},{g},{g})\"/>"
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Binary (P5) greymap, one pixel per matrix cell.
pub fn heatmap_pgm(m: &DistanceMatrix) -> Vec<u8> {
    let n = m.n();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(intensities(m));
    out
}
