use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::DataSet;
use crate::error::{Error, Result};

/// Result of reading a CSV file.
#[derive(Debug, Clone)]
pub struct CsvLoad {
    pub dataset: DataSet,
    /// Original label cell for each contiguous label, indexed by label.
    pub label_names: Vec<String>,
    /// Non-fatal issues, e.g. labels that had to be renumbered.
    pub warnings: Vec<String>,
}

/// Reads a comma-separated file of reals.
///
/// A header row is detected when any of its feature cells fails to parse as a
/// number. `label_column` (zero-based) is split off and renumbered to `0..k`:
/// numeric labels keep their ascending order, string labels (`g`/`b`,
/// `Iris-setosa`, ...) are numbered by first appearance.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<usize>) -> Result<CsvLoad> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into());
    parse_csv(file, &name, path, label_column)
}

/// Same as [`load_csv`] on an arbitrary reader; `source` is used in messages.
pub fn parse_csv<R: Read>(
    reader: R,
    name: &str,
    source: &Path,
    label_column: Option<usize>,
) -> Result<CsvLoad> {
    let parse_err = |row: usize, message: String| Error::Parse {
        path: source.to_path_buf(),
        row,
        message,
    };

    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(reader);

    let mut width: Option<usize> = None;
    let mut coords: Vec<f64> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut rows = 0usize;

    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if let Some(col) = label_column {
            if col >= record.len() {
                return Err(parse_err(
                    line,
                    format!("label column {col} out of range for {} cells", record.len()),
                ));
            }
        }
        let is_feature = |c: usize| Some(c) != label_column;

        if width.is_none() {
            let header = record
                .iter()
                .enumerate()
                .any(|(c, cell)| is_feature(c) && cell.parse::<f64>().is_err());
            width = Some(record.len());
            if header {
                continue;
            }
        }
        let expected = width.unwrap_or(record.len());
        if record.len() != expected {
            return Err(parse_err(
                line,
                format!("expected {expected} cells, found {}", record.len()),
            ));
        }
        for (c, cell) in record.iter().enumerate() {
            if !is_feature(c) {
                raw_labels.push(cell.to_string());
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, format!("cell {c} is not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("cell {c} is not finite")));
            }
            coords.push(v);
        }
        rows += 1;
    }

    if rows == 0 {
        return Err(Error::Empty(format!(
            "{} contains no data rows",
            source.display()
        )));
    }
    let dims = coords.len() / rows;
    let points = Array2::from_shape_vec((rows, dims), coords)
        .map_err(|e| Error::InvalidData(e.to_string()))?;

    let mut warnings = Vec::new();
    let (labels, label_names) = if label_column.is_some() {
        let (labels, names, renumbered) = map_labels(&raw_labels);
        if renumbered {
            warnings.push(format!(
                "numeric labels {names:?} were not contiguous from 0; renumbered to 0..{}",
                names.len()
            ));
        }
        (Some(labels), names)
    } else {
        (None, Vec::new())
    };
    for w in &warnings {
        log::warn!("{}: {w}", source.display());
    }

    Ok(CsvLoad {
        dataset: DataSet::new(name, points, labels)?,
        label_names,
        warnings,
    })
}

/// Returns (labels, names-by-label, whether numeric labels had to be renumbered).
fn map_labels(raw: &[String]) -> (Vec<usize>, Vec<String>, bool) {
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
    match numeric {
        Some(values) => {
            let mut distinct = values.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            let labels = values
                .iter()
                .map(|v| distinct.partition_point(|d| d < v))
                .collect();
            let renumbered = distinct.iter().enumerate().any(|(i, &v)| v != i as f64);
            let names = distinct.iter().map(|v| v.to_string()).collect();
            (labels, names, renumbered)
        }
        None => {
            let mut names: Vec<String> = Vec::new();
            let labels = raw
                .iter()
                .map(|s| match names.iter().position(|n| n == s) {
                    Some(i) => i,
                    None => {
                        names.push(s.clone());
                        names.len() - 1
                    }
                })
                .collect();
            (labels, names, false)
        }
    }
}

/// Writes points (and labels, as a trailing column) without a header.
///
/// Reals use the shortest representation that parses back to the same `f64`.
pub fn write_csv(data: &DataSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    write_csv_to(data, &mut out)
        .and_then(|()| out.flush())
        .map_err(io_err)
}

/// [`write_csv`] to any writer.
pub fn write_csv_to<W: Write>(data: &DataSet, mut out: W) -> std::io::Result<()> {
    for (i, row) in data.points().rows().into_iter().enumerate() {
        let mut line = row
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if let Some(labels) = data.labels() {
            line.push(',');
            line.push_str(&labels[i].to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
