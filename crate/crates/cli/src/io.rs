//! CSV dataset generation and ingestion.
//!
//! File shape: a header row `x1,...,xn,y` followed by one row per example.
//! Labels are `-1`/`+1`, or `0`/`1` when the caller opts into the mapping
//! (0 becomes -1).

use std::path::Path;

use anyhow::{bail, Context, Result};

use tlkit_core::dist::{halfspace_label, Distribution};
use tlkit_core::rng::stream_rng;
use tlkit_core::LabeledDataset;

/// Generate `samples` labeled examples from `dist` in dimension `n`.
///
/// Labels: the planted parity `x1 x2` (equal to `x3`) for `parity-planted`,
/// otherwise the majority halfspace `sign(x1 + ... + xn)`.
pub fn generate_dataset(
    dist: Distribution,
    n: usize,
    samples: usize,
    seed: u64,
) -> LabeledDataset {
    let mut rng = stream_rng(seed, "support");
    let ones = vec![1.0; n];
    let mut examples = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = dist.sample(n, &mut rng);
        let y = match dist {
            Distribution::ParityPlanted => x[0] * x[1],
            _ => halfspace_label(&ones, 0.0, &x),
        };
        examples.push(x);
        labels.push(y);
    }
    LabeledDataset::new(examples, labels, Some(seed)).expect("generated data is well-formed")
}

/// Write a dataset as CSV to `writer`.
pub fn write_csv<W: std::io::Write>(data: &LabeledDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=data.dim).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (x, y) in data.examples.iter().zip(&data.labels) {
        let mut row: Vec<String> = x.iter().map(|c| format!("{c}")).collect();
        row.push(format!("{}", *y as i64));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a labeled dataset from a CSV file.
///
/// The header must contain a `y` column; every other column is a feature, in
/// header order. Labels must be `-1`/`+1`, or `0`/`1` with
/// `zero_one_labels` (0 maps to -1). Errors name the row and column.
pub fn ingest_dataset(path: &Path, zero_one_labels: bool) -> Result<LabeledDataset> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("opening dataset {}", path.display()))?;
    let headers = reader.headers().context("reading CSV header")?.clone();
    let y_col = headers
        .iter()
        .position(|h| h == "y")
        .with_context(|| "dataset header has no \"y\" column")?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&j| j != y_col).collect();
    if feature_cols.is_empty() {
        bail!("dataset has no feature columns");
    }

    let mut examples = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after the header
        let record = record.with_context(|| format!("reading row {row}"))?;
        if record.len() != headers.len() {
            bail!("row {row} has {} fields, expected {}", record.len(), headers.len());
        }
        let mut x = Vec::with_capacity(feature_cols.len());
        for &j in &feature_cols {
            let v: f64 = record[j].trim().parse().with_context(|| {
                format!("row {row}, column {:?}: not a number: {:?}", &headers[j], &record[j])
            })?;
            if !v.is_finite() {
                bail!("row {row}, column {:?}: non-finite value", &headers[j]);
            }
            x.push(v);
        }
        let raw: f64 = record[y_col].trim().parse().with_context(|| {
            format!("row {row}, column \"y\": not a number: {:?}", &record[y_col])
        })?;
        let y = match raw {
            v if v == 1.0 => 1.0,
            v if v == -1.0 && !zero_one_labels => -1.0,
            v if v == 0.0 && zero_one_labels => -1.0,
            _ => bail!(
                "row {row}, column \"y\": label {raw} not in {}",
                if zero_one_labels { "{0, 1}" } else { "{-1, +1}" }
            ),
        };
        examples.push(x);
        labels.push(y);
    }
    if examples.is_empty() {
        bail!("dataset {} has no data rows", path.display());
    }
    LabeledDataset::new(examples, labels, None)
        .map_err(|e| anyhow::anyhow!("dataset {}: {e}", path.display()))
}
