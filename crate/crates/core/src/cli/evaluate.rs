use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{csv_error, load_input, write_atomic, ConfigArgs, MatchArgs, EXIT_OK};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::matching::{classify_batch, BatchMetrics, Label};

#[derive(Debug, Deserialize)]
pub struct ManifestRecord {
    pub path_a: String,
    pub path_b: String,
    pub label: String,
    #[serde(default)]
    pub obfuscation: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ManifestRow {
    pub path_a: PathBuf,
    pub path_b: PathBuf,
    pub label: Label,
    /// Obfuscation descriptor, or the label when none is given.
    pub group: String,
}

/// Reads a headerful CSV manifest; relative paths are taken from the
/// manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<ManifestRecord>().enumerate() {
        let rec = rec.map_err(|e| Error::invalid(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        let label: Label = rec.label.parse()?;
        let group = rec.obfuscation.filter(|s| !s.is_empty()).unwrap_or_else(|| label.as_str().to_string());
        rows.push(ManifestRow { path_a: base.join(rec.path_a), path_b: base.join(rec.path_b), label, group });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("manifest has no rows"));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    lambda: f64,
    smooth_k: usize,
    #[serde(flatten)]
    metrics: &'a BatchMetrics,
}

/// `(group, error, cumulative fraction)` for every pair, groups in name order.
pub fn cumulative_by_group(rows: &[ManifestRow], errors: &[f64]) -> Vec<(String, f64, f64)> {
    let mut groups: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (row, &e) in rows.iter().zip(errors) {
        groups.entry(&row.group).or_default().push(e);
    }
    let mut out = Vec::new();
    for (g, mut es) in groups {
        es.sort_by(f64::total_cmp);
        let n = es.len() as f64;
        out.extend(es.into_iter().enumerate().map(|(i, e)| (g.to_string(), e, (i + 1) as f64 / n)));
    }
    out
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(&r).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::invalid(e.to_string()))
}

pub fn run(manifest: &Path, out_dir: &Path, m: &MatchArgs, config: &ConfigArgs) -> Result<u8> {
    let cfg = config.to_config(m.lambda)?;
    let rows = read_manifest(manifest)?;

    let mut unique: Vec<&PathBuf> = rows.iter().flat_map(|r| [&r.path_a, &r.path_b]).collect();
    unique.sort();
    unique.dedup();
    let fingerprints: HashMap<&PathBuf, Fingerprint> = unique
        .par_iter()
        .map(|p| load_input(p, &cfg).map(|fp| (*p, fp)))
        .collect::<Result<_>>()?;
    let pairs: Vec<(Fingerprint, Fingerprint, Label)> = rows
        .iter()
        .map(|r| (fingerprints[&r.path_a].clone(), fingerprints[&r.path_b].clone(), r.label))
        .collect();
    let params = m.params();
    let metrics = classify_batch(&pairs, &params)?;

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let errors: Vec<f64> = metrics.scores.iter().map(|s| s.error).collect();
    let scores = csv_bytes(
        &["path_a", "path_b", "label", "group", "error", "rho", "decision"],
        rows.iter().zip(&metrics.scores).map(|(r, s)| {
            vec![
                r.path_a.display().to_string(),
                r.path_b.display().to_string(),
                r.label.as_str().to_string(),
                r.group.clone(),
                s.error.to_string(),
                s.rho.to_string(),
                if s.error < params.kappa { "positive" } else { "negative" }.to_string(),
            ]
        }),
    )?;
    write_atomic(&out_dir.join("scores.csv"), &scores)?;
    let roc = csv_bytes(
        &["threshold", "fpr", "tpr"],
        metrics.roc.iter().map(|p| {
            vec![p.threshold.map_or("inf".to_string(), |t| t.to_string()), p.fpr.to_string(), p.tpr.to_string()]
        }),
    )?;
    write_atomic(&out_dir.join("roc.csv"), &roc)?;
    let cdf = csv_bytes(
        &["group", "error", "cumulative_fraction"],
        cumulative_by_group(&rows, &errors).into_iter().map(|(g, e, f)| vec![g, e.to_string(), f.to_string()]),
    )?;
    write_atomic(&out_dir.join("cdf.csv"), &cdf)?;
    let json = serde_json::to_string_pretty(&MetricsFile { lambda: m.lambda, smooth_k: m.smooth_k, metrics: &metrics })
        .expect("metrics serialise");
    write_atomic(&out_dir.join("metrics.json"), json.as_bytes())?;
    println!("{json}");
    Ok(EXIT_OK)
}
