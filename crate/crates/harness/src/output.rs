//! Result records, summary tables and their on-disk forms.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

pub const FLAG_NONCONVERGED: &str = "nonconverged";
pub const FLAG_ERROR: &str = "error";
/// No second real eigenvalue; the pair second by real part was used.
pub const FLAG_COMPLEX: &str = "complex";
/// Rewiring fell short of 95% of its triangle target.
pub const FLAG_SHORTFALL: &str = "shortfall";

/// One eigenpair measurement. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub grid: String,
    pub sample: usize,
    pub seed: u64,
    pub matrix: String,
    /// 1-based position in the matrix's selected eigenpairs.
    pub rank: usize,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub ipr_node: Option<f64>,
    /// IPR of the full `2N` vector (B only).
    pub ipr_full: Option<f64>,
    pub overlap: Option<f64>,
    pub residual: Option<f64>,
    /// `;`-separated flags.
    pub flags: String,
    pub wall_time: Option<f64>,
}

impl ResultRecord {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.split(';').any(|f| f == flag)
    }

    pub fn add_flag(&mut self, flag: &str) {
        if self.has_flag(flag) {
            return;
        }
        if !self.flags.is_empty() {
            self.flags.push(';');
        }
        self.flags.push_str(flag);
    }

    /// Left out of means: failed or unconverged solves.
    pub fn is_excluded(&self) -> bool {
        self.has_flag(FLAG_NONCONVERGED) || self.has_flag(FLAG_ERROR) || self.re.is_none()
    }
}

/// Mean and standard error over the non-excluded records of one
/// (grid point, matrix, rank) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub grid: String,
    pub matrix: String,
    pub rank: usize,
    pub samples: usize,
    pub excluded: usize,
    pub mean_re: Option<f64>,
    pub se_re: Option<f64>,
    pub mean_ipr_node: Option<f64>,
    pub se_ipr_node: Option<f64>,
    pub max_ipr_node: Option<f64>,
    pub mean_overlap: Option<f64>,
    pub se_overlap: Option<f64>,
    pub predicted_mu_re: Option<f64>,
    pub predicted_mu_im: Option<f64>,
    pub predicted_ipr: Option<f64>,
}

/// Rewire-scan density table: one row per (c_in - c_out, tau/N, matrix).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub delta: f64,
    pub tau_per_node: f64,
    pub matrix: String,
    pub samples: usize,
    pub excluded: usize,
    pub mean_ipr: Option<f64>,
    pub se_ipr: Option<f64>,
    pub mean_achieved_per_node: f64,
    pub shortfalls: usize,
}

/// Largest IPR among one matrix's selected eigenvectors of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxIprRow {
    pub network: String,
    pub matrix: String,
    pub pairs: usize,
    pub max_ipr: Option<f64>,
    pub rank_of_max: Option<usize>,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub records: Vec<ResultRecord>,
    pub summary: Vec<SummaryRow>,
    pub density: Vec<DensityRow>,
    pub max_ipr: Vec<MaxIprRow>,
}

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (Some(mean), None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some((var / n).sqrt()))
}

/// Groups by (grid, matrix, rank) in first-appearance order. `predict` maps
/// a group to its closed-form `(mu_re, mu_im, ipr)`, if any.
pub fn summarize(
    records: &[ResultRecord],
    predict: impl Fn(&str, &str, usize) -> Option<(f64, f64, f64)>,
) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String, usize)> = Vec::new();
    let mut groups: HashMap<(String, String, usize), Vec<&ResultRecord>> = HashMap::new();
    for r in records {
        let key = (r.grid.clone(), r.matrix.clone(), r.rank);
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rows = &groups[&key];
            let kept: Vec<&&ResultRecord> = rows.iter().filter(|r| !r.is_excluded()).collect();
            let col = |f: fn(&ResultRecord) -> Option<f64>| -> Vec<f64> {
                kept.iter().filter_map(|r| f(r)).collect()
            };
            let (mean_re, se_re) = mean_se(&col(|r| r.re));
            let ipr = col(|r| r.ipr_node);
            let (mean_ipr_node, se_ipr_node) = mean_se(&ipr);
            let (mean_overlap, se_overlap) = mean_se(&col(|r| r.overlap));
            let pred = predict(&key.0, &key.1, key.2);
            SummaryRow {
                experiment: rows[0].experiment.clone(),
                grid: key.0.clone(),
                matrix: key.1.clone(),
                rank: key.2,
                samples: kept.len(),
                excluded: rows.len() - kept.len(),
                mean_re,
                se_re,
                mean_ipr_node,
                se_ipr_node,
                max_ipr_node: ipr.iter().copied().reduce(f64::max),
                mean_overlap,
                se_overlap,
                predicted_mu_re: pred.map(|p| p.0),
                predicted_mu_im: pred.map(|p| p.1),
                predicted_ipr: pred.map(|p| p.2),
            }
        })
        .collect()
}

pub fn write_csv<W: Write, S: Serialize>(rows: &[S], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read, S: DeserializeOwned>(input: R) -> csv::Result<Vec<S>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn write_jsonl<W: Write, S: Serialize>(rows: &[S], mut out: W) -> std::io::Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<R: BufRead, S: DeserializeOwned>(input: R) -> Result<Vec<S>> {
    let mut rows = Vec::new();
    for (no, line) in input.lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io("<jsonl>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(
            serde_json::from_str(&line).map_err(|source| HarnessError::Json {
                context: format!("jsonl line {}", no + 1),
                source,
            })?,
        );
    }
    Ok(rows)
}

/// Written next to every output set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub base_seed: u64,
    pub config: ExperimentConfig,
    pub scale_notes: Vec<String>,
    pub versions: HashMap<String, String>,
    pub records: usize,
    pub excluded: usize,
    pub files: Vec<String>,
}

/// Writes `records.csv`, `records.jsonl`, `summary.csv`, the density or
/// max-IPR table when present, and `manifest.json` into `dir`. Returns the
/// paths written.
pub fn emit(output: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    if output.records.is_empty() {
        return Err(HarnessError::Config("nothing to emit: no records".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    let csv_file = |name: &str, written: &mut Vec<PathBuf>| -> Result<BufWriter<File>> {
        let path = dir.join(name);
        let f = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
        Ok(BufWriter::new(f))
    };
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Csv { path, source }
    };

    let f = csv_file("records.csv", &mut written)?;
    write_csv(&output.records, f).map_err(csv_err(&dir.join("records.csv")))?;
    let f = csv_file("records.jsonl", &mut written)?;
    write_jsonl(&output.records, f).map_err(|e| HarnessError::io(dir.join("records.jsonl"), e))?;
    let f = csv_file("summary.csv", &mut written)?;
    write_csv(&output.summary, f).map_err(csv_err(&dir.join("summary.csv")))?;
    if !output.density.is_empty() {
        let f = csv_file("density.csv", &mut written)?;
        write_csv(&output.density, f).map_err(csv_err(&dir.join("density.csv")))?;
    }
    if !output.max_ipr.is_empty() {
        let f = csv_file("max_ipr.csv", &mut written)?;
        write_csv(&output.max_ipr, f).map_err(csv_err(&dir.join("max_ipr.csv")))?;
    }

    let manifest_path = dir.join("manifest.json");
    let manifest = Manifest {
        experiment: output.config.experiment.to_string(),
        base_seed: output.config.base_seed,
        config: output.config.clone(),
        scale_notes: output.config.scale_notes(),
        versions: HashMap::from([
            (
                "nbloc-harness".to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            ),
            ("nbloc".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ]),
        records: output.records.len(),
        excluded: output.records.iter().filter(|r| r.is_excluded()).count(),
        files: written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    let f = File::create(&manifest_path).map_err(|e| HarnessError::io(&manifest_path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(f), &manifest).map_err(|source| {
        HarnessError::Json {
            context: manifest_path.display().to_string(),
            source,
        }
    })?;
    written.push(manifest_path);
    Ok(written)
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>> {
    let f = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_csv(BufReader::new(f)).map_err(|source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    })
}
