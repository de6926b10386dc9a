//! Report emission: per-cell ratio CSV, empirical CDF files for runtime
//! and ratio distributions, and the impact matrix. Output is byte-stable
//! for identical reports: rows are sorted and floats use the shortest
//! round-trip form.

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::experiment::{ExperimentReport, ImpactMatrix, IMPACT_ORDERS, IMPACT_ROLES};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("ratio out of range in {context}: {value}")]
    RatioOutOfRange { context: String, value: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn check_ratio(context: &str, value: Option<f64>) -> Result<(), ReportError> {
    if let Some(v) = value {
        if !(0.0..=1.0).contains(&v) {
            return Err(ReportError::RatioOutOfRange {
                context: context.to_owned(),
                value: v,
            });
        }
    }
    Ok(())
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

/// One row per (topology, algorithm, order), sorted. Ratios are validated
/// to lie in [0, 1].
pub fn ratio_csv(report: &ExperimentReport) -> Result<String, ReportError> {
    let mut rows: Vec<&crate::experiment::ReportEntry> = report.entries.iter().collect();
    rows.sort_by(|a, b| {
        (&a.topology, &a.algorithm, &a.order).cmp(&(&b.topology, &b.algorithm, &b.order))
    });
    let mut out = String::from(
        "topology,algorithm,order,requests,benchmark_solvable,solved,optimal,optimality_ratio,completeness_ratio,skipped\n",
    );
    for e in rows {
        let context = format!("{}/{}/{}", e.topology, e.algorithm, e.order);
        check_ratio(&context, e.optimality_ratio)?;
        check_ratio(&context, e.completeness_ratio)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            e.topology,
            e.algorithm,
            e.order,
            e.requests,
            e.benchmark_solvable,
            e.solved,
            e.optimal,
            fmt_opt(e.optimality_ratio),
            fmt_opt(e.completeness_ratio),
            e.skipped.clone().unwrap_or_default()
        ));
    }
    Ok(out)
}

/// Empirical CDF: sorted distinct values with the cumulative fraction of
/// samples at or below each. A constant sample set yields a single step.
pub fn ecdf(samples: &[f64]) -> Vec<(f64, f64)> {
    if samples.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        let fraction = (i + 1) as f64 / n;
        match out.last_mut() {
            Some((last, f)) if *last == *v => *f = fraction,
            _ => out.push((*v, fraction)),
        }
    }
    out
}

pub fn ecdf_csv(samples: &[f64]) -> String {
    let mut out = String::from("value,fraction\n");
    for (v, f) in ecdf(samples) {
        out.push_str(&format!("{v},{f}\n"));
    }
    out
}

/// Per-(algorithm, order) pooled runtime ECDFs, in seconds.
pub fn runtime_ecdfs(report: &ExperimentReport) -> Vec<(String, String)> {
    let mut keys: Vec<(String, String)> = report
        .entries
        .iter()
        .filter(|e| !e.runtime_ns.is_empty())
        .map(|e| (e.algorithm.clone(), e.order.clone()))
        .collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(algo, order)| {
            let samples: Vec<f64> = report
                .entries
                .iter()
                .filter(|e| e.algorithm == algo && e.order == order)
                .flat_map(|e| e.runtime_ns.iter().map(|&ns| ns as f64 * 1e-9))
                .collect();
            (
                format!("runtime_ecdf_{algo}_{order}.csv"),
                ecdf_csv(&samples),
            )
        })
        .collect()
}

/// Per-(algorithm, order) ECDFs of the per-topology ratios, matching the
/// way the evaluation plots distributions across topologies.
pub fn ratio_ecdfs(report: &ExperimentReport) -> Vec<(String, String)> {
    let mut keys: Vec<(String, String)> = report
        .entries
        .iter()
        .filter(|e| e.skipped.is_none())
        .map(|e| (e.algorithm.clone(), e.order.clone()))
        .collect();
    keys.sort();
    keys.dedup();
    let mut files = Vec::new();
    for (algo, order) in keys {
        let opt: Vec<f64> = report
            .entries
            .iter()
            .filter(|e| e.algorithm == algo && e.order == order)
            .filter_map(|e| e.optimality_ratio)
            .collect();
        let comp: Vec<f64> = report
            .entries
            .iter()
            .filter(|e| e.algorithm == algo && e.order == order)
            .filter_map(|e| e.completeness_ratio)
            .collect();
        if !opt.is_empty() {
            files.push((
                format!("optimality_ecdf_{algo}_{order}.csv"),
                ecdf_csv(&opt),
            ));
        }
        if !comp.is_empty() {
            files.push((
                format!("completeness_ecdf_{algo}_{order}.csv"),
                ecdf_csv(&comp),
            ));
        }
    }
    files
}

/// Role-by-order matrix with observed and expected marks.
pub fn impact_csv(matrix: &ImpactMatrix) -> String {
    let mut out =
        String::from("role,order,complete,optimal,expected_complete,expected_optimal,matches\n");
    for role in IMPACT_ROLES {
        for order in IMPACT_ORDERS {
            let expected = ImpactMatrix::expected(role, order);
            let cell = matrix.cell(role, order);
            let (c, o) = match cell {
                Some(c) => (c.complete.to_string(), c.optimal.to_string()),
                None => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{role},{order},{c},{o},{},{},{}\n",
                expected.complete,
                expected.optimal,
                cell == Some(expected)
            ));
        }
    }
    out
}

/// Writes the report to `dir` and returns the created paths.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let write = |name: &str, content: &str| -> Result<PathBuf, ReportError> {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path)?;
        f.write_all(content.as_bytes())?;
        Ok(path)
    };

    match format {
        ReportFormat::Csv => {
            written.push(write("ratios.csv", &ratio_csv(report)?)?);
            for (name, content) in runtime_ecdfs(report) {
                written.push(write(&name, &content)?);
            }
            for (name, content) in ratio_ecdfs(report) {
                written.push(write(&name, &content)?);
            }
            if !report.notes.is_empty() {
                written.push(write("notes.txt", &(report.notes.join("\n") + "\n"))?);
            }
            if !report.skipped_topologies.is_empty() {
                let mut s = String::from("topology,reason\n");
                for (t, r) in &report.skipped_topologies {
                    s.push_str(&format!("{t},{r}\n"));
                }
                written.push(write("skipped.csv", &s)?);
            }
        }
        ReportFormat::Json => {
            let text = serde_json::to_string_pretty(report)
                .map_err(|e| ReportError::Json(e.to_string()))?;
            written.push(write("report.json", &text)?);
        }
    }
    Ok(written)
}
