//! SKEL/ERR tables comparing several evolutions of one input.

use thiserror::Error;

use crate::grid::BinaryImage;

use super::MetricRecord;

/// One evolution to compare: its label, its input, and its per-scale records.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary<'a> {
    pub label: &'a str,
    pub input: &'a BinaryImage,
    pub metrics: &'a [MetricRecord],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub label: String,
    /// Requested skeleton size.
    pub checkpoint: usize,
    /// First scale whose skeleton has at most `checkpoint` points.
    pub scale: usize,
    /// `|Σ_ℓ|` at that scale.
    pub skel: usize,
    /// `|O_0| - |O_ℓ|` at that scale.
    pub err: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("run `{label}` has a different input image than `{reference}`")]
    InputMismatch { label: String, reference: String },
    #[error("run `{label}` has no frames")]
    EmptyRun { label: String },
}

/// For every run and checkpoint, report the first scale at which the
/// skeleton has shrunk to at most `checkpoint` points.
pub fn compare_paths(runs: &[RunSummary<'_>], checkpoints: &[usize]) -> Result<Vec<ComparisonRow>, CompareError> {
    if let Some(first) = runs.first() {
        for run in &runs[1..] {
            if run.input != first.input {
                return Err(CompareError::InputMismatch {
                    label: run.label.to_string(),
                    reference: first.label.to_string(),
                });
            }
        }
    }
    let mut rows = Vec::with_capacity(runs.len() * checkpoints.len());
    for run in runs {
        if run.metrics.is_empty() {
            return Err(CompareError::EmptyRun {
                label: run.label.to_string(),
            });
        }
        for &c in checkpoints {
            let rec = run
                .metrics
                .iter()
                .find(|r| r.skel_count <= c)
                .unwrap_or_else(|| run.metrics.last().expect("non-empty"));
            rows.push(ComparisonRow {
                label: run.label.to_string(),
                checkpoint: c,
                scale: rec.scale,
                skel: rec.skel_count,
                err: rec.err(),
            });
        }
    }
    Ok(rows)
}

/// `label,checkpoint,scale,skel,err` with a header line.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("label,checkpoint,scale,skel,err\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.label, r.checkpoint, r.scale, r.skel, r.err));
    }
    out
}
