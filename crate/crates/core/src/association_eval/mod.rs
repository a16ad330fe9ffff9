//! Ground-truth association and detection metrics.
//!
//! [`associate`] walks ground-truth lines in input order; each takes the
//! still-unmatched prediction that overlaps it, is within `a_thresh` degrees,
//! and has the smallest mean perpendicular distance (ground-truth points
//! against the prediction's line). The walk is greedy on purpose: it is not
//! an optimal assignment.

mod bands;
mod report;

pub use bands::{
    band_of, banded_evaluation, BandRow, BandTally, BandedReport, DistanceBand, BANDS,
};
pub use report::{read_report_json, BandEdge, ReportRow, CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse_lines::{line_pair_angle, line_pair_distance, StopLine};

pub const DEFAULT_A_THRESH: f64 = 8.0;
pub const DEFAULT_N_INTERP: usize = 10;
const OVERLAP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub gt: usize,
    pub pred: usize,
    /// Meters.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MatchResult {
    pub n_pos: usize,
    pub n_neg: usize,
    pub e_total: f64,
    pub matches: Vec<Match>,
}

impl MatchResult {
    pub fn matched_pred(&self, pred: usize) -> bool {
        self.matches.iter().any(|m| m.pred == pred)
    }

    pub fn matched_gt(&self, gt: usize) -> Option<&Match> {
        self.matches.iter().find(|m| m.gt == gt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Meters; `None` when nothing was matched.
    pub mae: Option<f64>,
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    let den = precision + recall;
    if den > 0.0 {
        2.0 * precision * recall / den
    } else {
        0.0
    }
}

impl Metrics {
    /// Empty denominators count as perfect (1.0), so frames without lines
    /// do not drag aggregates down.
    pub fn from_counts(n_pos: usize, n_neg: usize, n_gt: usize, e_total: f64) -> Result<Self> {
        if n_gt < n_pos {
            return Err(Error::invalid(format!(
                "n_gt ({n_gt}) smaller than n_pos ({n_pos})"
            )));
        }
        let precision = if n_pos + n_neg == 0 {
            1.0
        } else {
            n_pos as f64 / (n_pos + n_neg) as f64
        };
        let recall = if n_gt == 0 {
            1.0
        } else {
            n_pos as f64 / n_gt as f64
        };
        Ok(Metrics {
            precision,
            recall,
            f1: f1_score(precision, recall),
            mae: (n_pos > 0).then(|| e_total / n_pos as f64),
        })
    }
}

pub fn compute_metrics(m: &MatchResult, n_gt: usize) -> Result<Metrics> {
    Metrics::from_counts(m.n_pos, m.n_neg, n_gt, m.e_total)
}

/// True when `b`, projected onto the direction of `a`, covers a positive
/// length of `a`'s own extent.
pub fn segments_overlap(a: &StopLine, b: &StopLine) -> bool {
    let (t0, t1) = (a.project(b.p_start()), a.project(b.p_end()));
    let lo = t0.min(t1).max(0.0);
    let hi = t0.max(t1).min(a.length());
    hi - lo > OVERLAP_EPS
}

pub fn associate(
    preds: &[StopLine],
    gts: &[StopLine],
    a_thresh: f64,
    n_interp: usize,
) -> MatchResult {
    let mut taken = vec![false; preds.len()];
    let mut result = MatchResult::default();
    for (i, gt) in gts.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (j, pred) in preds.iter().enumerate() {
            if taken[j] || !segments_overlap(gt, pred) {
                continue;
            }
            let d = line_pair_distance(gt, pred, n_interp);
            let d_min = best.map_or(f64::INFINITY, |b| b.1);
            if d < d_min && line_pair_angle(gt, pred) < a_thresh {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            taken[j] = true;
            result.n_pos += 1;
            result.e_total += d;
            result.matches.push(Match {
                gt: i,
                pred: j,
                distance: d,
            });
        }
    }
    result.n_neg = preds.len() - result.n_pos;
    result
}
