//! CSV and JSON renderings of a [`BandedReport`].

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bands::{BandRow, BandedReport};
use crate::error::Result;

pub const CSV_HEADER: [&str; 9] = [
    "band_lower",
    "band_upper",
    "precision",
    "recall",
    "f1",
    "mae_m",
    "n_gt",
    "n_pos",
    "n_neg",
];

/// Band edge in meters, or the label `"all"` for the overall row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandEdge {
    Meters(u32),
    Label(String),
}

impl std::fmt::Display for BandEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BandEdge::Meters(m) => write!(f, "{m}"),
            BandEdge::Label(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub band_lower: BandEdge,
    pub band_upper: BandEdge,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mae_m: Option<f64>,
    pub n_gt: usize,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl From<&BandRow> for ReportRow {
    fn from(r: &BandRow) -> Self {
        let (lo, hi) = match r.band {
            Some(b) => (BandEdge::Meters(b.lower), BandEdge::Meters(b.upper)),
            None => (BandEdge::Label("all".into()), BandEdge::Label("all".into())),
        };
        ReportRow {
            band_lower: lo,
            band_upper: hi,
            precision: r.metrics.precision,
            recall: r.metrics.recall,
            f1: r.metrics.f1,
            mae_m: r.metrics.mae,
            n_gt: r.tally.n_gt,
            n_pos: r.tally.n_pos,
            n_neg: r.tally.n_neg,
        }
    }
}

impl ReportRow {
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.band_lower.to_string(),
            self.band_upper.to_string(),
            self.precision.to_string(),
            self.recall.to_string(),
            self.f1.to_string(),
            self.mae_m.map(|v| v.to_string()).unwrap_or_default(),
            self.n_gt.to_string(),
            self.n_pos.to_string(),
            self.n_neg.to_string(),
        ]
    }
}

impl BandedReport {
    pub fn report_rows(&self) -> Vec<ReportRow> {
        self.rows().iter().map(ReportRow::from).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for row in self.report_rows() {
            w.write_record(row.csv_fields())?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.report_rows())?)
    }
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association_eval::banded_evaluation;
    use crate::grid_map::MetricPoint;
    use crate::sparse_lines::StopLine;

    #[test]
    fn csv_and_json_mirror() {
        let l = StopLine::new(MetricPoint::new(0.0, 5.0), MetricPoint::new(3.0, 5.0)).unwrap();
        let r = banded_evaluation(&[(vec![l], vec![l])], 8.0, 10).unwrap();
        let csv = r.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "band_lower,band_upper,precision,recall,f1,mae_m,n_gt,n_pos,n_neg"
        );
        assert_eq!(lines[1], "0,10,1,1,1,0,1,1,0");
        assert_eq!(lines[2], "10,20,1,1,1,,0,0,0");
        assert_eq!(lines[6], "all,all,1,1,1,0,1,1,0");
        assert_eq!(lines.len(), 7);

        let rows: Vec<ReportRow> = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(rows, r.report_rows());
        assert_eq!(rows[0].band_lower, BandEdge::Meters(0));
        assert_eq!(rows[5].band_lower, BandEdge::Label("all".into()));
        assert_eq!(rows[1].mae_m, None);
    }
}
