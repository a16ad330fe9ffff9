use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::{associate, Metrics};
use crate::error::Result;
use crate::sparse_lines::StopLine;

/// Half-open range `[lower, upper)` of midpoint distance from the ego origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DistanceBand {
    pub index: usize,
    pub lower: u32,
    pub upper: u32,
}

pub const BANDS: [DistanceBand; 5] = [
    DistanceBand {
        index: 0,
        lower: 0,
        upper: 10,
    },
    DistanceBand {
        index: 1,
        lower: 10,
        upper: 20,
    },
    DistanceBand {
        index: 2,
        lower: 20,
        upper: 30,
    },
    DistanceBand {
        index: 3,
        lower: 30,
        upper: 40,
    },
    DistanceBand {
        index: 4,
        lower: 40,
        upper: 50,
    },
];

impl DistanceBand {
    pub fn contains(&self, d: f64) -> bool {
        d >= self.lower as f64 && d < self.upper as f64
    }
}

/// Band of the line's midpoint distance; `None` at 50 m and beyond.
pub fn band_of(line: &StopLine) -> Option<DistanceBand> {
    let d = line.midpoint().norm();
    BANDS.iter().copied().find(|b| b.contains(d))
}

/// Additive counts for one band. Summing tallies is order-independent up to
/// floating-point rounding of `e_total`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BandTally {
    pub n_gt: usize,
    pub n_pos: usize,
    pub n_neg: usize,
    pub e_total: f64,
}

impl AddAssign for BandTally {
    fn add_assign(&mut self, o: BandTally) {
        self.n_gt += o.n_gt;
        self.n_pos += o.n_pos;
        self.n_neg += o.n_neg;
        self.e_total += o.e_total;
    }
}

impl BandTally {
    pub fn metrics(&self) -> Metrics {
        Metrics::from_counts(self.n_pos, self.n_neg, self.n_gt, self.e_total)
            .expect("tallies never match more lines than exist")
    }
}

/// Per-band tallies plus an overall tally that also counts lines beyond the
/// last band.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BandedReport {
    pub bands: [BandTally; 5],
    pub all: BandTally,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow {
    /// `None` for the overall row.
    pub band: Option<DistanceBand>,
    pub tally: BandTally,
    pub metrics: Metrics,
}

impl AddAssign for BandedReport {
    fn add_assign(&mut self, o: BandedReport) {
        for (a, b) in self.bands.iter_mut().zip(o.bands) {
            *a += b;
        }
        self.all += o.all;
    }
}

impl BandedReport {
    /// Tallies one frame: ground truth and matches are bucketed by the
    /// ground-truth line's band, false alarms by the prediction's band.
    pub fn from_frame(
        preds: &[StopLine],
        gts: &[StopLine],
        a_thresh: f64,
        n_interp: usize,
    ) -> Self {
        let m = associate(preds, gts, a_thresh, n_interp);
        let mut r = BandedReport::default();
        for gt in gts {
            if let Some(b) = band_of(gt) {
                r.bands[b.index].n_gt += 1;
            }
        }
        for mt in &m.matches {
            if let Some(b) = band_of(&gts[mt.gt]) {
                r.bands[b.index].n_pos += 1;
                r.bands[b.index].e_total += mt.distance;
            }
        }
        for (j, p) in preds.iter().enumerate() {
            if m.matched_pred(j) {
                continue;
            }
            if let Some(b) = band_of(p) {
                r.bands[b.index].n_neg += 1;
            }
        }
        r.all = BandTally {
            n_gt: gts.len(),
            n_pos: m.n_pos,
            n_neg: m.n_neg,
            e_total: m.e_total,
        };
        r
    }

    pub fn rows(&self) -> Vec<BandRow> {
        BANDS
            .iter()
            .map(|&b| (Some(b), self.bands[b.index]))
            .chain(std::iter::once((None, self.all)))
            .map(|(band, tally)| BandRow {
                band,
                tally,
                metrics: tally.metrics(),
            })
            .collect()
    }

    pub fn band_metrics(&self, index: usize) -> Metrics {
        self.bands[index].metrics()
    }
}

/// Runs association per frame and aggregates in frame order.
pub fn banded_evaluation(
    frames: &[(Vec<StopLine>, Vec<StopLine>)],
    a_thresh: f64,
    n_interp: usize,
) -> Result<BandedReport> {
    let mut total = BandedReport::default();
    for (preds, gts) in frames {
        total += BandedReport::from_frame(preds, gts, a_thresh, n_interp);
    }
    Ok(total)
}
