//! Segmentation mask to sparse stop lines.
//!
//! Pipeline: 8-connected components, a PCA line per component (endpoints
//! are the extreme cell centers projected onto the principal axis), then a
//! pairwise refinement that merges fragments which are both close (mean
//! perpendicular distance of the shorter onto the longer) and aligned.

mod ccl;
mod line;

pub use ccl::{connected_components, Cluster};
pub use line::{
    line_pair_angle, line_pair_distance, lines_from_json, lines_to_json, perp_distance, StopLine,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_map::{GridGeometry, MetricPoint};
use crate::target_maps::SegMask;

/// Eigenvalue gap below which a point set has no dominant axis (m^2).
pub const ISOTROPY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    /// Merge distance, meters.
    pub d_thresh_merge: f64,
    /// Merge angle, degrees.
    pub a_thresh: f64,
    pub n_interp: usize,
    pub min_cluster_cells: usize,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            d_thresh_merge: 0.3,
            a_thresh: 8.0,
            n_interp: 10,
            min_cluster_cells: 3,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_thresh_merge > 0.0 && self.a_thresh > 0.0) {
            return Err(Error::invalid("merge thresholds must be positive"));
        }
        if self.n_interp < 2 {
            return Err(Error::invalid("n_interp must be at least 2"));
        }
        if self.min_cluster_cells == 0 {
            return Err(Error::invalid("min_cluster_cells must be positive"));
        }
        Ok(())
    }
}

struct Moments {
    mean: MetricPoint,
    cxx: f64,
    cyy: f64,
    cxy: f64,
}

fn moments(points: &[MetricPoint]) -> Moments {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.x, b + p.y));
    let mean = MetricPoint::new(sx / n, sy / n);
    let (mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - mean.x, p.y - mean.y);
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
    }
    Moments {
        mean,
        cxx: cxx / n,
        cyy: cyy / n,
        cxy: cxy / n,
    }
}

/// Principal axis of a 2-D point set as `(centroid, unit direction)`, or
/// `None` when both covariance eigenvalues coincide.
pub fn principal_axis(points: &[MetricPoint]) -> Option<(MetricPoint, (f64, f64))> {
    if points.is_empty() {
        return None;
    }
    let m = moments(points);
    let diff = m.cxx - m.cyy;
    let gap = diff.hypot(2.0 * m.cxy);
    if gap <= ISOTROPY_EPS {
        return None;
    }
    let theta = 0.5 * (2.0 * m.cxy).atan2(diff);
    Some((m.mean, (theta.cos(), theta.sin())))
}

/// Segment through `center` along `dir`, spanning the extreme projections
/// of `points`.
fn span_along(points: &[MetricPoint], center: MetricPoint, dir: (f64, f64)) -> Option<StopLine> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let t = (p.x - center.x) * dir.0 + (p.y - center.y) * dir.1;
        lo = lo.min(t);
        hi = hi.max(t);
    }
    let at = |t: f64| MetricPoint::new(center.x + t * dir.0, center.y + t * dir.1);
    StopLine::new(at(lo), at(hi)).ok()
}

/// PCA line through a point set; `None` if the set has no dominant axis.
pub fn fit_points(points: &[MetricPoint]) -> Option<StopLine> {
    let (center, dir) = principal_axis(points)?;
    span_along(points, center, dir)
}

/// Line for one cluster, or `None` for clusters under `min_cluster_cells`
/// or without a dominant axis.
pub fn fit_line(
    cluster: &Cluster,
    geometry: &GridGeometry,
    min_cluster_cells: usize,
) -> Option<StopLine> {
    if cluster.len() < min_cluster_cells.max(1) {
        return None;
    }
    let points: Vec<MetricPoint> = cluster
        .cells
        .iter()
        .map(|&c| geometry.cell_to_metric(c))
        .collect();
    fit_points(&points)
}

/// Merge test: mean perpendicular distance below `d_thresh_merge` and slope
/// difference below `a_thresh`, with the shorter line sampled against the
/// longer one.
pub fn should_merge(a: &StopLine, b: &StopLine, cfg: &RefineConfig) -> bool {
    let (short, long) = if a.length() <= b.length() {
        (a, b)
    } else {
        (b, a)
    };
    line_pair_angle(a, b) < cfg.a_thresh
        && line_pair_distance(short, long, cfg.n_interp) < cfg.d_thresh_merge
}

/// Refit over the union of both endpoint sets. The longer line's direction
/// is used when the four endpoints are isotropic.
pub fn merge_pair(a: &StopLine, b: &StopLine) -> StopLine {
    let pts = [a.p_start(), a.p_end(), b.p_start(), b.p_end()];
    if let Some(l) = fit_points(&pts) {
        return l;
    }
    let long = if a.length() >= b.length() { a } else { b };
    let m = moments(&pts);
    span_along(&pts, m.mean, long.direction()).unwrap_or(*long)
}

fn line_order(a: &StopLine, b: &StopLine) -> std::cmp::Ordering {
    a.p_start()
        .x
        .total_cmp(&b.p_start().x)
        .then(a.p_start().y.total_cmp(&b.p_start().y))
        .then(a.p_end().x.total_cmp(&b.p_end().x))
        .then(a.p_end().y.total_cmp(&b.p_end().y))
}

/// Merges line pairs that satisfy [`should_merge`] until none remain. The
/// first qualifying pair in index order is merged on each step. Output is
/// sorted by `p_start`.
pub fn refine_lines(lines: &[StopLine], cfg: &RefineConfig) -> Vec<StopLine> {
    let mut out = lines.to_vec();
    'scan: loop {
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                if should_merge(&out[i], &out[j], cfg) {
                    out[i] = merge_pair(&out[i], &out[j]);
                    out.remove(j);
                    continue 'scan;
                }
            }
        }
        break;
    }
    out.sort_by(line_order);
    out
}

pub fn extract_stop_lines(mask: &SegMask, cfg: &RefineConfig) -> Result<Vec<StopLine>> {
    cfg.validate()?;
    let lines: Vec<StopLine> = connected_components(mask)
        .iter()
        .filter_map(|c| fit_line(c, mask.geometry(), cfg.min_cluster_cells))
        .collect();
    Ok(refine_lines(&lines, cfg))
}
