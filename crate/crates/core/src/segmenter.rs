//! Heuristic stop-line segmenter.
//!
//! Thresholds the brighter of the marking and lidar intensity layers, labels
//! 8-connected runs, and keeps runs shaped like a painted bar: long enough,
//! plausibly thick, and either perpendicular to the ego heading or lying
//! across observed traffic flow.
//!
//! The cross-traffic rule covers stop lines on intersecting roads, which run
//! parallel to the ego heading. Those are accepted only when the
//! `TrafficHistory` layer around the run has a coherent flow orientation
//! crossing the run. Lane dividers sit alongside flow and stay rejected, and
//! without the traffic layer parallel runs are always rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmap;
use crate::grid_map::{Cell, ChannelId, GridGeometry, GridMap, MetricPoint};
use crate::sparse_lines::{connected_components, principal_axis, Cluster};
use crate::target_maps::SegMask;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub marking_threshold: f64,
    /// Degrees.
    pub max_angle_from_perpendicular: f64,
    /// Meters.
    pub min_bar_length: f64,
    /// Accepted bar thickness `(min, max)`, meters.
    pub bar_depth_range: (f64, f64),
    /// Accept heading-parallel runs that lie across traffic flow.
    pub use_traffic_history: bool,
    /// Minimum flow coherence in `[0, 1]` for the cross-traffic rule.
    pub min_flow_coherence: f64,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            marking_threshold: 0.5,
            max_angle_from_perpendicular: 20.0,
            min_bar_length: 1.5,
            bar_depth_range: (0.2, 0.9),
            use_traffic_history: true,
            min_flow_coherence: 0.2,
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bar_depth_range;
        if !(0.0..=1.0).contains(&self.marking_threshold) {
            return Err(Error::invalid("marking_threshold must lie in [0, 1]"));
        }
        if !(0.0..=90.0).contains(&self.max_angle_from_perpendicular) {
            return Err(Error::invalid(
                "max_angle_from_perpendicular must lie in [0, 90]",
            ));
        }
        if !(self.min_bar_length >= 0.0 && lo >= 0.0 && lo <= hi) {
            return Err(Error::invalid(
                "bar size limits must be non-negative and ordered",
            ));
        }
        if !(0.0..=1.0).contains(&self.min_flow_coherence) {
            return Err(Error::invalid("min_flow_coherence must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Acute angle between two undirected axes, degrees.
fn axis_angle_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d).to_degrees()
}

/// Flow window around a run, meters: up to this far along the run from its
/// center, and this far to either side.
const FLOW_HALF_ALONG_MAX: f64 = 8.0;
const FLOW_HALF_ACROSS: f64 = 3.0;

/// Dominant gradient orientation (radians, mod pi) of `layer` inside a
/// rectangle aligned with `axis`, with its coherence `(l1 - l2) / (l1 + l2)`.
fn gradient_orientation(
    layer: &[f32],
    geometry: &GridGeometry,
    center: MetricPoint,
    axis: f64,
    half_along: f64,
    half_across: f64,
) -> Option<(f64, f64)> {
    let (ux, uy) = (axis.cos(), axis.sin());
    let c = geometry.metric_to_cell(center);
    let r = (half_along.hypot(half_across) / geometry.resolution()).ceil() as i64;
    let (h, w) = (geometry.height() as i64, geometry.width() as i64);
    let at = |row: i64, col: i64| layer[(row * w + col) as usize] as f64;
    let (mut jxx, mut jyy, mut jxy) = (0.0, 0.0, 0.0);
    for row in (c.row - r).max(1)..=(c.row + r).min(h - 2) {
        for col in (c.col - r).max(1)..=(c.col + r).min(w - 2) {
            let p = geometry.cell_to_metric(Cell::new(row, col));
            let (dx, dy) = (p.x - center.x, p.y - center.y);
            if (dx * ux + dy * uy).abs() > half_along || (ux * dy - uy * dx).abs() > half_across {
                continue;
            }
            // metric y grows as rows shrink
            let gx = (at(row, col + 1) - at(row, col - 1)) / 2.0;
            let gy = (at(row - 1, col) - at(row + 1, col)) / 2.0;
            jxx += gx * gx;
            jyy += gy * gy;
            jxy += gx * gy;
        }
    }
    let trace = jxx + jyy;
    if trace <= 0.0 {
        return None;
    }
    let diff = jxx - jyy;
    let coherence = diff.hypot(2.0 * jxy) / trace;
    Some((0.5 * (2.0 * jxy).atan2(diff), coherence))
}

struct RunShape {
    axis: f64,
    length: f64,
    thickness: f64,
    center: MetricPoint,
}

fn run_shape(cluster: &Cluster, geometry: &GridGeometry) -> Option<RunShape> {
    let points: Vec<MetricPoint> = cluster
        .cells
        .iter()
        .map(|&c| geometry.cell_to_metric(c))
        .collect();
    let (center, (ux, uy)) = principal_axis(&points)?;
    let (mut t0, mut t1, mut n0, mut n1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &points {
        let (dx, dy) = (p.x - center.x, p.y - center.y);
        let t = dx * ux + dy * uy;
        let n = ux * dy - uy * dx;
        t0 = t0.min(t);
        t1 = t1.max(t);
        n0 = n0.min(n);
        n1 = n1.max(n);
    }
    // cell extents: centers span one cell less than the painted area
    let res = geometry.resolution();
    Some(RunShape {
        axis: uy.atan2(ux),
        length: t1 - t0 + res,
        thickness: n1 - n0 + res,
        center,
    })
}

/// Binary stop-line mask for `g`. Requires `GroundMarkings` and
/// `LidarIntensity`; `TrafficHistory` is optional.
pub fn segment(g: &GridMap, cfg: &SegmenterConfig) -> Result<SegMask> {
    cfg.validate()?;
    let missing = |id: ChannelId| Error::invalid(format!("segmenter needs the {id} channel"));
    let marks = g
        .channel(ChannelId::GroundMarkings)
        .ok_or_else(|| missing(ChannelId::GroundMarkings))?;
    let lidar = g
        .channel(ChannelId::LidarIntensity)
        .ok_or_else(|| missing(ChannelId::LidarIntensity))?;
    let traffic = g
        .channel(ChannelId::TrafficHistory)
        .filter(|_| cfg.use_traffic_history);
    let geometry = *g.geometry();
    let threshold = cfg.marking_threshold;
    let bits: Vec<u8> = marks
        .iter()
        .zip(lidar)
        .map(|(&m, &l)| u8::from(m.max(l) as f64 >= threshold))
        .collect();
    let candidates = SegMask::from_bits(geometry, bits)?;

    let heading = geometry.ego_heading();
    let mut out = SegMask::empty(geometry);
    for cluster in connected_components(&candidates) {
        let Some(shape) = run_shape(&cluster, &geometry) else {
            continue;
        };
        let (lo, hi) = cfg.bar_depth_range;
        if shape.length < cfg.min_bar_length || shape.thickness < lo || shape.thickness > hi {
            continue;
        }
        // a perpendicular stop line has slope equal to the heading (mod pi)
        let off_perpendicular = axis_angle_deg(shape.axis, heading);
        let keep = off_perpendicular <= cfg.max_angle_from_perpendicular
            || traffic.is_some_and(|layer| {
                let along = (shape.length / 2.0).min(FLOW_HALF_ALONG_MAX);
                gradient_orientation(
                    layer,
                    &geometry,
                    shape.center,
                    shape.axis,
                    along,
                    FLOW_HALF_ACROSS,
                )
                .is_some_and(|(grad, coherence)| {
                    // flow runs across the gradient, so a run lying
                    // across flow shares the gradient orientation
                    coherence >= cfg.min_flow_coherence
                        && axis_angle_deg(grad, shape.axis) <= cfg.max_angle_from_perpendicular
                })
            });
        if keep {
            for &c in &cluster.cells {
                out.set(c, true);
            }
        }
    }
    Ok(out)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<SegMask> {
    SegMask::from_raw(&gmap::read_raw(path)?)
}

pub fn save_mask(path: impl AsRef<Path>, mask: &SegMask) -> Result<()> {
    gmap::write_raw(path, &mask.to_raw())
}

/// Cells where the fused intensity reaches the threshold.
pub fn fused_candidates(g: &GridMap, threshold: f64) -> Option<Vec<Cell>> {
    let marks = g.channel(ChannelId::GroundMarkings)?;
    let lidar = g.channel(ChannelId::LidarIntensity)?;
    let geometry = g.geometry();
    Some(
        (0..geometry.len())
            .filter(|&i| marks[i].max(lidar[i]) as f64 >= threshold)
            .map(|i| geometry.cell_of_index(i))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse_lines::{extract_stop_lines, RefineConfig, StopLine};
    use crate::synth_scenes::{generate_scene, rasterize_gt, SceneSpec, STOP_BAR_CELLS};

    fn blank() -> GridMap {
        GridMap::with_geometry(GridGeometry::default(), &ChannelId::ALL)
    }

    fn paint(g: &mut GridMap, line: &StopLine, value: f32) {
        let mask = rasterize_gt(&[*line], g.geometry(), STOP_BAR_CELLS).unwrap();
        for c in mask.foreground().collect::<Vec<_>>() {
            g.set(ChannelId::GroundMarkings, c, value);
        }
    }

    fn line(x0: f64, y0: f64, x1: f64, y1: f64) -> StopLine {
        StopLine::new(MetricPoint::new(x0, y0), MetricPoint::new(x1, y1)).unwrap()
    }

    #[test]
    fn clean_bar_is_recovered() {
        let mut g = blank();
        let bar = line(0.0, 10.0, 3.5, 10.0);
        paint(&mut g, &bar, 1.0);
        let mask = segment(&g, &SegmenterConfig::default()).unwrap();
        assert!(!mask.is_blank());
        let got = extract_stop_lines(&mask, &RefineConfig::default()).unwrap();
        assert_eq!(got.len(), 1);
        assert!(got[0].p_start().distance(bar.p_start()) <= 0.26);
        assert!(got[0].p_end().distance(bar.p_end()) <= 0.26);
    }

    #[test]
    fn lane_divider_rejected() {
        let mut g = blank();
        paint(&mut g, &line(0.0, -5.0, 0.0, 20.0), 1.0);
        // traffic flowing along the divider on both sides
        let (h, w) = (g.height() as i64, g.width() as i64);
        for c in (0..h).flat_map(|r| (0..w).map(move |c| Cell::new(r, c))) {
            let x = g.cell_to_metric(c).x;
            let v = (0.8 * (1.0 - ((x.abs() - 1.75).abs() / 0.8))).max(0.0);
            g.set(ChannelId::TrafficHistory, c, v as f32);
        }
        assert!(segment(&g, &SegmenterConfig::default()).unwrap().is_blank());
        g.channel_mut(ChannelId::TrafficHistory).unwrap().fill(0.0);
        assert!(segment(&g, &SegmenterConfig::default()).unwrap().is_blank());
    }

    #[test]
    fn threshold_is_respected() {
        let mut g = blank();
        paint(&mut g, &line(0.0, 10.0, 3.5, 10.0), 0.49);
        assert!(segment(&g, &SegmenterConfig::default()).unwrap().is_blank());
        // the lidar layer alone is enough
        let mut g = blank();
        let mask = rasterize_gt(&[line(0.0, 10.0, 3.5, 10.0)], g.geometry(), 2).unwrap();
        for c in mask.foreground().collect::<Vec<_>>() {
            g.set(ChannelId::LidarIntensity, c, 0.9);
        }
        assert_eq!(segment(&g, &SegmenterConfig::default()).unwrap(), mask);
    }

    #[test]
    fn missing_channel() {
        let g = GridMap::with_geometry(GridGeometry::default(), &[ChannelId::GroundMarkings]);
        assert!(matches!(
            segment(&g, &SegmenterConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn short_and_thick_runs_rejected() {
        let mut g = blank();
        paint(&mut g, &line(0.0, 10.0, 1.0, 10.0), 1.0);
        // a 1.3 m square patch
        for r in 100..105 {
            for c in 40..45 {
                g.set(ChannelId::GroundMarkings, Cell::new(r, c), 1.0);
            }
        }
        assert!(segment(&g, &SegmenterConfig::default()).unwrap().is_blank());
    }

    #[test]
    fn synthetic_scene_matches_ground_truth_mask() {
        let spec = SceneSpec::default();
        let (g, lines) = generate_scene(&spec, &GridGeometry::default()).unwrap();
        let mask = segment(&g, &SegmenterConfig::default()).unwrap();
        let gt = rasterize_gt(&lines, g.geometry(), STOP_BAR_CELLS).unwrap();
        assert_eq!(mask, gt);
        // without traffic history only the two ego-perpendicular bars remain
        let cfg = SegmenterConfig {
            use_traffic_history: false,
            ..SegmenterConfig::default()
        };
        let lonely = segment(&g, &cfg).unwrap();
        let got = extract_stop_lines(&lonely, &RefineConfig::default()).unwrap();
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn mask_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("seg-mask-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("mask.gmap");
        let mask =
            rasterize_gt(&[line(0.0, 10.0, 3.5, 10.0)], &GridGeometry::default(), 2).unwrap();
        save_mask(&path, &mask).unwrap();
        assert_eq!(load_mask(&path).unwrap(), mask);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn candidates_respect_threshold() {
        let mut g = blank();
        g.set(ChannelId::LidarIntensity, Cell::new(3, 3), 0.7);
        g.set(ChannelId::GroundMarkings, Cell::new(4, 4), 0.2);
        assert_eq!(fused_candidates(&g, 0.5).unwrap(), vec![Cell::new(3, 3)]);
    }
}
