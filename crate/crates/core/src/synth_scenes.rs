//! Deterministic four-way intersection scenes.
//!
//! Layout in the ego frame (right-hand traffic), with `C = (0, offset)` the
//! intersection center and `hw = lanes_per_direction * lane_width` the
//! half-width of each road:
//!
//! - the north-south road occupies `|x| <= hw`, the east-west road
//!   `|y - offset| <= hw`;
//! - each approach has one stop line across its lanes, `stop_line_setback`
//!   meters before the crossing edge: ego approach `y = offset - hw - s` over
//!   `x in [0, hw]`, oncoming `y = offset + hw + s` over `x in [-hw, 0]`,
//!   westbound-from-east `x = hw + s`, eastbound-from-west `x = -hw - s`;
//! - optional zebra crosswalks lie between the crossing edge and the stop
//!   line and are included in the ground truth as full-width lines.
//!
//! Randomness comes from ChaCha8 seeded with `SceneSpec::seed`; each effect
//! draws from its own stream, so toggling one effect never shifts another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_map::{ChannelId, GridGeometry, GridMap, MetricPoint};
use crate::sparse_lines::StopLine;
use crate::target_maps::SegMask;

/// Painted stop bars and GT masks are this many cells thick.
pub const STOP_BAR_CELLS: u32 = 2;
pub const CROSSWALK_DEPTH: f64 = 3.0;
pub const CROSSWALK_GAP: f64 = 0.5;
const CROSSWALK_STRIPE: f64 = 0.5;
const SIDEWALK: f64 = 3.0;
/// GT endpoints must stay this far inside the raster.
const EDGE_MARGIN: f64 = 1.0;
const CAR_LENGTH: f64 = 4.5;
const CAR_WIDTH: f64 = 2.0;

const LIDAR_ASPHALT: f32 = 0.15;
const LIDAR_GRASS: f32 = 0.3;
const LIDAR_PAINT: f32 = 0.9;
const TRAFFIC_PEAK: f64 = 0.8;
const TRAFFIC_HALF_WIDTH: f64 = 0.8;

const STREAM_ERASE: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_OCCLUSION: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    /// Ego origin to intersection center, meters.
    pub intersection_offset: f64,
    pub lane_width: f64,
    pub lanes_per_direction: u32,
    /// Stop line distance before the crossing edge, meters.
    pub stop_line_setback: f64,
    pub include_crosswalks: bool,
    pub occlusion_blobs: u32,
    pub marking_erase_fraction: f64,
    pub noise_sigma: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            seed: 0,
            intersection_offset: 15.0,
            lane_width: 3.5,
            lanes_per_direction: 1,
            stop_line_setback: 1.5,
            include_crosswalks: false,
            occlusion_blobs: 0,
            marking_erase_fraction: 0.0,
            noise_sigma: 0.0,
        }
    }
}

impl SceneSpec {
    pub fn half_width(&self) -> f64 {
        self.lanes_per_direction as f64 * self.lane_width
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lane_width.is_finite() && self.lane_width > 0.0) {
            return Err(Error::invalid("lane_width must be > 0"));
        }
        if self.lanes_per_direction == 0 {
            return Err(Error::invalid("lanes_per_direction must be >= 1"));
        }
        if !(self.intersection_offset.is_finite() && self.intersection_offset >= 0.0) {
            return Err(Error::invalid("intersection_offset must be >= 0"));
        }
        if !(self.stop_line_setback.is_finite() && self.stop_line_setback >= 0.0) {
            return Err(Error::invalid("stop_line_setback must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.marking_erase_fraction) {
            return Err(Error::invalid("marking_erase_fraction must lie in [0, 1]"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::invalid("noise_sigma must be >= 0"));
        }
        if self.include_crosswalks && self.stop_line_setback < CROSSWALK_GAP + CROSSWALK_DEPTH + 1.0
        {
            return Err(Error::invalid(format!(
                "crosswalks need a stop line setback of at least {} m",
                CROSSWALK_GAP + CROSSWALK_DEPTH + 1.0
            )));
        }
        Ok(())
    }

    /// Offsets for which every ground-truth line fits inside `geometry`.
    pub fn offset_range(&self, geometry: &GridGeometry) -> (f64, f64) {
        let (_, _, min_y, max_y) = geometry.metric_bounds();
        let reach = self.half_width() + self.stop_line_setback;
        (min_y + EDGE_MARGIN + reach, max_y - EDGE_MARGIN - reach)
    }
}

fn seg(x0: f64, y0: f64, x1: f64, y1: f64) -> StopLine {
    StopLine::new(MetricPoint::new(x0, y0), MetricPoint::new(x1, y1))
        .expect("scene lines have positive length")
}

/// Ground-truth lines: ego approach, oncoming, from-west, from-east, then
/// crosswalks in the same order when enabled.
pub fn scene_lines(spec: &SceneSpec, geometry: &GridGeometry) -> Result<Vec<StopLine>> {
    spec.validate()?;
    let o = spec.intersection_offset;
    let hw = spec.half_width();
    let s = spec.stop_line_setback;
    let mut lines = vec![
        seg(0.0, o - hw - s, hw, o - hw - s),
        seg(-hw, o + hw + s, 0.0, o + hw + s),
        seg(-hw - s, o - hw, -hw - s, o),
        seg(hw + s, o, hw + s, o + hw),
    ];
    if spec.include_crosswalks {
        let c = hw + CROSSWALK_GAP + CROSSWALK_DEPTH / 2.0;
        lines.extend([
            seg(-hw, o - c, hw, o - c),
            seg(-hw, o + c, hw, o + c),
            seg(-c, o - hw, -c, o + hw),
            seg(c, o - hw, c, o + hw),
        ]);
    }
    let (min_x, max_x, min_y, max_y) = geometry.metric_bounds();
    for l in &lines {
        for p in [l.p_start(), l.p_end()] {
            if p.x < min_x + EDGE_MARGIN
                || p.x > max_x - EDGE_MARGIN
                || p.y < min_y + EDGE_MARGIN
                || p.y > max_y - EDGE_MARGIN
            {
                return Err(Error::invalid(format!(
                    "scene geometry does not fit the grid: point ({:.2}, {:.2}) outside \
                     x [{min_x:.2}, {max_x:.2}], y [{min_y:.2}, {max_y:.2}] with {EDGE_MARGIN} m margin",
                    p.x, p.y
                )));
            }
        }
    }
    Ok(lines)
}

/// Calls `f` with the linear index of every cell covered by a band of
/// `thickness` cells centered on `line`. Across the line the band is the
/// half-open range `[-t/2, t/2)` cells; along it, cells whose centers
/// project into `[-res/2, length + res/2)`.
fn for_band_cells(
    geometry: &GridGeometry,
    line: &StopLine,
    thickness: f64,
    mut f: impl FnMut(usize),
) {
    const EPS: f64 = 1e-9;
    let res = geometry.resolution();
    let (ux, uy) = line.direction();
    let half = thickness / 2.0;
    let pad = half * res + res;
    let (a, b) = (line.p_start(), line.p_end());
    let lo = geometry.metric_to_cell(MetricPoint::new(a.x.min(b.x) - pad, a.y.max(b.y) + pad));
    let hi = geometry.metric_to_cell(MetricPoint::new(a.x.max(b.x) + pad, a.y.min(b.y) - pad));
    let rows = lo.row.max(0)..=hi.row.min(geometry.height() as i64 - 1);
    let cols = lo.col.max(0)..=hi.col.min(geometry.width() as i64 - 1);
    for row in rows {
        for col in cols.clone() {
            let cell = crate::grid_map::Cell::new(row, col);
            let p = geometry.cell_to_metric(cell);
            let (dx, dy) = (p.x - a.x, p.y - a.y);
            let along = (dx * ux + dy * uy) / res;
            let across = (ux * dy - uy * dx) / res;
            if across >= -half - EPS
                && across < half - EPS
                && along >= -0.5 - EPS
                && along < line.length() / res + 0.5 - EPS
            {
                f(row as usize * geometry.width() + col as usize);
            }
        }
    }
}

/// Ground-truth mask: union of `thickness`-cell bands around each line.
pub fn rasterize_gt(
    lines: &[StopLine],
    geometry: &GridGeometry,
    thickness: u32,
) -> Result<SegMask> {
    if thickness < 1 {
        return Err(Error::invalid("thickness must be >= 1"));
    }
    let mut bits = vec![0u8; geometry.len()];
    for l in lines {
        for_band_cells(geometry, l, thickness as f64, |i| bits[i] = 1);
    }
    SegMask::from_bits(*geometry, bits)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Axis-aligned rectangle in the ego frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: MetricPoint,
    pub max: MetricPoint,
}

impl Rect {
    pub fn contains(&self, p: MetricPoint) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Parked-vehicle footprints for `spec`, placed on the roads around the
/// intersection.
pub fn occlusion_rects(spec: &SceneSpec) -> Vec<Rect> {
    let mut rng = stream_rng(spec.seed, STREAM_OCCLUSION);
    let o = spec.intersection_offset;
    let hw = spec.half_width();
    let reach = hw + spec.stop_line_setback + 6.0;
    (0..spec.occlusion_blobs)
        .map(|_| {
            // north-south road or east-west road
            let (cx, cy, along_y) = if rng.random_bool(0.5) {
                (
                    rng.random_range(-hw..hw),
                    o + rng.random_range(-reach..reach),
                    true,
                )
            } else {
                (
                    o * 0.0 + rng.random_range(-reach..reach),
                    o + rng.random_range(-hw..hw),
                    false,
                )
            };
            let (hx, hy) = if along_y {
                (CAR_WIDTH / 2.0, CAR_LENGTH / 2.0)
            } else {
                (CAR_LENGTH / 2.0, CAR_WIDTH / 2.0)
            };
            Rect {
                min: MetricPoint::new(cx - hx, cy - hy),
                max: MetricPoint::new(cx + hx, cy + hy),
            }
        })
        .collect()
}

/// Zeroes markings and lidar returns under each rectangle and marks it
/// occupied.
pub fn occlude(g: &mut GridMap, rects: &[Rect]) {
    if rects.is_empty() {
        return;
    }
    let geometry = *g.geometry();
    let inside: Vec<usize> = (0..geometry.len())
        .filter(|&i| {
            let p = geometry.cell_to_metric(geometry.cell_of_index(i));
            rects.iter().any(|r| r.contains(p))
        })
        .collect();
    for (id, value) in [
        (ChannelId::GroundMarkings, 0.0),
        (ChannelId::LidarIntensity, 0.0),
        (ChannelId::Occupancy, 1.0),
    ] {
        if let Some(c) = g.channel_mut(id) {
            for &i in &inside {
                c[i] = value;
            }
        }
    }
}

pub fn apply_occlusion(g: &GridMap, spec: &SceneSpec) -> GridMap {
    let mut out = g.clone();
    occlude(&mut out, &occlusion_rects(spec));
    out
}

fn paint_marking(g: &mut GridMap, idx: usize) {
    g.channel_mut(ChannelId::GroundMarkings).unwrap()[idx] = 1.0;
    g.channel_mut(ChannelId::LidarIntensity).unwrap()[idx] = LIDAR_PAINT;
}

/// Builds the scene raster and its ground truth.
pub fn generate_scene(
    spec: &SceneSpec,
    geometry: &GridGeometry,
) -> Result<(GridMap, Vec<StopLine>)> {
    let lines = scene_lines(spec, geometry)?;
    let o = spec.intersection_offset;
    let hw = spec.half_width();
    let mut g = GridMap::with_geometry(*geometry, &ChannelId::ALL);

    let n = geometry.len();
    let mut road = vec![false; n];
    for (i, on_road) in road.iter_mut().enumerate() {
        let p = geometry.cell_to_metric(geometry.cell_of_index(i));
        let (dx, dy) = (p.x.abs(), (p.y - o).abs());
        *on_road = dx <= hw || dy <= hw;
        let building = dx > hw + SIDEWALK && dy > hw + SIDEWALK;

        // traffic streaks along every lane center, full length
        let mut traffic: f64 = 0.0;
        for k in 0..spec.lanes_per_direction {
            let lane = (k as f64 + 0.5) * spec.lane_width;
            for dist in [
                (p.x - lane).abs(),
                (p.x + lane).abs(),
                (p.y - o - lane).abs(),
                (p.y - o + lane).abs(),
            ] {
                traffic = traffic.max(TRAFFIC_PEAK * (1.0 - dist / TRAFFIC_HALF_WIDTH).max(0.0));
            }
        }
        let set = |g: &mut GridMap, id: ChannelId, v: f32| g.channel_mut(id).unwrap()[i] = v;
        set(
            &mut g,
            ChannelId::SemanticsGround,
            if *on_road { 1.0 } else { 0.0 },
        );
        set(
            &mut g,
            ChannelId::LidarIntensity,
            if *on_road { LIDAR_ASPHALT } else { LIDAR_GRASS },
        );
        set(
            &mut g,
            ChannelId::Occupancy,
            if building { 1.0 } else { 0.0 },
        );
        set(
            &mut g,
            ChannelId::TrafficHistory,
            if *on_road { traffic as f32 } else { 0.0 },
        );
    }

    // stop bars
    for l in lines.iter().take(4) {
        let mut cells = Vec::new();
        for_band_cells(geometry, l, STOP_BAR_CELLS as f64, |i| cells.push(i));
        for i in cells {
            paint_marking(&mut g, i);
        }
    }
    // zebra stripes, parallel to the road they cross
    if spec.include_crosswalks {
        let res = geometry.resolution();
        let stripe_cells = CROSSWALK_STRIPE / res;
        for cw in &lines[4..] {
            let (ux, uy) = cw.direction();
            let (nx, ny) = (-uy, ux);
            let count =
                ((cw.length() + CROSSWALK_STRIPE) / (2.0 * CROSSWALK_STRIPE)).floor() as usize;
            for k in 0..count {
                let t = k as f64 * 2.0 * CROSSWALK_STRIPE + CROSSWALK_STRIPE / 2.0;
                let c = cw.point_at(t / cw.length());
                let h = CROSSWALK_DEPTH / 2.0;
                let stripe = StopLine::new(
                    MetricPoint::new(c.x - nx * h, c.y - ny * h),
                    MetricPoint::new(c.x + nx * h, c.y + ny * h),
                )?;
                let mut cells = Vec::new();
                for_band_cells(geometry, &stripe, stripe_cells, |i| cells.push(i));
                for i in cells {
                    paint_marking(&mut g, i);
                }
            }
        }
    }

    if spec.marking_erase_fraction > 0.0 {
        let mut rng = stream_rng(spec.seed, STREAM_ERASE);
        for (i, &on_road) in road.iter().enumerate() {
            if g.channel(ChannelId::GroundMarkings).unwrap()[i] > 0.0
                && rng.random::<f64>() < spec.marking_erase_fraction
            {
                g.channel_mut(ChannelId::GroundMarkings).unwrap()[i] = 0.0;
                g.channel_mut(ChannelId::LidarIntensity).unwrap()[i] =
                    if on_road { LIDAR_ASPHALT } else { LIDAR_GRASS };
            }
        }
    }

    if spec.noise_sigma > 0.0 {
        let mut rng = stream_rng(spec.seed, STREAM_NOISE);
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| Error::invalid(format!("noise sigma: {e}")))?;
        for id in ChannelId::ALL.into_iter().filter(|c| c.is_intensity()) {
            for v in g.channel_mut(id).unwrap() {
                *v = (*v as f64 + normal.sample(&mut rng)).clamp(0.0, 1.0) as f32;
            }
        }
    }

    occlude(&mut g, &occlusion_rects(spec));
    g.validate()?;
    Ok((g, lines))
}

/// Knobs for drawing a corpus of scenes from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusTemplate {
    pub lane_width: f64,
    pub lanes_min: u32,
    pub lanes_max: u32,
    pub stop_line_setback: f64,
    pub crosswalk_probability: f64,
    pub occlusion_blobs: u32,
    pub marking_erase_fraction: f64,
    pub noise_sigma: f64,
}

impl Default for CorpusTemplate {
    fn default() -> Self {
        CorpusTemplate {
            lane_width: 3.5,
            lanes_min: 1,
            lanes_max: 2,
            stop_line_setback: 1.5,
            crosswalk_probability: 0.0,
            occlusion_blobs: 0,
            marking_erase_fraction: 0.0,
            noise_sigma: 0.0,
        }
    }
}

/// `count` scene specs drawn deterministically from `seed`. Offsets are
/// uniform over the range where the scene fits `geometry`.
pub fn corpus_specs(
    seed: u64,
    count: usize,
    template: &CorpusTemplate,
    geometry: &GridGeometry,
) -> Result<Vec<SceneSpec>> {
    if template.lanes_min == 0 || template.lanes_min > template.lanes_max {
        return Err(Error::invalid(
            "lane count range must satisfy 1 <= min <= max",
        ));
    }
    if !(0.0..=1.0).contains(&template.crosswalk_probability) {
        return Err(Error::invalid("crosswalk probability must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut spec = SceneSpec {
                seed: rng.random(),
                lane_width: template.lane_width,
                lanes_per_direction: rng.random_range(template.lanes_min..=template.lanes_max),
                stop_line_setback: template.stop_line_setback,
                include_crosswalks: false,
                occlusion_blobs: template.occlusion_blobs,
                marking_erase_fraction: template.marking_erase_fraction,
                noise_sigma: template.noise_sigma,
                intersection_offset: 0.0,
            };
            let crosswalk_draw: f64 = rng.random();
            if crosswalk_draw < template.crosswalk_probability {
                spec.include_crosswalks = true;
                spec.stop_line_setback = spec
                    .stop_line_setback
                    .max(CROSSWALK_GAP + CROSSWALK_DEPTH + 1.0);
            }
            let (lo, hi) = spec.offset_range(geometry);
            let lo = lo.max(0.0);
            if lo > hi {
                return Err(Error::invalid(format!(
                    "no intersection offset fits the grid for {} lanes",
                    spec.lanes_per_direction
                )));
            }
            let u: f64 = rng.random();
            spec.intersection_offset = lo + u * (hi - lo);
            spec.validate()?;
            Ok(spec)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_map::Cell;
    use crate::sparse_lines::{extract_stop_lines, RefineConfig};

    fn geom() -> GridGeometry {
        GridGeometry::default()
    }

    #[test]
    fn four_lines_with_expected_positions() {
        let spec = SceneSpec::default();
        let (g, lines) = generate_scene(&spec, &geom()).unwrap();
        assert_eq!(lines.len(), 4);
        let ego = lines[0];
        assert!((ego.midpoint().y - (15.0 - 3.5 - 1.5)).abs() < 1e-12);
        assert!((ego.midpoint().x - 1.75).abs() < 1e-12);
        assert_eq!(ego.slope(), 0.0);
        // read the painted bar back from the raster
        let gm = g.channel(ChannelId::GroundMarkings).unwrap();
        let painted = SegMask::from_fn(*g.geometry(), |c| gm[g.geometry().index(c).unwrap()] > 0.5);
        let found = extract_stop_lines(&painted, &RefineConfig::default()).unwrap();
        assert_eq!(found.len(), 4);
        let near = found
            .iter()
            .min_by(|a, b| {
                a.midpoint()
                    .distance(ego.midpoint())
                    .total_cmp(&b.midpoint().distance(ego.midpoint()))
            })
            .unwrap();
        assert!(near.midpoint().distance(ego.midpoint()) < 0.26);
    }

    #[test]
    fn deterministic() {
        let spec = SceneSpec {
            seed: 9,
            occlusion_blobs: 3,
            noise_sigma: 0.05,
            marking_erase_fraction: 0.3,
            ..SceneSpec::default()
        };
        let a = generate_scene(&spec, &geom()).unwrap();
        let b = generate_scene(&spec, &geom()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            crate::gmap::encode_grid(&a.0).unwrap(),
            crate::gmap::encode_grid(&b.0).unwrap()
        );
    }

    #[test]
    fn full_erase_keeps_ground_truth() {
        let clean = SceneSpec::default();
        let erased = SceneSpec {
            marking_erase_fraction: 1.0,
            ..clean
        };
        let (g0, l0) = generate_scene(&clean, &geom()).unwrap();
        let (g1, l1) = generate_scene(&erased, &geom()).unwrap();
        assert_eq!(l0, l1);
        assert!(g0
            .channel(ChannelId::GroundMarkings)
            .unwrap()
            .iter()
            .any(|&v| v > 0.0));
        assert!(g1
            .channel(ChannelId::GroundMarkings)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn occlusion_examples() {
        let spec = SceneSpec::default();
        let (g, _) = generate_scene(&spec, &geom()).unwrap();
        assert_eq!(apply_occlusion(&g, &spec), g);

        // a car parked on the ego stop bar
        let mut covered = g.clone();
        let rect = Rect {
            min: MetricPoint::new(-0.5, 8.0),
            max: MetricPoint::new(4.0, 12.0),
        };
        occlude(&mut covered, &[rect]);
        let geo = *g.geometry();
        for i in 0..geo.len() {
            let p = geo.cell_to_metric(geo.cell_of_index(i));
            if rect.contains(p) {
                assert_eq!(covered.channel(ChannelId::GroundMarkings).unwrap()[i], 0.0);
                assert_eq!(covered.channel(ChannelId::Occupancy).unwrap()[i], 1.0);
            }
        }

        let a = SceneSpec {
            seed: 1,
            occlusion_blobs: 4,
            ..spec
        };
        let b = SceneSpec { seed: 2, ..a };
        let (ra, rb) = (occlusion_rects(&a), occlusion_rects(&b));
        assert_eq!(ra.len(), 4);
        assert_eq!(rb.len(), 4);
        assert_ne!(ra, rb);
        assert_eq!(ra, occlusion_rects(&a));
    }

    #[test]
    fn rasterize_examples() {
        let g = geom();
        assert!(rasterize_gt(&[], &g, 2).unwrap().is_blank());
        let y = g.cell_to_metric(Cell::new(100, 0)).y;
        let l = seg(-2.6, y, 2.6, y);
        let m = rasterize_gt(&[l], &g, 2).unwrap();
        assert_eq!(m.count(), 21 * 2);
        let got = extract_stop_lines(&m, &RefineConfig::default()).unwrap();
        assert_eq!(got.len(), 1);
        assert!(got[0].p_start().distance(l.p_start()) <= 0.5 * 0.26 + 1e-9);
        assert!(got[0].p_end().distance(l.p_end()) <= 0.5 * 0.26 + 1e-9);

        let v = seg(0.0, y - 2.0, 0.0, y + 2.0);
        let both = rasterize_gt(&[l, v], &g, 2).unwrap();
        let a = rasterize_gt(&[v], &g, 2).unwrap();
        assert_eq!(both, m.union(&a).unwrap());
        assert!(rasterize_gt(&[l], &g, 0).is_err());
    }

    #[test]
    fn geometry_must_fit() {
        let far = SceneSpec {
            intersection_offset: 45.0,
            ..SceneSpec::default()
        };
        assert!(matches!(
            generate_scene(&far, &geom()),
            Err(Error::InvalidArgument(_))
        ));
        let cw = SceneSpec {
            include_crosswalks: true,
            ..SceneSpec::default()
        };
        assert!(generate_scene(&cw, &geom()).is_err());
    }

    #[test]
    fn crosswalk_scene() {
        let spec = SceneSpec {
            include_crosswalks: true,
            stop_line_setback: 5.0,
            intersection_offset: 20.0,
            ..SceneSpec::default()
        };
        let (_, lines) = generate_scene(&spec, &geom()).unwrap();
        assert_eq!(lines.len(), 8);
        let mask = rasterize_gt(&lines, &geom(), STOP_BAR_CELLS).unwrap();
        let got = extract_stop_lines(&mask, &RefineConfig::default()).unwrap();
        assert_eq!(got.len(), 8);
    }

    #[test]
    fn corpus_is_deterministic_and_fits() {
        let t = CorpusTemplate {
            crosswalk_probability: 0.5,
            ..CorpusTemplate::default()
        };
        let a = corpus_specs(7, 20, &t, &geom()).unwrap();
        assert_eq!(a, corpus_specs(7, 20, &t, &geom()).unwrap());
        assert_ne!(a, corpus_specs(8, 20, &t, &geom()).unwrap());
        for s in &a {
            scene_lines(s, &geom()).unwrap();
        }
    }
}
