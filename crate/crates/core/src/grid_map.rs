//! Vehicle-centered multi-channel grid map and its metric georeferencing.
//!
//! Conventions:
//! - Cells are addressed as `(row, col)`; row 0 is the top of the raster.
//! - Forward is up: decreasing the row index by one moves one cell forward.
//! - The ego metric frame has `x` lateral (right-positive) and `y`
//!   longitudinal (forward-positive), with its origin at the center of the
//!   ego cell. The metric axes are aligned with the raster axes.
//! - `ego_heading` is the direction of travel measured counterclockwise from
//!   the forward (`+y`) axis. A stop line crossing the travel direction at a
//!   right angle therefore has slope `ego_heading` (mod pi) from the `x` axis.
//!
//! Resolution and heading are stored at the precision of the GMAP header
//! (micrometers and microradians) so that a file round trip is bit exact.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION: f64 = 0.26;
pub const DEFAULT_HEIGHT: usize = 192;
pub const DEFAULT_WIDTH: usize = 192;
pub const DEFAULT_EGO_CELL: Cell = Cell { row: 160, col: 96 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelId {
    GroundMarkings,
    LidarIntensity,
    SemanticsGround,
    Occupancy,
    TrafficHistory,
    Elevation,
}

impl ChannelId {
    pub const ALL: [ChannelId; 6] = [
        ChannelId::GroundMarkings,
        ChannelId::LidarIntensity,
        ChannelId::SemanticsGround,
        ChannelId::Occupancy,
        ChannelId::TrafficHistory,
        ChannelId::Elevation,
    ];

    /// Numeric id used in GMAP files.
    pub fn code(self) -> u16 {
        match self {
            ChannelId::GroundMarkings => 0,
            ChannelId::LidarIntensity => 1,
            ChannelId::SemanticsGround => 2,
            ChannelId::Occupancy => 3,
            ChannelId::TrafficHistory => 4,
            ChannelId::Elevation => 5,
        }
    }

    pub fn from_code(code: u16) -> Option<Self> {
        ChannelId::ALL.into_iter().find(|c| c.code() == code)
    }

    /// Intensity channels are normalized to [0, 1]; elevation is raw meters.
    pub fn is_intensity(self) -> bool {
        self != ChannelId::Elevation
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Cell index. Signed so that quantized out-of-bounds points are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: i64,
    pub col: i64,
}

impl Cell {
    pub const fn new(row: i64, col: i64) -> Self {
        Cell { row, col }
    }
}

impl From<(i64, i64)> for Cell {
    fn from((row, col): (i64, i64)) -> Self {
        Cell { row, col }
    }
}

/// Point in the ego metric frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricPoint {
    pub x: f64,
    pub y: f64,
}

impl MetricPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        MetricPoint { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: MetricPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Raster shape plus georeferencing, shared by grid maps and masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridGeometry {
    height: usize,
    width: usize,
    resolution_um: u32,
    ego_cell: Cell,
    heading_urad: i32,
}

impl GridGeometry {
    pub fn new(
        height: usize,
        width: usize,
        resolution: f64,
        ego_cell: Cell,
        ego_heading: f64,
    ) -> Result<Self> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::invalid(format!(
                "resolution must be > 0, got {resolution}"
            )));
        }
        let resolution_um = (resolution * 1e6).round();
        if resolution_um < 1.0 || resolution_um > u32::MAX as f64 {
            return Err(Error::invalid(format!(
                "resolution {resolution} m is not representable in micrometers"
            )));
        }
        if !ego_heading.is_finite() || (ego_heading * 1e6).abs() > i32::MAX as f64 {
            return Err(Error::invalid(format!(
                "ego heading {ego_heading} out of range"
            )));
        }
        Self::from_raw(
            height,
            width,
            resolution_um as u32,
            ego_cell,
            (ego_heading * 1e6).round() as i32,
        )
    }

    /// Builds a geometry from header-precision values.
    pub fn from_raw(
        height: usize,
        width: usize,
        resolution_um: u32,
        ego_cell: Cell,
        heading_urad: i32,
    ) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::invalid(format!(
                "grid dimensions must be >= 1, got {height}x{width}"
            )));
        }
        if resolution_um == 0 {
            return Err(Error::invalid("resolution must be > 0"));
        }
        let geom = GridGeometry {
            height,
            width,
            resolution_um,
            ego_cell,
            heading_urad,
        };
        if !geom.in_bounds(ego_cell) {
            return Err(Error::invalid(format!(
                "ego cell ({}, {}) outside {height}x{width} grid",
                ego_cell.row, ego_cell.col
            )));
        }
        Ok(geom)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn resolution(&self) -> f64 {
        self.resolution_um as f64 / 1e6
    }

    pub fn resolution_um(&self) -> u32 {
        self.resolution_um
    }

    pub fn ego_cell(&self) -> Cell {
        self.ego_cell
    }

    pub fn ego_heading(&self) -> f64 {
        self.heading_urad as f64 / 1e6
    }

    pub fn heading_urad(&self) -> i32 {
        self.heading_urad
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.row >= 0
            && cell.col >= 0
            && (cell.row as u64) < self.height as u64
            && (cell.col as u64) < self.width as u64
    }

    /// Row-major linear index of an in-bounds cell.
    pub fn index(&self, cell: Cell) -> Option<usize> {
        self.in_bounds(cell)
            .then(|| cell.row as usize * self.width + cell.col as usize)
    }

    pub fn cell_of_index(&self, idx: usize) -> Cell {
        Cell::new((idx / self.width) as i64, (idx % self.width) as i64)
    }

    /// Metric center of `cell` in the ego frame. Affine; any cell is accepted.
    pub fn cell_to_metric(&self, cell: Cell) -> MetricPoint {
        let res = self.resolution();
        MetricPoint {
            x: (cell.col - self.ego_cell.col) as f64 * res,
            y: (self.ego_cell.row - cell.row) as f64 * res,
        }
    }

    /// Nearest cell center. May fall outside the raster; callers clip.
    pub fn metric_to_cell(&self, p: MetricPoint) -> Cell {
        let res = self.resolution();
        Cell {
            row: self.ego_cell.row - (p.y / res).round() as i64,
            col: self.ego_cell.col + (p.x / res).round() as i64,
        }
    }

    /// Metric extent covered by cell centers: (min x, max x, min y, max y).
    pub fn metric_bounds(&self) -> (f64, f64, f64, f64) {
        let a = self.cell_to_metric(Cell::new(self.height as i64 - 1, 0));
        let b = self.cell_to_metric(Cell::new(0, self.width as i64 - 1));
        (a.x, b.x, a.y, b.y)
    }
}

impl Default for GridGeometry {
    fn default() -> Self {
        GridGeometry::new(
            DEFAULT_HEIGHT,
            DEFAULT_WIDTH,
            DEFAULT_RESOLUTION,
            DEFAULT_EGO_CELL,
            0.0,
        )
        .expect("default grid geometry is valid")
    }
}

/// Multi-channel BEV raster. Each channel is a row-major `height * width`
/// buffer of `f32`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    geometry: GridGeometry,
    channels: BTreeMap<ChannelId, Vec<f32>>,
}

impl GridMap {
    /// Zero-initialized grid holding the requested channels.
    pub fn new(
        channel_ids: &[ChannelId],
        height: usize,
        width: usize,
        resolution: f64,
        ego_cell: Cell,
        ego_heading: f64,
    ) -> Result<Self> {
        let geometry = GridGeometry::new(height, width, resolution, ego_cell, ego_heading)?;
        Ok(Self::with_geometry(geometry, channel_ids))
    }

    pub fn with_geometry(geometry: GridGeometry, channel_ids: &[ChannelId]) -> Self {
        let channels = channel_ids
            .iter()
            .map(|&id| (id, vec![0.0; geometry.len()]))
            .collect();
        GridMap { geometry, channels }
    }

    /// Assembles a grid from pre-filled channel buffers, checking shape and
    /// value-domain invariants.
    pub fn from_channels(
        geometry: GridGeometry,
        channels: BTreeMap<ChannelId, Vec<f32>>,
    ) -> Result<Self> {
        let grid = GridMap { geometry, channels };
        grid.validate()?;
        Ok(grid)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn height(&self) -> usize {
        self.geometry.height
    }

    pub fn width(&self) -> usize {
        self.geometry.width
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution()
    }

    pub fn ego_cell(&self) -> Cell {
        self.geometry.ego_cell
    }

    pub fn ego_heading(&self) -> f64 {
        self.geometry.ego_heading()
    }

    pub fn channel_ids(&self) -> impl Iterator<Item = ChannelId> + '_ {
        self.channels.keys().copied()
    }

    pub fn has_channel(&self, id: ChannelId) -> bool {
        self.channels.contains_key(&id)
    }

    pub fn channel(&self, id: ChannelId) -> Option<&[f32]> {
        self.channels.get(&id).map(Vec::as_slice)
    }

    pub fn channel_mut(&mut self, id: ChannelId) -> Option<&mut [f32]> {
        self.channels.get_mut(&id).map(Vec::as_mut_slice)
    }

    /// Adds a zeroed channel if it is not present yet.
    pub fn ensure_channel(&mut self, id: ChannelId) -> &mut [f32] {
        let n = self.geometry.len();
        self.channels.entry(id).or_insert_with(|| vec![0.0; n])
    }

    pub fn get(&self, id: ChannelId, cell: Cell) -> Option<f32> {
        let idx = self.geometry.index(cell)?;
        self.channels.get(&id).map(|c| c[idx])
    }

    /// Writes one cell. Out-of-bounds cells and absent channels are ignored
    /// and reported as `false`.
    pub fn set(&mut self, id: ChannelId, cell: Cell, value: f32) -> bool {
        let Some(idx) = self.geometry.index(cell) else {
            return false;
        };
        match self.channels.get_mut(&id) {
            Some(c) => {
                c[idx] = value;
                true
            }
            None => false,
        }
    }

    pub fn cell_to_metric(&self, cell: Cell) -> MetricPoint {
        self.geometry.cell_to_metric(cell)
    }

    pub fn metric_to_cell(&self, p: MetricPoint) -> Cell {
        self.geometry.metric_to_cell(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.geometry.len();
        for (&id, data) in &self.channels {
            if data.len() != n {
                return Err(Error::invalid(format!(
                    "channel {id} has {} cells, expected {n}",
                    data.len()
                )));
            }
            let bad = if id.is_intensity() {
                data.iter().position(|v| !(0.0..=1.0).contains(v))
            } else {
                data.iter().position(|v| !v.is_finite())
            };
            if let Some(i) = bad {
                return Err(Error::invalid(format!(
                    "channel {id} value {} at index {i} out of domain",
                    data[i]
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn into_parts(self) -> (GridGeometry, BTreeMap<ChannelId, Vec<f32>>) {
        (self.geometry, self.channels)
    }
}
