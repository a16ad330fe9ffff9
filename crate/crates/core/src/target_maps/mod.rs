//! Auxiliary regression targets derived from a binary stop-line mask.
//!
//! - [`nearest_foreground_map`]: for every cell the exact Euclidean nearest
//!   foreground cell. Equidistant candidates resolve to the smallest row, then
//!   the smallest column.
//! - [`signed_distance_map`]: `d_thresh` on the foreground, `d_thresh - d`
//!   elsewhere, clipped at 0 and divided by `d_thresh` so values lie in
//!   `[0, 1]` with the foreground at exactly 1.
//! - [`direction_map`]: offsets from each cell to its nearest foreground cell,
//!   divided by `d_thresh`; zero on the foreground, beyond `d_thresh`, and
//!   where no foreground exists.
//!
//! Distances are in cells.

mod edt;
mod loss;

pub use loss::{joint_loss, LossBreakdown, Prediction, PROB_EPS};

use crate::error::{Error, Result};
use crate::gmap::{self, RawGmap};
use crate::grid_map::{Cell, GridGeometry};

use edt::{nearest_sites, NO_SITE};

pub const DEFAULT_D_THRESH: u32 = 12;

/// Binary stop-line mask (1 = foreground).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegMask {
    geometry: GridGeometry,
    data: Vec<u8>,
}

impl SegMask {
    pub fn empty(geometry: GridGeometry) -> Self {
        SegMask {
            data: vec![0; geometry.len()],
            geometry,
        }
    }

    pub fn from_bits(geometry: GridGeometry, data: Vec<u8>) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::invalid(format!(
                "mask has {} cells, expected {}",
                data.len(),
                geometry.len()
            )));
        }
        if let Some(i) = data.iter().position(|&v| v > 1) {
            return Err(Error::invalid(format!(
                "mask value {} at index {i} is not 0/1",
                data[i]
            )));
        }
        Ok(SegMask { geometry, data })
    }

    pub fn from_fn(geometry: GridGeometry, mut f: impl FnMut(Cell) -> bool) -> Self {
        let data = (0..geometry.len())
            .map(|i| f(geometry.cell_of_index(i)) as u8)
            .collect();
        SegMask { geometry, data }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn height(&self) -> usize {
        self.geometry.height()
    }

    pub fn width(&self) -> usize {
        self.geometry.width()
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution()
    }

    pub fn as_bits(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, cell: Cell) -> bool {
        self.geometry.index(cell).is_some_and(|i| self.data[i] != 0)
    }

    pub fn set(&mut self, cell: Cell, on: bool) {
        if let Some(i) = self.geometry.index(cell) {
            self.data[i] = on as u8;
        }
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_blank(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn foreground(&self) -> impl Iterator<Item = Cell> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| self.geometry.cell_of_index(i))
    }

    pub fn union(&self, other: &SegMask) -> Result<SegMask> {
        check_shape(&self.geometry, &other.geometry)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a | b)
            .collect();
        Ok(SegMask {
            geometry: self.geometry,
            data,
        })
    }

    pub fn to_raw(&self) -> RawGmap {
        RawGmap {
            geometry: self.geometry,
            channels: vec![(
                gmap::MASK_CHANNEL,
                self.data.iter().map(|&v| v as f32).collect(),
            )],
        }
    }

    /// Reads the mask channel; values above 0.5 become foreground.
    pub fn from_raw(raw: &RawGmap) -> Result<Self> {
        let Some(values) = raw.channel(gmap::MASK_CHANNEL) else {
            let ids: Vec<u16> = raw.channels.iter().map(|(c, _)| *c).collect();
            return Err(Error::format(
                gmap::HEADER_LEN as u64,
                format!("no mask channel {} (found {ids:?})", gmap::MASK_CHANNEL),
            ));
        };
        Ok(SegMask {
            geometry: raw.geometry,
            data: values.iter().map(|&v| (v > 0.5) as u8).collect(),
        })
    }
}

fn check_shape(a: &GridGeometry, b: &GridGeometry) -> Result<()> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::invalid(format!(
            "shape mismatch: {}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Nearest foreground cell per cell plus its squared distance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    geometry: GridGeometry,
    site: Vec<u32>,
    sq_dist: Vec<u64>,
}

impl FeatureMap {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn is_valid(&self, cell: Cell) -> bool {
        self.geometry
            .index(cell)
            .is_some_and(|i| self.site[i] != NO_SITE)
    }

    /// `F_ij`, or `None` when the mask has no foreground.
    pub fn nearest(&self, cell: Cell) -> Option<Cell> {
        let i = self.geometry.index(cell)?;
        (self.site[i] != NO_SITE).then(|| self.geometry.cell_of_index(self.site[i] as usize))
    }

    pub fn squared_distance(&self, cell: Cell) -> Option<u64> {
        let i = self.geometry.index(cell)?;
        (self.site[i] != NO_SITE).then_some(self.sq_dist[i])
    }

    pub fn distance(&self, cell: Cell) -> Option<f64> {
        self.squared_distance(cell).map(|d| (d as f64).sqrt())
    }
}

pub fn nearest_foreground_map(mask: &SegMask) -> Result<FeatureMap> {
    if mask.geometry.is_empty() {
        return Err(Error::invalid("mask has no cells"));
    }
    if mask.geometry.len() >= NO_SITE as usize {
        return Err(Error::invalid(format!(
            "mask of {} cells is too large for the distance transform",
            mask.geometry.len()
        )));
    }
    let s = nearest_sites(mask.height(), mask.width(), &mask.data);
    Ok(FeatureMap {
        geometry: mask.geometry,
        site: s.site,
        sq_dist: s.sq_dist,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    geometry: GridGeometry,
    d_thresh: u32,
    values: Vec<f64>,
}

impl DistanceMap {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn d_thresh(&self) -> u32 {
        self.d_thresh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, cell: Cell) -> Option<f64> {
        self.geometry.index(cell).map(|i| self.values[i])
    }

    pub fn to_raw(&self) -> RawGmap {
        RawGmap {
            geometry: self.geometry,
            channels: vec![(
                gmap::DISTANCE_CHANNEL,
                self.values.iter().map(|&v| v as f32).collect(),
            )],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMap {
    geometry: GridGeometry,
    d_thresh: u32,
    dx: Vec<f64>,
    dy: Vec<f64>,
}

impl DirectionMap {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn d_thresh(&self) -> u32 {
        self.d_thresh
    }

    /// Column offsets, normalized.
    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    /// Row offsets, normalized.
    pub fn dy(&self) -> &[f64] {
        &self.dy
    }

    pub fn get(&self, cell: Cell) -> Option<(f64, f64)> {
        self.geometry.index(cell).map(|i| (self.dx[i], self.dy[i]))
    }

    pub fn to_raw(&self) -> RawGmap {
        let f = |v: &[f64]| v.iter().map(|&x| x as f32).collect();
        RawGmap {
            geometry: self.geometry,
            channels: vec![
                (gmap::DIRECTION_DX_CHANNEL, f(&self.dx)),
                (gmap::DIRECTION_DY_CHANNEL, f(&self.dy)),
            ],
        }
    }
}

fn check_thresh(d_thresh: u32) -> Result<()> {
    if d_thresh < 1 {
        return Err(Error::invalid("d_thresh must be a positive integer"));
    }
    Ok(())
}

pub fn signed_distance_map(mask: &SegMask, d_thresh: u32) -> Result<DistanceMap> {
    check_thresh(d_thresh)?;
    let fmap = nearest_foreground_map(mask)?;
    Ok(distance_from_features(&fmap, d_thresh))
}

pub fn direction_map(mask: &SegMask, d_thresh: u32) -> Result<DirectionMap> {
    check_thresh(d_thresh)?;
    let fmap = nearest_foreground_map(mask)?;
    Ok(direction_from_features(&fmap, d_thresh))
}

/// Both targets from a single transform.
pub fn target_maps(mask: &SegMask, d_thresh: u32) -> Result<(DistanceMap, DirectionMap)> {
    check_thresh(d_thresh)?;
    let fmap = nearest_foreground_map(mask)?;
    Ok((
        distance_from_features(&fmap, d_thresh),
        direction_from_features(&fmap, d_thresh),
    ))
}

fn distance_from_features(fmap: &FeatureMap, d_thresh: u32) -> DistanceMap {
    let t = d_thresh as f64;
    let values = fmap
        .site
        .iter()
        .zip(&fmap.sq_dist)
        .map(|(&site, &sq)| {
            if site == NO_SITE {
                0.0
            } else if sq == 0 {
                1.0
            } else {
                ((t - (sq as f64).sqrt()).max(0.0)) / t
            }
        })
        .collect();
    DistanceMap {
        geometry: fmap.geometry,
        d_thresh,
        values,
    }
}

fn direction_from_features(fmap: &FeatureMap, d_thresh: u32) -> DirectionMap {
    let t = d_thresh as f64;
    let limit = d_thresh as u64 * d_thresh as u64;
    let n = fmap.geometry.len();
    let w = fmap.geometry.width();
    let mut dx = vec![0.0; n];
    let mut dy = vec![0.0; n];
    for i in 0..n {
        let site = fmap.site[i];
        if site == NO_SITE || fmap.sq_dist[i] == 0 || fmap.sq_dist[i] >= limit {
            continue;
        }
        let (r, c) = ((i / w) as f64, (i % w) as f64);
        let (sr, sc) = ((site as usize / w) as f64, (site as usize % w) as f64);
        dx[i] = (sc - c) / t;
        dy[i] = (sr - r) / t;
    }
    DirectionMap {
        geometry: fmap.geometry,
        d_thresh,
        dx,
        dy,
    }
}
