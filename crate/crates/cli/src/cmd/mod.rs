pub mod eval;
pub mod extract;
pub mod gen;
pub mod geometry;
pub mod report;
pub mod targets;

use anyhow::Result;
use serde::Serialize;
use stopline::grid_map::{DEFAULT_EGO_CELL, DEFAULT_HEIGHT, DEFAULT_RESOLUTION, DEFAULT_WIDTH};
use stopline::{Cell, GridGeometry};

use crate::GlobalArgs;

/// Flag set recorded in manifests: global flags plus the subcommand's own.
#[derive(Serialize)]
pub struct Flags<'a, A: Serialize> {
    #[serde(flatten)]
    pub global: &'a GlobalArgs,
    #[serde(flatten)]
    pub args: &'a A,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct GridArgs {
    /// Grid rows.
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: usize,
    /// Grid columns.
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: usize,
    /// Cell size, meters.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: f64,
    #[arg(long, default_value_t = DEFAULT_EGO_CELL.row)]
    pub ego_row: i64,
    #[arg(long, default_value_t = DEFAULT_EGO_CELL.col)]
    pub ego_col: i64,
    /// Ego heading, radians counterclockwise from grid-up.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub heading: f64,
}

impl GridArgs {
    pub fn geometry(&self) -> Result<GridGeometry> {
        Ok(GridGeometry::new(
            self.height,
            self.width,
            self.resolution,
            Cell::new(self.ego_row, self.ego_col),
            self.heading,
        )?)
    }
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be > 0, got {s}"))
    }
}

pub fn parse_non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be >= 0, got {s}"))
    }
}

pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must lie in [0, 1], got {s}"))
    }
}
