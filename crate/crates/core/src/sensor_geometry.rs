//! Flat-ground range analysis for a level pinhole camera.
//!
//! A painted band of ground depth `s` that starts `d` meters ahead of a
//! camera mounted `h` meters above the road spans the ray angles
//! `atan(h/d)` to `atan(h/(d+s))`. For small angles the image height is
//!
//! ```text
//! dy = f * (h/d - h/(d+s)) = f * h * s / (d * (d + s))   [pixels]
//! ```
//!
//! which falls off as `1/d^2` once `s << d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LINE_DEPTH: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub focal_length_px: f64,
    pub mount_height: f64,
    /// Must be 0; pitched cameras are not modeled.
    pub pitch: f64,
    pub vertical_resolution: u32,
}

impl CameraModel {
    pub fn level(focal_length_px: f64, mount_height: f64, vertical_resolution: u32) -> Self {
        CameraModel {
            focal_length_px,
            mount_height,
            pitch: 0.0,
            vertical_resolution,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal_length_px.is_finite() && self.focal_length_px > 0.0) {
            return Err(Error::invalid("focal length must be > 0"));
        }
        if !(self.mount_height.is_finite() && self.mount_height > 0.0) {
            return Err(Error::invalid("mount height must be > 0"));
        }
        if self.pitch != 0.0 {
            return Err(Error::invalid(
                "only a level camera (pitch = 0) is supported",
            ));
        }
        if self.vertical_resolution == 0 {
            return Err(Error::invalid("vertical resolution must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicsSpec {
    /// m/s
    pub speed: f64,
    /// m/s^2
    pub decel: f64,
    /// s
    pub latency: f64,
}

impl KinematicsSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.speed.is_finite() && self.speed >= 0.0) {
            return Err(Error::invalid("speed must be >= 0"));
        }
        if !(self.decel.is_finite() && self.decel > 0.0) {
            return Err(Error::invalid("deceleration must be > 0"));
        }
        if !(self.latency.is_finite() && self.latency >= 0.0) {
            return Err(Error::invalid("latency must be >= 0"));
        }
        Ok(())
    }
}

pub fn stopline_pixel_height(cam: &CameraModel, line_depth: f64, distance: f64) -> Result<f64> {
    cam.validate()?;
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::invalid(format!(
            "distance must be > 0, got {distance}"
        )));
    }
    if !(line_depth.is_finite() && line_depth > 0.0) {
        return Err(Error::invalid(format!(
            "line depth must be > 0, got {line_depth}"
        )));
    }
    Ok(cam.focal_length_px * cam.mount_height * line_depth / (distance * (distance + line_depth)))
}

/// Braking distance plus distance covered during the system latency:
/// `v^2 / (2a) + v t`.
pub fn required_detection_distance(k: &KinematicsSpec) -> Result<f64> {
    k.validate()?;
    Ok(k.speed * k.speed / (2.0 * k.decel) + k.speed * k.latency)
}

pub fn range_table(
    cam: &CameraModel,
    line_depth: f64,
    distances: &[f64],
) -> Result<Vec<(f64, f64)>> {
    distances
        .iter()
        .map(|&d| Ok((d, stopline_pixel_height(cam, line_depth, d)?)))
        .collect()
}

/// `5, 10, ..., 50` meters.
pub fn default_distance_ladder() -> Vec<f64> {
    (1..=10).map(|k| 5.0 * k as f64).collect()
}
