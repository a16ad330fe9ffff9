use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_map::MetricPoint;

/// Sparse stop-line record in the ego metric frame.
///
/// `p_start` is the endpoint with the smaller `x` (ties: smaller `y`);
/// `slope` is the direction angle of `p_end - p_start` from the `x` axis,
/// folded into `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LineRecord", into = "LineRecord")]
pub struct StopLine {
    p_start: MetricPoint,
    p_end: MetricPoint,
    length: f64,
    slope: f64,
}

impl StopLine {
    pub fn new(a: MetricPoint, b: MetricPoint) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("line endpoints must be finite"));
        }
        let (p_start, p_end) = if (a.x, a.y) <= (b.x, b.y) {
            (a, b)
        } else {
            (b, a)
        };
        let length = p_start.distance(p_end);
        if length <= 0.0 {
            return Err(Error::invalid("zero-length line"));
        }
        let mut slope = (p_end.y - p_start.y).atan2(p_end.x - p_start.x);
        if slope < 0.0 {
            slope += PI;
        }
        if slope >= PI {
            slope = 0.0;
        }
        Ok(StopLine {
            p_start,
            p_end,
            length,
            slope,
        })
    }

    pub fn p_start(&self) -> MetricPoint {
        self.p_start
    }

    pub fn p_end(&self) -> MetricPoint {
        self.p_end
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Radians in `[0, pi)`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn slope_deg(&self) -> f64 {
        self.slope.to_degrees()
    }

    /// Unit vector from `p_start` to `p_end`.
    pub fn direction(&self) -> (f64, f64) {
        (
            (self.p_end.x - self.p_start.x) / self.length,
            (self.p_end.y - self.p_start.y) / self.length,
        )
    }

    pub fn midpoint(&self) -> MetricPoint {
        self.point_at(0.5)
    }

    /// Linear interpolation, `t = 0` at `p_start`.
    pub fn point_at(&self, t: f64) -> MetricPoint {
        MetricPoint::new(
            self.p_start.x + t * (self.p_end.x - self.p_start.x),
            self.p_start.y + t * (self.p_end.y - self.p_start.y),
        )
    }

    /// Signed coordinate of `p` along the line, 0 at `p_start`.
    pub fn project(&self, p: MetricPoint) -> f64 {
        let (ux, uy) = self.direction();
        (p.x - self.p_start.x) * ux + (p.y - self.p_start.y) * uy
    }
}

/// JSON shape of a line: `{"p_start":[x,y],"p_end":[x,y],"length_m":..,"slope_deg":..}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct LineRecord {
    p_start: [f64; 2],
    p_end: [f64; 2],
    length_m: f64,
    slope_deg: f64,
}

impl From<StopLine> for LineRecord {
    fn from(l: StopLine) -> Self {
        LineRecord {
            p_start: [l.p_start.x, l.p_start.y],
            p_end: [l.p_end.x, l.p_end.y],
            length_m: l.length,
            slope_deg: l.slope_deg(),
        }
    }
}

impl TryFrom<LineRecord> for StopLine {
    type Error = Error;

    fn try_from(r: LineRecord) -> Result<Self> {
        StopLine::new(
            MetricPoint::new(r.p_start[0], r.p_start[1]),
            MetricPoint::new(r.p_end[0], r.p_end[1]),
        )
    }
}

pub fn lines_to_json(lines: &[StopLine]) -> Result<String> {
    Ok(serde_json::to_string_pretty(lines)?)
}

pub fn lines_from_json(s: &str) -> Result<Vec<StopLine>> {
    Ok(serde_json::from_str(s)?)
}

/// Distance from `p` to the infinite line through `l`.
pub fn perp_distance(p: MetricPoint, l: &StopLine) -> f64 {
    let (ux, uy) = l.direction();
    ((p.x - l.p_start.x) * uy - (p.y - l.p_start.y) * ux).abs()
}

/// Mean perpendicular distance from `n_interp` evenly spaced points of `li`
/// (endpoints included) to the line through `lj`. Not symmetric.
/// `n_interp` below 2 is treated as 2.
pub fn line_pair_distance(li: &StopLine, lj: &StopLine, n_interp: usize) -> f64 {
    let n = n_interp.max(2);
    let sum: f64 = (0..n)
        .map(|k| perp_distance(li.point_at(k as f64 / (n - 1) as f64), lj))
        .sum();
    sum / n as f64
}

/// Acute angle between the two line directions, degrees in `[0, 90]`.
pub fn line_pair_angle(li: &StopLine, lj: &StopLine) -> f64 {
    let d = (li.slope - lj.slope).abs() % PI;
    d.min(PI - d).to_degrees()
}
