use serde::{Deserialize, Serialize};

use super::{check_shape, DirectionMap, DistanceMap, SegMask};
use crate::error::{Error, Result};

/// Floor applied to the probability assigned to the true class before `ln`.
pub const PROB_EPS: f64 = 1e-7;
pub const LAMBDA_DIST: f64 = 0.5;
pub const LAMBDA_DIR: f64 = 0.5;

/// Network-style outputs to score against targets. All slices are row-major
/// with the targets' shape.
#[derive(Debug, Clone, Copy)]
pub struct Prediction<'a> {
    /// Foreground probability per cell.
    pub seg: &'a [f64],
    pub dist: &'a [f64],
    pub dir_dx: &'a [f64],
    pub dir_dy: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub ce_seg: f64,
    pub l2_dist: f64,
    pub l2_dir: f64,
    pub total: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl LossBreakdown {
    pub fn new(ce_seg: f64, l2_dist: f64, l2_dir: f64) -> Self {
        LossBreakdown {
            ce_seg,
            l2_dist,
            l2_dir,
            total: ce_seg + LAMBDA_DIST * l2_dist + LAMBDA_DIR * l2_dir,
            lambda1: LAMBDA_DIST,
            lambda2: LAMBDA_DIR,
        }
    }
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Weighted binary cross-entropy (mean over cells) plus the two mean squared
/// regression terms at weight 0.5 each.
///
/// `class_weights` is `(background, foreground)`; `None` weighs both as 1.
pub fn joint_loss(
    pred: Prediction<'_>,
    gt_seg: &SegMask,
    gt_dist: &DistanceMap,
    gt_dir: &DirectionMap,
    class_weights: Option<(f64, f64)>,
) -> Result<LossBreakdown> {
    check_shape(gt_seg.geometry(), gt_dist.geometry())?;
    check_shape(gt_seg.geometry(), gt_dir.geometry())?;
    let n = gt_seg.geometry().len();
    for (name, s) in [
        ("seg", pred.seg),
        ("dist", pred.dist),
        ("dir dx", pred.dir_dx),
        ("dir dy", pred.dir_dy),
    ] {
        if s.len() != n {
            return Err(Error::invalid(format!(
                "prediction {name} has {} cells, expected {n}",
                s.len()
            )));
        }
    }
    if let Some(i) = pred.seg.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::invalid(format!(
            "probability {} at index {i} outside [0, 1]",
            pred.seg[i]
        )));
    }
    let (w_bg, w_fg) = class_weights.unwrap_or((1.0, 1.0));
    if !(w_bg.is_finite() && w_fg.is_finite() && w_bg >= 0.0 && w_fg >= 0.0) {
        return Err(Error::invalid(
            "class weights must be finite and nonnegative",
        ));
    }

    let ce_sum: f64 = pred
        .seg
        .iter()
        .zip(gt_seg.as_bits())
        .map(|(&p, &y)| {
            let (p_true, w) = if y != 0 { (p, w_fg) } else { (1.0 - p, w_bg) };
            -w * p_true.max(PROB_EPS).ln()
        })
        .sum();
    let ce_seg = ce_sum / n as f64;
    let l2_dist = mse(pred.dist, gt_dist.values());
    let l2_dir = (mse(pred.dir_dx, gt_dir.dx()) + mse(pred.dir_dy, gt_dir.dy())) / 2.0;
    Ok(LossBreakdown::new(ce_seg, l2_dist, l2_dir))
}
