//! Stop-line estimation toolkit over bird's-eye-view grid maps.
//!
//! The crate is organized around the data flow of a stop-line pipeline:
//!
//! - [`grid_map`] / [`gmap`]: the multi-channel vehicle-centered raster and its
//!   binary file format.
//! - [`target_maps`]: exact Euclidean nearest-foreground transform, the
//!   normalized distance map and direction map derived from a segmentation
//!   mask, and the joint segmentation/regression loss.
//! - [`sparse_lines`]: connected components, PCA line fits and pairwise
//!   merge refinement that turn a mask into a handful of [`StopLine`]s.
//! - [`association_eval`]: greedy ground-truth association and banded
//!   precision/recall/F1/MAE reports.
//! - [`sensor_geometry`]: flat-ground pixel subtence and stopping-distance
//!   arithmetic.
//! - [`synth_scenes`]: deterministic four-way intersection generator.
//! - [`segmenter`]: mask sources (files, heuristic baseline).

pub mod association_eval;
pub mod error;
pub mod gmap;
pub mod grid_map;
pub mod segmenter;
pub mod sensor_geometry;
pub mod sparse_lines;
pub mod synth_scenes;
pub mod target_maps;

pub use error::{Error, Result};
pub use grid_map::{Cell, ChannelId, GridGeometry, GridMap, MetricPoint};
pub use sparse_lines::StopLine;
pub use target_maps::SegMask;
