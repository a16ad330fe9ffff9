use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::ValueEnum;
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use stopline::gmap::decode_grid;
use stopline::segmenter::{segment, SegmenterConfig};
use stopline::sparse_lines::{extract_stop_lines, RefineConfig};
use stopline::SegMask;

use super::{parse_fraction, parse_positive, Flags};
use crate::frames::{create_frame_dir, frame_name, frames_with};
use crate::io::{read_gmap, write_gmap, write_lines};
use crate::manifest::RunManifest;
use crate::GlobalArgs;

pub const LINES_FILE: &str = "lines.json";
pub const SEG_MASK_FILE: &str = "seg_mask.gmap";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Read a segmentation mask per frame.
    Mask,
    /// Segment each frame's grid map with the heuristic baseline.
    Grid,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct ExtractArgs {
    /// Root holding scene_* frame directories.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Source::Mask)]
    pub source: Source,
    #[arg(long, default_value = "gt_mask.gmap")]
    pub mask_name: String,
    #[arg(long, default_value = "scene.gmap")]
    pub grid_name: String,
    /// Smallest component kept, cells.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_cluster: u64,
    /// Merge distance, meters.
    #[arg(long, default_value_t = 0.3, value_parser = parse_positive)]
    pub merge_dist: f64,
    /// Merge angle, degrees.
    #[arg(long, default_value_t = 8.0, value_parser = parse_positive)]
    pub merge_angle: f64,
    /// Sample points per line for the distance measure.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub n_interp: u64,
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    pub marking_threshold: f64,
    /// Degrees.
    #[arg(long, default_value_t = 20.0)]
    pub max_angle: f64,
    /// Meters.
    #[arg(long, default_value_t = 1.5, value_parser = parse_positive)]
    pub min_bar_length: f64,
    #[arg(long, default_value_t = 0.2, value_parser = parse_positive)]
    pub bar_depth_min: f64,
    #[arg(long, default_value_t = 0.9, value_parser = parse_positive)]
    pub bar_depth_max: f64,
    /// Reject heading-parallel runs even when they lie across traffic.
    #[arg(long)]
    pub no_traffic_history: bool,
}

impl ExtractArgs {
    pub fn refine_config(&self) -> RefineConfig {
        RefineConfig {
            d_thresh_merge: self.merge_dist,
            a_thresh: self.merge_angle,
            n_interp: self.n_interp as usize,
            min_cluster_cells: self.min_cluster as usize,
        }
    }

    pub fn segmenter_config(&self) -> SegmenterConfig {
        SegmenterConfig {
            marking_threshold: self.marking_threshold,
            max_angle_from_perpendicular: self.max_angle,
            min_bar_length: self.min_bar_length,
            bar_depth_range: (self.bar_depth_min, self.bar_depth_max),
            use_traffic_history: !self.no_traffic_history,
            ..SegmenterConfig::default()
        }
    }
}

pub fn run(global: &GlobalArgs, args: &ExtractArgs) -> Result<()> {
    let started = Instant::now();
    let refine = args.refine_config();
    refine.validate()?;
    let seg_cfg = args.segmenter_config();
    seg_cfg.validate()?;
    let out = global.out_dir()?;
    let file = match args.source {
        Source::Mask => &args.mask_name,
        Source::Grid => &args.grid_name,
    };
    let frames = frames_with(&args.input, file)?;

    let counts = frames
        .par_iter()
        .map(|(id, path)| -> Result<usize> {
            let frame_dir = create_frame_dir(&out, *id)?;
            let mask = match args.source {
                Source::Mask => SegMask::from_raw(&read_gmap(path)?)
                    .with_context(|| format!("reading {}", path.display()))?,
                Source::Grid => {
                    let bytes = std::fs::read(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let grid = decode_grid(&bytes)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let mask = segment(&grid, &seg_cfg)
                        .with_context(|| format!("segmenting {}", path.display()))?;
                    write_gmap(&frame_dir.join(SEG_MASK_FILE), &mask.to_raw())?;
                    mask
                }
            };
            let lines = extract_stop_lines(&mask, &refine)?;
            write_lines(&frame_dir.join(LINES_FILE), &lines)?;
            Ok(lines.len())
        })
        .collect::<Result<Vec<_>>>()?;
    info!(
        "extracted {} lines from {} frames",
        counts.iter().sum::<usize>(),
        frames.len()
    );

    let mut manifest = RunManifest::new("extract", Flags { global, args })?;
    manifest.inputs = frames.iter().map(|(_, p)| p.clone()).collect();
    manifest.outputs = frames
        .iter()
        .map(|(id, _)| frame_name(*id).into())
        .collect();
    manifest.write(&out, started)
}
