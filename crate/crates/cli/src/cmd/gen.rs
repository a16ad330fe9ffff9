use std::time::Instant;

use anyhow::Result;
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use stopline::gmap::RawGmap;
use stopline::synth_scenes::{
    corpus_specs, generate_scene, rasterize_gt, CorpusTemplate, STOP_BAR_CELLS,
};

use super::{parse_fraction, parse_non_negative, parse_positive, Flags, GridArgs};
use crate::frames::{create_frame_dir, frame_name};
use crate::io::{write_gmap, write_lines};
use crate::manifest::RunManifest;
use crate::GlobalArgs;

pub const SCENE_FILE: &str = "scene.gmap";
pub const GT_LINES_FILE: &str = "gt_lines.json";
pub const GT_MASK_FILE: &str = "gt_mask.gmap";

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct GenArgs {
    /// Number of scenes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub scenes: u64,
    #[arg(long, default_value_t = 3.5, value_parser = parse_positive)]
    pub lane_width: f64,
    #[arg(long, default_value_t = 1)]
    pub lanes_min: u32,
    #[arg(long, default_value_t = 2)]
    pub lanes_max: u32,
    /// Stop line distance before the crossing edge, meters.
    #[arg(long, default_value_t = 1.5, value_parser = parse_non_negative)]
    pub setback: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_fraction)]
    pub crosswalk_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub occlusion_blobs: u32,
    #[arg(long, default_value_t = 0.0, value_parser = parse_fraction)]
    pub erase_fraction: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    pub noise_sigma: f64,
    /// Ground-truth mask thickness, cells.
    #[arg(long, default_value_t = STOP_BAR_CELLS, value_parser = clap::value_parser!(u32).range(1..))]
    pub gt_thickness: u32,
    #[command(flatten)]
    pub grid: GridArgs,
}

pub fn run(global: &GlobalArgs, args: &GenArgs) -> Result<()> {
    let started = Instant::now();
    let out = global.out_dir()?;
    let geometry = args.grid.geometry()?;
    let template = CorpusTemplate {
        lane_width: args.lane_width,
        lanes_min: args.lanes_min,
        lanes_max: args.lanes_max,
        stop_line_setback: args.setback,
        crosswalk_probability: args.crosswalk_prob,
        occlusion_blobs: args.occlusion_blobs,
        marking_erase_fraction: args.erase_fraction,
        noise_sigma: args.noise_sigma,
    };
    let specs = corpus_specs(global.seed, args.scenes as usize, &template, &geometry)?;

    let outputs = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| -> Result<String> {
            let dir = create_frame_dir(&out, i as u64)?;
            let (grid, lines) = generate_scene(spec, &geometry)?;
            let mask = rasterize_gt(&lines, &geometry, args.gt_thickness)?;
            write_gmap(&dir.join(SCENE_FILE), &RawGmap::from(grid))?;
            write_lines(&dir.join(GT_LINES_FILE), &lines)?;
            write_gmap(&dir.join(GT_MASK_FILE), &mask.to_raw())?;
            Ok(frame_name(i as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    info!("wrote {} scenes to {}", outputs.len(), out.display());

    let mut manifest = RunManifest::new("gen", Flags { global, args })?;
    manifest.outputs = outputs.into_iter().map(Into::into).collect();
    manifest.seeds = std::iter::once(global.seed)
        .chain(specs.iter().map(|s| s.seed))
        .collect();
    manifest.details = Some(serde_json::json!({ "scenes": specs }));
    manifest.write(&out, started)
}
