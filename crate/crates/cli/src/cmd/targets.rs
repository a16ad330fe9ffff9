use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use stopline::gmap::{self, RawGmap};
use stopline::target_maps::{joint_loss, target_maps, LossBreakdown, Prediction, DEFAULT_D_THRESH};
use stopline::SegMask;

use super::{parse_positive, Flags};
use crate::frames::{create_frame_dir, frame_name, frames_with, list_frames};
use crate::io::{read_gmap, write_gmap, write_text};
use crate::manifest::RunManifest;
use crate::GlobalArgs;

pub const DISTANCE_FILE: &str = "distance.gmap";
pub const DIRECTION_FILE: &str = "direction.gmap";
pub const LOSS_FILE: &str = "loss.json";

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct TargetsArgs {
    /// Root holding scene_* frame directories.
    #[arg(long)]
    pub input: PathBuf,
    /// Mask file inside each frame directory.
    #[arg(long, default_value = "gt_mask.gmap")]
    pub mask_name: String,
    /// Distance clip, cells.
    #[arg(long, default_value_t = DEFAULT_D_THRESH, value_parser = clap::value_parser!(u32).range(1..))]
    pub d_thresh: u32,
    /// Root of predictions to score against the targets.
    #[arg(long)]
    pub loss: Option<PathBuf>,
    /// Prediction file per frame: channels 100 (probability), 101, 102, 103.
    #[arg(long, default_value = "prediction.gmap")]
    pub pred_name: String,
    /// Cross-entropy class weights as `background,foreground`.
    #[arg(long, value_delimiter = ',', num_args = 2, value_parser = parse_positive)]
    pub class_weights: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct FrameLoss {
    frame: String,
    loss: LossBreakdown,
}

fn channel(raw: &RawGmap, id: u16, path: &std::path::Path) -> Result<Vec<f64>> {
    let values = raw
        .channel(id)
        .with_context(|| format!("{} lacks channel {id}", path.display()))?;
    Ok(values.iter().map(|&v| v as f64).collect())
}

pub fn run(global: &GlobalArgs, args: &TargetsArgs) -> Result<()> {
    let started = Instant::now();
    let out = global.out_dir()?;
    let frames = frames_with(&args.input, &args.mask_name)?;
    let weights = args.class_weights.as_ref().map(|w| (w[0], w[1]));
    let predictions = match &args.loss {
        Some(root) => Some(list_frames(root)?),
        None => None,
    };

    let results = frames
        .par_iter()
        .map(|(id, mask_path)| -> Result<Option<FrameLoss>> {
            let raw = read_gmap(mask_path)?;
            let mask = SegMask::from_raw(&raw)
                .with_context(|| format!("reading {}", mask_path.display()))?;
            let (dist, dir) = target_maps(&mask, args.d_thresh)?;
            let frame_dir = create_frame_dir(&out, *id)?;
            write_gmap(&frame_dir.join(DISTANCE_FILE), &dist.to_raw())?;
            write_gmap(&frame_dir.join(DIRECTION_FILE), &dir.to_raw())?;

            let Some(preds) = &predictions else {
                return Ok(None);
            };
            let Some(pred_dir) = preds.get(id) else {
                bail!("no prediction for {}", frame_name(*id));
            };
            let pred_path = pred_dir.join(&args.pred_name);
            let pred = read_gmap(&pred_path)?;
            ensure!(
                pred.geometry.height() == mask.height() && pred.geometry.width() == mask.width(),
                "{} does not match the mask shape",
                pred_path.display()
            );
            let seg = channel(&pred, gmap::MASK_CHANNEL, &pred_path)?;
            let pd = channel(&pred, gmap::DISTANCE_CHANNEL, &pred_path)?;
            let dx = channel(&pred, gmap::DIRECTION_DX_CHANNEL, &pred_path)?;
            let dy = channel(&pred, gmap::DIRECTION_DY_CHANNEL, &pred_path)?;
            let p = Prediction {
                seg: &seg,
                dist: &pd,
                dir_dx: &dx,
                dir_dy: &dy,
            };
            let loss = joint_loss(p, &mask, &dist, &dir, weights)
                .with_context(|| format!("scoring {}", pred_path.display()))?;
            Ok(Some(FrameLoss {
                frame: frame_name(*id),
                loss,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    info!("wrote targets for {} frames", frames.len());

    let mut manifest = RunManifest::new("targets", Flags { global, args })?;
    manifest.inputs = frames.iter().map(|(_, p)| p.clone()).collect();
    manifest.outputs = frames
        .iter()
        .map(|(id, _)| frame_name(*id).into())
        .collect();
    if args.loss.is_some() {
        let losses: Vec<FrameLoss> = results.into_iter().flatten().collect();
        let text = serde_json::to_string_pretty(&losses)?;
        println!("{text}");
        write_text(&out.join(LOSS_FILE), &(text + "\n"))?;
        manifest.outputs.push(LOSS_FILE.into());
    }
    manifest.write(&out, started)
}
