use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use stopline::association_eval::{BandedReport, DEFAULT_A_THRESH, DEFAULT_N_INTERP};

use super::{parse_positive, Flags};
use crate::frames::{frame_name, frames_with};
use crate::io::{read_lines, write_text};
use crate::manifest::RunManifest;
use crate::GlobalArgs;

pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct EvalArgs {
    /// Root of predicted frames.
    #[arg(long)]
    pub pred: PathBuf,
    /// Root of ground-truth frames.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, default_value = "lines.json")]
    pub pred_name: String,
    #[arg(long, default_value = "gt_lines.json")]
    pub gt_name: String,
    /// Association angle limit, degrees.
    #[arg(long, default_value_t = DEFAULT_A_THRESH, value_parser = parse_positive)]
    pub a_thresh: f64,
    #[arg(long, default_value_t = DEFAULT_N_INTERP as u64, value_parser = clap::value_parser!(u64).range(2..))]
    pub n_interp: u64,
}

fn unpaired(a: &BTreeMap<u64, PathBuf>, b: &BTreeMap<u64, PathBuf>) -> Vec<String> {
    a.keys()
        .filter(|k| !b.contains_key(k))
        .map(|&k| frame_name(k))
        .collect()
}

pub fn run(global: &GlobalArgs, args: &EvalArgs) -> Result<()> {
    let started = Instant::now();
    let out = global.out_dir()?;
    let preds: BTreeMap<u64, PathBuf> = frames_with(&args.pred, &args.pred_name)?
        .into_iter()
        .collect();
    let gts: BTreeMap<u64, PathBuf> = frames_with(&args.gt, &args.gt_name)?.into_iter().collect();
    let (no_gt, no_pred) = (unpaired(&preds, &gts), unpaired(&gts, &preds));
    if !no_gt.is_empty() || !no_pred.is_empty() {
        bail!(
            "unpaired frames: without ground truth [{}], without predictions [{}]",
            no_gt.join(", "),
            no_pred.join(", ")
        );
    }

    let frames: Vec<(PathBuf, PathBuf)> = preds
        .iter()
        .map(|(id, p)| (p.clone(), gts[id].clone()))
        .collect();
    let per_frame = frames
        .par_iter()
        .map(|(p, g)| -> Result<BandedReport> {
            Ok(BandedReport::from_frame(
                &read_lines(p)?,
                &read_lines(g)?,
                args.a_thresh,
                args.n_interp as usize,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    // summed in frame order so rounding is reproducible
    let mut report = BandedReport::default();
    for r in per_frame {
        report += r;
    }

    let csv = report.to_csv()?;
    write_text(&out.join(REPORT_CSV), &csv)?;
    write_text(&out.join(REPORT_JSON), &(report.to_json()? + "\n"))?;
    stopline::association_eval::read_report_json(out.join(REPORT_JSON))?;
    print!("{csv}");
    info!("evaluated {} frames", frames.len());

    let mut manifest = RunManifest::new("eval", Flags { global, args })?;
    manifest.inputs = frames.into_iter().flat_map(|(p, g)| [p, g]).collect();
    manifest.outputs = vec![REPORT_CSV.into(), REPORT_JSON.into()];
    manifest.write(&out, started)
}
