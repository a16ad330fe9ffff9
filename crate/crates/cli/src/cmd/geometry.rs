use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use stopline::sensor_geometry::{
    default_distance_ladder, range_table, required_detection_distance, CameraModel, KinematicsSpec,
    DEFAULT_LINE_DEPTH,
};

use super::{parse_non_negative, parse_positive, Flags};
use crate::io::write_text;
use crate::manifest::RunManifest;
use crate::GlobalArgs;

pub const RANGE_TABLE_CSV: &str = "range_table.csv";
pub const GEOMETRY_JSON: &str = "geometry.json";

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct GeometryArgs {
    /// Vehicle speed, m/s.
    #[arg(long, default_value_t = 15.6464, value_parser = parse_non_negative)]
    pub speed_mps: f64,
    /// Comfort deceleration, m/s^2.
    #[arg(long, default_value_t = 3.0, value_parser = parse_positive)]
    pub decel: f64,
    /// Perception-to-action latency, s.
    #[arg(long, default_value_t = 0.8, value_parser = parse_non_negative)]
    pub latency: f64,
    /// Focal length, pixels.
    #[arg(long, default_value_t = 2000.0, value_parser = parse_positive)]
    pub focal_px: f64,
    /// Camera height above the road, meters.
    #[arg(long, default_value_t = 1.5, value_parser = parse_positive)]
    pub mount_height: f64,
    /// Painted stop line depth, meters.
    #[arg(long, default_value_t = DEFAULT_LINE_DEPTH, value_parser = parse_positive)]
    pub line_depth: f64,
    #[arg(long, default_value_t = 1080, value_parser = clap::value_parser!(u32).range(1..))]
    pub vertical_resolution: u32,
    /// Distances for the range table, meters (default 5, 10, ..., 50).
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    pub distances: Vec<f64>,
}

#[derive(Serialize)]
struct Summary {
    required_detection_distance_m: f64,
    rows: Vec<(f64, f64)>,
}

pub fn run(global: &GlobalArgs, args: &GeometryArgs) -> Result<()> {
    let started = Instant::now();
    let cam = CameraModel::level(args.focal_px, args.mount_height, args.vertical_resolution);
    let distances = if args.distances.is_empty() {
        default_distance_ladder()
    } else {
        args.distances.clone()
    };
    let rows = range_table(&cam, args.line_depth, &distances)?;
    let required = required_detection_distance(&KinematicsSpec {
        speed: args.speed_mps,
        decel: args.decel,
        latency: args.latency,
    })?;

    let mut csv = String::from("distance_m,pixel_height_px\n");
    for (d, px) in &rows {
        csv.push_str(&format!("{d},{px:.6}\n"));
    }
    print!("{csv}");
    println!("required_detection_distance_m,{required:.3}");

    if global.out.is_some() {
        let out = global.out_dir()?;
        write_text(&out.join(RANGE_TABLE_CSV), &csv)?;
        let summary = Summary {
            required_detection_distance_m: required,
            rows,
        };
        write_text(
            &out.join(GEOMETRY_JSON),
            &(serde_json::to_string_pretty(&summary)? + "\n"),
        )?;
        let mut manifest = RunManifest::new("geometry", Flags { global, args })?;
        manifest.outputs = vec![RANGE_TABLE_CSV.into(), GEOMETRY_JSON.into()];
        manifest.write(&out, started)?;
    }
    Ok(())
}
