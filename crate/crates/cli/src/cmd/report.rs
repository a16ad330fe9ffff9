use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use serde::Serialize;
use stopline::association_eval::{read_report_json, CSV_HEADER};

use super::Flags;
use crate::io::write_text;
use crate::manifest::RunManifest;
use crate::GlobalArgs;

pub const COMPARISON_CSV: &str = "comparison.csv";

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct ReportArgs {
    /// report.json files, or directories containing one.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    /// Run labels, one per report (default: the report's directory name).
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
}

fn resolve(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(super::eval::REPORT_JSON)
    } else {
        p.to_path_buf()
    }
}

fn default_label(path: &Path) -> String {
    path.parent()
        .and_then(|d| d.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run(global: &GlobalArgs, args: &ReportArgs) -> Result<()> {
    let started = Instant::now();
    ensure!(
        args.labels.is_empty() || args.labels.len() == args.reports.len(),
        "got {} labels for {} reports",
        args.labels.len(),
        args.reports.len()
    );
    let paths: Vec<PathBuf> = args.reports.iter().map(|p| resolve(p)).collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("run").chain(CSV_HEADER))?;
    for (i, path) in paths.iter().enumerate() {
        let label = args
            .labels
            .get(i)
            .cloned()
            .unwrap_or_else(|| default_label(path));
        let rows = read_report_json(path).with_context(|| format!("reading {}", path.display()))?;
        for row in rows {
            w.write_record(std::iter::once(label.clone()).chain(row.csv_fields()))?;
        }
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?;
    print!("{csv}");

    if global.out.is_some() {
        let out = global.out_dir()?;
        write_text(&out.join(COMPARISON_CSV), &csv)?;
        let mut manifest = RunManifest::new("report", Flags { global, args })?;
        manifest.inputs = paths;
        manifest.outputs = vec![COMPARISON_CSV.into()];
        manifest.write(&out, started)?;
    }
    Ok(())
}
