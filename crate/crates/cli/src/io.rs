//! File writers that read their output back, so a zero exit status means
//! every file parses.

use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use stopline::gmap::{self, RawGmap};
use stopline::sparse_lines::{lines_from_json, lines_to_json};
use stopline::StopLine;

pub fn write_gmap(path: &Path, raw: &RawGmap) -> Result<()> {
    gmap::write_raw(path, raw).with_context(|| format!("writing {}", path.display()))?;
    let back = gmap::read_raw(path).with_context(|| format!("re-reading {}", path.display()))?;
    ensure!(
        &back == raw,
        "{} did not read back identically",
        path.display()
    );
    Ok(())
}

pub fn read_gmap(path: &Path) -> Result<RawGmap> {
    gmap::read_raw(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_lines(path: &Path, lines: &[StopLine]) -> Result<()> {
    let text = lines_to_json(lines)? + "\n";
    fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    read_lines(path).map(|_| ())
}

pub fn read_lines(path: &Path) -> Result<Vec<StopLine>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    lines_from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
