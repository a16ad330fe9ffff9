//! Frame directories: `scene_000042/` under an input or output root.
//!
//! Ids are zero-padded to six digits so lexicographic order equals numeric
//! order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

const PREFIX: &str = "scene_";

pub fn frame_name(id: u64) -> String {
    format!("{PREFIX}{id:06}")
}

pub fn parse_frame_name(name: &str) -> Option<u64> {
    let digits = name.strip_prefix(PREFIX)?;
    if digits.len() < 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Frame id to directory, for every `scene_*` directory directly under
/// `root`.
pub fn list_frames(root: &Path) -> Result<BTreeMap<u64, PathBuf>> {
    let mut frames = BTreeMap::new();
    let entries = fs::read_dir(root).with_context(|| format!("reading {}", root.display()))?;
    for entry in entries {
        let entry = entry.with_context(|| format!("reading {}", root.display()))?;
        let Some(id) = entry.file_name().to_str().and_then(parse_frame_name) else {
            continue;
        };
        if entry.file_type()?.is_dir() {
            frames.insert(id, entry.path());
        }
    }
    Ok(frames)
}

/// Frames that carry `file`; errors if none do.
pub fn frames_with(root: &Path, file: &str) -> Result<Vec<(u64, PathBuf)>> {
    let frames: Vec<(u64, PathBuf)> = list_frames(root)?
        .into_iter()
        .filter(|(_, dir)| dir.join(file).is_file())
        .map(|(id, dir)| (id, dir.join(file)))
        .collect();
    if frames.is_empty() {
        bail!("no {PREFIX}* frames with {file} under {}", root.display());
    }
    Ok(frames)
}

pub fn create_frame_dir(out: &Path, id: u64) -> Result<PathBuf> {
    let dir = out.join(frame_name(id));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}
