//! Helpers shared by the acceptance suite.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};
use stopline::StopLine;

/// Larger endpoint distance under the better of the two endpoint pairings.
pub fn endpoint_error(a: &StopLine, b: &StopLine) -> f64 {
    let same = a
        .p_start()
        .distance(b.p_start())
        .max(a.p_end().distance(b.p_end()));
    let swapped = a
        .p_start()
        .distance(b.p_end())
        .max(a.p_end().distance(b.p_start()));
    same.min(swapped)
}

fn walk(dir: &Path, root: &Path, files: &mut BTreeMap<String, Vec<u8>>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            walk(&path, root, files)?;
        } else {
            let rel = path
                .strip_prefix(root)
                .expect("walked paths stay under the root")
                .to_string_lossy()
                .replace('\\', "/");
            files.insert(rel, fs::read(&path)?);
        }
    }
    Ok(())
}

/// Fingerprint of a run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct DirDigest {
    /// SHA-256 over every file except the manifest, by sorted relative path.
    pub outputs: String,
    /// Manifest with run-specific fields removed: wall-clock time and the
    /// locations of inputs and outputs.
    pub manifest: Option<serde_json::Value>,
}

pub fn digest_dir(root: &Path) -> io::Result<DirDigest> {
    let mut files = BTreeMap::new();
    walk(root, root, &mut files)?;
    let manifest = files
        .remove("manifest.json")
        .map(|bytes| serde_json::from_slice::<serde_json::Value>(&bytes))
        .transpose()?
        .map(|mut m| {
            if let Some(obj) = m.as_object_mut() {
                obj.remove("wall_clock_seconds");
                obj.remove("inputs");
                if let Some(flags) = obj.get_mut("flags").and_then(|f| f.as_object_mut()) {
                    for key in ["out", "input", "pred", "gt", "loss"] {
                        flags.remove(key);
                    }
                }
            }
            m
        });
    let mut h = Sha256::new();
    for (name, bytes) in &files {
        h.update(name.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    let outputs = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok(DirDigest { outputs, manifest })
}
