use anyhow::{Context, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Record written next to every output file.
#[derive(Serialize)]
pub struct RunManifest<'a, P: Serialize> {
    pub command: &'a str,
    pub parameters: &'a P,
    pub tool_version: &'a str,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub summary: serde_json::Map<String, serde_json::Value>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub fn write_manifest<P: Serialize>(out: &Path, manifest: &RunManifest<'_, P>) -> Result<()> {
    let path = manifest_path(out);
    let text = serde_json::to_string_pretty(manifest)? + "\n";
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
