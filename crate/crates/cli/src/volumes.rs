use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::Context;
use veloreg_core::io::{read_labels, read_scalar, write_labels, write_scalar};
use veloreg_core::{LabelMap, ScalarField, VectorField};

const SUFFIXES: [&str; 3] = ["_x1", "_x2", "_x3"];

fn suffixed(stem: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = stem.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

pub fn scalar(path: &Path) -> anyhow::Result<ScalarField> {
    read_scalar(path).with_context(|| format!("reading {}", path.display()))
}

pub fn labels(path: &Path) -> anyhow::Result<LabelMap> {
    read_labels(path).with_context(|| format!("reading {}", path.display()))
}

pub fn save_scalar(field: &ScalarField, path: &Path) -> anyhow::Result<()> {
    write_scalar(field, path).with_context(|| format!("writing {}", path.display()))
}

pub fn save_labels(map: &LabelMap, path: &Path) -> anyhow::Result<()> {
    write_labels(map, path).with_context(|| format!("writing {}", path.display()))
}

/// Reads `<stem>_x1`, `<stem>_x2`, `<stem>_x3`.
pub fn vector(stem: &Path) -> anyhow::Result<VectorField> {
    let [a, b, c] = SUFFIXES.map(|s| scalar(&suffixed(stem, s)));
    Ok(VectorField::from_components([a?, b?, c?])?)
}

pub fn save_vector(v: &VectorField, stem: &Path) -> anyhow::Result<()> {
    for (c, s) in v.components().iter().zip(SUFFIXES) {
        save_scalar(c, &suffixed(stem, s))?;
    }
    Ok(())
}

/// `<stem>.report.json`, next to the volume written at `stem`.
pub fn report_path(stem: &Path) -> PathBuf {
    let (raw, _) = veloreg_core::io::volume_paths(stem);
    suffixed(&raw.with_extension(""), ".report.json")
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
