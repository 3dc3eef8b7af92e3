//! Raw volume files: a little-endian payload `<name>.raw` next to a JSON
//! header `<name>.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LabelMap, ScalarField};
use crate::grid::Grid;

pub const ORDER_TAG: &str = "x3-fastest";
pub const DOMAIN_TAG: &str = "2pi";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dtype {
    #[serde(rename = "f32")]
    F32,
    #[serde(rename = "u16")]
    U16,
}

impl Dtype {
    pub fn width(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::U16 => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dtype::F32 => "f32",
            Dtype::U16 => "u16",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeHeader {
    pub dims: [usize; 3],
    pub dtype: Dtype,
    pub order: String,
    pub domain: String,
}

impl VolumeHeader {
    pub fn new(grid: &Grid, dtype: Dtype) -> Self {
        Self { dims: grid.dims(), dtype, order: ORDER_TAG.into(), domain: DOMAIN_TAG.into() }
    }

    pub fn payload_len(&self) -> usize {
        self.dims.iter().product::<usize>() * self.dtype.width()
    }
}

/// A volume read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Volume {
    Scalar(ScalarField),
    Labels(LabelMap),
}

impl Volume {
    pub fn grid(&self) -> &Grid {
        match self {
            Volume::Scalar(f) => f.grid(),
            Volume::Labels(l) => l.grid(),
        }
    }

    pub fn into_scalar(self) -> Result<ScalarField> {
        match self {
            Volume::Scalar(f) => Ok(f),
            Volume::Labels(_) => Err(Error::DtypeMismatch { expected: "f32", found: "u16" }),
        }
    }

    pub fn into_labels(self) -> Result<LabelMap> {
        match self {
            Volume::Labels(l) => Ok(l),
            Volume::Scalar(_) => Err(Error::DtypeMismatch { expected: "u16", found: "f32" }),
        }
    }
}

/// Payload and header paths for `path`, which may name either file or the
/// common stem.
pub fn volume_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("raw") | Some("json") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let mut raw = stem.clone().into_os_string();
    raw.push(".raw");
    let mut json = stem.into_os_string();
    json.push(".json");
    (raw.into(), json.into())
}

pub fn read_header(path: &Path) -> Result<VolumeHeader> {
    let (_, json) = volume_paths(path);
    if !json.exists() {
        return Err(Error::MissingSidecar(json));
    }
    let value: serde_json::Value = serde_json::from_slice(&fs::read(&json)?)?;
    if let Some(tag) = value.get("dtype").and_then(|d| d.as_str()) {
        if tag != "f32" && tag != "u16" {
            return Err(Error::UnknownDtype(tag.to_owned()));
        }
    }
    let header: VolumeHeader = serde_json::from_value(value)?;
    if header.order != ORDER_TAG {
        return Err(Error::Header(format!("unsupported order tag {:?}", header.order)));
    }
    if header.domain != DOMAIN_TAG {
        return Err(Error::Header(format!("unsupported domain tag {:?}", header.domain)));
    }
    Ok(header)
}

pub fn read_volume(path: &Path) -> Result<Volume> {
    let header = read_header(path)?;
    let grid = Grid::new(header.dims)?;
    let (raw, _) = volume_paths(path);
    let bytes = fs::read(&raw)?;
    if bytes.len() != header.payload_len() {
        return Err(Error::PayloadSize { expected: header.payload_len(), found: bytes.len() });
    }
    match header.dtype {
        Dtype::F32 => {
            let data = bytes
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                .collect();
            Ok(Volume::Scalar(ScalarField::from_vec(grid, data)?))
        }
        Dtype::U16 => {
            let data = bytes.chunks_exact(2).map(|b| u16::from_le_bytes([b[0], b[1]])).collect();
            Ok(Volume::Labels(LabelMap::from_vec(grid, data)?))
        }
    }
}

pub fn read_scalar(path: &Path) -> Result<ScalarField> {
    read_volume(path)?.into_scalar()
}

pub fn read_labels(path: &Path) -> Result<LabelMap> {
    read_volume(path)?.into_labels()
}

fn write_parts(path: &Path, header: &VolumeHeader, payload: &[u8]) -> Result<()> {
    let (raw, json) = volume_paths(path);
    if let Some(dir) = raw.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&raw, payload)?;
    fs::write(&json, serde_json::to_vec_pretty(header)?)?;
    Ok(())
}

pub fn write_scalar(field: &ScalarField, path: &Path) -> Result<()> {
    let header = VolumeHeader::new(field.grid(), Dtype::F32);
    let payload: Vec<u8> = field.as_slice().iter().flat_map(|v| v.to_le_bytes()).collect();
    write_parts(path, &header, &payload)
}

pub fn write_labels(labels: &LabelMap, path: &Path) -> Result<()> {
    let header = VolumeHeader::new(labels.grid(), Dtype::U16);
    let payload: Vec<u8> = labels.as_slice().iter().flat_map(|v| v.to_le_bytes()).collect();
    write_parts(path, &header, &payload)
}

pub fn write_volume(volume: &Volume, path: &Path) -> Result<()> {
    match volume {
        Volume::Scalar(f) => write_scalar(f, path),
        Volume::Labels(l) => write_labels(l, path),
    }
}

impl std::fmt::Display for Dtype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new([16, 16, 18]).unwrap()
    }

    #[test]
    fn scalar_roundtrip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let f = ScalarField::<f32>::from_fn(grid(), |x| (x[0] * 3.1).sin() * 1e-3 + x[2]);
        let p = dir.path().join("img");
        write_scalar(&f, &p).unwrap();
        let first = fs::read(dir.path().join("img.raw")).unwrap();
        let back = read_scalar(&dir.path().join("img.raw")).unwrap();
        assert_eq!(back, f);
        write_scalar(&back, &dir.path().join("again")).unwrap();
        assert_eq!(fs::read(dir.path().join("again.raw")).unwrap(), first);
    }

    #[test]
    fn label_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let l = LabelMap::from_fn(grid(), |x| (x[0] * 10.0) as u16 + 300);
        write_labels(&l, &dir.path().join("lab.json")).unwrap();
        assert_eq!(read_labels(&dir.path().join("lab")).unwrap(), l);
    }

    #[test]
    fn short_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v");
        write_scalar(&ScalarField::zeros(grid()), &p).unwrap();
        let raw = dir.path().join("v.raw");
        let mut bytes = fs::read(&raw).unwrap();
        bytes.truncate(bytes.len() - 4);
        fs::write(&raw, bytes).unwrap();
        assert!(matches!(read_volume(&p), Err(Error::PayloadSize { .. })));
    }

    #[test]
    fn u16_payload_declared_f32_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l");
        write_labels(&LabelMap::from_fn(grid(), |_| 1), &p).unwrap();
        let mut header = read_header(&p).unwrap();
        header.dtype = Dtype::F32;
        fs::write(dir.path().join("l.json"), serde_json::to_vec(&header).unwrap()).unwrap();
        assert!(matches!(read_volume(&p), Err(Error::PayloadSize { .. })));
    }

    #[test]
    fn unknown_dtype_and_missing_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x");
        assert!(matches!(read_volume(&p), Err(Error::MissingSidecar(_))));
        write_scalar(&ScalarField::zeros(grid()), &p).unwrap();
        let text = fs::read_to_string(dir.path().join("x.json")).unwrap();
        fs::write(dir.path().join("x.json"), text.replace("\"f32\"", "\"f16\"")).unwrap();
        assert!(matches!(read_volume(&p), Err(Error::UnknownDtype(t)) if t == "f16"));
    }

    #[test]
    fn header_is_plain_json() {
        let h = VolumeHeader::new(&grid(), Dtype::U16);
        let v: serde_json::Value = serde_json::to_value(&h).unwrap();
        assert_eq!(v["dims"], serde_json::json!([16, 16, 18]));
        assert_eq!(v["dtype"], "u16");
        assert_eq!(v["order"], "x3-fastest");
        assert_eq!(v["domain"], "2pi");
    }
}
