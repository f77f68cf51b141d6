//! JSON sidecar header plus a raw little-endian payload.
//!
//! ```json
//! {"dims":[nx,ny,nz],"dtype":"u8"|"u16"|"f32","order":"x-fastest","endian":"little","raw":"<file>"}
//! ```
//!
//! `raw` is resolved relative to the header's directory and defaults to the
//! header's file stem with a `.raw` extension. The payload has no header bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Dims, Volume};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const ORDER: &str = "x-fastest";
pub const ENDIAN: &str = "little";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    U8,
    U16,
    F32,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::U16 => 2,
            Dtype::F32 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dtype::U8 => "u8",
            Dtype::U16 => "u16",
            Dtype::F32 => "f32",
        }
    }
}

impl std::str::FromStr for Dtype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u8" => Ok(Dtype::U8),
            "u16" => Ok(Dtype::U16),
            "f32" => Ok(Dtype::F32),
            other => Err(Error::UnknownDtype(other.to_owned())),
        }
    }
}

/// Validated header contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeHeader {
    pub dims: Dims,
    pub dtype: Dtype,
    /// Raw payload file name, relative to the header.
    pub raw: String,
}

#[derive(Serialize, Deserialize)]
struct HeaderDoc {
    dims: Vec<i64>,
    dtype: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    endian: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    raw: Option<String>,
}

fn default_raw_name(header_path: &Path) -> String {
    let stem = header_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "volume".to_owned());
    format!("{stem}.raw")
}

impl VolumeHeader {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: HeaderDoc = serde_json::from_str(&text).map_err(|source| Error::Header {
            path: path.to_owned(),
            source,
        })?;
        Self::from_doc(doc, path)
    }

    fn from_doc(doc: HeaderDoc, path: &Path) -> Result<Self> {
        if doc.dims.len() != 3 || doc.dims.iter().any(|&n| n <= 0) {
            return Err(Error::NonPositiveDims(doc.dims));
        }
        let dtype: Dtype = doc.dtype.parse()?;
        if let Some(order) = doc.order.filter(|o| o != ORDER) {
            return Err(Error::HeaderField {
                field: "order",
                value: order,
            });
        }
        if let Some(endian) = doc.endian.filter(|e| e != ENDIAN) {
            return Err(Error::HeaderField {
                field: "endian",
                value: endian,
            });
        }
        let dims = Dims::new(doc.dims[0] as usize, doc.dims[1] as usize, doc.dims[2] as usize);
        Ok(VolumeHeader {
            dims,
            dtype,
            raw: doc.raw.unwrap_or_else(|| default_raw_name(path)),
        })
    }

    fn to_doc(&self) -> HeaderDoc {
        HeaderDoc {
            dims: self.dims.as_array().iter().map(|&n| n as i64).collect(),
            dtype: self.dtype.name().to_owned(),
            order: Some(ORDER.to_owned()),
            endian: Some(ENDIAN.to_owned()),
            raw: Some(self.raw.clone()),
        }
    }

    pub fn payload_bytes(&self) -> u64 {
        (self.dims.len() * self.dtype.size()) as u64
    }

    pub fn raw_path(&self, header_path: &Path) -> PathBuf {
        header_path
            .parent()
            .unwrap_or_else(|| Path::new(""))
            .join(&self.raw)
    }
}

/// Reads a volume from its JSON header. Integer payloads are widened to
/// `f32` by exact value cast.
pub fn load_volume(header_path: impl AsRef<Path>) -> Result<Volume<f32>> {
    let header_path = header_path.as_ref();
    let header = VolumeHeader::read(header_path)?;
    let raw_path = header.raw_path(header_path);

    let bytes = match fs::read(&raw_path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingRaw { path: raw_path })
        }
        Err(e) => return Err(Error::io(raw_path, e)),
    };
    let expected = header.payload_bytes();
    let actual = bytes.len() as u64;
    if actual < expected {
        return Err(Error::RawTooShort {
            path: raw_path,
            expected,
            actual,
        });
    }
    if actual > expected {
        return Err(Error::RawTooLong {
            path: raw_path,
            expected,
            actual,
        });
    }

    let data: Vec<f32> = match header.dtype {
        Dtype::U8 => bytes.iter().map(|&b| f32::from(b)).collect(),
        Dtype::U16 => bytes
            .chunks_exact(2)
            .map(|c| f32::from(u16::from_le_bytes([c[0], c[1]])))
            .collect(),
        Dtype::F32 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect(),
    };
    Ok(Volume::new(header.dims, data)?.with_provenance(header_path.display().to_string()))
}

fn quantize(v: f32, max: f32) -> f32 {
    // f32::round rounds half away from zero
    v.clamp(0.0, max).round()
}

/// Writes `v` as `path` (header) plus a sibling `.raw` payload.
///
/// Integer outputs are clamped to the dtype range and rounded half away from
/// zero. An `f32` save followed by [`load_volume`] is bit-exact.
pub fn save_volume<T: Scalar>(v: &Volume<T>, path: impl AsRef<Path>, dtype: Dtype) -> Result<()> {
    let path = path.as_ref();
    let header = VolumeHeader {
        dims: v.dims(),
        dtype,
        raw: default_raw_name(path),
    };
    let values = v.data().iter().map(|x| x.to_f32().unwrap_or(0.0));
    let mut bytes = Vec::with_capacity(header.payload_bytes() as usize);
    match dtype {
        Dtype::U8 => bytes.extend(values.map(|x| quantize(x, 255.0) as u8)),
        Dtype::U16 => {
            for x in values {
                bytes.extend_from_slice(&(quantize(x, 65535.0) as u16).to_le_bytes());
            }
        }
        Dtype::F32 => {
            for x in values {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
        }
    }

    let json = serde_json::to_string(&header.to_doc()).expect("header serializes");
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))?;
    let raw_path = header.raw_path(path);
    fs::write(&raw_path, bytes).map_err(|e| Error::io(raw_path, e))
}
