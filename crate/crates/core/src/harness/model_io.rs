//! Model files: one header line `sia-model v1 sha256=<hex>` followed by the
//! JSON body the checksum covers.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::delaunay::DelaunayModel;
use crate::error::{Error, Result};
use crate::sorter::SorterModel;

pub const FORMAT_VERSION: &str = "v1";
const MAGIC: &str = "sia-model";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "problem", content = "model", rename_all = "lowercase")]
pub enum TrainedModel {
    Sort(SorterModel),
    Delaunay(DelaunayModel),
}

impl TrainedModel {
    pub fn n(&self) -> usize {
        match self {
            TrainedModel::Sort(m) => m.n(),
            TrainedModel::Delaunay(m) => m.n(),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn to_bytes(model: &TrainedModel) -> Result<Vec<u8>> {
    let body = serde_json::to_string(model)?;
    let mut out = format!("{MAGIC} {FORMAT_VERSION} sha256={}\n", sha256_hex(body.as_bytes()));
    out.push_str(&body);
    Ok(out.into_bytes())
}

pub fn from_bytes(bytes: &[u8]) -> Result<TrainedModel> {
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..split])
        .map_err(|_| Error::Format("header is not UTF-8".into()))?;
    let body = &bytes[split + 1..];
    let parts: Vec<&str> = header.split(' ').collect();
    let [magic, version, sum] = parts[..] else {
        return Err(Error::Format(format!("malformed header '{header}'")));
    };
    if magic != MAGIC {
        return Err(Error::Format(format!("not a model file (header '{header}')")));
    }
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported model version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let expected = sum
        .strip_prefix("sha256=")
        .ok_or_else(|| Error::Format(format!("malformed checksum field '{sum}'")))?;
    let found = sha256_hex(body);
    if found != expected {
        return Err(Error::Checksum {
            expected: expected.to_string(),
            found,
        });
    }
    Ok(serde_json::from_slice(body)?)
}

pub fn save(path: &Path, model: &TrainedModel) -> Result<()> {
    std::fs::write(path, to_bytes(model)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<TrainedModel> {
    from_bytes(&std::fs::read(path)?)
}
