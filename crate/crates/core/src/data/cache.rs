use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::standardize::{Standardizer, STANDARDIZER_EPS};
use crate::binfmt::{BinReader, BinWriter};
use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

/// Kind tag that marks a standardized-data cache rather than a checkpoint.
pub const CACHE_KIND_TAG: u32 = 0xCA;

/// SHA-256 over git's blob framing: `"blob <len>\0" ++ bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

pub fn cache_path(dir: &Path, hash: &str) -> PathBuf {
    dir.join(format!("{hash}.tsab"))
}

/// Standardized `T x C` matrix and the statistics that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedData {
    pub hash: String,
    pub standardized: Tensor2,
    pub standardizer: Standardizer,
}

pub fn write_cache(path: &Path, data: &CachedData) -> Result<()> {
    let mut w = BinWriter::new(BufWriter::new(File::create(path)?));
    w.header(CACHE_KIND_TAG)?;
    w.string(&data.hash)?;
    w.u32(3)?;
    w.record("standardized", &data.standardized)?;
    let c = data.standardizer.mean.len();
    w.record("mean", &Tensor2::from_vec(1, c, data.standardizer.mean.clone())?)?;
    w.record("std", &Tensor2::from_vec(1, c, data.standardizer.std.clone())?)?;
    w.finish()?;
    Ok(())
}

/// Returns `None` when the file is missing or belongs to other content.
pub fn read_cache(path: &Path, expected_hash: &str) -> Result<Option<CachedData>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut r = BinReader::new(BufReader::new(file));
    if r.header()? != CACHE_KIND_TAG {
        return Err(Error::Checkpoint(format!("{} is not a data cache", path.display())));
    }
    let hash = r.string()?;
    if hash != expected_hash {
        return Ok(None);
    }
    let count = r.u32()?;
    let mut standardized = None;
    let mut mean = None;
    let mut std = None;
    for _ in 0..count {
        let (name, t) = r.record()?;
        match name.as_str() {
            "standardized" => standardized = Some(t),
            "mean" => mean = Some(t.into_vec()),
            "std" => std = Some(t.into_vec()),
            other => return Err(Error::Checkpoint(format!("unexpected cache record {other}"))),
        }
    }
    match (standardized, mean, std) {
        (Some(standardized), Some(mean), Some(std)) => Ok(Some(CachedData {
            hash,
            standardized,
            standardizer: Standardizer {
                mean,
                std,
                eps: STANDARDIZER_EPS,
            },
        })),
        _ => Err(Error::Checkpoint("incomplete data cache".into())),
    }
}
