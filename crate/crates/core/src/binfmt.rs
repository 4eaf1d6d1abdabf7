//! Little-endian record layout shared by checkpoints and data caches:
//! `"TSAB"`, version (u32), kind tag (u32), a kind-specific header, record
//! count (u32), then per record: name length (u32), UTF-8 name, rank (u32),
//! dims (u32 each), raw `f64` values.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

pub const MAGIC: &[u8; 4] = b"TSAB";
pub const FORMAT_VERSION: u32 = 1;

pub(crate) struct BinWriter<W: Write> {
    inner: W,
}

impl<W: Write> BinWriter<W> {
    pub fn new(inner: W) -> Self {
        Self { inner }
    }

    pub fn header(&mut self, kind_tag: u32) -> Result<()> {
        self.inner.write_all(MAGIC)?;
        self.u32(FORMAT_VERSION)?;
        self.u32(kind_tag)
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        Ok(self.inner.write_all(&v.to_le_bytes())?)
    }

    pub fn usize(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::Checkpoint(format!("{v} exceeds u32")))?;
        self.u32(v)
    }

    pub fn string(&mut self, s: &str) -> Result<()> {
        self.usize(s.len())?;
        Ok(self.inner.write_all(s.as_bytes())?)
    }

    pub fn record(&mut self, name: &str, t: &Tensor2) -> Result<()> {
        self.string(name)?;
        self.u32(2)?;
        self.usize(t.rows())?;
        self.usize(t.cols())?;
        let mut buf = Vec::with_capacity(t.len() * 8);
        for v in t.as_slice() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        Ok(self.inner.write_all(&buf)?)
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub(crate) struct BinReader<R: Read> {
    inner: R,
}

impl<R: Read> BinReader<R> {
    pub fn new(inner: R) -> Self {
        Self { inner }
    }

    /// Checks magic and version, returns the kind tag.
    pub fn header(&mut self) -> Result<u32> {
        let mut magic = [0u8; 4];
        self.inner
            .read_exact(&mut magic)
            .map_err(|_| Error::Checkpoint("file too short for header".into()))?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint(format!("bad magic {magic:?}")));
        }
        let version = self.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported format version {version}")));
        }
        self.u32()
    }

    pub fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.inner
            .read_exact(&mut b)
            .map_err(|e| Error::Checkpoint(format!("truncated file: {e}")))?;
        Ok(u32::from_le_bytes(b))
    }

    pub fn usize(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    pub fn string(&mut self) -> Result<String> {
        let n = self.usize()?;
        if n > 1 << 20 {
            return Err(Error::Checkpoint(format!("implausible string length {n}")));
        }
        let mut b = vec![0u8; n];
        self.inner
            .read_exact(&mut b)
            .map_err(|e| Error::Checkpoint(format!("truncated file: {e}")))?;
        String::from_utf8(b).map_err(|e| Error::Checkpoint(format!("name is not UTF-8: {e}")))
    }

    pub fn record(&mut self) -> Result<(String, Tensor2)> {
        let name = self.string()?;
        let rank = self.u32()?;
        let dims = (0..rank).map(|_| self.usize()).collect::<Result<Vec<_>>>()?;
        let (rows, cols) = match dims.as_slice() {
            [r, c] => (*r, *c),
            [n] => (1, *n),
            [] => (1, 1),
            _ => {
                return Err(Error::Checkpoint(format!(
                    "record {name} has unsupported rank {rank}"
                )))
            }
        };
        let count = rows
            .checked_mul(cols)
            .filter(|&n| n <= 1 << 31)
            .ok_or_else(|| Error::Checkpoint(format!("record {name} is too large")))?;
        let mut buf = vec![0u8; count * 8];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| Error::Checkpoint(format!("truncated record {name}: {e}")))?;
        let values = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok((name, Tensor2::from_vec(rows, cols, values)?))
    }
}
