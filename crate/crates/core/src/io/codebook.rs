//! "DSTC" binary codebook files: magic `DSTC`, u32 K, u32 D, then K·D
//! little-endian f32 centroid values, row-major.

use std::fs;
use std::path::Path;

use super::features::{Cursor, FrameMatrix};
use crate::error::{Error, Result};
use crate::quantizer::Codebook;

pub const CODEBOOK_MAGIC: &[u8; 4] = b"DSTC";

pub fn encode_codebook(codebook: &Codebook) -> Vec<u8> {
    let centroids = codebook.centroids();
    let mut out = Vec::with_capacity(12 + centroids.as_slice().len() * 4);
    out.extend_from_slice(CODEBOOK_MAGIC);
    out.extend_from_slice(&(codebook.k() as u32).to_le_bytes());
    out.extend_from_slice(&(codebook.dim() as u32).to_le_bytes());
    for v in centroids.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_codebook(bytes: &[u8]) -> Result<Codebook> {
    let ctx = "codebook";
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.take(4).map_err(|_| Error::format(ctx, "file shorter than magic"))?;
    if magic != CODEBOOK_MAGIC {
        return Err(Error::format(ctx, format!("bad magic {magic:?}, expected \"DSTC\"")));
    }
    let k = cur.u32().map_err(|_| Error::format(ctx, "truncated header"))? as usize;
    let dim = cur.u32().map_err(|_| Error::format(ctx, "truncated header"))? as usize;
    if k == 0 || dim == 0 {
        return Err(Error::format(ctx, format!("degenerate shape {k}x{dim}")));
    }
    let mut data = Vec::with_capacity(k * dim);
    for _ in 0..k * dim {
        let v = cur.f32().map_err(|_| Error::format(ctx, format!("truncated payload for {k}x{dim} centroids")))?;
        if !v.is_finite() {
            return Err(Error::format(ctx, "non-finite centroid value"));
        }
        data.push(v);
    }
    if !cur.at_end() {
        return Err(Error::format(ctx, format!("{} trailing bytes", cur.remaining())));
    }
    Codebook::new(FrameMatrix::new(data, dim)?)
}

pub fn write_codebook(path: impl AsRef<Path>, codebook: &Codebook) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_codebook(codebook)).map_err(|e| Error::io(path, e))
}

pub fn read_codebook(path: impl AsRef<Path>) -> Result<Codebook> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_codebook(&bytes)
}
