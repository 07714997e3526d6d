//! "DSTF" binary feature archives.
//!
//! Layout: the 4 magic bytes `DSTF`, followed by zero or more records until end
//! of file. Each record is
//!
//! ```text
//! u16  id length (bytes)
//! [u8] UTF-8 utterance id
//! u32  T (frames)
//! u32  D (dimensions)
//! f32  frame period, seconds
//! f32  offset of frame 0 within the recording, seconds
//! T*D  f32 values, row-major
//! ```
//!
//! All integers and floats are little-endian.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const FEATURE_MAGIC: &[u8; 4] = b"DSTF";
pub const DEFAULT_FRAME_PERIOD: f32 = 0.02;

/// Row-major T×D matrix of `f32` frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    data: Vec<f32>,
    dim: usize,
}

impl FrameMatrix {
    pub fn new(data: Vec<f32>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dimension must be at least 1".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} values do not form rows of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { data, dim })
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(1);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(data, dim)
    }

    pub fn zeros(rows: usize, dim: usize) -> Result<Self> {
        Self::new(vec![0.0; rows * dim], dim)
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }
}

/// One utterance's features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    pub utterance_id: String,
    pub frames: FrameMatrix,
    /// Seconds per frame.
    pub frame_period: f32,
    /// Start time of frame 0 within the source recording, in seconds.
    pub offset: f32,
}

impl FeatureSequence {
    pub fn new(utterance_id: impl Into<String>, frames: FrameMatrix) -> Self {
        Self { utterance_id: utterance_id.into(), frames, frame_period: DEFAULT_FRAME_PERIOD, offset: 0.0 }
    }

    pub fn with_timing(mut self, frame_period: f32, offset: f32) -> Self {
        self.frame_period = frame_period;
        self.offset = offset;
        self
    }

    pub fn num_frames(&self) -> usize {
        self.frames.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = || format!("utterance {:?}", self.utterance_id);
        if self.utterance_id.len() > u16::MAX as usize {
            return Err(Error::format(ctx(), "utterance id longer than 65535 bytes"));
        }
        if !(self.frame_period.is_finite() && self.frame_period > 0.0) {
            return Err(Error::format(ctx(), format!("frame period {} is not positive", self.frame_period)));
        }
        if !self.offset.is_finite() {
            return Err(Error::format(ctx(), "offset is not finite"));
        }
        if let Some(pos) = self.frames.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::format(
                ctx(),
                format!("non-finite value at frame {}, dim {}", pos / self.frames.dim(), pos % self.frames.dim()),
            ));
        }
        Ok(())
    }
}

pub fn write_feature_archive(path: impl AsRef<Path>, sequences: &[FeatureSequence]) -> Result<()> {
    let path = path.as_ref();
    for seq in sequences {
        seq.validate()?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    encode_feature_archive(&mut out, sequences).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn encode_feature_archive<W: Write>(out: &mut W, sequences: &[FeatureSequence]) -> std::io::Result<()> {
    out.write_all(FEATURE_MAGIC)?;
    for seq in sequences {
        let id = seq.utterance_id.as_bytes();
        out.write_all(&(id.len() as u16).to_le_bytes())?;
        out.write_all(id)?;
        out.write_all(&(seq.frames.rows() as u32).to_le_bytes())?;
        out.write_all(&(seq.frames.dim() as u32).to_le_bytes())?;
        out.write_all(&seq.frame_period.to_le_bytes())?;
        out.write_all(&seq.offset.to_le_bytes())?;
        for v in seq.frames.as_slice() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_feature_archive(path: impl AsRef<Path>) -> Result<Vec<FeatureSequence>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_feature_archive(&bytes).map_err(|e| match e {
        Error::Format { context, message } => Error::format(format!("{}: {context}", path.display()), message),
        other => other,
    })
}

pub fn decode_feature_archive(bytes: &[u8]) -> Result<Vec<FeatureSequence>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.take(4).map_err(|_| Error::format("archive header", "file shorter than magic"))?;
    if magic != FEATURE_MAGIC {
        return Err(Error::format("archive header", format!("bad magic {magic:?}, expected \"DSTF\"")));
    }

    let mut sequences = Vec::new();
    while !cur.at_end() {
        let record = sequences.len();
        let id_len = cur.u16().map_err(|_| truncated(&format!("record {record}"), "id length"))? as usize;
        let id_bytes = cur.take(id_len).map_err(|_| truncated(&format!("record {record}"), "utterance id"))?;
        let utterance_id = std::str::from_utf8(id_bytes)
            .map_err(|_| Error::format(format!("record {record}"), "utterance id is not valid UTF-8"))?
            .to_owned();
        let ctx = format!("utterance {utterance_id:?}");
        let rows = cur.u32().map_err(|_| truncated(&ctx, "frame count"))? as usize;
        let dim = cur.u32().map_err(|_| truncated(&ctx, "dimension"))? as usize;
        let frame_period = cur.f32().map_err(|_| truncated(&ctx, "frame period"))?;
        let offset = cur.f32().map_err(|_| truncated(&ctx, "offset"))?;
        if dim == 0 {
            return Err(Error::format(ctx, "dimension is zero"));
        }
        let n = rows
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| Error::format(&ctx, "declared shape overflows"))?;
        let payload = cur.take(n).map_err(|_| {
            let available = cur.remaining() / 4 / dim;
            Error::format(&ctx, format!("truncated payload: header declares {rows} frames, only {available} present"))
        })?;
        let data: Vec<f32> = payload.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        let seq = FeatureSequence { utterance_id, frames: FrameMatrix { data, dim }, frame_period, offset };
        seq.validate()?;
        sequences.push(seq);
    }
    Ok(sequences)
}

fn truncated(ctx: &str, field: &str) -> Error {
    Error::format(ctx, format!("truncated record while reading {field}"))
}

pub(crate) struct Cursor<'a> {
    pub(crate) bytes: &'a [u8],
    pub(crate) pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], ()> {
        if self.remaining() < n {
            return Err(());
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> std::result::Result<u16, ()> {
        self.take(2).map(|b| u16::from_le_bytes([b[0], b[1]]))
    }

    pub(crate) fn u32(&mut self) -> std::result::Result<u32, ()> {
        self.take(4).map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub(crate) fn f32(&mut self) -> std::result::Result<f32, ()> {
        self.take(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}
