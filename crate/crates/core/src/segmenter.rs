//! Duration-penalized segmentation of frames into units.
//!
//! Frames are partitioned into contiguous segments `(a, b, i)` (inclusive
//! spans) minimizing
//!
//! ```text
//! E = sum_n [ sum_{t=a_n}^{b_n} |z_t - e_{i_n}| - gamma * (b_n - a_n) ]
//! ```
//!
//! with unsquared Euclidean norms. Because the spans tile `[0, T-1]`,
//! `sum_n (b_n - a_n) = T - N`, so the duration term is the constant
//! `-gamma * T` plus `+gamma` per segment. The DP uses that per-segment form;
//! reported costs are always evaluated as `E` itself.
//!
//! Equal-cost segmentations are resolved towards fewer segments, then towards
//! lexicographically earliest segment starts.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::{FeatureSequence, FrameMatrix};
use crate::quantizer::{squared_distance, Codebook};

pub const DEFAULT_GAMMA: f64 = 0.2;

/// Relative slack under which two DP costs count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

/// Inclusive frame span `[start, end]` represented by `unit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub unit: u32,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// An utterance as a sequence of unit segments, with the timing needed to map
/// frames back to recording time.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedUtterance {
    pub utterance_id: String,
    pub segments: Vec<Segment>,
    pub frame_period: f64,
    pub offset: f64,
}

impl EncodedUtterance {
    pub fn units(&self) -> Vec<u32> {
        self.segments.iter().map(|s| s.unit).collect()
    }

    pub fn num_frames(&self) -> usize {
        self.segments.last().map_or(0, |s| s.end + 1)
    }

    /// Recording-relative time of the first frame of segment `n`.
    pub fn segment_start_time(&self, n: usize) -> f64 {
        self.offset + self.segments[n].start as f64 * self.frame_period
    }

    /// Recording-relative time just after the last frame of segment `n`.
    pub fn segment_end_time(&self, n: usize) -> f64 {
        self.offset + (self.segments[n].end + 1) as f64 * self.frame_period
    }

    /// Checks the tiling invariant, and optionally that neighbours differ.
    pub fn validate(&self, require_distinct_neighbours: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg).in_utterance(&self.utterance_id));
        if !(self.frame_period.is_finite() && self.frame_period > 0.0) {
            return bad(format!("frame period {} is not positive", self.frame_period));
        }
        let mut next = 0;
        for (n, seg) in self.segments.iter().enumerate() {
            if seg.start != next {
                return bad(format!("segment {n} starts at frame {} instead of {next}", seg.start));
            }
            if seg.end < seg.start {
                return bad(format!("segment {n} ends before it starts"));
            }
            if require_distinct_neighbours && n > 0 && self.segments[n - 1].unit == seg.unit {
                return bad(format!("segments {} and {n} share unit {}", n - 1, seg.unit));
            }
            next = seg.end + 1;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentConfig {
    pub gamma: f64,
    /// Longest allowed segment in frames; `None` searches all spans.
    pub max_segment_len: Option<usize>,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self { gamma: DEFAULT_GAMMA, max_segment_len: None }
    }
}

impl SegmentConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        Self { gamma, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub segments: Vec<Segment>,
    /// The objective value of `segments`.
    pub cost: f64,
}

/// Per-frame unsquared distances to every centroid, row-major T×K.
fn distance_table(frames: &FrameMatrix, codebook: &Codebook) -> Vec<f64> {
    let k = codebook.k();
    let mut table = Vec::with_capacity(frames.rows() * k);
    for z in frames.iter_rows() {
        table.extend(codebook.centroids().iter_rows().map(|e| squared_distance(z, e).sqrt()));
    }
    table
}

/// Evaluates the segmentation objective for a given tiling, summing
/// frame-to-centroid distances in frame order.
pub fn objective(frames: &FrameMatrix, codebook: &Codebook, segments: &[Segment], gamma: f64) -> Result<f64> {
    codebook.check_dim(frames.dim())?;
    let mut total = 0.0;
    let mut covered = 0;
    for seg in segments {
        if seg.start != covered || seg.end < seg.start || seg.end >= frames.rows() {
            return Err(Error::InvalidArgument("segments do not tile the frames".into()));
        }
        if seg.unit as usize >= codebook.k() {
            return Err(Error::InvalidArgument(format!("unit {} outside codebook", seg.unit)));
        }
        let e = codebook.centroid(seg.unit as usize);
        for t in seg.start..=seg.end {
            total += squared_distance(frames.row(t), e).sqrt();
        }
        covered = seg.end + 1;
    }
    if covered != frames.rows() {
        return Err(Error::InvalidArgument("segments do not tile the frames".into()));
    }
    let length_reward = (frames.rows() - segments.len()) as f64;
    Ok(total - gamma * length_reward)
}

#[derive(Clone, Copy)]
struct Cell {
    cost: f64,
    segments: usize,
    /// Start frame of the last segment of this prefix.
    start: usize,
    unit: u32,
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

/// Segment starts of the prefix of length `len`, in order.
fn starts_of(cells: &[Cell], mut len: usize) -> Vec<usize> {
    let mut starts = Vec::new();
    while len > 0 {
        let s = cells[len].start;
        starts.push(s);
        len = s;
    }
    starts.reverse();
    starts
}

pub fn segment(frames: &FrameMatrix, codebook: &Codebook, config: &SegmentConfig) -> Result<Segmentation> {
    let t_len = frames.rows();
    if t_len == 0 {
        return Err(Error::InvalidArgument("cannot segment an utterance with no frames".into()));
    }
    if !(config.gamma >= 0.0 && config.gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be non-negative, got {}", config.gamma)));
    }
    if config.max_segment_len == Some(0) {
        return Err(Error::InvalidArgument("max segment length must be at least 1".into()));
    }
    codebook.check_dim(frames.dim())?;

    let k = codebook.k();
    let dist = distance_table(frames, codebook);
    let cap = config.max_segment_len.unwrap_or(t_len);

    // cells[j] describes the best segmentation of frames 0..j.
    let mut cells = vec![Cell { cost: 0.0, segments: 0, start: 0, unit: 0 }; t_len + 1];
    let mut acc = vec![0.0f64; k];
    for end in 0..t_len {
        acc.iter_mut().for_each(|v| *v = 0.0);
        let lowest_start = (end + 1).saturating_sub(cap);
        let mut best: Option<Cell> = None;
        for start in (lowest_start..=end).rev() {
            for (a, d) in acc.iter_mut().zip(&dist[start * k..(start + 1) * k]) {
                *a += d;
            }
            let (unit, span) = acc
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
            let prev = cells[start];
            let cand = Cell {
                cost: prev.cost + span + config.gamma,
                segments: prev.segments + 1,
                start,
                unit: unit as u32,
            };
            best = Some(match best {
                None => cand,
                Some(cur) => {
                    if !ties(cand.cost, cur.cost) {
                        if cand.cost < cur.cost {
                            cand
                        } else {
                            cur
                        }
                    } else if cand.segments != cur.segments {
                        if cand.segments < cur.segments {
                            cand
                        } else {
                            cur
                        }
                    } else {
                        let mut a = starts_of(&cells, cand.start);
                        a.push(cand.start);
                        let mut b = starts_of(&cells, cur.start);
                        b.push(cur.start);
                        if a < b {
                            cand
                        } else {
                            cur
                        }
                    }
                }
            });
        }
        cells[end + 1] = best.expect("at least one span ends at every frame");
    }

    let mut segments = Vec::with_capacity(cells[t_len].segments);
    let mut len = t_len;
    while len > 0 {
        let c = cells[len];
        segments.push(Segment { start: c.start, end: len - 1, unit: c.unit });
        len = c.start;
    }
    segments.reverse();

    let cost = objective(frames, codebook, &segments, config.gamma)?;
    Ok(Segmentation { segments, cost })
}

/// Shortest decimal that round-trips the `f32`, so 0.02f32 becomes 0.02.
fn widen_seconds(x: f32) -> f64 {
    x.to_string().parse().unwrap_or(f64::from(x))
}

pub fn encode_utterance(features: &FeatureSequence, codebook: &Codebook, config: &SegmentConfig) -> Result<EncodedUtterance> {
    let seg = segment(&features.frames, codebook, config).map_err(|e| e.in_utterance(&features.utterance_id))?;
    Ok(EncodedUtterance {
        utterance_id: features.utterance_id.clone(),
        segments: seg.segments,
        frame_period: widen_seconds(features.frame_period),
        offset: widen_seconds(features.offset),
    })
}

/// Segments every utterance; output order follows input order.
pub fn encode_corpus(
    features: &[FeatureSequence],
    codebook: &Codebook,
    config: &SegmentConfig,
) -> Result<Vec<EncodedUtterance>> {
    features.par_iter().map(|f| encode_utterance(f, codebook, config)).collect()
}
