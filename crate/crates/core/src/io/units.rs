//! Text unit files: one record per utterance,
//!
//! ```text
//! <utterance_id>\t<unit>:<a>:<b> <unit>:<a>:<b> ...\toffset=<s> period=<s>
//! ```
//!
//! Spans are inclusive frame indices. The trailing timing column is optional
//! on read (offset 0, period 0.02 s) and always written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::segmenter::{EncodedUtterance, Segment};

const DEFAULT_PERIOD: f64 = 0.02;

pub fn format_units(utterances: &[EncodedUtterance]) -> String {
    let mut out = String::new();
    for utt in utterances {
        out.push_str(&utt.utterance_id);
        out.push('\t');
        for (n, seg) in utt.segments.iter().enumerate() {
            if n > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}:{}:{}", seg.unit, seg.start, seg.end);
        }
        let _ = writeln!(out, "\toffset={} period={}", utt.offset, utt.frame_period);
    }
    out
}

pub fn parse_units(text: &str) -> Result<Vec<EncodedUtterance>> {
    let mut utterances = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ctx = || format!("unit file line {}", lineno + 1);
        let mut cols = line.split('\t');
        let utterance_id = cols.next().unwrap_or_default();
        if utterance_id.is_empty() {
            return Err(Error::format(ctx(), "missing utterance id"));
        }
        let seg_col = cols.next().ok_or_else(|| Error::format(ctx(), "missing segment column"))?;
        let (mut offset, mut frame_period) = (0.0, DEFAULT_PERIOD);
        if let Some(timing) = cols.next() {
            for field in timing.split_whitespace() {
                let (key, value) =
                    field.split_once('=').ok_or_else(|| Error::format(ctx(), format!("bad timing field {field:?}")))?;
                let value: f64 = value.parse().map_err(|_| Error::format(ctx(), format!("bad number in {field:?}")))?;
                match key {
                    "offset" => offset = value,
                    "period" => frame_period = value,
                    _ => return Err(Error::format(ctx(), format!("unknown timing key {key:?}"))),
                }
            }
        }
        if cols.next().is_some() {
            return Err(Error::format(ctx(), "too many columns"));
        }

        let mut segments = Vec::new();
        for token in seg_col.split_whitespace() {
            let mut parts = token.split(':');
            let mut field = || -> Result<&str> {
                parts.next().ok_or_else(|| Error::format(ctx(), format!("bad segment {token:?}")))
            };
            let unit = field()?.parse::<u32>();
            let start = field()?.parse::<usize>();
            let end = field()?.parse::<usize>();
            if parts.next().is_some() {
                return Err(Error::format(ctx(), format!("bad segment {token:?}")));
            }
            match (unit, start, end) {
                (Ok(unit), Ok(start), Ok(end)) => segments.push(Segment { start, end, unit }),
                _ => return Err(Error::format(ctx(), format!("bad segment {token:?}"))),
            }
        }

        let utt = EncodedUtterance { utterance_id: utterance_id.to_owned(), segments, frame_period, offset };
        utt.validate(false).map_err(|e| Error::format(ctx(), e.to_string()))?;
        utterances.push(utt);
    }
    Ok(utterances)
}

pub fn write_units(path: impl AsRef<Path>, utterances: &[EncodedUtterance]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_units(utterances)).map_err(|e| Error::io(path, e))
}

pub fn read_units(path: impl AsRef<Path>) -> Result<Vec<EncodedUtterance>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_units(&text)
}
