//! Discovered pairs in the ZeroSpeech class-file layout. Each pair becomes one
//! class block:
//!
//! ```text
//! Class <n> <score>
//! <utterance_id> <start> <end>
//! <utterance_id> <start> <end>
//!
//! ```
//!
//! Times are written with four decimals. The alignment score follows the class
//! number; the challenge readers only look at the second token of the line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A time interval within one utterance, in recording coordinates (seconds).
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub utterance_id: String,
    pub start: f64,
    pub end: f64,
}

impl Fragment {
    pub fn new(utterance_id: impl Into<String>, start: f64, end: f64) -> Self {
        Self { utterance_id: utterance_id.into(), start, end }
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Two matching fragments and the alignment score that linked them.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    pub a: Fragment,
    pub b: Fragment,
    pub score: i32,
}

impl MatchPair {
    pub fn fragments(&self) -> [&Fragment; 2] {
        [&self.a, &self.b]
    }
}

pub fn format_pairs(pairs: &[MatchPair]) -> String {
    let mut out = String::new();
    for (n, pair) in pairs.iter().enumerate() {
        let _ = writeln!(out, "Class {n} {}", pair.score);
        for f in pair.fragments() {
            let _ = writeln!(out, "{} {:.4} {:.4}", f.utterance_id, f.start, f.end);
        }
        out.push('\n');
    }
    out
}

pub fn parse_pairs(text: &str) -> Result<Vec<MatchPair>> {
    let mut pairs = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((lineno, line)) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let ctx = |n: usize| format!("class file line {}", n + 1);
        let mut head = line.split_whitespace();
        if head.next() != Some("Class") {
            return Err(Error::format(ctx(lineno), format!("expected \"Class <n>\", found {line:?}")));
        }
        head.next()
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| Error::format(ctx(lineno), "missing class number"))?;
        let score = match head.next() {
            Some(s) => s.parse::<i32>().map_err(|_| Error::format(ctx(lineno), format!("bad score {s:?}")))?,
            None => 0,
        };

        let mut members = Vec::with_capacity(2);
        while let Some((n, member)) = lines.next_if(|(_, l)| !l.trim().is_empty()) {
            members.push(parse_fragment(member).map_err(|msg| Error::format(ctx(n), msg))?);
        }
        if members.len() != 2 {
            return Err(Error::format(ctx(lineno), format!("class has {} members, expected 2", members.len())));
        }
        let b = members.pop().unwrap();
        let a = members.pop().unwrap();
        pairs.push(MatchPair { a, b, score });
    }
    Ok(pairs)
}

fn parse_fragment(line: &str) -> std::result::Result<Fragment, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [id, start, end] = fields[..] else {
        return Err(format!("expected \"<utt> <start> <end>\", found {line:?}"));
    };
    let start: f64 = start.parse().map_err(|_| format!("bad start time {start:?}"))?;
    let end: f64 = end.parse().map_err(|_| format!("bad end time {end:?}"))?;
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(format!("fragment end {end} not after start {start}"));
    }
    Ok(Fragment::new(id, start, end))
}

pub fn write_pairs(path: impl AsRef<Path>, pairs: &[MatchPair]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_pairs(pairs)).map_err(|e| Error::io(path, e))
}

pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<MatchPair>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(&text)
}
