//! CSV tables used by evaluation: speech-activity intervals and time-aligned
//! phone labels. Both carry a header row (`utterance_id,start,end[,phone]`)
//! with times in seconds, relative to the recording.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VadEntry {
    pub utterance_id: String,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhoneEntry {
    pub utterance_id: String,
    pub start: f64,
    pub end: f64,
    pub phone: String,
}

/// Speech-activity intervals, grouped by recording.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VadTable {
    by_recording: BTreeMap<String, Vec<(f64, f64)>>,
    entries: Vec<VadEntry>,
}

impl VadTable {
    pub fn new(entries: Vec<VadEntry>) -> Result<Self> {
        let mut by_recording: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for e in &entries {
            check_interval("VAD", &e.utterance_id, e.start, e.end)?;
            by_recording.entry(e.utterance_id.clone()).or_default().push((e.start, e.end));
        }
        for (id, intervals) in by_recording.iter_mut() {
            intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some(w) = intervals.windows(2).find(|w| w[1].0 < w[0].1) {
                return Err(Error::format(
                    format!("VAD entries for {id:?}"),
                    format!("intervals [{}, {}] and [{}, {}] overlap", w[0].0, w[0].1, w[1].0, w[1].1),
                ));
            }
        }
        Ok(Self { by_recording, entries })
    }

    pub fn entries(&self) -> &[VadEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorted, non-overlapping intervals for one recording.
    pub fn intervals(&self, recording: &str) -> Option<&[(f64, f64)]> {
        self.by_recording.get(recording).map(Vec::as_slice)
    }

    pub fn recordings(&self) -> impl Iterator<Item = &str> {
        self.by_recording.keys().map(String::as_str)
    }

    pub fn total_duration(&self) -> f64 {
        self.by_recording.values().flatten().map(|(s, e)| e - s).sum()
    }
}

/// One phone interval of an alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneInterval {
    pub start: f64,
    pub end: f64,
    pub phone: String,
}

/// Time-aligned phone transcriptions, indexed by recording.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhoneAlignment {
    by_recording: BTreeMap<String, Vec<PhoneInterval>>,
}

impl PhoneAlignment {
    pub fn new(entries: Vec<PhoneEntry>) -> Result<Self> {
        let mut by_recording: BTreeMap<String, Vec<PhoneInterval>> = BTreeMap::new();
        for e in entries {
            check_interval("phone alignment", &e.utterance_id, e.start, e.end)?;
            let list = by_recording.entry(e.utterance_id).or_default();
            if let Some(prev) = list.last() {
                if e.start < prev.start {
                    return Err(Error::format(
                        "phone alignment",
                        format!("entries not sorted by start time at {} ({})", e.start, e.phone),
                    ));
                }
            }
            list.push(PhoneInterval { start: e.start, end: e.end, phone: e.phone });
        }
        Ok(Self { by_recording })
    }

    pub fn phones(&self, recording: &str) -> Option<&[PhoneInterval]> {
        self.by_recording.get(recording).map(Vec::as_slice)
    }

    pub fn contains(&self, recording: &str) -> bool {
        self.by_recording.contains_key(recording)
    }

    pub fn entries(&self) -> impl Iterator<Item = PhoneEntry> + '_ {
        self.by_recording.iter().flat_map(|(id, list)| {
            list.iter().map(move |p| PhoneEntry {
                utterance_id: id.clone(),
                start: p.start,
                end: p.end,
                phone: p.phone.clone(),
            })
        })
    }
}

fn check_interval(table: &str, id: &str, start: f64, end: f64) -> Result<()> {
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(Error::format(table, format!("entry for {id:?} has end {end} not after start {start}")));
    }
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path, expected: &[&str]) -> Result<Vec<T>> {
    let ctx = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(&ctx, e))?;
    let headers = reader.headers().map_err(|e| csv_error(&ctx, e))?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::format(ctx, format!("expected header {:?}, found {:?}", expected.join(","), headers)));
    }
    reader.deserialize().map(|row| row.map_err(|e| csv_error(&ctx, e))).collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let ctx = path.display().to_string();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(&ctx, e))?;
    for row in rows {
        writer.serialize(row).map_err(|e| csv_error(&ctx, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(ctx: &str, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(ctx, e),
        other => Error::format(ctx, format!("{other:?}")),
    }
}

pub fn read_vad(path: impl AsRef<Path>) -> Result<VadTable> {
    VadTable::new(read_csv(path.as_ref(), &["utterance_id", "start", "end"])?)
}

pub fn write_vad(path: impl AsRef<Path>, vad: &VadTable) -> Result<()> {
    write_csv(path.as_ref(), vad.entries())
}

pub fn read_phone_alignment(path: impl AsRef<Path>) -> Result<PhoneAlignment> {
    PhoneAlignment::new(read_csv(path.as_ref(), &["utterance_id", "start", "end", "phone"])?)
}

pub fn write_phone_alignment(path: impl AsRef<Path>, alignment: &PhoneAlignment) -> Result<()> {
    write_csv(path.as_ref(), alignment.entries())
}
