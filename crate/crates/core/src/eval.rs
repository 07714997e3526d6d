//! Matching metrics (NED and coverage) and the duration / speaker reports.
//!
//! Fragment ids are resolved against a table by exact id first, then by the
//! recording id with any `_<clipindex>` suffix removed. Fragment times are
//! recording-relative.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::{recording_of, Fragment, MatchPair, PhoneAlignment, PhoneInterval, SpeakerMap, VadTable};

/// A phone is transcribed when its overlap with the fragment exceeds this many
/// seconds...
pub const MIN_OVERLAP_SECONDS: f64 = 0.03;
/// ...or exceeds this fraction of the phone's own duration.
pub const MIN_OVERLAP_FRACTION: f64 = 0.5;

/// Both thresholds are strict; overlaps within this slack of a threshold
/// count as equal to it.
const BOUNDARY_SLACK: f64 = 1e-9;

fn phones_for<'a>(alignment: &'a PhoneAlignment, utterance_id: &str) -> Result<&'a [PhoneInterval]> {
    alignment
        .phones(utterance_id)
        .or_else(|| alignment.phones(recording_of(utterance_id)))
        .ok_or_else(|| Error::UnknownUtterance(utterance_id.to_owned()))
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

/// Phones overlapping `fragment` by more than 30 ms or more than half their
/// duration, in time order.
pub fn transcribe(fragment: &Fragment, alignment: &PhoneAlignment) -> Result<Vec<String>> {
    let phones = phones_for(alignment, &fragment.utterance_id)?;
    Ok(phones
        .iter()
        .filter(|p| {
            let ov = overlap((p.start, p.end), (fragment.start, fragment.end));
            ov > MIN_OVERLAP_SECONDS + BOUNDARY_SLACK || ov > MIN_OVERLAP_FRACTION * (p.end - p.start) + BOUNDARY_SLACK
        })
        .map(|p| p.phone.clone())
        .collect())
}

/// Unit-cost edit distance.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance normalized by the longer transcription. A pair in which
/// either side is empty scores 1.
pub fn normalized_distance<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    levenshtein(a, b) as f64 / a.len().max(b.len()) as f64
}

pub fn pair_ned(pair: &MatchPair, alignment: &PhoneAlignment) -> Result<f64> {
    let ta = transcribe(&pair.a, alignment)?;
    let tb = transcribe(&pair.b, alignment)?;
    Ok(normalized_distance(&ta, &tb))
}

/// Mean normalized edit distance over all pairs.
pub fn ned(pairs: &[MatchPair], alignment: &PhoneAlignment) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::UndefinedMetric("no pairs"));
    }
    let mut total = 0.0;
    for pair in pairs {
        total += pair_ned(pair, alignment)?;
    }
    Ok(total / pairs.len() as f64)
}

/// Sorts and merges intervals into a disjoint union.
pub fn interval_union(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (s, e) in intervals {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    merged
}

/// Total length of the intersection of two sorted disjoint interval lists.
fn intersection_length(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (mut i, mut j, mut total) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        total += overlap(a[i], b[j]);
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// Fraction of VAD speech covered by the union of all fragments.
pub fn coverage(pairs: &[MatchPair], vad: &VadTable) -> Result<f64> {
    let total = vad.total_duration();
    if vad.is_empty() || total <= 0.0 {
        return Err(Error::UndefinedMetric("empty VAD table"));
    }
    let mut by_recording: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for f in pairs.iter().flat_map(MatchPair::fragments) {
        let key = if vad.intervals(&f.utterance_id).is_some() {
            f.utterance_id.as_str()
        } else {
            recording_of(&f.utterance_id)
        };
        by_recording.entry(key).or_default().push((f.start, f.end));
    }
    let covered: f64 = by_recording
        .into_iter()
        .filter_map(|(rec, frags)| vad.intervals(rec).map(|speech| intersection_length(&interval_union(frags), speech)))
        .fold(0.0, |acc, v| acc + v);
    Ok((covered / total).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DurationHistogram {
    pub bin_width: f64,
    /// `counts[k]` counts fragments with duration in `[k·w, (k+1)·w)`.
    pub counts: Vec<usize>,
    pub fragments: usize,
    pub mean: f64,
    pub max: f64,
}

impl DurationHistogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start,bin_end,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{:.4},{:.4},{c}", k as f64 * self.bin_width, (k + 1) as f64 * self.bin_width);
        }
        out
    }
}

/// Histogram of fragment durations (both fragments of every pair).
pub fn duration_report(pairs: &[MatchPair], bin_width: f64) -> Result<DurationHistogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidArgument(format!("bin width must be positive, got {bin_width}")));
    }
    let durations: Vec<f64> = pairs.iter().flat_map(MatchPair::fragments).map(Fragment::duration).collect();
    let mut counts = Vec::new();
    for &d in &durations {
        let bin = (d / bin_width + BOUNDARY_SLACK).floor().max(0.0) as usize;
        if counts.len() <= bin {
            counts.resize(bin + 1, 0);
        }
        counts[bin] += 1;
    }
    let n = durations.len();
    let mean = if n == 0 { 0.0 } else { durations.iter().sum::<f64>() / n as f64 };
    let max = durations.iter().copied().fold(0.0, f64::max);
    Ok(DurationHistogram { bin_width, counts, fragments: n, mean, max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpeakerCounts {
    pub within: usize,
    pub across: usize,
}

/// Splits pairs into same-speaker and cross-speaker matches.
pub fn speaker_report<F, S>(pairs: &[MatchPair], speaker_of: F) -> Result<SpeakerCounts>
where
    F: Fn(&str) -> Option<S>,
    S: PartialEq,
{
    let mut counts = SpeakerCounts::default();
    for pair in pairs {
        let spk = |id: &str| speaker_of(id).ok_or_else(|| Error::UnknownUtterance(id.to_owned()));
        if spk(&pair.a.utterance_id)? == spk(&pair.b.utterance_id)? {
            counts.within += 1;
        } else {
            counts.across += 1;
        }
    }
    Ok(counts)
}

/// Everything `score` prints for one pair file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub pairs: usize,
    pub coverage: f64,
    /// `None` when there are no pairs.
    pub ned: Option<f64>,
    pub speakers: SpeakerCounts,
    pub durations: DurationHistogram,
}

pub fn score_pairs(
    pairs: &[MatchPair],
    alignment: &PhoneAlignment,
    vad: &VadTable,
    speakers: &SpeakerMap,
) -> Result<ScoreReport> {
    let ned = match ned(pairs, alignment) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ScoreReport {
        pairs: pairs.len(),
        coverage: coverage(pairs, vad)?,
        ned,
        speakers: speaker_report(pairs, |id| Some(speakers.speaker_of(id).to_owned()))?,
        durations: duration_report(pairs, 0.1)?,
    })
}

impl ScoreReport {
    pub fn ned_text(&self) -> String {
        self.ned.map_or_else(|| "undefined (no pairs)".to_owned(), |v| format!("{v:.4}"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pairs            {}", self.pairs);
        let _ = writeln!(out, "coverage         {:.4}", self.coverage);
        let _ = writeln!(out, "ned              {}", self.ned_text());
        let _ = writeln!(out, "within-speaker   {}", self.speakers.within);
        let _ = writeln!(out, "across-speaker   {}", self.speakers.across);
        let _ = writeln!(out, "mean duration    {:.4}", self.durations.mean);
        let _ = writeln!(out, "max duration     {:.4}", self.durations.max);
        out
    }

    pub fn to_csv(&self) -> String {
        let ned = self.ned.map_or_else(String::new, |v| format!("{v:.6}"));
        format!(
            "pairs,coverage,ned,within_speaker,across_speaker,mean_duration,max_duration\n{},{:.6},{},{},{},{:.6},{:.6}\n",
            self.pairs, self.coverage, ned, self.speakers.within, self.speakers.across, self.durations.mean, self.durations.max
        )
    }
}
