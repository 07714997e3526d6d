//! All-pairs matching over an encoded corpus.
//!
//! Every unordered pair of distinct utterances `(i, j)`, `i < j` in corpus
//! order, is aligned exactly with `x = utterance i`. Unit-level matches are
//! mapped to recording time and filtered by duration. Pairs are processed in
//! parallel with one [`Aligner`] per worker; results are merged in pair order
//! and then sorted, so the output does not depend on the worker count.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::aligner::{Aligner, LocalMatch, ScoringScheme};
use crate::error::{Error, Result};
use crate::io::{Fragment, MatchPair};
use crate::segmenter::EncodedUtterance;

pub const DEFAULT_TAU: i32 = 8;
pub const DEFAULT_MIN_DURATION: f64 = 0.2;
pub const TAU_SWEEP: std::ops::RangeInclusive<i32> = 6..=12;

/// Slack on the duration filter so that, e.g., ten 20 ms frames pass a 200 ms
/// minimum despite rounding.
const DURATION_SLACK: f64 = 1e-9;

/// Which fragments must reach the minimum duration for a match to be kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DurationRule {
    /// Drop the match if either fragment is too short.
    #[default]
    Both,
    /// Keep the match if at least one fragment is long enough.
    Either,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryConfig {
    pub tau: i32,
    /// Minimum fragment duration in seconds.
    pub min_duration: f64,
    pub scheme: ScoringScheme,
    /// Also search each utterance against itself (above the main diagonal).
    pub include_self_pairs: bool,
    pub duration_rule: DurationRule,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            min_duration: DEFAULT_MIN_DURATION,
            scheme: ScoringScheme::default(),
            include_self_pairs: false,
            duration_rule: DurationRule::Both,
            workers: 0,
        }
    }
}

impl DiscoveryConfig {
    pub fn with_tau(tau: i32) -> Self {
        Self { tau, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau < 1 {
            return Err(Error::InvalidArgument(format!("tau must be at least 1, got {}", self.tau)));
        }
        if !(self.min_duration >= 0.0 && self.min_duration.is_finite()) {
            return Err(Error::InvalidArgument(format!("min duration must be non-negative, got {}", self.min_duration)));
        }
        Ok(())
    }

    fn keeps(&self, a: &Fragment, b: &Fragment) -> bool {
        let long = |f: &Fragment| f.duration() >= self.min_duration - DURATION_SLACK;
        match self.duration_rule {
            DurationRule::Both => long(a) && long(b),
            DurationRule::Either => long(a) || long(b),
        }
    }
}

/// Matches between corpus utterances `x` and `y`, in extraction order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAlignment {
    pub x: usize,
    pub y: usize,
    pub matches: Vec<LocalMatch>,
}

/// Maps unit spans of a match onto recording-relative time intervals.
/// Units skipped by gaps inside the span are part of the interval.
pub fn match_to_times(
    m: &LocalMatch,
    enc_x: &EncodedUtterance,
    enc_y: &EncodedUtterance,
) -> Result<(Fragment, Fragment)> {
    Ok((span_to_fragment(m.x_span, enc_x)?, span_to_fragment(m.y_span, enc_y)?))
}

fn span_to_fragment((first, last): (usize, usize), enc: &EncodedUtterance) -> Result<Fragment> {
    if first > last || last >= enc.segments.len() {
        return Err(Error::InvalidArgument(format!(
            "unit span {first}..={last} outside {} segments",
            enc.segments.len()
        ))
        .in_utterance(&enc.utterance_id));
    }
    Ok(Fragment::new(enc.utterance_id.clone(), enc.segment_start_time(first), enc.segment_end_time(last)))
}

fn pair_indices(n: usize, include_self: bool) -> impl ParallelIterator<Item = (usize, usize)> {
    (0..n).into_par_iter().flat_map_iter(move |i| {
        let first = if include_self { i } else { i + 1 };
        (first..n).map(move |j| (i, j))
    })
}

fn run_in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

/// Aligns every pair and returns the pairs that produced at least one match
/// scoring `config.tau` or more, ordered by `(x, y)`.
pub fn align_all_pairs(corpus: &[EncodedUtterance], config: &DiscoveryConfig) -> Result<Vec<PairAlignment>> {
    config.validate()?;
    let units: Vec<Vec<u32>> = corpus.iter().map(EncodedUtterance::units).collect();
    let n = corpus.len();
    let total = if config.include_self_pairs { n * (n + 1) / 2 } else { n * n.saturating_sub(1) / 2 };
    let done = AtomicUsize::new(0);
    let step = (total / 20).max(1);

    run_in_pool(config.workers, || {
        pair_indices(n, config.include_self_pairs)
            .map_init(Aligner::new, |aligner, (i, j)| {
                let (x, y) = (&units[i], &units[j]);
                let matches = if i == j {
                    // Within-utterance search: only cells right of the diagonal.
                    aligner.load_with_pins(x, y, &config.scheme, |r, c| c <= r);
                    aligner.drain(x, y, &config.scheme, config.tau)
                } else {
                    aligner.find_matches(x, y, &config.scheme, config.tau)
                };
                let finished = done.fetch_add(1, AtomicOrdering::Relaxed) + 1;
                if finished.is_multiple_of(step) {
                    log::info!("aligned {finished}/{total} utterance pairs");
                }
                PairAlignment { x: i, y: j, matches }
            })
            .filter(|p| !p.matches.is_empty())
            .collect()
    })
}

/// Converts per-pair matches scoring at least `tau` into filtered, sorted
/// fragment pairs.
pub fn pairs_from_alignments(
    corpus: &[EncodedUtterance],
    alignments: &[PairAlignment],
    tau: i32,
    config: &DiscoveryConfig,
) -> Result<Vec<MatchPair>> {
    let mut out = Vec::new();
    for pa in alignments {
        let (ex, ey) = (&corpus[pa.x], &corpus[pa.y]);
        // scores are non-increasing, so this is a prefix
        for m in pa.matches.iter().take_while(|m| m.score >= tau) {
            let (a, b) = match_to_times(m, ex, ey)?;
            if config.keeps(&a, &b) {
                out.push(MatchPair { a, b, score: m.score });
            }
        }
    }
    sort_pairs(&mut out);
    Ok(out)
}

pub fn discover(corpus: &[EncodedUtterance], config: &DiscoveryConfig) -> Result<Vec<MatchPair>> {
    let alignments = align_all_pairs(corpus, config)?;
    pairs_from_alignments(corpus, &alignments, config.tau, config)
}

/// Discovers at every threshold in `taus` from a single alignment pass at the
/// lowest threshold.
pub fn discover_sweep(
    corpus: &[EncodedUtterance],
    taus: &[i32],
    config: &DiscoveryConfig,
) -> Result<Vec<(i32, Vec<MatchPair>)>> {
    let Some(&lowest) = taus.iter().min() else {
        return Ok(Vec::new());
    };
    let alignments = align_all_pairs(corpus, &DiscoveryConfig { tau: lowest, ..config.clone() })?;
    taus.iter()
        .map(|&tau| Ok((tau, pairs_from_alignments(corpus, &alignments, tau, config)?)))
        .collect()
}

fn cmp_fragment(a: &Fragment, b: &Fragment) -> Ordering {
    a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end))
}

/// Orders pairs by `(utterance a, utterance b, start a, start b)`.
pub fn sort_pairs(pairs: &mut [MatchPair]) {
    pairs.sort_by(|p, q| {
        p.a.utterance_id
            .cmp(&q.a.utterance_id)
            .then_with(|| p.b.utterance_id.cmp(&q.b.utterance_id))
            .then_with(|| p.a.start.total_cmp(&q.a.start))
            .then_with(|| p.b.start.total_cmp(&q.b.start))
            .then_with(|| cmp_fragment(&p.a, &q.a))
            .then_with(|| cmp_fragment(&p.b, &q.b))
            .then_with(|| q.score.cmp(&p.score))
    });
}
