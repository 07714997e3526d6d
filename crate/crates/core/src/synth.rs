//! Seeded synthetic corpora with planted repeated "words".
//!
//! Background units are uniform over the alphabet (no unit repeats its left
//! neighbour). Each planted word is copied into the listed utterances at
//! random non-overlapping positions; with a substitution probability, each
//! copied unit is independently replaced by a uniformly chosen different unit.
//! Every segment lasts a random number of frames. The generator records where
//! each copy landed, derives phone alignments and VAD tables from the units,
//! and can render frame-level features around per-unit prototype vectors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::io::{FeatureSequence, FrameMatrix, PhoneAlignment, PhoneEntry, VadEntry, VadTable};
use crate::segmenter::{EncodedUtterance, Segment};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedWord {
    pub units: Vec<u32>,
    /// Corpus indices receiving one copy each; repeat an index for several copies.
    pub utterances: Vec<usize>,
    /// Per-unit probability of replacing a copied unit with a different one.
    pub substitution_prob: f64,
}

impl PlantedWord {
    pub fn exact(units: Vec<u32>, utterances: Vec<usize>) -> Self {
        Self { units, utterances, substitution_prob: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_utterances: usize,
    /// Units per utterance.
    pub utterance_len: usize,
    pub alphabet_size: u32,
    /// Inclusive range of frames per unit segment.
    pub frames_per_unit: (usize, usize),
    pub frame_period: f64,
    pub n_speakers: usize,
    pub planted: Vec<PlantedWord>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_utterances: 50,
            utterance_len: 60,
            alphabet_size: 50,
            frames_per_unit: (2, 5),
            frame_period: 0.02,
            n_speakers: 5,
            planted: Vec::new(),
        }
    }
}

/// Where one planted copy ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpan {
    pub word: usize,
    pub utterance: usize,
    pub utterance_id: String,
    /// Inclusive unit (segment) indices.
    pub units: (usize, usize),
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub utterances: Vec<EncodedUtterance>,
    pub truth: Vec<PlantedSpan>,
}

/// A fixed 12-unit word over the default 50-unit alphabet.
pub const PLANTED_WORD: [u32; 12] = [3, 17, 42, 8, 25, 11, 36, 4, 29, 14, 47, 20];

/// The planted-term corpus used across the test suites and examples: 50
/// utterances of 60 units over 50 symbols, [`PLANTED_WORD`] in the first 10.
pub fn planted_word_config(seed: u64) -> SynthConfig {
    SynthConfig {
        seed,
        planted: vec![PlantedWord::exact(PLANTED_WORD.to_vec(), (0..10).collect())],
        ..SynthConfig::default()
    }
}

pub fn generate_synthetic_corpus(config: &SynthConfig) -> Result<SyntheticCorpus> {
    let alphabet = config.alphabet_size;
    if alphabet < 3 {
        return Err(Error::InvalidArgument("alphabet needs at least 3 units".into()));
    }
    let (lo, hi) = config.frames_per_unit;
    if lo == 0 || hi < lo {
        return Err(Error::InvalidArgument(format!("bad frames-per-unit range {lo}..={hi}")));
    }
    if config.frame_period.is_nan() || config.frame_period <= 0.0 || config.n_speakers == 0 {
        return Err(Error::InvalidArgument("frame period and speaker count must be positive".into()));
    }
    for (w, word) in config.planted.iter().enumerate() {
        if word.units.is_empty() || word.units.iter().any(|&u| u >= alphabet) {
            return Err(Error::InvalidArgument(format!("planted word {w} is empty or outside the alphabet")));
        }
        if !(0.0..=1.0).contains(&word.substitution_prob) {
            return Err(Error::InvalidArgument(format!("planted word {w} has a bad substitution probability")));
        }
        if let Some(&u) = word.utterances.iter().find(|&&u| u >= config.n_utterances) {
            return Err(Error::InfeasiblePlacement(format!("word {w} targets utterance {u} beyond the corpus")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut utterances = Vec::with_capacity(config.n_utterances);
    let mut truth = Vec::new();

    for n in 0..config.n_utterances {
        let utterance_id = format!("spk{:02}_utt{:03}", n % config.n_speakers, n);
        let len = config.utterance_len;

        let mut copies: Vec<usize> = config
            .planted
            .iter()
            .enumerate()
            .flat_map(|(w, word)| std::iter::repeat_n(w, word.utterances.iter().filter(|&&u| u == n).count()))
            .collect();
        let planted_len: usize = copies.iter().map(|&w| config.planted[w].units.len()).sum();
        if planted_len > len {
            return Err(Error::InfeasiblePlacement(format!(
                "utterance {n} needs {planted_len} planted units but has {len}"
            )));
        }
        copies.shuffle(&mut rng);

        // Split the free units into gaps before, between and after the copies.
        let free = len - planted_len;
        let mut cuts: Vec<usize> = (0..copies.len()).map(|_| rng.random_range(0..=free)).collect();
        cuts.sort_unstable();

        let mut units = vec![0u32; len];
        let mut background = vec![true; len];
        let mut placed = Vec::new();
        let mut pos = 0;
        let mut prev_cut = 0;
        for (&w, &cut) in copies.iter().zip(&cuts) {
            pos += cut - prev_cut;
            prev_cut = cut;
            let word = &config.planted[w];
            for (k, &u) in word.units.iter().enumerate() {
                units[pos + k] = if rng.random::<f64>() < word.substitution_prob {
                    let r = rng.random_range(0..alphabet - 1);
                    if r >= u {
                        r + 1
                    } else {
                        r
                    }
                } else {
                    u
                };
                background[pos + k] = false;
            }
            placed.push((w, pos, pos + word.units.len() - 1));
            pos += word.units.len();
        }

        for t in 0..len {
            if background[t] {
                let left = t.checked_sub(1).map(|p| units[p]);
                let right = (t + 1 < len && !background[t + 1]).then(|| units[t + 1]);
                units[t] = loop {
                    let u = rng.random_range(0..alphabet);
                    if Some(u) != left && Some(u) != right {
                        break u;
                    }
                };
            }
        }

        let mut segments = Vec::with_capacity(len);
        let mut frame = 0;
        for &unit in &units {
            let dur = rng.random_range(lo..=hi);
            segments.push(Segment { start: frame, end: frame + dur - 1, unit });
            frame += dur;
        }
        let utt = EncodedUtterance { utterance_id: utterance_id.clone(), segments, frame_period: config.frame_period, offset: 0.0 };

        for (word, first, last) in placed {
            truth.push(PlantedSpan {
                word,
                utterance: n,
                utterance_id: utterance_id.clone(),
                units: (first, last),
                start: utt.segment_start_time(first),
                end: utt.segment_end_time(last),
            });
        }
        utterances.push(utt);
    }

    Ok(SyntheticCorpus { utterances, truth })
}

impl SyntheticCorpus {
    /// One "phone" per segment, labelled by its unit.
    pub fn phone_alignment(&self) -> PhoneAlignment {
        let entries = self
            .utterances
            .iter()
            .flat_map(|utt| {
                (0..utt.segments.len()).map(move |n| PhoneEntry {
                    utterance_id: utt.utterance_id.clone(),
                    start: utt.segment_start_time(n),
                    end: utt.segment_end_time(n),
                    phone: format!("u{}", utt.segments[n].unit),
                })
            })
            .collect();
        PhoneAlignment::new(entries).expect("segments tile each utterance")
    }

    /// Each whole utterance counts as speech.
    pub fn vad(&self) -> VadTable {
        let entries = self
            .utterances
            .iter()
            .filter(|u| !u.segments.is_empty())
            .map(|u| VadEntry {
                utterance_id: u.utterance_id.clone(),
                start: u.offset,
                end: u.segment_end_time(u.segments.len() - 1),
            })
            .collect();
        VadTable::new(entries).expect("utterances are disjoint recordings")
    }

    /// Renders frames as a per-unit prototype plus isotropic Gaussian noise.
    /// Prototypes are standard normal vectors of dimension `dim`.
    pub fn features(&self, dim: usize, noise_std: f32, seed: u64) -> Result<Vec<FeatureSequence>> {
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dimension must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alphabet = self.utterances.iter().flat_map(|u| u.segments.iter().map(|s| s.unit + 1)).max().unwrap_or(0);
        let prototypes: Vec<f32> =
            (0..alphabet as usize * dim).map(|_| StandardNormal.sample(&mut rng)).collect();

        self.utterances
            .iter()
            .map(|utt| {
                let mut data = Vec::with_capacity(utt.num_frames() * dim);
                for seg in &utt.segments {
                    let proto = &prototypes[seg.unit as usize * dim..(seg.unit as usize + 1) * dim];
                    for _ in seg.start..=seg.end {
                        data.extend(proto.iter().map(|&p| {
                            let eps: f32 = StandardNormal.sample(&mut rng);
                            p + noise_std * eps
                        }));
                    }
                }
                Ok(FeatureSequence::new(utt.utterance_id.clone(), FrameMatrix::new(data, dim)?)
                    .with_timing(utt.frame_period as f32, utt.offset as f32))
            })
            .collect()
    }
}
