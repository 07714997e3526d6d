//! On-disk formats: feature archives, codebooks, unit files, VAD and phone
//! tables, and discovered-pair class files.
//!
//! Utterance ids have the shape `<recording>_<clipindex>` when a recording was
//! split into clips. Times stored anywhere outside a feature archive or unit
//! file are recording-relative; the `offset` carried with each clip maps clip
//! frames back onto the recording.

pub mod codebook;
pub mod features;
pub mod pairs;
pub mod tables;
pub mod units;

pub use codebook::{read_codebook, write_codebook};
pub use features::{read_feature_archive, write_feature_archive, FeatureSequence, FrameMatrix};
pub use pairs::{format_pairs, parse_pairs, read_pairs, write_pairs, Fragment, MatchPair};
pub use tables::{
    read_phone_alignment, read_vad, write_phone_alignment, write_vad, PhoneAlignment, PhoneEntry, PhoneInterval,
    VadEntry, VadTable,
};
pub use units::{format_units, parse_units, read_units, write_units};

/// Strips a trailing `_<digits>` clip index, if any.
pub fn recording_of(utterance_id: &str) -> &str {
    match utterance_id.rsplit_once('_') {
        Some((rec, clip)) if !rec.is_empty() && !clip.is_empty() && clip.bytes().all(|b| b.is_ascii_digit()) => rec,
        _ => utterance_id,
    }
}

/// Maps utterance ids to speaker ids by taking the prefix before a delimiter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerMap {
    delimiter: String,
}

impl Default for SpeakerMap {
    fn default() -> Self {
        Self { delimiter: "_".into() }
    }
}

impl SpeakerMap {
    pub fn with_delimiter(delimiter: impl Into<String>) -> Self {
        Self { delimiter: delimiter.into() }
    }

    /// Speaker of an utterance; ids without the delimiter are their own speaker.
    pub fn speaker_of<'a>(&self, utterance_id: &'a str) -> &'a str {
        if self.delimiter.is_empty() {
            return utterance_id;
        }
        utterance_id.split_once(self.delimiter.as_str()).map_or(utterance_id, |(spk, _)| spk)
    }
}
