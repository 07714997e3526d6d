//! Unsupervised spoken-term discovery over discrete speech units.
//!
//! Frame-level features are quantized with a k-means [`quantizer::Codebook`],
//! collapsed into variable-length units by [`segmenter::segment`], and every
//! pair of unit sequences is searched for repeated fragments with a
//! Smith-Waterman [`aligner::Aligner`]. [`discovery::discover`] ties the
//! stages together and [`eval`] scores the result against phone alignments.

pub mod aligner;
pub mod cli;
pub mod discovery;
pub mod error;
pub mod eval;
pub mod io;
pub mod quantizer;
pub mod segmenter;
pub mod synth;

pub use aligner::{Aligner, LocalMatch, ScoringScheme};
pub use discovery::{discover, DiscoveryConfig};
pub use error::{Error, Result};
pub use io::{Fragment, MatchPair};
pub use quantizer::{Codebook, KMeansConfig};
pub use segmenter::{EncodedUtterance, SegmentConfig};
