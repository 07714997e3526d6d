//! Quantizes and segments features at several duration weights and compares
//! the result with the generating units.
//!
//!     cargo run --release --example encode_utterances

use termdisc::quantizer::{train_codebook, KMeansConfig};
use termdisc::segmenter::{encode_corpus, SegmentConfig};
use termdisc::synth::{generate_synthetic_corpus, planted_word_config};

fn main() -> termdisc::Result<()> {
    let corpus = generate_synthetic_corpus(&planted_word_config(0))?;
    let features = corpus.features(16, 0.4, 1)?;
    let codebook = train_codebook(&features, &KMeansConfig { k: 50, seed: 3, ..KMeansConfig::default() })?;
    let truth_units: usize = corpus.utterances.iter().map(|u| u.segments.len()).sum();

    println!("gamma  segments  mean frames/segment  length error");
    for gamma in [0.0, 0.2, 0.5, 1.0, 2.0] {
        let encoded = encode_corpus(&features, &codebook, &SegmentConfig::with_gamma(gamma))?;
        let segments: usize = encoded.iter().map(|e| e.segments.len()).sum();
        let frames: usize = encoded.iter().map(|e| e.num_frames()).sum();
        // labels are arbitrary, so compare segment counts only
        let len_err: usize = encoded.iter().zip(&corpus.utterances).map(|(e, u)| e.segments.len().abs_diff(u.segments.len())).sum();
        println!("{gamma:>5.1}  {segments:>8}  {:>19.2}  {len_err:>12}", frames as f64 / segments as f64);
    }
    println!("generating units: {truth_units}");
    Ok(())
}
