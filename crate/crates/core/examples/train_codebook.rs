//! Trains a k-means codebook on rendered synthetic features and shows the
//! inertia trace.
//!
//!     cargo run --release --example train_codebook

use termdisc::quantizer::{assign, train_codebook_with_report, KMeansConfig};
use termdisc::synth::{generate_synthetic_corpus, planted_word_config};

fn main() -> termdisc::Result<()> {
    let corpus = generate_synthetic_corpus(&planted_word_config(0))?;
    let features = corpus.features(16, 0.1, 1)?;
    let frames: usize = features.iter().map(|f| f.num_frames()).sum();

    let config = KMeansConfig { k: 50, seed: 7, ..KMeansConfig::default() };
    let (codebook, report) = train_codebook_with_report(&features, &config)?;
    println!("{frames} frames, {} centroids of dimension {}", codebook.k(), codebook.dim());
    for (it, inertia) in report.inertia_trace.iter().enumerate() {
        println!("iteration {it:>3}  inertia {inertia:.4}");
    }

    // how many distinct labels a single utterance uses
    let labels = assign(&features[0].frames, &codebook)?;
    let mut distinct = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    println!("{}: {} frames, {} distinct labels", features[0].utterance_id, labels.len(), distinct.len());
    Ok(())
}
