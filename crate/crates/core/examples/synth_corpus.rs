//! Writes a synthetic corpus (features, units, phones, VAD) to a directory,
//! ready for the command-line tools.
//!
//!     cargo run --example synth_corpus -- /tmp/corpus

use std::path::PathBuf;

use termdisc::io;
use termdisc::synth::{generate_synthetic_corpus, planted_word_config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "synthetic_corpus".into()));
    std::fs::create_dir_all(&dir)?;

    let corpus = generate_synthetic_corpus(&planted_word_config(42))?;
    io::write_feature_archive(dir.join("features.dstf"), &corpus.features(16, 0.1, 43)?)?;
    io::write_units(dir.join("units.txt"), &corpus.utterances)?;
    io::write_phone_alignment(dir.join("phones.csv"), &corpus.phone_alignment())?;
    io::write_vad(dir.join("vad.csv"), &corpus.vad())?;

    for span in &corpus.truth {
        println!("{} units {}..={} ({:.2}-{:.2} s)", span.utterance_id, span.units.0, span.units.1, span.start, span.end);
    }
    println!("wrote {} utterances to {}", corpus.utterances.len(), dir.display());
    Ok(())
}
