//! Sweeps the similarity threshold over a noisy planted corpus and prints the
//! quality/quantity trade-off as CSV.
//!
//!     cargo run --release --example tau_sweep > sweep.csv

use termdisc::discovery::{discover_sweep, DiscoveryConfig, TAU_SWEEP};
use termdisc::eval::{coverage, duration_report, ned};
use termdisc::synth::{generate_synthetic_corpus, planted_word_config};

fn main() -> termdisc::Result<()> {
    let mut config = planted_word_config(1);
    config.planted[0].substitution_prob = 0.15;
    let corpus = generate_synthetic_corpus(&config)?;
    let (alignment, vad) = (corpus.phone_alignment(), corpus.vad());

    let taus: Vec<i32> = TAU_SWEEP.collect();
    println!("tau,pairs,ned,coverage,mean_duration");
    for (tau, pairs) in discover_sweep(&corpus.utterances, &taus, &DiscoveryConfig::default())? {
        let ned = if pairs.is_empty() { String::new() } else { format!("{:.4}", ned(&pairs, &alignment)?) };
        let mean = duration_report(&pairs, 0.1)?.mean;
        println!("{tau},{},{ned},{:.4},{mean:.3}", pairs.len(), coverage(&pairs, &vad)?);
    }
    Ok(())
}
