//! Plants a 12-unit word into 10 of 50 utterances, runs discovery and checks
//! which planted pairs were found.
//!
//!     cargo run --release --example discover_planted [tau]

use termdisc::discovery::{discover, DiscoveryConfig};
use termdisc::eval::ned;
use termdisc::synth::{generate_synthetic_corpus, planted_word_config};

fn main() -> termdisc::Result<()> {
    let tau = std::env::args().nth(1).map_or(9, |t| t.parse().expect("tau is an integer"));
    let corpus = generate_synthetic_corpus(&planted_word_config(0))?;
    let pairs = discover(&corpus.utterances, &DiscoveryConfig::with_tau(tau))?;

    let mut found = 0;
    for (i, a) in corpus.truth.iter().enumerate() {
        for b in &corpus.truth[i + 1..] {
            let hit = pairs.iter().any(|p| {
                let ov = |f: &termdisc::Fragment, s: &termdisc::synth::PlantedSpan| {
                    f.utterance_id == s.utterance_id && f.start < s.end && s.start < f.end
                };
                (ov(&p.a, a) && ov(&p.b, b)) || (ov(&p.a, b) && ov(&p.b, a))
            });
            found += usize::from(hit);
        }
    }
    let copies = corpus.truth.len();
    println!("tau {tau}: {} pairs in total", pairs.len());
    println!("planted pairs recovered: {found}/{}", copies * (copies - 1) / 2);
    if !pairs.is_empty() {
        println!("NED over all pairs: {:.4}", ned(&pairs, &corpus.phone_alignment())?);
    }
    Ok(())
}
