//! Scores a handful of hand-made pairs against a tiny phone alignment.
//!
//!     cargo run --example evaluate

use termdisc::eval::{score_pairs, transcribe};
use termdisc::io::{Fragment, MatchPair, PhoneAlignment, PhoneEntry, SpeakerMap, VadEntry, VadTable};

fn phones(id: &str, labels: &[(&str, f64, f64)]) -> Vec<PhoneEntry> {
    labels
        .iter()
        .map(|&(p, s, e)| PhoneEntry { utterance_id: id.into(), start: s, end: e, phone: p.into() })
        .collect()
}

fn main() -> termdisc::Result<()> {
    let mut entries = phones("alice_01", &[("DH", 0.0, 0.1), ("AH", 0.1, 0.2), ("K", 0.2, 0.3), ("AE", 0.3, 0.45), ("T", 0.45, 0.5)]);
    entries.extend(phones("bob_01", &[("DH", 0.5, 0.6), ("AH", 0.6, 0.7), ("K", 0.7, 0.8), ("AA", 0.8, 0.95), ("T", 0.95, 1.0)]));
    let alignment = PhoneAlignment::new(entries)?;
    let vad = VadTable::new(vec![
        VadEntry { utterance_id: "alice_01".into(), start: 0.0, end: 0.5 },
        VadEntry { utterance_id: "bob_01".into(), start: 0.5, end: 1.0 },
    ])?;

    let pairs = vec![
        MatchPair { a: Fragment::new("alice_01", 0.0, 0.5), b: Fragment::new("bob_01", 0.5, 1.0), score: 3 },
        MatchPair { a: Fragment::new("alice_01", 0.0, 0.3), b: Fragment::new("bob_01", 0.5, 0.8), score: 3 },
    ];
    for p in &pairs {
        println!("{:?} ~ {:?}", transcribe(&p.a, &alignment)?, transcribe(&p.b, &alignment)?);
    }
    print!("{}", score_pairs(&pairs, &alignment, &vad, &SpeakerMap::default())?.to_text());
    Ok(())
}
