//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;

use termdisc::aligner::{fill_scoring_matrix_pinned, find_matches, Aligner, Move, ScoringScheme};
use termdisc::discovery::{discover, discover_sweep, DiscoveryConfig};
use termdisc::eval::{coverage, levenshtein, ned, normalized_distance, pair_ned};
use termdisc::io::{format_pairs, FrameMatrix, Fragment, MatchPair, VadEntry, VadTable};
use termdisc::quantizer::Codebook;
use termdisc::segmenter::{segment, SegmentConfig};
use termdisc::synth::{generate_synthetic_corpus, planted_word_config, PlantedWord, SynthConfig, PLANTED_WORD};

const MIN_DURATION: f64 = 0.2;
const DURATION_SLACK: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Every fragment emitted anywhere in this run, for the duration criterion.
#[derive(Default)]
struct Emitted {
    fragments: usize,
    short: Vec<Fragment>,
}

impl Emitted {
    fn record(&mut self, pairs: &[MatchPair]) {
        for f in pairs.iter().flat_map(MatchPair::fragments) {
            self.fragments += 1;
            if f.duration() < MIN_DURATION - DURATION_SLACK {
                self.short.push(f.clone());
            }
        }
    }
}

fn aligner_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = common::rng(1);
    let scheme = ScoringScheme::default();
    let mut agree = 0;
    let mut first_miss = None;
    for n in 0..1000 {
        let alphabet = rng.random_range(1..=4);
        let x = common::random_seq(&mut rng, 7, alphabet);
        let y = common::random_seq(&mut rng, 7, alphabet);
        let expected = common::brute_local_score(&x, &y, 1, -1, 1);
        let got = find_matches(&x, &y, &scheme, 1).first().map_or(0, |m| m.score);
        if got == expected {
            agree += 1;
        } else if first_miss.is_none() {
            first_miss = Some(format!("pair {n}: {x:?} vs {y:?} gave {got}, oracle {expected}"));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let mut detail = format!("{agree}/1000 first-match scores equal the exhaustive search, {secs:.2} s (limit 10 s)");
    if let Some(miss) = first_miss {
        detail += &format!("; {miss}");
    }
    outcome(agree == 1000 && secs < 10.0, detail)
}

fn reference_alignment() -> Outcome {
    let left = [42, 80, 70, 49, 78, 56, 95, 40, 93, 1];
    let top = [42, 80, 70, 49, 78, 81, 56, 95, 23, 93, 1];
    let scheme = ScoringScheme::default();
    let Some(m) = find_matches(&left, &top, &scheme, 1).into_iter().next() else {
        return outcome(false, "no alignment found");
    };
    let cols = m.columns(&left, &top);
    let gaps: Vec<_> = m.path.iter().filter(|s| s.step != Move::Diag).collect();
    let subs: Vec<_> = cols.iter().filter(|c| matches!(c, (Some(a), Some(b)) if a != b)).collect();
    let gap_ok = gaps.len() == 1 && gaps[0].step == Move::Left && top[gaps[0].j - 1] == 81;
    let sub_ok = subs.len() == 1 && *subs[0] == (Some(40), Some(23));

    let (oracle_score, optimal) = common::brute_optimal_alignments(&left, &top, 1, -1, 1);
    let oracle_ok = oracle_score == 7 && optimal.contains(&cols);
    outcome(
        m.score == 7 && gap_ok && sub_ok && oracle_ok && m.x_span == (0, 9) && m.y_span == (0, 10),
        format!(
            "score {} (oracle {oracle_score}), {} gap(s) [81 skipped: {gap_ok}], {} substitution(s) [40/23: {sub_ok}], \
             alignment among the {} optimal ones: {oracle_ok}",
            m.score,
            gaps.len(),
            subs.len(),
            optimal.len()
        ),
    )
}

fn segmenter_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = common::rng(2);
    let gammas = [0.0, 0.2, 1.0];
    let mut agree = 0;
    let mut first_miss = None;
    for n in 0..500 {
        let t = rng.random_range(1..=8);
        let k = rng.random_range(1..=4);
        let dim = rng.random_range(1..=3);
        let gamma = gammas[n % 3];
        let mut draw = |count: usize| -> Vec<Vec<f32>> {
            (0..count).map(|_| (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect()).collect()
        };
        let frames = draw(t);
        let centroids = draw(k);
        let expected = common::brute_segment_cost(&frames, &centroids, gamma);
        let codebook = Codebook::new(FrameMatrix::from_rows(&centroids).unwrap()).unwrap();
        let matrix = FrameMatrix::from_rows(&frames).unwrap();
        let got = segment(&matrix, &codebook, &SegmentConfig::with_gamma(gamma)).unwrap().cost;
        if got == expected {
            agree += 1;
        } else if first_miss.is_none() {
            first_miss = Some(format!("instance {n}: dp {got} vs oracle {expected}"));
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let mut detail = format!("{agree}/500 DP costs equal the exhaustive minimum, {secs:.2} s (limit 30 s)");
    if let Some(miss) = first_miss {
        detail += &format!("; {miss}");
    }
    outcome(agree == 500 && secs < 30.0, detail)
}

fn rescoring_consistency() -> Outcome {
    let mut rng = common::rng(3);
    let scheme = ScoringScheme::default();
    let mut aligner = Aligner::new();
    let (mut identical, mut extractions) = (0, 0);
    for _ in 0..200 {
        let alphabet = rng.random_range(2..=4);
        let x = common::random_seq(&mut rng, 24, alphabet);
        let y = common::random_seq(&mut rng, 24, alphabet);
        aligner.load(&x, &y, &scheme);
        let mut same = true;
        while aligner.extract_next(&x, &y, &scheme, 1).is_some() {
            extractions += 1;
            let full = fill_scoring_matrix_pinned(&x, &y, &scheme, aligner.pinned());
            same &= full == *aligner.matrix();
        }
        identical += usize::from(same);
    }
    outcome(
        identical == 200,
        format!("{identical}/200 instances identical to full recomputation after every one of {extractions} extractions"),
    )
}

fn tau_sweep(emitted: &mut Emitted) -> Outcome {
    let mut config = planted_word_config(11);
    config.planted.push(PlantedWord { substitution_prob: 0.25, ..PlantedWord::exact(PLANTED_WORD.to_vec(), (20..35).collect()) });
    let corpus = generate_synthetic_corpus(&config).unwrap();
    let vad = corpus.vad();
    let base = DiscoveryConfig::default();
    let taus: Vec<i32> = (6..=12).collect();
    let sweep = discover_sweep(&corpus.utterances, &taus, &base).unwrap();

    let mut counts = Vec::new();
    let mut covs = Vec::new();
    let mut sweep_matches_direct = true;
    for (tau, pairs) in &sweep {
        emitted.record(pairs);
        counts.push(pairs.len());
        covs.push(coverage(pairs, &vad).unwrap());
        let direct = discover(&corpus.utterances, &DiscoveryConfig::with_tau(*tau)).unwrap();
        sweep_matches_direct &= direct == *pairs;
    }
    let counts_ok = counts.windows(2).all(|w| w[1] <= w[0]);
    let cov_ok = covs.windows(2).all(|w| w[1] <= w[0]);

    // Per utterance pair, the match list at tau + 1 must be a prefix of the
    // list at tau.
    let units: Vec<Vec<u32>> = corpus.utterances.iter().map(|u| u.units()).collect();
    let mut prefix_ok = true;
    let mut checked = 0;
    for i in 0..units.len() {
        for j in i + 1..units.len() {
            let lists: Vec<_> = taus.iter().map(|&t| find_matches(&units[i], &units[j], &base.scheme, t)).collect();
            for w in lists.windows(2) {
                checked += 1;
                prefix_ok &= w[1].len() <= w[0].len() && w[0][..w[1].len()] == w[1][..];
            }
        }
    }
    outcome(
        counts_ok && cov_ok && prefix_ok && sweep_matches_direct,
        format!(
            "pair counts {counts:?}, coverage {}, prefix property on {checked} list pairs: {prefix_ok}, \
             sweep equals per-threshold runs: {sweep_matches_direct}",
            covs.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn overlaps(f: &Fragment, start: f64, end: f64) -> bool {
    f.start < end && start < f.end
}

fn planted_end_to_end(emitted: &mut Emitted) -> Outcome {
    let started = Instant::now();
    let corpus = generate_synthetic_corpus(&planted_word_config(0)).unwrap();
    let alignment = corpus.phone_alignment();
    let min_span = corpus.truth.iter().map(|s| s.end - s.start).fold(f64::INFINITY, f64::min);
    let pairs = discover(&corpus.utterances, &DiscoveryConfig::with_tau(9)).unwrap();
    emitted.record(&pairs);

    let truth: BTreeMap<&str, (f64, f64)> =
        corpus.truth.iter().map(|s| (s.utterance_id.as_str(), (s.start, s.end))).collect();
    let mut hits = Vec::new();
    let mut found = 0;
    for (ia, (ida, &(sa, ea))) in truth.iter().enumerate() {
        for (idb, &(sb, eb)) in truth.iter().skip(ia + 1) {
            let matching: Vec<&MatchPair> = pairs
                .iter()
                .filter(|p| {
                    (p.a.utterance_id == *ida && p.b.utterance_id == *idb && overlaps(&p.a, sa, ea) && overlaps(&p.b, sb, eb))
                        || (p.a.utterance_id == *idb && p.b.utterance_id == *ida && overlaps(&p.a, sb, eb) && overlaps(&p.b, sa, ea))
                })
                .collect();
            found += usize::from(!matching.is_empty());
            hits.extend(matching.into_iter().cloned());
        }
    }
    let recall = found as f64 / 45.0;
    let ned_value = if hits.is_empty() { f64::NAN } else { ned(&hits, &alignment).unwrap() };
    let secs = started.elapsed().as_secs_f64();
    outcome(
        truth.len() == 10 && min_span >= 0.2 && recall >= 0.95 && ned_value == 0.0 && secs < 60.0,
        format!(
            "{found}/45 planted pairs matched ({:.1} %, need 95 %), NED {ned_value} over {} matching pairs, \
             shortest planted copy {min_span:.2} s, {secs:.2} s (limit 60 s)",
            recall * 100.0,
            hits.len()
        ),
    )
}

fn duration_filter(emitted: &mut Emitted) -> Outcome {
    // One frame per unit: planted words of 8 units last 160 ms and must be
    // dropped, 12-unit words last 240 ms and must survive.
    let config = SynthConfig {
        seed: 5,
        n_utterances: 12,
        frames_per_unit: (1, 1),
        planted: vec![
            PlantedWord::exact(vec![1, 2, 3, 4, 5, 6, 7, 8], (0..6).collect()),
            PlantedWord::exact(PLANTED_WORD.to_vec(), (6..12).collect()),
        ],
        ..SynthConfig::default()
    };
    let corpus = generate_synthetic_corpus(&config).unwrap();
    let pairs = discover(&corpus.utterances, &DiscoveryConfig::with_tau(6)).unwrap();
    let unfiltered = discover(&corpus.utterances, &DiscoveryConfig { min_duration: 0.0, ..DiscoveryConfig::with_tau(6) }).unwrap();
    let short_candidates = unfiltered
        .iter()
        .flat_map(MatchPair::fragments)
        .filter(|f| f.duration() < MIN_DURATION - DURATION_SLACK)
        .count();
    emitted.record(&pairs);
    outcome(
        emitted.short.is_empty() && short_candidates > 0 && !pairs.is_empty(),
        format!(
            "{} short fragments among {} emitted across the suite ({short_candidates} would appear without the filter)",
            emitted.short.len(),
            emitted.fragments
        ),
    )
}

fn determinism() -> Outcome {
    let corpus = generate_synthetic_corpus(&planted_word_config(0)).unwrap();
    let run = |workers| {
        let pairs = discover(&corpus.utterances, &DiscoveryConfig { workers, ..DiscoveryConfig::default() }).unwrap();
        format_pairs(&pairs)
    };
    let library_same = run(1) == run(8);

    let dir = tempfile::tempdir().unwrap();
    let units = dir.path().join("units.txt");
    termdisc::io::write_units(&units, &corpus.utterances).unwrap();
    let cli = |workers: &str| {
        let out = dir.path().join(format!("pairs_{workers}.txt"));
        let status = Command::new(env!("CARGO_BIN_EXE_termdisc"))
            .args(["discover", "--units"])
            .arg(&units)
            .args(["--workers", workers, "--out"])
            .arg(&out)
            .env("RUST_LOG", "warn")
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let (one, eight) = (cli("1"), cli("8"));
    let cli_same = one == eight;
    outcome(
        library_same && cli_same,
        format!("class files byte-identical with 1 and 8 workers: library {library_same}, command line {cli_same} ({} bytes)", one.len()),
    )
}

fn metric_properties() -> Outcome {
    let mut rng = common::rng(4);
    let seq = |rng: &mut rand_chacha::ChaCha8Rng| common::random_seq(rng, 8, 3);

    let mut triangle_ok = 0;
    let mut oracle_ok = 0;
    let mut ned_range_ok = true;
    for _ in 0..10_000 {
        let (a, b, c) = (seq(&mut rng), seq(&mut rng), seq(&mut rng));
        let (ab, bc, ac) = (levenshtein(&a, &b), levenshtein(&b, &c), levenshtein(&a, &c));
        triangle_ok += usize::from(ac <= ab + bc);
        oracle_ok += usize::from(ab == common::recursive_levenshtein(&a, &b));
        let d = normalized_distance(&a, &b);
        ned_range_ok &= (0.0..=1.0).contains(&d);
    }

    // Coverage against the sweep-line oracle. Times lie on a 1/64 s grid so
    // every sum is exact.
    let mut cov_equal = 0;
    let mut cov_range_ok = true;
    for set in 0..100 {
        let recordings = rng.random_range(1..=4);
        let mut vad_entries = Vec::new();
        let mut vad_map: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for r in 0..recordings {
            let mut t = 0u32;
            for _ in 0..rng.random_range(1..=3) {
                let s = t + rng.random_range(0..20);
                let e = s + rng.random_range(1..40);
                t = e;
                let (s, e) = (f64::from(s) / 64.0, f64::from(e) / 64.0);
                vad_entries.push(VadEntry { utterance_id: format!("rec{r}"), start: s, end: e });
                vad_map.entry(format!("rec{r}")).or_default().push((s, e));
            }
        }
        let vad = VadTable::new(vad_entries).unwrap();
        let frag = |rng: &mut rand_chacha::ChaCha8Rng| {
            let s = rng.random_range(0..150u32);
            let e = s + rng.random_range(1..40);
            Fragment::new(format!("rec{}", rng.random_range(0..recordings)), f64::from(s) / 64.0, f64::from(e) / 64.0)
        };
        let pairs: Vec<MatchPair> = (0..rng.random_range(0..12))
            .map(|_| MatchPair { a: frag(&mut rng), b: frag(&mut rng), score: 0 })
            .collect();
        let got = coverage(&pairs, &vad).unwrap();

        let mut by_rec: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
        for f in pairs.iter().flat_map(MatchPair::fragments) {
            by_rec.entry(&f.utterance_id).or_default().push((f.start, f.end));
        }
        let covered: f64 = vad_map
            .iter()
            .map(|(rec, speech)| common::sweep_line_covered(by_rec.get(rec.as_str()).map_or(&[][..], Vec::as_slice), speech))
            .sum();
        let total: f64 = vad_map.values().flatten().map(|(s, e)| e - s).sum();
        let expected = covered / total;
        cov_equal += usize::from(got == expected);
        cov_range_ok &= (0.0..=1.0).contains(&got);
        if got != expected && set < 3 {
            eprintln!("coverage set {set}: {got} vs oracle {expected}");
        }
    }

    // NED range on discovered pairs, including noisy ones.
    let mut config = planted_word_config(9);
    config.planted[0].substitution_prob = 0.3;
    let corpus = generate_synthetic_corpus(&config).unwrap();
    let alignment = corpus.phone_alignment();
    let pairs = discover(&corpus.utterances, &DiscoveryConfig::with_tau(6)).unwrap();
    for p in &pairs {
        ned_range_ok &= (0.0..=1.0).contains(&pair_ned(p, &alignment).unwrap());
    }
    if !pairs.is_empty() {
        ned_range_ok &= (0.0..=1.0).contains(&ned(&pairs, &alignment).unwrap());
    }

    outcome(
        triangle_ok == 10_000 && oracle_ok == 10_000 && cov_equal == 100 && ned_range_ok && cov_range_ok,
        format!(
            "triangle inequality {triangle_ok}/10000, edit distance equals recursive oracle {oracle_ok}/10000, \
             coverage equals sweep-line oracle {cov_equal}/100, NED in [0,1]: {ned_range_ok}, coverage in [0,1]: {cov_range_ok}"
        ),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut emitted = Emitted::default();
    let results: Vec<(&str, Outcome)> = vec![
        ("aligner oracle", aligner_oracle()),
        ("reference alignment", reference_alignment()),
        ("segmenter oracle", segmenter_oracle()),
        ("rescoring consistency", rescoring_consistency()),
        ("tau monotonicity and prefix property", tau_sweep(&mut emitted)),
        ("planted term end to end", planted_end_to_end(&mut emitted)),
        ("determinism", determinism()),
        ("metric properties", metric_properties()),
        // last, so it sees every fragment emitted above
        ("duration filter", duration_filter(&mut emitted)),
    ];

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
