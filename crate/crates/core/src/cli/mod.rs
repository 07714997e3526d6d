//! Command-line front end: `train`, `encode`, `discover`, `score`, `synth`
//! and `report`.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on invalid arguments or
//! inputs. Every command reads and validates all of its inputs before it
//! writes anything, and records a stage entry in the `manifest.json` of each
//! output directory.

pub mod config;
pub mod manifest;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::aligner::ScoringScheme;
use crate::discovery::{discover_sweep, DiscoveryConfig, DurationRule, DEFAULT_MIN_DURATION, DEFAULT_TAU};
use crate::error::{Error, Result};
use crate::eval::{duration_report, score_pairs, speaker_report};
use crate::io::{self, SpeakerMap};
use crate::quantizer::{train_codebook_with_report, KMeansConfig, DEFAULT_K, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL};
use crate::segmenter::{encode_corpus, SegmentConfig, DEFAULT_GAMMA};
use crate::synth::{generate_synthetic_corpus, PlantedWord, SynthConfig, PLANTED_WORD};
use config::ConfigFile;
use manifest::{hash_paths, record_stage, StageRecord};

#[derive(Debug, Parser)]
#[command(name = "termdisc", version, about = "Spoken-term discovery over discrete speech units")]
pub struct Cli {
    /// key = value file supplying defaults for any long flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a k-means codebook on a feature archive
    Train(TrainArgs),
    /// Quantize and segment features into a unit file
    Encode(EncodeArgs),
    /// Find matching fragments across all utterance pairs
    Discover(DiscoverArgs),
    /// Compute NED, coverage and pair statistics
    Score(ScoreArgs),
    /// Generate a synthetic corpus with planted words
    Synth(SynthArgs),
    /// Duration histograms and speaker composition for pair files
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub codebook: PathBuf,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Longest segment in frames (default: unlimited)
    #[arg(long)]
    pub max_segment_len: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[arg(long)]
    pub units: PathBuf,
    /// Threshold, or LO:HI to sweep (then --out is a directory)
    #[arg(long)]
    pub tau: Option<TauSpec>,
    /// Minimum fragment duration in seconds
    #[arg(long = "min-dur")]
    pub min_dur: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long = "match-score", allow_negative_numbers = true)]
    pub match_score: Option<i32>,
    #[arg(long = "mismatch-score", allow_negative_numbers = true)]
    pub mismatch_score: Option<i32>,
    #[arg(long)]
    pub gap: Option<i32>,
    /// Also search within each utterance
    #[arg(long)]
    pub self_pairs: bool,
    /// Keep matches where only one fragment reaches --min-dur
    #[arg(long)]
    pub either_duration: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub alignments: PathBuf,
    #[arg(long)]
    pub vad: PathBuf,
    #[arg(long)]
    pub speaker_delimiter: Option<String>,
    /// Also write the metrics as CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub utterances: Option<usize>,
    /// Units per utterance
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub alphabet: Option<u32>,
    /// Number of utterances receiving the planted word
    #[arg(long)]
    pub planted: Option<usize>,
    #[arg(long)]
    pub word_len: Option<usize>,
    #[arg(long)]
    pub substitution_prob: Option<f64>,
    #[arg(long)]
    pub speakers: Option<usize>,
    /// Feature dimension of the rendered archive
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub noise: Option<f32>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// One or more pair files
    #[arg(long, required = true, num_args = 1..)]
    pub pairs: Vec<PathBuf>,
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long)]
    pub speaker_delimiter: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

/// A single threshold or an inclusive sweep `LO:HI`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauSpec {
    Single(i32),
    Sweep(i32, i32),
}

impl FromStr for TauSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let num = |v: &str| v.trim().parse::<i32>().map_err(|_| format!("invalid threshold {v:?}"));
        match s.split_once(':') {
            None => Ok(TauSpec::Single(num(s)?)),
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(format!("empty sweep {lo}:{hi}"));
                }
                Ok(TauSpec::Sweep(lo, hi))
            }
        }
    }
}

impl TauSpec {
    pub fn values(&self) -> Vec<i32> {
        match *self {
            TauSpec::Single(t) => vec![t],
            TauSpec::Sweep(lo, hi) => (lo..=hi).collect(),
        }
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invalid_input() { 2 } else { 1 })
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Train(args) => cmd_train(&args, &file),
        Command::Encode(args) => cmd_encode(&args, &file),
        Command::Discover(args) => cmd_discover(&args, &file),
        Command::Score(args) => cmd_score(&args, &file),
        Command::Synth(args) => cmd_synth(&args, &file),
        Command::Report(args) => cmd_report(&args, &file),
    }
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn snapshot(entries: &[(&str, String)]) -> BTreeMap<String, String> {
    entries.iter().map(|(k, v)| ((*k).to_owned(), v.clone())).collect()
}

fn finish_stage(
    dir: &Path,
    name: &str,
    config: BTreeMap<String, String>,
    inputs: &[&Path],
    outputs: &[&Path],
    started: Instant,
) -> Result<()> {
    let stage = StageRecord {
        config,
        inputs: hash_paths(inputs)?,
        outputs: hash_paths(outputs)?,
        seconds: started.elapsed().as_secs_f64(),
    };
    record_stage(dir, name, stage)
}

pub fn cmd_train(args: &TrainArgs, file: &ConfigFile) -> Result<()> {
    let started = Instant::now();
    let config = KMeansConfig {
        k: file.resolve("k", args.k, DEFAULT_K)?,
        seed: file.resolve("seed", args.seed, 0)?,
        max_iters: file.resolve("max-iters", args.max_iters, DEFAULT_MAX_ITERS)?,
        rel_tol: file.resolve("rel-tol", args.rel_tol, DEFAULT_REL_TOL)?,
    };
    let features = io::read_feature_archive(&args.features)?;
    let (codebook, report) = train_codebook_with_report(&features, &config)?;
    log::info!(
        "trained {} centroids in {} iterations, inertia {:.6}",
        codebook.k(),
        report.inertia_trace.len(),
        report.final_inertia()
    );

    ensure_dir(parent_dir(&args.out))?;
    io::write_codebook(&args.out, &codebook)?;
    let snap = snapshot(&[
        ("k", config.k.to_string()),
        ("seed", config.seed.to_string()),
        ("max-iters", config.max_iters.to_string()),
        ("rel-tol", config.rel_tol.to_string()),
    ]);
    finish_stage(parent_dir(&args.out), "train", snap, &[&args.features], &[&args.out], started)
}

pub fn cmd_encode(args: &EncodeArgs, file: &ConfigFile) -> Result<()> {
    let started = Instant::now();
    let config = SegmentConfig {
        gamma: file.resolve("gamma", args.gamma, DEFAULT_GAMMA)?,
        max_segment_len: file.resolve_opt("max-segment-len", args.max_segment_len)?,
    };
    let features = io::read_feature_archive(&args.features)?;
    let codebook = io::read_codebook(&args.codebook)?;
    let encoded = encode_corpus(&features, &codebook, &config)?;
    log::info!("encoded {} utterances", encoded.len());

    ensure_dir(parent_dir(&args.out))?;
    io::write_units(&args.out, &encoded)?;
    let snap = snapshot(&[
        ("gamma", config.gamma.to_string()),
        ("max-segment-len", config.max_segment_len.map_or_else(|| "none".into(), |v| v.to_string())),
    ]);
    finish_stage(parent_dir(&args.out), "encode", snap, &[&args.features, &args.codebook], &[&args.out], started)
}

pub fn cmd_discover(args: &DiscoverArgs, file: &ConfigFile) -> Result<()> {
    let started = Instant::now();
    let tau = file.resolve("tau", args.tau, TauSpec::Single(DEFAULT_TAU))?;
    let defaults = ScoringScheme::default();
    let scheme = ScoringScheme::new(
        file.resolve("match-score", args.match_score, defaults.match_score())?,
        file.resolve("mismatch-score", args.mismatch_score, defaults.mismatch_score())?,
        file.resolve("gap", args.gap, 1)?,
    )?;
    let config = DiscoveryConfig {
        tau: tau.values()[0],
        min_duration: file.resolve("min-dur", args.min_dur, DEFAULT_MIN_DURATION)?,
        scheme,
        include_self_pairs: file.resolve_flag("self-pairs", args.self_pairs)?,
        duration_rule: if file.resolve_flag("either-duration", args.either_duration)? {
            DurationRule::Either
        } else {
            DurationRule::Both
        },
        workers: file.resolve("workers", args.workers, 0)?,
    };
    let taus = tau.values();
    for &t in &taus {
        DiscoveryConfig { tau: t, ..config.clone() }.validate()?;
    }

    let corpus = io::read_units(&args.units)?;
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("unit file contains no utterances".into()));
    }
    log::info!("aligning {} utterances", corpus.len());
    let results = discover_sweep(&corpus, &taus, &config)?;

    let snap = snapshot(&[
        ("tau", match tau {
            TauSpec::Single(t) => t.to_string(),
            TauSpec::Sweep(lo, hi) => format!("{lo}:{hi}"),
        }),
        ("min-dur", config.min_duration.to_string()),
        ("match-score", scheme.match_score().to_string()),
        ("mismatch-score", scheme.mismatch_score().to_string()),
        ("gap", crate::aligner::Similarity::gap_penalty(&scheme).to_string()),
        ("self-pairs", config.include_self_pairs.to_string()),
        ("duration-rule", format!("{:?}", config.duration_rule).to_lowercase()),
    ]);

    match tau {
        TauSpec::Single(_) => {
            let (_, pairs) = &results[0];
            ensure_dir(parent_dir(&args.out))?;
            io::write_pairs(&args.out, pairs)?;
            log::info!("wrote {} pairs to {}", pairs.len(), args.out.display());
            finish_stage(parent_dir(&args.out), "discover", snap, &[&args.units], &[&args.out], started)
        }
        TauSpec::Sweep(..) => {
            ensure_dir(&args.out)?;
            let mut summary = String::from("tau,pairs,file\n");
            let mut written = Vec::new();
            for (t, pairs) in &results {
                let name = format!("pairs_tau{t:02}.txt");
                let path = args.out.join(&name);
                io::write_pairs(&path, pairs)?;
                let _ = writeln!(summary, "{t},{},{name}", pairs.len());
                written.push(path);
            }
            let summary_path = args.out.join("sweep.csv");
            std::fs::write(&summary_path, summary).map_err(|e| Error::io(&summary_path, e))?;
            written.push(summary_path);
            let outputs: Vec<&Path> = written.iter().map(PathBuf::as_path).collect();
            finish_stage(&args.out, "discover", snap, &[&args.units], &outputs, started)
        }
    }
}

/// The reference word over the default alphabet, otherwise a seeded walk
/// with no immediate repeats.
fn planted_units(seed: u64, len: usize, alphabet: u32) -> Vec<u32> {
    use rand::{Rng, SeedableRng};
    if len <= PLANTED_WORD.len() && PLANTED_WORD.iter().all(|&u| u < alphabet) {
        return PLANTED_WORD[..len].to_vec();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut word: Vec<u32> = Vec::with_capacity(len);
    while word.len() < len {
        let u = rng.random_range(0..alphabet);
        if word.last() != Some(&u) {
            word.push(u);
        }
    }
    word
}

fn speaker_map(file: &ConfigFile, flag: &Option<String>) -> Result<SpeakerMap> {
    Ok(SpeakerMap::with_delimiter(file.resolve("speaker-delimiter", flag.clone(), "_".to_owned())?))
}

pub fn cmd_score(args: &ScoreArgs, file: &ConfigFile) -> Result<()> {
    let started = Instant::now();
    let pairs = io::read_pairs(&args.pairs)?;
    let alignment = io::read_phone_alignment(&args.alignments)?;
    let vad = io::read_vad(&args.vad)?;
    let speakers = speaker_map(file, &args.speaker_delimiter)?;
    let report = score_pairs(&pairs, &alignment, &vad, &speakers)?;

    print!("{}", report.to_text());
    if let Some(out) = &args.out {
        ensure_dir(parent_dir(out))?;
        std::fs::write(out, report.to_csv()).map_err(|e| Error::io(out, e))?;
        let snap = snapshot(&[("speaker-delimiter", args.speaker_delimiter.clone().unwrap_or_else(|| "_".into()))]);
        finish_stage(parent_dir(out), "score", snap, &[&args.pairs, &args.alignments, &args.vad], &[out], started)?;
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs, file: &ConfigFile) -> Result<()> {
    let started = Instant::now();
    let defaults = SynthConfig::default();
    let seed = file.resolve("seed", args.seed, 0)?;
    let n_utterances = file.resolve("utterances", args.utterances, defaults.n_utterances)?;
    let alphabet = file.resolve("alphabet", args.alphabet, defaults.alphabet_size)?;
    let planted = file.resolve("planted", args.planted, 10usize)?;
    let word_len = file.resolve("word-len", args.word_len, 12usize)?;
    let substitution_prob = file.resolve("substitution-prob", args.substitution_prob, 0.0)?;
    let dim = file.resolve("dim", args.dim, 16usize)?;
    let noise = file.resolve("noise", args.noise, 0.1f32)?;
    if planted > n_utterances {
        return Err(Error::InvalidArgument(format!("cannot plant into {planted} of {n_utterances} utterances")));
    }
    if alphabet < 3 {
        return Err(Error::InvalidArgument("alphabet needs at least 3 units".into()));
    }

    let word = planted_units(seed, word_len, alphabet);
    let config = SynthConfig {
        seed,
        n_utterances,
        utterance_len: file.resolve("length", args.length, defaults.utterance_len)?,
        alphabet_size: alphabet,
        n_speakers: file.resolve("speakers", args.speakers, defaults.n_speakers)?,
        planted: if planted == 0 || word_len == 0 {
            Vec::new()
        } else {
            vec![PlantedWord { units: word, utterances: (0..planted).collect(), substitution_prob }]
        },
        ..defaults
    };
    let corpus = generate_synthetic_corpus(&config)?;
    let features = corpus.features(dim, noise, seed.wrapping_add(1))?;

    ensure_dir(&args.out)?;
    let paths = ["features.dstf", "units.txt", "phones.csv", "vad.csv", "truth.csv"].map(|n| args.out.join(n));
    io::write_feature_archive(&paths[0], &features)?;
    io::write_units(&paths[1], &corpus.utterances)?;
    io::write_phone_alignment(&paths[2], &corpus.phone_alignment())?;
    io::write_vad(&paths[3], &corpus.vad())?;
    let mut truth = String::from("word,utterance_id,first_unit,last_unit,start,end\n");
    for s in &corpus.truth {
        let _ = writeln!(truth, "{},{},{},{},{:.4},{:.4}", s.word, s.utterance_id, s.units.0, s.units.1, s.start, s.end);
    }
    std::fs::write(&paths[4], truth).map_err(|e| Error::io(&paths[4], e))?;
    log::info!("wrote {} utterances ({} planted copies) to {}", n_utterances, corpus.truth.len(), args.out.display());

    let snap = snapshot(&[
        ("seed", seed.to_string()),
        ("utterances", n_utterances.to_string()),
        ("length", config.utterance_len.to_string()),
        ("alphabet", alphabet.to_string()),
        ("planted", planted.to_string()),
        ("word-len", word_len.to_string()),
        ("substitution-prob", substitution_prob.to_string()),
        ("speakers", config.n_speakers.to_string()),
        ("dim", dim.to_string()),
        ("noise", noise.to_string()),
    ]);
    let outputs: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
    finish_stage(&args.out, "synth", snap, &[], &outputs, started)
}

pub fn cmd_report(args: &ReportArgs, file: &ConfigFile) -> Result<()> {
    let started = Instant::now();
    let bin_width = file.resolve("bin-width", args.bin_width, 0.1)?;
    let speakers = speaker_map(file, &args.speaker_delimiter)?;
    let sets = args
        .pairs
        .iter()
        .map(|p| io::read_pairs(p).map(|pairs| (p, pairs)))
        .collect::<Result<Vec<_>>>()?;

    let mut durations = String::from("file,bin_start,bin_end,count\n");
    let mut composition = String::from("file,pairs,within_speaker,across_speaker,mean_duration,max_duration\n");
    for (path, pairs) in &sets {
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        let hist = duration_report(pairs, bin_width)?;
        let counts = speaker_report(pairs, |id| Some(speakers.speaker_of(id).to_owned()))?;
        for line in hist.to_csv().lines().skip(1) {
            let _ = writeln!(durations, "{name},{line}");
        }
        let _ = writeln!(
            composition,
            "{name},{},{},{},{:.6},{:.6}",
            pairs.len(),
            counts.within,
            counts.across,
            hist.mean,
            hist.max
        );
    }

    ensure_dir(&args.out)?;
    let dur_path = args.out.join("durations.csv");
    let spk_path = args.out.join("speakers.csv");
    std::fs::write(&dur_path, durations).map_err(|e| Error::io(&dur_path, e))?;
    std::fs::write(&spk_path, &composition).map_err(|e| Error::io(&spk_path, e))?;
    print!("{composition}");

    let inputs: Vec<&Path> = args.pairs.iter().map(PathBuf::as_path).collect();
    let snap = snapshot(&[("bin-width", bin_width.to_string())]);
    finish_stage(&args.out, "report", snap, &inputs, &[&dur_path, &spk_path], started)
}
