//! `zsasr`: batch pipeline for zero-shot speech decoding. Subcommands cover
//! romanization, lexicon building, LM training, emission synthesis,
//! lexicon-constrained beam decoding, CER evaluation, weight tuning and the
//! text-amount sweep. Exit codes: 0 success, 1 usage error, 2 data error.

mod util;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use zsasr_core::{
    audit_vocabulary, beam_decode, evaluate_corpus, grid_search, romanize_text_with_stats,
    text_amount_sweep, DecodeConfig, FallbackPolicy, Lexicon, LexiconTrie, NGramModel,
    RomanizeStats, SweepCorpus, SweepSettings, TrainingData,
};

use util::{
    load_dev_set, load_scheme, parse_grid, parse_sizes, read_emissions, read_file, read_manifest,
    read_refs, sanitize_id, write_atomic,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

macro_rules! data_error_from {
    ($($ty:ty),+) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )+};
}

data_error_from!(
    zsasr_core::RomanizeError,
    zsasr_core::LexiconError,
    zsasr_core::NGramError,
    zsasr_core::EmissionError,
    zsasr_core::DecodeError,
    zsasr_core::EvalError
);

#[derive(Parser)]
#[command(
    name = "zsasr",
    about = "Zero-shot speech decoding pipeline",
    long_about = "Romanize text, build lexicons and n-gram LMs from word lists, synthesize \
                  CTC emissions, decode them with lexicon-constrained beam search, and \
                  evaluate/tune/sweep.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TableArgs {
    /// Directory of extra script tables (*.tsv, `source<TAB>target` lines)
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Replace unmapped alphabetic codepoints with an apostrophe instead of
    /// dropping them
    #[arg(long)]
    fallback_apostrophe: bool,
}

impl TableArgs {
    fn scheme(&self) -> Result<zsasr_core::RomanScheme, CliError> {
        let fallback = if self.fallback_apostrophe {
            FallbackPolicy::Apostrophe
        } else {
            FallbackPolicy::Drop
        };
        load_scheme(self.tables.as_deref(), fallback)
    }
}

#[derive(Args)]
struct BeamArgs {
    /// Beam size
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u32).range(1..))]
    beam: u32,
    /// Pruning margin below the best hypothesis (natural log)
    #[arg(long, default_value_t = 25.0)]
    beam_threshold: f64,
    /// Skip the end-of-sentence LM term
    #[arg(long)]
    no_eos: bool,
}

impl BeamArgs {
    fn config(&self, lm_weight: f64, word_score: f64) -> Result<DecodeConfig, CliError> {
        if self.beam_threshold.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(CliError::Usage(format!(
                "--beam-threshold must be positive, got {}",
                self.beam_threshold
            )));
        }
        Ok(DecodeConfig {
            beam_size: self.beam as usize,
            beam_threshold: self.beam_threshold,
            lm_weight,
            word_score,
            apply_eos: !self.no_eos,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Romanize a UTF-8 text file line by line
    #[command(after_help = "\
Input: plain UTF-8 text, romanized line by line.\n\
Table file (--tables DIR, *.tsv): `source-codepoints<TAB>target-letters`, e.g. `\u{0449}\tshch`;\n\
`#` starts a comment, an empty target deletes the source.")]
    Romanize {
        /// Input text file
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file (romanized lines)
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tables: TableArgs,
        /// Also print the observed symbol counts to stderr
        #[arg(long)]
        audit: bool,
    },
    /// Build a word -> romanization lexicon from a word list or a frequency file
    #[command(after_help = "\
Word list: one word per line, e.g. `hello`.\n\
Frequency file: `word<TAB>count`, e.g. `hello\t42`.\n\
Output lexicon: `word<TAB>space-separated-symbols`, e.g. `hello\th e l l o |`.")]
    BuildLexicon {
        /// Word-list file, one word per line
        #[arg(long)]
        words: Option<PathBuf>,
        /// Frequency file, `word<TAB>count` per line
        #[arg(long)]
        freq: Option<PathBuf>,
        /// Keep only frequency entries with count >= N
        #[arg(long)]
        min_count: Option<u64>,
        /// Output lexicon file
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Train a backoff n-gram language model and write it as ARPA
    #[command(after_help = "\
Corpus: one utterance per line, e.g. `the cat sat`.\n\
Count file: `ngram-words-space-separated<TAB>count`, e.g. `the cat\t3`.\n\
Output: ARPA text, sections of `log10prob<TAB>ngram[<TAB>log10backoff]` lines.")]
    TrainLm {
        /// Sentence corpus, one utterance per line
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// N-gram count file, `words space separated<TAB>count` per line
        #[arg(long)]
        counts: Option<PathBuf>,
        /// Model order
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        order: u32,
        /// Absolute discount D in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        discount: f64,
        /// Output ARPA file
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize emission files from reference transcriptions
    #[command(after_help = "\
References: `utterance_id<TAB>language<TAB>text`, e.g. `utt1\tes\tel perro corre`.\n\
Output: one `<id>.ctce` binary per utterance plus `manifest.tsv`\n\
(`utterance_id<TAB>path<TAB>reference-text`).")]
    Synth {
        /// References: `utterance_id<TAB>language<TAB>text`
        #[arg(long)]
        refs: PathBuf,
        /// Output directory (emission files plus manifest.tsv)
        #[arg(long)]
        out: PathBuf,
        /// Frames per reference symbol
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        frames_per_symbol: u32,
        /// Probability mass spread off the target symbol, in [0, 1)
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Base seed; per-utterance seeds derive from it and the utterance id
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Decode a manifest of emission files into words
    #[command(after_help = "\
Manifest: `utterance_id<TAB>path<TAB>reference-text`, e.g. `utt1\tutt1.ctce\tel perro`;\n\
relative paths resolve against the manifest's directory.\n\
Output: `utterance_id<TAB>words<TAB>total_score<TAB>forced_finalization`,\n\
e.g. `utt1\tel perro\t-1.234567\tfalse`.")]
    Decode {
        /// Manifest: `utterance_id<TAB>path<TAB>reference-text`
        #[arg(long)]
        manifest: PathBuf,
        /// Lexicon file
        #[arg(long)]
        lexicon: PathBuf,
        /// Optional ARPA language model
        #[arg(long)]
        lm: Option<PathBuf>,
        /// LM fusion weight
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lm_weight: f64,
        /// Per-word score bonus
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        word_score: f64,
        #[command(flatten)]
        beam: BeamArgs,
        /// Output hypotheses TSV
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for utterance parallelism
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
    /// Score hypotheses against references (CER, unweighted average)
    #[command(after_help = "\
References: `utterance_id<TAB>language<TAB>text`, e.g. `utt1\tes\tel perro corre`.\n\
Hypotheses: the `decode` output TSV.\n\
Output: JSON report with per-language CER and the unweighted average.")]
    Eval {
        /// References: `utterance_id<TAB>language<TAB>text`
        #[arg(long)]
        refs: PathBuf,
        /// Hypotheses TSV produced by `decode`
        #[arg(long)]
        hyps: PathBuf,
        /// Output report (JSON)
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-search LM weight and word score on a dev set
    #[command(after_help = "\
Grids are `LO:HI:STEP`, inclusive of both ends when HI-LO is a multiple of STEP,\n\
e.g. `0:1:0.25`. Output: JSON with every grid point and the best\n\
(ties: smaller lm_weight, then smaller word_score).")]
    Tune {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        refs: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// ARPA language model
        #[arg(long)]
        lm: PathBuf,
        /// LM weight grid, LO:HI:STEP inclusive
        #[arg(long, allow_hyphen_values = true, default_value = "0:5:0.25")]
        lm_weight_grid: String,
        /// Word score grid, LO:HI:STEP inclusive
        #[arg(long, allow_hyphen_values = true, default_value = "-5:5:0.5")]
        word_score_grid: String,
        #[command(flatten)]
        beam: BeamArgs,
        /// Output tuning report (JSON)
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
    /// Measure CER as a function of the amount of text used for lexicon and LM
    #[command(after_help = "\
Corpus: sentence lines, or a frequency file (`word<TAB>count` on every line).\n\
Sizes: ascending utterance counts, e.g. `100,500,1000`.\n\
Output CSV: `size,lex_cer,1gram_cer`, one row per size.")]
    Sweep {
        /// Text corpus: sentences per line, or `word<TAB>count` lines
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated ascending utterance counts
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        refs: PathBuf,
        /// LM fusion weight for the unigram run
        #[arg(long, default_value_t = 1.0)]
        lm_weight: f64,
        /// Per-word score bonus for both runs
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        word_score: f64,
        /// Absolute discount for the unigram LM
        #[arg(long, default_value_t = 0.5)]
        discount: f64,
        #[command(flatten)]
        beam: BeamArgs,
        #[command(flatten)]
        tables: TableArgs,
        /// Output CSV (`size,lex_cer,1gram_cer`)
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
}

fn main() {
    let code = run(std::env::args_os());
    std::process::exit(code);
}

fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders help to stdout and errors to stderr on print().
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn in_pool<F: FnOnce() -> Result<(), CliError> + Send>(jobs: u32, body: F) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .map_err(|e| CliError::Data(e.to_string()))?;
    pool.install(body)
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Romanize {
            input,
            out,
            tables,
            audit,
        } => {
            let scheme = tables.scheme()?;
            let text = read_file(&input)?;
            let mut stats = RomanizeStats::default();
            let mut rendered = String::new();
            for line in text.lines() {
                rendered.push_str(&romanize_text_with_stats(line, &scheme, &mut stats).render());
                rendered.push('\n');
            }
            write_atomic(&out, rendered.as_bytes())?;
            if stats.unmapped_codepoints > 0 {
                eprintln!(
                    "warning: {} codepoints had no table entry",
                    stats.unmapped_codepoints
                );
            }
            if audit {
                let counts = audit_vocabulary(std::io::Cursor::new(text.as_str()), &scheme)?;
                for (sym, count) in counts {
                    eprintln!("{}\t{}", sym.label(), count);
                }
            }
            Ok(())
        }

        Command::BuildLexicon {
            words,
            freq,
            min_count,
            out,
            tables,
        } => {
            let scheme = tables.scheme()?;
            let word_list: Vec<String> = match (&words, &freq) {
                (Some(path), None) => {
                    if min_count.is_some() {
                        return Err(CliError::Usage("--min-count requires --freq".to_string()));
                    }
                    zsasr_core::lexicon::read_word_list(&read_file(path)?)
                }
                (None, Some(path)) => {
                    let freqs = zsasr_core::lexicon::read_word_frequencies(&read_file(path)?)
                        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                    let floor = min_count.unwrap_or(1);
                    freqs
                        .into_iter()
                        .filter(|(_, c)| *c >= floor)
                        .map(|(w, _)| w)
                        .collect()
                }
                _ => {
                    return Err(CliError::Usage(
                        "exactly one of --words or --freq is required".to_string(),
                    ))
                }
            };
            let lexicon = Lexicon::build(word_list.iter().map(String::as_str), &scheme)?;
            if lexicon.dropped_words() > 0 {
                eprintln!(
                    "warning: {} words romanized to nothing and were dropped",
                    lexicon.dropped_words()
                );
            }
            write_atomic(&out, lexicon.serialize().as_bytes())
        }

        Command::TrainLm {
            corpus,
            counts,
            order,
            discount,
            out,
        } => {
            if !(discount > 0.0 && discount < 1.0) {
                return Err(CliError::Usage(format!(
                    "--discount must lie strictly between 0 and 1, got {discount}"
                )));
            }
            let model = match (&corpus, &counts) {
                (Some(path), None) => {
                    let sentences: Vec<Vec<String>> = read_file(path)?
                        .lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(|l| l.split_whitespace().map(str::to_string).collect())
                        .collect();
                    NGramModel::train(
                        TrainingData::Sentences(&sentences),
                        order as usize,
                        discount,
                    )?
                }
                (None, Some(path)) => {
                    let table = read_count_file(path)?;
                    NGramModel::train(TrainingData::Counts(&table), order as usize, discount)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "exactly one of --corpus or --counts is required".to_string(),
                    ))
                }
            };
            write_atomic(&out, model.write_arpa().as_bytes())
        }

        Command::Synth {
            refs,
            out,
            frames_per_symbol,
            noise,
            seed,
            tables,
        } => {
            if !(0.0..1.0).contains(&noise) {
                return Err(CliError::Usage(format!(
                    "--noise must lie in [0, 1), got {noise}"
                )));
            }
            let scheme = tables.scheme()?;
            let lines = read_refs(&refs)?;
            let mut manifest = String::new();
            let mut seen = std::collections::HashSet::new();
            for line in &lines {
                if !seen.insert(line.utterance_id.clone()) {
                    return Err(CliError::Data(format!(
                        "{}: duplicate utterance id {:?}",
                        refs.display(),
                        line.utterance_id
                    )));
                }
                let romanized = zsasr_core::romanize_text(&line.text, &scheme);
                if romanized.is_empty() {
                    return Err(CliError::Data(format!(
                        "{}: utterance {:?} romanizes to nothing",
                        refs.display(),
                        line.utterance_id
                    )));
                }
                let matrix = zsasr_core::synthesize(
                    line.utterance_id.clone(),
                    &romanized.with_trailing_separator(),
                    frames_per_symbol as usize,
                    noise,
                    zsasr_core::derive_seed(seed, &line.utterance_id),
                )?;
                let file_name = format!("{}.ctce", sanitize_id(&line.utterance_id));
                if manifest.contains(&format!("\t{file_name}\t")) {
                    return Err(CliError::Data(format!(
                        "utterance ids {:?} collide after sanitization",
                        line.utterance_id
                    )));
                }
                write_atomic(&out.join(&file_name), &matrix.to_bytes())?;
                let _ = writeln!(
                    manifest,
                    "{}\t{}\t{}",
                    line.utterance_id, file_name, line.text
                );
            }
            write_atomic(&out.join("manifest.tsv"), manifest.as_bytes())
        }

        Command::Decode {
            manifest,
            lexicon,
            lm,
            lm_weight,
            word_score,
            beam,
            out,
            jobs,
        } => {
            let cfg = beam.config(lm_weight, word_score)?;
            let lexicon_path = lexicon;
            let lexicon = Lexicon::parse(&read_file(&lexicon_path)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", lexicon_path.display())))?;
            let trie = LexiconTrie::build(&lexicon);
            let model = lm
                .as_deref()
                .map(|path| -> Result<NGramModel, CliError> {
                    NGramModel::read_arpa(&read_file(path)?)
                        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
                })
                .transpose()?;
            let entries = read_manifest(&manifest)?;
            let matrices: Vec<_> = entries
                .iter()
                .map(|line| read_emissions(&line.path, &line.utterance_id))
                .collect::<Result<_, _>>()?;

            let mut output = String::new();
            in_pool(jobs, || {
                let results: Vec<_> = matrices
                    .par_iter()
                    .map(|m| beam_decode(m, &trie, &lexicon, model.as_ref(), &cfg))
                    .collect();
                for (line, result) in entries.iter().zip(results) {
                    let _ = writeln!(
                        output,
                        "{}\t{}\t{:.6}\t{}",
                        line.utterance_id,
                        result.words.join(" "),
                        result.total_score,
                        result.forced_finalization
                    );
                }
                Ok(())
            })?;
            write_atomic(&out, output.as_bytes())
        }

        Command::Eval { refs, hyps, out } => {
            let references = read_refs(&refs)?;
            let hyp_text = read_file(&hyps)?;
            let mut by_id = std::collections::HashMap::new();
            for (idx, raw) in hyp_text.lines().enumerate() {
                if raw.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = raw.split('\t').collect();
                if fields.len() != 4 {
                    return Err(CliError::Data(format!(
                        "{}:{}: expected 4 tab-separated fields",
                        hyps.display(),
                        idx + 1
                    )));
                }
                by_id.insert(fields[0].to_string(), fields[1].to_string());
            }
            let mut pairs: std::collections::BTreeMap<String, Vec<(String, String)>> =
                std::collections::BTreeMap::new();
            for reference in &references {
                let hyp = by_id.get(&reference.utterance_id).ok_or_else(|| {
                    CliError::Data(format!(
                        "{}: no hypothesis for utterance {:?}",
                        hyps.display(),
                        reference.utterance_id
                    ))
                })?;
                pairs
                    .entry(reference.language.clone())
                    .or_default()
                    .push((reference.text.clone(), hyp.clone()));
            }
            let report = evaluate_corpus(&pairs)?;
            print_report(&report);
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Data(e.to_string()))?;
            write_atomic(&out, format!("{json}\n").as_bytes())
        }

        Command::Tune {
            manifest,
            refs,
            lexicon,
            lm,
            lm_weight_grid,
            word_score_grid,
            beam,
            out,
            jobs,
        } => {
            let lm_weights = parse_grid(&lm_weight_grid)?;
            let word_scores = parse_grid(&word_score_grid)?;
            let base = beam.config(0.0, 0.0)?;
            let lexicon_path = lexicon;
            let lexicon = Lexicon::parse(&read_file(&lexicon_path)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", lexicon_path.display())))?;
            let trie = LexiconTrie::build(&lexicon);
            let model = NGramModel::read_arpa(&read_file(&lm)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", lm.display())))?;
            let dev = load_dev_set(&manifest, &refs)?;

            let mut result = None;
            in_pool(jobs, || {
                result = Some(grid_search(
                    &dev,
                    &trie,
                    &lexicon,
                    Some(&model),
                    &lm_weights,
                    &word_scores,
                    &base,
                )?);
                Ok(())
            })?;
            let result = result.expect("grid search ran");
            println!(
                "best lm_weight={} word_score={} average_cer={:.6} over {} grid points",
                result.best_lm_weight,
                result.best_word_score,
                result.best_average_cer,
                result.grid.len()
            );
            let json =
                serde_json::to_string_pretty(&result).map_err(|e| CliError::Data(e.to_string()))?;
            write_atomic(&out, format!("{json}\n").as_bytes())
        }

        Command::Sweep {
            corpus,
            sizes,
            manifest,
            refs,
            lm_weight,
            word_score,
            discount,
            beam,
            tables,
            out,
            jobs,
        } => {
            if !(discount > 0.0 && discount < 1.0) {
                return Err(CliError::Usage(format!(
                    "--discount must lie strictly between 0 and 1, got {discount}"
                )));
            }
            let sizes = parse_sizes(&sizes)?;
            let scheme = tables.scheme()?;
            let corpus_data = read_sweep_corpus(&corpus)?;
            let dev = load_dev_set(&manifest, &refs)?;
            let settings = SweepSettings {
                lex_config: beam.config(0.0, word_score)?,
                lm_config: beam.config(lm_weight, word_score)?,
                discount,
            };
            let mut rows = None;
            in_pool(jobs, || {
                rows = Some(text_amount_sweep(
                    &corpus_data,
                    &sizes,
                    &dev,
                    &scheme,
                    &settings,
                )?);
                Ok(())
            })?;
            let mut csv = String::from("size,lex_cer,1gram_cer\n");
            for row in rows.expect("sweep ran") {
                let _ = writeln!(
                    csv,
                    "{},{:.6},{:.6}",
                    row.size, row.lex_cer, row.unigram_cer
                );
            }
            write_atomic(&out, csv.as_bytes())
        }
    }
}

fn read_count_file(path: &std::path::Path) -> Result<Vec<(Vec<String>, u64)>, CliError> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let (gram, count) = raw.split_once('\t').ok_or_else(|| {
            CliError::Data(format!(
                "{}:{}: expected `ngram<TAB>count`",
                path.display(),
                idx + 1
            ))
        })?;
        let count: u64 = count.trim().parse().map_err(|_| {
            CliError::Data(format!(
                "{}:{}: invalid count {count:?}",
                path.display(),
                idx + 1
            ))
        })?;
        let words: Vec<String> = gram.split_whitespace().map(str::to_string).collect();
        if words.is_empty() || count == 0 {
            return Err(CliError::Data(format!(
                "{}:{}: ngram must be non-empty and count positive",
                path.display(),
                idx + 1
            )));
        }
        out.push((words, count));
    }
    Ok(out)
}

/// Frequency file when every line is `word<TAB>positive-integer`, sentence
/// corpus otherwise.
fn read_sweep_corpus(path: &std::path::Path) -> Result<SweepCorpus, CliError> {
    let text = read_file(path)?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(CliError::Data(format!(
            "{}: corpus is empty",
            path.display()
        )));
    }
    let is_freq = lines.iter().all(|l| {
        l.split_once('\t')
            .is_some_and(|(w, c)| !w.is_empty() && c.trim().parse::<u64>().is_ok_and(|n| n > 0))
    });
    if is_freq {
        let freqs = zsasr_core::lexicon::read_word_frequencies(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Ok(SweepCorpus::WordFrequencies(freqs))
    } else {
        Ok(SweepCorpus::Sentences(
            lines.iter().map(|l| l.to_string()).collect(),
        ))
    }
}

fn print_report(report: &zsasr_core::EvalReport) {
    println!("language\tutterances\tedits\tref_chars\tcer");
    for (language, stats) in &report.per_language {
        println!(
            "{}\t{}\t{}\t{}\t{:.6}",
            language,
            stats.utterance_count,
            stats.edit_distance_total,
            stats.ref_char_total,
            stats.cer
        );
    }
    println!("average (unweighted)\t\t\t\t{:.6}", report.average_cer);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_beam_size_matches_decoder_default() {
        let cfg = DecodeConfig::default();
        assert_eq!(cfg.beam_size, 2000);
        // The CLI default must agree with the library default.
        let cli = Cli::try_parse_from([
            "zsasr",
            "decode",
            "--manifest",
            "m",
            "--lexicon",
            "l",
            "--out",
            "o",
        ])
        .unwrap();
        match cli.command {
            Command::Decode { beam, .. } => assert_eq!(beam.beam as usize, cfg.beam_size),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_beam_is_a_usage_error() {
        let err = match Cli::try_parse_from([
            "zsasr",
            "decode",
            "--manifest",
            "m",
            "--lexicon",
            "l",
            "--out",
            "o",
            "--beam",
            "0",
        ]) {
            Err(e) => e,
            Ok(_) => panic!("beam 0 must be rejected"),
        };
        assert_ne!(err.kind(), clap::error::ErrorKind::DisplayHelp);
    }

    #[test]
    fn unknown_flags_are_errors() {
        assert!(
            Cli::try_parse_from(["zsasr", "romanize", "--in", "a", "--out", "b", "--bogus"])
                .is_err()
        );
    }
}
