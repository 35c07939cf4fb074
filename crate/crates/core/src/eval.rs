//! Character error rate evaluation, per-language aggregation with unweighted
//! cross-language averaging, the (lm_weight, word_score) grid search and the
//! text-amount sweep harness.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::decoder::{beam_decode, DecodeConfig};
use crate::emissions::EmissionMatrix;
use crate::lexicon::{Lexicon, LexiconError, LexiconTrie};
use crate::ngram::{NGramError, NGramModel, TrainingData};
use crate::romanizer::RomanScheme;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("reference is empty after normalization")]
    EmptyReference,
    #[error("language {0:?} has no utterances")]
    EmptyLanguage(String),
    #[error("grid is empty")]
    EmptyGrid,
    #[error("sweep sizes must be ascending and positive")]
    InvalidSizes,
    #[error("sweep size {size} exceeds the corpus ({available} utterances)")]
    SizeExceedsCorpus { size: usize, available: usize },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    NGram(#[from] NGramError),
}

/// Minimum edits (insertions + deletions + substitutions) transforming
/// `reference` into `hypothesis`. Two-row dynamic program.
pub fn edit_distance<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> usize {
    let m = hypothesis.len();
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for (i, r) in reference.iter().enumerate() {
        cur[0] = i + 1;
        for (j, h) in hypothesis.iter().enumerate() {
            let cost = usize::from(r != h);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Collapses whitespace runs to single spaces and trims the ends; CER is
/// computed over the resulting characters, separators included.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Character error rate: edit distance over normalized characters divided by
/// reference length. May exceed 1.
pub fn cer(reference: &str, hypothesis: &str) -> Result<f64, EvalError> {
    let reference: Vec<char> = normalize_text(reference).chars().collect();
    if reference.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    let hypothesis: Vec<char> = normalize_text(hypothesis).chars().collect();
    Ok(edit_distance(&reference, &hypothesis) as f64 / reference.len() as f64)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LanguageReport {
    pub edit_distance_total: u64,
    pub ref_char_total: u64,
    pub cer: f64,
    pub utterance_count: usize,
}

/// Per-language micro-averaged CER plus the unweighted cross-language mean:
/// every language counts equally regardless of its utterance count.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvalReport {
    pub per_language: BTreeMap<String, LanguageReport>,
    pub average_cer: f64,
}

/// `pairs`: language -> list of (reference, hypothesis).
pub fn evaluate_corpus(
    pairs: &BTreeMap<String, Vec<(String, String)>>,
) -> Result<EvalReport, EvalError> {
    let mut per_language = BTreeMap::new();
    for (language, utterances) in pairs {
        if utterances.is_empty() {
            return Err(EvalError::EmptyLanguage(language.clone()));
        }
        let mut edits: u64 = 0;
        let mut ref_chars: u64 = 0;
        for (reference, hypothesis) in utterances {
            let r: Vec<char> = normalize_text(reference).chars().collect();
            if r.is_empty() {
                return Err(EvalError::EmptyReference);
            }
            let h: Vec<char> = normalize_text(hypothesis).chars().collect();
            edits += edit_distance(&r, &h) as u64;
            ref_chars += r.len() as u64;
        }
        per_language.insert(
            language.clone(),
            LanguageReport {
                edit_distance_total: edits,
                ref_char_total: ref_chars,
                cer: edits as f64 / ref_chars as f64,
                utterance_count: utterances.len(),
            },
        );
    }
    if per_language.is_empty() {
        return Err(EvalError::EmptyLanguage("<none>".to_string()));
    }
    let average_cer = per_language.values().map(|l| l.cer).sum::<f64>() / per_language.len() as f64;
    Ok(EvalReport {
        per_language,
        average_cer,
    })
}

/// One development utterance: emissions plus its reference transcription.
pub struct DevUtterance {
    pub utterance_id: String,
    pub language: String,
    pub reference: String,
    pub emissions: EmissionMatrix,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GridPoint {
    pub lm_weight: f64,
    pub word_score: f64,
    pub average_cer: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TuneResult {
    pub grid: Vec<GridPoint>,
    pub best_lm_weight: f64,
    pub best_word_score: f64,
    pub best_average_cer: f64,
}

/// Decodes the dev set once per (lm_weight, word_score) combination and
/// reports the unweighted-average CER of each point. Best point minimizes
/// CER with ties broken by smaller lm_weight, then smaller word_score. Grid
/// points run in parallel; output order is the row-major grid order.
pub fn grid_search(
    dev: &[DevUtterance],
    trie: &LexiconTrie,
    lexicon: &Lexicon,
    lm: Option<&NGramModel>,
    lm_weights: &[f64],
    word_scores: &[f64],
    base: &DecodeConfig,
) -> Result<TuneResult, EvalError> {
    if lm_weights.is_empty() || word_scores.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let points: Vec<(f64, f64)> = lm_weights
        .iter()
        .flat_map(|&a| word_scores.iter().map(move |&b| (a, b)))
        .collect();
    let grid: Vec<GridPoint> = points
        .par_iter()
        .map(|&(lm_weight, word_score)| {
            let cfg = DecodeConfig {
                lm_weight,
                word_score,
                ..base.clone()
            };
            let average_cer = decode_and_score(dev, trie, lexicon, lm, &cfg)?;
            Ok(GridPoint {
                lm_weight,
                word_score,
                average_cer,
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let best = grid
        .iter()
        .min_by(|a, b| {
            (a.average_cer, a.lm_weight, a.word_score)
                .partial_cmp(&(b.average_cer, b.lm_weight, b.word_score))
                .expect("CER and grid values are finite")
        })
        .expect("grid is non-empty");
    Ok(TuneResult {
        best_lm_weight: best.lm_weight,
        best_word_score: best.word_score,
        best_average_cer: best.average_cer,
        grid,
    })
}

/// Decodes every utterance and evaluates; utterances run in parallel but the
/// aggregation is a deterministic reduction over manifest order.
pub fn decode_and_score(
    dev: &[DevUtterance],
    trie: &LexiconTrie,
    lexicon: &Lexicon,
    lm: Option<&NGramModel>,
    cfg: &DecodeConfig,
) -> Result<f64, EvalError> {
    let hyps: Vec<String> = dev
        .par_iter()
        .map(|utt| {
            beam_decode(&utt.emissions, trie, lexicon, lm, cfg)
                .words
                .join(" ")
        })
        .collect();
    let mut pairs: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for (utt, hyp) in dev.iter().zip(hyps) {
        pairs
            .entry(utt.language.clone())
            .or_default()
            .push((utt.reference.clone(), hyp));
    }
    Ok(evaluate_corpus(&pairs)?.average_cer)
}

/// Text source for the sweep: whole utterances or a word-frequency table.
pub enum SweepCorpus {
    Sentences(Vec<String>),
    WordFrequencies(Vec<(String, u64)>),
}

impl SweepCorpus {
    fn len(&self) -> usize {
        match self {
            SweepCorpus::Sentences(s) => s.len(),
            SweepCorpus::WordFrequencies(f) => f.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepRow {
    pub size: usize,
    pub lex_cer: f64,
    pub unigram_cer: f64,
}

pub struct SweepSettings {
    /// Config for lexicon-only decoding (its lm_weight is ignored).
    pub lex_config: DecodeConfig,
    /// Config for decoding with the unigram LM.
    pub lm_config: DecodeConfig,
    pub discount: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            lex_config: DecodeConfig::default(),
            lm_config: DecodeConfig {
                lm_weight: 1.0,
                ..DecodeConfig::default()
            },
            discount: 0.5,
        }
    }
}

/// For each prefix size, builds a lexicon and a unigram LM from the first
/// `size` corpus utterances and decodes the dev set with and without the LM.
pub fn text_amount_sweep(
    corpus: &SweepCorpus,
    sizes: &[usize],
    dev: &[DevUtterance],
    scheme: &RomanScheme,
    settings: &SweepSettings,
) -> Result<Vec<SweepRow>, EvalError> {
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::InvalidSizes);
    }
    if *sizes.last().unwrap() > corpus.len() {
        return Err(EvalError::SizeExceedsCorpus {
            size: *sizes.last().unwrap(),
            available: corpus.len(),
        });
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let (lexicon, lm) = build_from_prefix(corpus, size, scheme, settings.discount)?;
        let trie = LexiconTrie::build(&lexicon);
        let lex_cer = decode_and_score(dev, &trie, &lexicon, None, &settings.lex_config)?;
        let unigram_cer = decode_and_score(dev, &trie, &lexicon, Some(&lm), &settings.lm_config)?;
        rows.push(SweepRow {
            size,
            lex_cer,
            unigram_cer,
        });
    }
    Ok(rows)
}

fn build_from_prefix(
    corpus: &SweepCorpus,
    size: usize,
    scheme: &RomanScheme,
    discount: f64,
) -> Result<(Lexicon, NGramModel), EvalError> {
    match corpus {
        SweepCorpus::Sentences(sentences) => {
            let prefix = &sentences[..size];
            let words = prefix.iter().flat_map(|s| s.split_whitespace());
            let lexicon = Lexicon::build(words, scheme)?;
            let tokenized: Vec<Vec<String>> = prefix
                .iter()
                .map(|s| s.split_whitespace().map(str::to_string).collect())
                .collect();
            let lm = NGramModel::train(TrainingData::Sentences(&tokenized), 1, discount)?;
            Ok((lexicon, lm))
        }
        SweepCorpus::WordFrequencies(freqs) => {
            let prefix = &freqs[..size];
            let lexicon = Lexicon::build(prefix.iter().map(|(w, _)| w.as_str()), scheme)?;
            let counts: Vec<(Vec<String>, u64)> =
                prefix.iter().map(|(w, c)| (vec![w.clone()], *c)).collect();
            let lm = NGramModel::train(TrainingData::Counts(&counts), 1, discount)?;
            Ok((lexicon, lm))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emissions;
    use crate::romanizer::romanize_text;

    #[test]
    fn edit_distance_examples() {
        let chars = |s: &str| s.chars().collect::<Vec<_>>();
        assert_eq!(edit_distance(&chars("abc"), &chars("abc")), 0);
        assert_eq!(edit_distance(&chars("kitten"), &chars("sitting")), 3);
        assert_eq!(edit_distance(&chars(""), &chars("ab")), 2);
    }

    #[test]
    fn cer_examples() {
        assert!((cer("abc", "axc").unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(cer("same", "same").unwrap(), 0.0);
        assert_eq!(cer("ab", "").unwrap(), 1.0);
        assert!(cer("  ", "x").is_err());
        // Hypothesis longer than reference: CER above one.
        assert!(cer("a", "abcd").unwrap() > 1.0);
    }

    #[test]
    fn cer_normalizes_whitespace() {
        assert_eq!(cer("a  b", "a b").unwrap(), 0.0);
        assert_eq!(cer(" a b ", "a b").unwrap(), 0.0);
    }

    fn pairs(spec: &[(&str, &[(&str, &str)])]) -> BTreeMap<String, Vec<(String, String)>> {
        spec.iter()
            .map(|(lang, list)| {
                (
                    lang.to_string(),
                    list.iter()
                        .map(|(r, h)| (r.to_string(), h.to_string()))
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn average_is_unweighted_across_languages() {
        // Language A: 1 utterance at CER 1.0; language B: 100 perfect ones.
        let spec: Vec<(String, Vec<(String, String)>)> = vec![
            ("A".into(), vec![("x".into(), "y".into())]),
            (
                "B".into(),
                (0..100).map(|_| ("abc".into(), "abc".into())).collect(),
            ),
        ];
        let input: BTreeMap<_, _> = spec.into_iter().collect();
        let report = evaluate_corpus(&input).unwrap();
        assert!((report.average_cer - 0.5).abs() < 1e-12);
    }

    #[test]
    fn per_language_cer_is_micro_averaged() {
        let input = pairs(&[("L", &[("abcde", "abcde"), ("abcde", "xbcde")])]);
        let report = evaluate_corpus(&input).unwrap();
        let lang = &report.per_language["L"];
        assert_eq!(lang.edit_distance_total, 1);
        assert_eq!(lang.ref_char_total, 10);
        assert!((lang.cer - 0.1).abs() < 1e-12);
        assert_eq!(lang.utterance_count, 2);
    }

    #[test]
    fn two_language_mean() {
        let input = pairs(&[
            ("A", &[("aaaaaaaaaa", "aaaaaaaaab")]), // 0.1
            ("B", &[("aaaaaaaaaa", "aaaaaaabbb")]), // 0.3
        ]);
        let report = evaluate_corpus(&input).unwrap();
        assert!((report.average_cer - 0.2).abs() < 1e-12);
    }

    #[test]
    fn duplication_leaves_average_unchanged() {
        let base = pairs(&[("A", &[("abcd", "abxd")]), ("B", &[("ab", "ab")])]);
        let doubled = pairs(&[
            ("A", &[("abcd", "abxd"), ("abcd", "abxd"), ("abcd", "abxd")]),
            ("B", &[("ab", "ab")]),
        ]);
        let a = evaluate_corpus(&base).unwrap();
        let b = evaluate_corpus(&doubled).unwrap();
        assert!((a.average_cer - b.average_cer).abs() < 1e-12);
    }

    #[test]
    fn empty_language_is_an_error() {
        let mut input = pairs(&[("A", &[("a", "a")])]);
        input.insert("B".to_string(), Vec::new());
        assert!(matches!(
            evaluate_corpus(&input),
            Err(EvalError::EmptyLanguage(_))
        ));
    }

    fn dev_set(scheme: &RomanScheme) -> (Vec<DevUtterance>, Lexicon, LexiconTrie) {
        let words = ["gato", "perro", "vaca"];
        let lexicon = Lexicon::build(words, scheme).unwrap();
        let trie = LexiconTrie::build(&lexicon);
        let dev: Vec<DevUtterance> = ["gato perro", "vaca", "perro perro"]
            .iter()
            .enumerate()
            .map(|(i, text)| {
                let reference = romanize_text(text, scheme);
                let emissions = emissions::synthesize(
                    format!("utt{i}"),
                    &reference.with_trailing_separator(),
                    2,
                    0.1,
                    emissions::derive_seed(7, &format!("utt{i}")),
                )
                .unwrap();
                DevUtterance {
                    utterance_id: format!("utt{i}"),
                    language: "es".to_string(),
                    reference: text.to_string(),
                    emissions,
                }
            })
            .collect();
        (dev, lexicon, trie)
    }

    #[test]
    fn grid_search_singleton_grid() {
        let scheme = RomanScheme::builtin();
        let (dev, lexicon, trie) = dev_set(&scheme);
        let result = grid_search(
            &dev,
            &trie,
            &lexicon,
            None,
            &[0.0],
            &[0.0],
            &DecodeConfig::default(),
        )
        .unwrap();
        assert_eq!(result.grid.len(), 1);
        assert_eq!((result.best_lm_weight, result.best_word_score), (0.0, 0.0));
    }

    #[test]
    fn grid_search_prefers_strictly_better_points() {
        // Homophones whose rare variant holds the low word id: without LM
        // fusion every tie resolves wrong, so lm_weight 0.5 strictly beats 0
        // in every language and wins the search.
        let scheme = RomanScheme::builtin();
        let lexicon = Lexicon::build(["a", "á"], &scheme).unwrap();
        let trie = LexiconTrie::build(&lexicon);
        let counts = vec![
            (vec!["á".to_string()], 9u64),
            (vec!["a".to_string()], 1u64),
        ];
        let lm = NGramModel::train(TrainingData::Counts(&counts), 1, 0.5).unwrap();
        let dev: Vec<DevUtterance> = ["L1", "L2"]
            .iter()
            .map(|lang| {
                let reference = romanize_text("á", &scheme);
                DevUtterance {
                    utterance_id: format!("u-{lang}"),
                    language: lang.to_string(),
                    reference: "á".to_string(),
                    emissions: emissions::synthesize(
                        format!("u-{lang}"),
                        &reference.with_trailing_separator(),
                        2,
                        0.0,
                        0,
                    )
                    .unwrap(),
                }
            })
            .collect();
        let result = grid_search(
            &dev,
            &trie,
            &lexicon,
            Some(&lm),
            &[0.0, 0.5],
            &[0.0, 1.0],
            &DecodeConfig::default(),
        )
        .unwrap();
        assert_eq!(result.grid[0].average_cer, 1.0); // (0, 0) picks the rare form
        assert_eq!(result.best_lm_weight, 0.5);
        assert_eq!(result.best_word_score, 0.0);
        assert_eq!(result.best_average_cer, 0.0);
    }

    #[test]
    fn grid_search_ties_break_to_smaller_weights() {
        let scheme = RomanScheme::builtin();
        let (dev, lexicon, trie) = dev_set(&scheme);
        // Clean emissions: every grid point decodes perfectly, CERs all tie.
        let result = grid_search(
            &dev,
            &trie,
            &lexicon,
            None,
            &[1.0, 0.5, 0.0],
            &[0.5, 0.0],
            &DecodeConfig::default(),
        )
        .unwrap();
        assert_eq!(result.grid.len(), 6);
        assert_eq!((result.best_lm_weight, result.best_word_score), (0.0, 0.0));
    }

    #[test]
    fn grid_search_matches_independent_recomputation() {
        let scheme = RomanScheme::builtin();
        let (dev, lexicon, trie) = dev_set(&scheme);
        let alphas = [0.0, 0.5];
        let betas = [-0.5, 0.0, 0.5];
        let cfg = DecodeConfig::default();
        let result = grid_search(&dev, &trie, &lexicon, None, &alphas, &betas, &cfg).unwrap();

        let mut best: Option<(f64, f64, f64)> = None;
        for &a in &alphas {
            for &b in &betas {
                let point_cfg = DecodeConfig {
                    lm_weight: a,
                    word_score: b,
                    ..cfg.clone()
                };
                let cer = decode_and_score(&dev, &trie, &lexicon, None, &point_cfg).unwrap();
                let candidate = (cer, a, b);
                if best.is_none_or(|cur| candidate < cur) {
                    best = Some(candidate);
                }
            }
        }
        let (cer, a, b) = best.unwrap();
        assert_eq!(result.best_lm_weight, a);
        assert_eq!(result.best_word_score, b);
        assert!((result.best_average_cer - cer).abs() < 1e-12);
    }

    #[test]
    fn sweep_validates_sizes() {
        let scheme = RomanScheme::builtin();
        let (dev, _, _) = dev_set(&scheme);
        let corpus = SweepCorpus::Sentences(vec!["gato".into(), "perro".into()]);
        let settings = SweepSettings::default();
        assert!(matches!(
            text_amount_sweep(&corpus, &[2, 1], &dev, &scheme, &settings),
            Err(EvalError::InvalidSizes)
        ));
        assert!(matches!(
            text_amount_sweep(&corpus, &[3], &dev, &scheme, &settings),
            Err(EvalError::SizeExceedsCorpus { .. })
        ));
    }

    #[test]
    fn sweep_full_corpus_equals_direct_build() {
        let scheme = RomanScheme::builtin();
        let (dev, lexicon, trie) = dev_set(&scheme);
        let corpus = SweepCorpus::Sentences(vec![
            "gato perro".into(),
            "vaca".into(),
            "perro perro".into(),
        ]);
        let settings = SweepSettings::default();
        let rows = text_amount_sweep(&corpus, &[3], &dev, &scheme, &settings).unwrap();
        assert_eq!(rows.len(), 1);
        let direct_lex =
            decode_and_score(&dev, &trie, &lexicon, None, &settings.lex_config).unwrap();
        assert!((rows[0].lex_cer - direct_lex).abs() < 1e-12);

        let sentences: Vec<Vec<String>> = vec![
            vec!["gato".into(), "perro".into()],
            vec!["vaca".into()],
            vec!["perro".into(), "perro".into()],
        ];
        let lm = NGramModel::train(TrainingData::Sentences(&sentences), 1, 0.5).unwrap();
        let direct_lm =
            decode_and_score(&dev, &trie, &lexicon, Some(&lm), &settings.lm_config).unwrap();
        assert!((rows[0].unigram_cer - direct_lm).abs() < 1e-12);
    }
}
