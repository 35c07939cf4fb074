//! CTC decoding over emission matrices: a greedy collapse baseline, the
//! lexicon-constrained beam search with shallow LM fusion, a Viterbi
//! alignment scorer shared by beam and oracle, and a brute-force oracle that
//! enumerates word sequences for verification.
//!
//! Scores are natural-log throughout the search; LM scores arrive in log10
//! and are fused as `lm_weight * ln(10) * lm_score`. Path scores are
//! max-over-alignments, so the oracle's `best_alignment_score` and the beam
//! agree exactly on small instances.

use std::collections::HashMap;

use thiserror::Error;

use crate::alphabet::{Sym, ALPHABET_SIZE, BLANK};
use crate::emissions::{EmissionMatrix, NEG_INF};
use crate::lexicon::{Lexicon, LexiconTrie, WordId, TRIE_ROOT};
use crate::ngram::{LmState, NGramModel};
use crate::romanizer::RomanizedText;

const LN_10: f64 = std::f64::consts::LN_10;
/// `last_symbol` encoding for "previous frame was blank or start".
const NO_LAST: u8 = ALPHABET_SIZE as u8;
const NO_CHAIN: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("oracle search space of {sequences} sequences exceeds the 10^6 guard")]
    SearchSpaceTooLarge { sequences: u128 },
}

/// Beam search knobs. `lm_weight` is the shallow-fusion weight on the log10
/// LM score, `word_score` a constant bonus per emitted word.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    pub beam_size: usize,
    pub beam_threshold: f64,
    pub lm_weight: f64,
    pub word_score: f64,
    pub apply_eos: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            beam_size: 2000,
            beam_threshold: 25.0,
            lm_weight: 0.0,
            word_score: 0.0,
            apply_eos: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub words: Vec<String>,
    pub word_ids: Vec<WordId>,
    /// Spellings of the decoded words joined by single separators.
    pub romanized: String,
    pub total_score: f64,
    pub am_score: f64,
    /// log10, includes the `</s>` term when applied.
    pub lm_score: f64,
    pub word_count: usize,
    pub forced_finalization: bool,
}

/// Per-frame argmax (ties to the lowest symbol index), collapse repeats,
/// delete blanks, normalize separators.
pub fn greedy_decode(matrix: &EmissionMatrix) -> RomanizedText {
    let mut symbols: Vec<Sym> = Vec::new();
    let mut last = BLANK;
    for t in 0..matrix.frames() {
        let row = matrix.row(t);
        let mut best = 0usize;
        for (i, &x) in row.iter().enumerate() {
            if x > row[best] {
                best = i;
            }
        }
        let sym = Sym::from_index(best).expect("row has alphabet size");
        if sym != last && !sym.is_blank() {
            symbols.push(sym);
        }
        last = sym;
    }
    RomanizedText::from_symbols(symbols)
}

fn finite(logp: f32) -> f64 {
    if logp <= NEG_INF {
        f64::NEG_INFINITY
    } else {
        logp as f64
    }
}

/// Maximum over all CTC alignments (length-T paths over `symbols` plus
/// blank that collapse to `symbols`) of the summed frame log-probabilities.
/// Returns the [`NEG_INF`] sentinel when no alignment fits in T frames.
/// An empty symbol sequence scores the all-blank path.
pub fn best_alignment_score(matrix: &EmissionMatrix, symbols: &[Sym]) -> f64 {
    let frames = matrix.frames();
    if frames == 0 {
        return NEG_INF as f64;
    }
    if symbols.is_empty() {
        let mut total = 0.0;
        for t in 0..frames {
            total += finite(matrix.logp(t, BLANK));
        }
        return if total.is_finite() {
            total
        } else {
            NEG_INF as f64
        };
    }

    // Expanded sequence [blank, s1, blank, s2, ..., sN, blank].
    let n = symbols.len();
    let width = 2 * n + 1;
    let sym_at = |j: usize| -> Sym {
        if j % 2 == 1 {
            symbols[j / 2]
        } else {
            BLANK
        }
    };

    let mut prev = vec![f64::NEG_INFINITY; width];
    prev[0] = finite(matrix.logp(0, BLANK));
    prev[1] = finite(matrix.logp(0, symbols[0]));
    let mut cur = vec![f64::NEG_INFINITY; width];
    for t in 1..frames {
        for j in 0..width {
            let sym = sym_at(j);
            let mut best = prev[j];
            if j >= 1 {
                best = best.max(prev[j - 1]);
            }
            // Skipping the in-between blank is legal only between distinct
            // symbols.
            if j >= 2 && !sym.is_blank() && sym != sym_at(j - 2) {
                best = best.max(prev[j - 2]);
            }
            cur[j] = if best.is_finite() {
                best + finite(matrix.logp(t, sym))
            } else {
                f64::NEG_INFINITY
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let score = prev[width - 1].max(prev[width - 2]);
    if score.is_finite() {
        score
    } else {
        NEG_INF as f64
    }
}

/// Merge identity for hypotheses. `committed` (any word emitted yet) is part
/// of the state because finality demands at least one committed word: an
/// empty hypothesis and a word-bearing one at the same trie/LM position have
/// different futures and must not merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct StateKey {
    node: u32,
    last: u8,
    committed: bool,
    lm: LmState,
}

#[derive(Debug, Clone, Copy)]
struct Hyp {
    key: StateKey,
    am: f64,
    lm: f64,
    word_count: u32,
    total: f64,
    chain: u32,
}

struct Beam<'a> {
    trie: &'a LexiconTrie,
    lm: Option<&'a NGramModel>,
    cfg: &'a DecodeConfig,
    /// Lexicon word id -> LM vocabulary id.
    lm_ids: Vec<u32>,
    /// Backpointer arena: (parent chain index, committed word).
    arena: Vec<(u32, WordId)>,
}

impl<'a> Beam<'a> {
    fn fuse(&self, am: f64, lm: f64, word_count: u32) -> f64 {
        am + self.cfg.lm_weight * LN_10 * lm + self.cfg.word_score * word_count as f64
    }

    fn words_of(&self, mut chain: u32) -> Vec<WordId> {
        let mut ids = Vec::new();
        while chain != NO_CHAIN {
            let (parent, word) = self.arena[chain as usize];
            ids.push(word);
            chain = parent;
        }
        ids.reverse();
        ids
    }
}

/// Frame-synchronous lexicon-constrained beam search with optional shallow
/// LM fusion.
///
/// Per frame each hypothesis extends by the blank, by a repeat of its last
/// symbol (no trie movement), or by descending to a trie child; reaching a
/// terminal node commits each of its word ids and returns to the root, where
/// the LM scores the word. Hypotheses with identical (trie node, LM state,
/// last symbol) merge keeping the best fused score. Only hypotheses back at
/// the root with at least one committed word are final; when none exists the
/// best hypothesis is force-finalized with its partial word discarded and
/// the result flagged. Deterministic for fixed inputs and config.
pub fn beam_decode(
    matrix: &EmissionMatrix,
    trie: &LexiconTrie,
    lexicon: &Lexicon,
    lm: Option<&NGramModel>,
    cfg: &DecodeConfig,
) -> DecodeResult {
    assert!(cfg.beam_size >= 1, "beam_size must be at least 1");
    assert!(cfg.beam_threshold > 0.0, "beam_threshold must be positive");

    let lm_ids: Vec<u32> = match lm {
        Some(model) => (0..lexicon.len())
            .map(|id| model.word_id(lexicon.word(id as WordId)))
            .collect(),
        None => Vec::new(),
    };
    let mut beam = Beam {
        trie,
        lm,
        cfg,
        lm_ids,
        arena: Vec::new(),
    };

    let start_lm = lm.map(|m| m.start_state()).unwrap_or_default();
    let mut cur = vec![Hyp {
        key: StateKey {
            node: TRIE_ROOT,
            last: NO_LAST,
            committed: false,
            lm: start_lm,
        },
        am: 0.0,
        lm: 0.0,
        word_count: 0,
        total: 0.0,
        chain: NO_CHAIN,
    }];

    let mut merged: HashMap<StateKey, usize> = HashMap::new();
    let mut next: Vec<Hyp> = Vec::new();
    for t in 0..matrix.frames() {
        merged.clear();
        next.clear();
        let row = matrix.row(t);
        for hyp in &cur {
            // (a) blank: stay put, clear the repeat context.
            push_candidate(
                &mut next,
                &mut merged,
                Hyp {
                    key: StateKey {
                        last: NO_LAST,
                        ..hyp.key
                    },
                    am: hyp.am + row[BLANK.index()] as f64,
                    total: beam.fuse(hyp.am + row[BLANK.index()] as f64, hyp.lm, hyp.word_count),
                    ..*hyp
                },
            );
            // (b) repeat of the previous frame's symbol: no trie movement.
            if hyp.key.last != NO_LAST {
                let am = hyp.am + row[hyp.key.last as usize] as f64;
                push_candidate(
                    &mut next,
                    &mut merged,
                    Hyp {
                        am,
                        total: beam.fuse(am, hyp.lm, hyp.word_count),
                        ..*hyp
                    },
                );
            }
            // (c) descend to a child. Emitting the same symbol as the
            // previous frame would collapse, so that child needs a blank
            // first and is skipped here.
            for (idx, &frame_logp) in row.iter().enumerate().skip(1) {
                if idx as u8 == hyp.key.last {
                    continue;
                }
                let sym = Sym::from_index(idx).expect("in range");
                let Some(child) = beam.trie.child(hyp.key.node, sym) else {
                    continue;
                };
                let am = hyp.am + frame_logp as f64;
                let terminals = beam.trie.word_ids(child);
                if terminals.is_empty() {
                    push_candidate(
                        &mut next,
                        &mut merged,
                        Hyp {
                            key: StateKey {
                                node: child,
                                last: idx as u8,
                                committed: hyp.key.committed,
                                lm: hyp.key.lm,
                            },
                            am,
                            total: beam.fuse(am, hyp.lm, hyp.word_count),
                            ..*hyp
                        },
                    );
                } else {
                    // Word boundary: commit every word ending here (ascending
                    // id, so exact ties keep the lowest id) and return to the
                    // root.
                    for &word in terminals {
                        let (lm_state, lm_score) = match beam.lm {
                            Some(model) => {
                                let (state, s) =
                                    model.score_word_id(hyp.key.lm, beam.lm_ids[word as usize]);
                                (state, hyp.lm + s)
                            }
                            None => (hyp.key.lm, hyp.lm),
                        };
                        let chain = beam.arena.len() as u32;
                        beam.arena.push((hyp.chain, word));
                        let word_count = hyp.word_count + 1;
                        push_candidate(
                            &mut next,
                            &mut merged,
                            Hyp {
                                key: StateKey {
                                    node: TRIE_ROOT,
                                    last: idx as u8,
                                    committed: true,
                                    lm: lm_state,
                                },
                                am,
                                lm: lm_score,
                                word_count,
                                total: beam.fuse(am, lm_score, word_count),
                                chain,
                            },
                        );
                    }
                }
            }
        }
        // Stable sort keeps insertion order on ties, making pruning
        // deterministic across runs and thread counts.
        next.sort_by(|a, b| b.total.partial_cmp(&a.total).expect("scores are not NaN"));
        next.truncate(cfg.beam_size);
        let cutoff = next[0].total - cfg.beam_threshold;
        next.retain(|h| h.total >= cutoff);
        std::mem::swap(&mut cur, &mut next);
    }

    // Finalization: root-positioned hypotheses with at least one word.
    let mut finals: Vec<Hyp> = cur
        .iter()
        .filter(|h| h.key.node == TRIE_ROOT && h.word_count > 0)
        .copied()
        .collect();
    let forced = finals.is_empty();
    if forced {
        // No complete parse: keep the best hypothesis, dropping its partial
        // word (the chain only ever holds committed words).
        finals = vec![*cur
            .first()
            .expect("beam is never empty after a pruning pass")];
    }
    if let (Some(model), true) = (lm, cfg.apply_eos) {
        for hyp in &mut finals {
            let (_, eos) = model.score_word_id(hyp.key.lm, model.eos_id());
            hyp.lm += eos;
            hyp.total = beam.fuse(hyp.am, hyp.lm, hyp.word_count);
        }
    }
    let mut best = 0usize;
    for i in 1..finals.len() {
        if finals[i].total > finals[best].total
            || (finals[i].total == finals[best].total
                && beam.words_of(finals[i].chain) < beam.words_of(finals[best].chain))
        {
            best = i;
        }
    }
    let winner = finals[best];
    let word_ids = beam.words_of(winner.chain);
    build_result(lexicon, word_ids, &winner, forced)
}

fn push_candidate(next: &mut Vec<Hyp>, merged: &mut HashMap<StateKey, usize>, hyp: Hyp) {
    match merged.get(&hyp.key) {
        Some(&slot) => {
            // Strict improvement replaces; exact ties keep the incumbent,
            // which arrived earlier in the deterministic extension order.
            if hyp.total > next[slot].total {
                next[slot] = hyp;
            }
        }
        None => {
            merged.insert(hyp.key, next.len());
            next.push(hyp);
        }
    }
}

fn build_result(lexicon: &Lexicon, word_ids: Vec<WordId>, hyp: &Hyp, forced: bool) -> DecodeResult {
    let words: Vec<String> = word_ids
        .iter()
        .map(|&id| lexicon.word(id).to_string())
        .collect();
    let mut romanized: Vec<Sym> = Vec::new();
    for (i, &id) in word_ids.iter().enumerate() {
        if i > 0 {
            romanized.push(crate::alphabet::SEPARATOR);
        }
        romanized.extend_from_slice(lexicon.entry(id).stem());
    }
    DecodeResult {
        words,
        word_count: word_ids.len(),
        word_ids,
        romanized: crate::alphabet::render(&romanized),
        total_score: hyp.total,
        am_score: hyp.am,
        lm_score: hyp.lm,
        forced_finalization: forced,
    }
}

/// Exhaustively scores every word sequence of length `1..=max_words` with
/// the same objective as the beam and returns the argmax (ties to the
/// lexicographically smallest word-id sequence). Guarded against blowup.
pub fn oracle_decode(
    matrix: &EmissionMatrix,
    lexicon: &Lexicon,
    lm: Option<&NGramModel>,
    cfg: &DecodeConfig,
    max_words: usize,
) -> Result<DecodeResult, DecodeError> {
    oracle_decode_top2(matrix, lexicon, lm, cfg, max_words).map(|(result, _)| result)
}

/// [`oracle_decode`] plus the runner-up total score, for margin checks.
pub fn oracle_decode_top2(
    matrix: &EmissionMatrix,
    lexicon: &Lexicon,
    lm: Option<&NGramModel>,
    cfg: &DecodeConfig,
    max_words: usize,
) -> Result<(DecodeResult, Option<f64>), DecodeError> {
    let lex_size = lexicon.len() as u128;
    let mut sequences: u128 = 0;
    let mut power: u128 = 1;
    for _ in 1..=max_words {
        power = power.saturating_mul(lex_size);
        sequences = sequences.saturating_add(power);
    }
    if sequences > 1_000_000 {
        return Err(DecodeError::SearchSpaceTooLarge { sequences });
    }

    let lm_ids: Vec<u32> = match lm {
        Some(model) => (0..lexicon.len())
            .map(|id| model.word_id(lexicon.word(id as WordId)))
            .collect(),
        None => Vec::new(),
    };

    struct Best {
        ids: Vec<WordId>,
        am: f64,
        lm: f64,
        total: f64,
    }
    let mut best: Option<Best> = None;
    let mut runner_up: Option<f64> = None;

    let mut ids: Vec<WordId> = Vec::new();
    let mut spelling: Vec<Sym> = Vec::new();
    for length in 1..=max_words {
        ids.clear();
        ids.resize(length, 0);
        'odometer: loop {
            spelling.clear();
            for &id in &ids {
                spelling.extend_from_slice(&lexicon.entry(id).spelling);
            }
            let am = best_alignment_score(matrix, &spelling);
            // Infeasible sequences are not candidates.
            if am > NEG_INF as f64 {
                let lm_score = match lm {
                    Some(model) => {
                        let mut state = model.start_state();
                        let mut total = 0.0;
                        for &id in &ids {
                            let (next, s) = model.score_word_id(state, lm_ids[id as usize]);
                            state = next;
                            total += s;
                        }
                        if cfg.apply_eos {
                            let (_, eos) = model.score_word_id(state, model.eos_id());
                            total += eos;
                        }
                        total
                    }
                    None => 0.0,
                };
                let total = am + cfg.lm_weight * LN_10 * lm_score + cfg.word_score * length as f64;
                let better = match &best {
                    None => true,
                    Some(b) => total > b.total || (total == b.total && ids < b.ids),
                };
                if better {
                    if let Some(b) = &best {
                        runner_up = Some(match runner_up {
                            Some(r) => r.max(b.total),
                            None => b.total,
                        });
                    }
                    best = Some(Best {
                        ids: ids.clone(),
                        am,
                        lm: lm_score,
                        total,
                    });
                } else {
                    runner_up = Some(match runner_up {
                        Some(r) => r.max(total),
                        None => total,
                    });
                }
            }

            // Advance the odometer (last position fastest).
            for pos in (0..length).rev() {
                ids[pos] += 1;
                if (ids[pos] as usize) < lexicon.len() {
                    continue 'odometer;
                }
                ids[pos] = 0;
            }
            break;
        }
    }

    match best {
        Some(b) => {
            let hyp = Hyp {
                key: StateKey {
                    node: TRIE_ROOT,
                    last: NO_LAST,
                    committed: true,
                    lm: LmState::default(),
                },
                am: b.am,
                lm: b.lm,
                word_count: b.ids.len() as u32,
                total: b.total,
                chain: NO_CHAIN,
            };
            Ok((build_result(lexicon, b.ids, &hyp, false), runner_up))
        }
        None => {
            // Nothing fits in T frames: sentinel score, empty output, flagged.
            let hyp = Hyp {
                key: StateKey {
                    node: TRIE_ROOT,
                    last: NO_LAST,
                    committed: false,
                    lm: LmState::default(),
                },
                am: NEG_INF as f64,
                lm: 0.0,
                word_count: 0,
                total: NEG_INF as f64,
                chain: NO_CHAIN,
            };
            Ok((build_result(lexicon, Vec::new(), &hyp, true), None))
        }
    }
}
