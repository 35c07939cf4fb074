//! Zero-shot speech decoding toolkit: romanize text in any script into a
//! closed 29-symbol alphabet, build word-to-romanization lexicons and n-gram
//! language models from raw word lists, and decode CTC emission matrices
//! into words via lexicon-constrained beam search with shallow LM fusion,
//! plus the evaluation and tuning harness around it.

pub mod alphabet;
pub mod decoder;
pub mod emissions;
pub mod eval;
pub mod lexicon;
pub mod ngram;
pub mod romanizer;

pub use alphabet::{Sym, ALPHABET_SIZE, APOSTROPHE, BLANK, SEPARATOR};
pub use decoder::{
    beam_decode, best_alignment_score, greedy_decode, oracle_decode, oracle_decode_top2,
    DecodeConfig, DecodeError, DecodeResult,
};
pub use emissions::{derive_seed, synthesize, EmissionError, EmissionMatrix, NEG_INF};
pub use eval::{
    cer, edit_distance, evaluate_corpus, grid_search, text_amount_sweep, DevUtterance, EvalError,
    EvalReport, GridPoint, SweepCorpus, SweepRow, SweepSettings, TuneResult,
};
pub use lexicon::{Lexicon, LexiconEntry, LexiconError, LexiconTrie, WordId, TRIE_ROOT};
pub use ngram::{LmState, NGramError, NGramModel, TrainingData, BOS, EOS, UNK};
pub use romanizer::{
    audit_vocabulary, romanize_text, romanize_text_with_stats, romanize_word,
    romanize_word_with_stats, FallbackPolicy, RomanScheme, RomanizeError, RomanizeStats,
    RomanizedText, TableError,
};
