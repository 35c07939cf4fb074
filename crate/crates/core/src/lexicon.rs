//! Word -> romanized-spelling lexicons and their prefix-trie compilation.
//!
//! Every spelling ends with exactly one separator symbol, giving the decoder
//! an explicit word-boundary acoustic event. Romanization is many-to-one, so
//! distinct words may share a spelling; the trie keeps all of their ids on
//! the same terminal node.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::alphabet::{self, Sym, ALPHABET_SIZE, SEPARATOR};
use crate::romanizer::{self, RomanScheme, RomanizeStats};

pub type WordId = u32;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("no input word survived romanization")]
    EmptyLexicon,
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: duplicate word {word:?}")]
    DuplicateWord { line: usize, word: String },
}

/// One word and its romanized spelling (letters/apostrophes plus the terminal
/// separator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub spelling: Vec<Sym>,
}

impl LexiconEntry {
    /// Spelling without the terminal separator.
    pub fn stem(&self) -> &[Sym] {
        &self.spelling[..self.spelling.len() - 1]
    }
}

/// Immutable list of entries with unique surface words, in first-occurrence
/// order.
#[derive(Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    word_index: HashMap<String, WordId>,
    /// Input words dropped because their romanization was empty.
    dropped_words: usize,
}

impl Lexicon {
    /// Builds a lexicon from raw words. Duplicates (case-sensitive) collapse
    /// to their first occurrence; words that romanize to nothing are dropped
    /// and counted. Errors if nothing survives.
    pub fn build<I, S>(words: I, scheme: &RomanScheme) -> Result<Lexicon, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries = Vec::new();
        let mut word_index = HashMap::new();
        let mut dropped = 0usize;
        let mut stats = RomanizeStats::default();
        for word in words {
            let word = word.as_ref();
            if word_index.contains_key(word) {
                continue;
            }
            let stem = match romanizer::romanize_word_with_stats(word, scheme, &mut stats) {
                Ok(stem) => stem,
                Err(_) => {
                    dropped += 1;
                    continue;
                }
            };
            if stem.is_empty() {
                dropped += 1;
                continue;
            }
            let mut spelling = stem;
            spelling.push(SEPARATOR);
            word_index.insert(word.to_string(), entries.len() as WordId);
            entries.push(LexiconEntry {
                word: word.to_string(),
                spelling,
            });
        }
        if entries.is_empty() {
            return Err(LexiconError::EmptyLexicon);
        }
        Ok(Lexicon {
            entries,
            word_index,
            dropped_words: dropped,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn entry(&self, id: WordId) -> &LexiconEntry {
        &self.entries[id as usize]
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.entries[id as usize].word
    }

    pub fn word_id(&self, word: &str) -> Option<WordId> {
        self.word_index.get(word).copied()
    }

    pub fn dropped_words(&self) -> usize {
        self.dropped_words
    }

    /// One `word<TAB>space-separated-symbols` line per entry, in entry order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&entry.word);
            out.push('\t');
            out.push_str(&alphabet::render_spelled(&entry.spelling));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Lexicon::serialize`]. Validates the spelling grammar:
    /// non-empty, letters/apostrophes only, exactly one separator at the end.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut entries = Vec::new();
        let mut word_index = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let (word, spelled) = raw
                .split_once('\t')
                .ok_or_else(|| LexiconError::ParseError {
                    line: line_no,
                    message: "expected `word<TAB>symbols`".to_string(),
                })?;
            if word.is_empty() {
                return Err(LexiconError::ParseError {
                    line: line_no,
                    message: "empty word field".to_string(),
                });
            }
            if word_index.contains_key(word) {
                return Err(LexiconError::DuplicateWord {
                    line: line_no,
                    word: word.to_string(),
                });
            }
            let spelling = parse_spelling(spelled).map_err(|message| LexiconError::ParseError {
                line: line_no,
                message,
            })?;
            word_index.insert(word.to_string(), entries.len() as WordId);
            entries.push(LexiconEntry {
                word: word.to_string(),
                spelling,
            });
        }
        if entries.is_empty() {
            return Err(LexiconError::EmptyLexicon);
        }
        Ok(Lexicon {
            entries,
            word_index,
            dropped_words: 0,
        })
    }
}

impl fmt::Debug for Lexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lexicon")
            .field("entries", &self.entries.len())
            .field("dropped_words", &self.dropped_words)
            .finish()
    }
}

fn parse_spelling(spelled: &str) -> Result<Vec<Sym>, String> {
    let mut spelling = Vec::new();
    for token in spelled.split_whitespace() {
        let sym = Sym::from_label(token).ok_or_else(|| format!("unknown symbol {token:?}"))?;
        if sym.is_blank() {
            return Err("spelling cannot contain the blank".to_string());
        }
        spelling.push(sym);
    }
    match spelling.iter().filter(|s| s.is_separator()).count() {
        0 => return Err("spelling must end with `|`".to_string()),
        1 if spelling.last() == Some(&SEPARATOR) => {}
        _ => return Err("spelling must contain exactly one `|`, at the end".to_string()),
    }
    if spelling.len() < 2 {
        return Err("spelling is empty before the terminal `|`".to_string());
    }
    Ok(spelling)
}

/// Prefix trie over spellings. Children are a fixed 29-way branch per node
/// (the alphabet is tiny, array indexing beats hashing); terminal word ids
/// live on the node their spelling ends at.
pub struct LexiconTrie {
    children: Vec<[u32; ALPHABET_SIZE]>,
    words: Vec<Vec<WordId>>,
}

pub const TRIE_ROOT: u32 = 0;
const NO_CHILD: u32 = u32::MAX;

impl LexiconTrie {
    pub fn build(lexicon: &Lexicon) -> LexiconTrie {
        let mut trie = LexiconTrie {
            children: vec![[NO_CHILD; ALPHABET_SIZE]],
            words: vec![Vec::new()],
        };
        for (id, entry) in lexicon.entries().iter().enumerate() {
            let mut node = TRIE_ROOT;
            for &sym in &entry.spelling {
                let slot = trie.children[node as usize][sym.index()];
                node = if slot == NO_CHILD {
                    let new_id = trie.children.len() as u32;
                    trie.children.push([NO_CHILD; ALPHABET_SIZE]);
                    trie.words.push(Vec::new());
                    trie.children[node as usize][sym.index()] = new_id;
                    new_id
                } else {
                    slot
                };
            }
            trie.words[node as usize].push(id as WordId);
        }
        // Homophones commit in insertion order, which equals ascending id.
        for ids in &mut trie.words {
            ids.sort_unstable();
        }
        trie
    }

    pub fn child(&self, node: u32, sym: Sym) -> Option<u32> {
        let next = self.children[node as usize][sym.index()];
        (next != NO_CHILD).then_some(next)
    }

    /// Word ids terminating exactly at `node`.
    pub fn word_ids(&self, node: u32) -> &[WordId] {
        &self.words[node as usize]
    }

    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    /// Ids of the words whose full spelling equals `spelling`; empty for
    /// prefixes and absent strings.
    pub fn lookup(&self, spelling: &[Sym]) -> &[WordId] {
        let mut node = TRIE_ROOT;
        for &sym in spelling {
            match self.child(node, sym) {
                Some(next) => node = next,
                None => return &[],
            }
        }
        self.word_ids(node)
    }
}

/// Reads a word list: one word per line; lines with several whitespace-
/// separated tokens contribute each token in order.
pub fn read_word_list(text: &str) -> Vec<String> {
    text.lines()
        .flat_map(str::split_whitespace)
        .map(str::to_string)
        .collect()
}

/// Reads a `word<TAB>count` frequency file with positive integer counts.
pub fn read_word_frequencies(text: &str) -> Result<Vec<(String, u64)>, LexiconError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (word, count) = raw
            .split_once('\t')
            .ok_or_else(|| LexiconError::ParseError {
                line: line_no,
                message: "expected `word<TAB>count`".to_string(),
            })?;
        let count: u64 = count.trim().parse().map_err(|_| LexiconError::ParseError {
            line: line_no,
            message: format!("invalid count {count:?}"),
        })?;
        if word.is_empty() || count == 0 {
            return Err(LexiconError::ParseError {
                line: line_no,
                message: "word must be non-empty and count positive".to_string(),
            });
        }
        out.push((word.to_string(), count));
    }
    Ok(out)
}
