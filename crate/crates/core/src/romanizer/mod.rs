//! Romanization of arbitrary UTF-8 text into the closed canonical alphabet.
//!
//! The scheme is table-driven: text is lowercased and canonically decomposed,
//! then matched greedily (longest source sequence first) against per-script
//! codepoint tables. Unmatched combining marks are folded away, unmatched
//! non-alphabetic codepoints (digits, punctuation, symbols) are removed, and
//! unmatched alphabetic codepoints from unsupported scripts follow the
//! configured fallback policy.

mod tables;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::alphabet::{self, Sym, SEPARATOR};

#[derive(Debug, Error)]
pub enum RomanizeError {
    #[error("input word is empty or whitespace-only")]
    EmptyInput,
    #[error("input word contains whitespace or a separator: {0:?}")]
    EmbeddedSeparator(String),
    #[error("failed to read corpus: {0}")]
    IoFailure(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("table entry {entry:?}: target {target:?} contains non-canonical character {bad:?}")]
    BadTarget {
        entry: String,
        target: String,
        bad: char,
    },
    #[error("table entry has empty source")]
    EmptySource,
    #[error("failed to read table file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// What to do with an alphabetic codepoint no table covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FallbackPolicy {
    /// Remove the codepoint.
    #[default]
    Drop,
    /// Substitute a single apostrophe.
    Apostrophe,
}

/// Counters accumulated over a romanization run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RomanizeStats {
    /// Alphabetic codepoints that hit the fallback policy.
    pub unmapped_codepoints: u64,
}

impl RomanizeStats {
    pub fn merge(&mut self, other: RomanizeStats) {
        self.unmapped_codepoints += other.unmapped_codepoints;
    }
}

/// One table mapping: source codepoints (post-normalization) to canonical
/// symbols.
type TableEntry = (Vec<char>, Vec<Sym>);

/// Codepoint-sequence to canonical-symbol mapping with a fallback policy.
/// Immutable once built; shareable across threads.
pub struct RomanScheme {
    // Keyed by first codepoint; entries sorted longest source first.
    entries: HashMap<char, Vec<TableEntry>>,
    max_source_len: usize,
    fallback: FallbackPolicy,
}

impl RomanScheme {
    /// Empty scheme with no tables. Only useful as a base for custom tables.
    pub fn empty() -> Self {
        let mut scheme = RomanScheme {
            entries: HashMap::new(),
            max_source_len: 1,
            fallback: FallbackPolicy::default(),
        };
        tables::install_core(&mut scheme);
        scheme
    }

    /// Default scheme: canonical identities plus the built-in Latin, Cyrillic,
    /// Greek and Devanagari tables.
    pub fn builtin() -> Self {
        let mut scheme = Self::empty();
        tables::install_latin(&mut scheme);
        tables::install_cyrillic(&mut scheme);
        tables::install_greek(&mut scheme);
        tables::install_devanagari(&mut scheme);
        scheme
    }

    pub fn with_fallback(mut self, fallback: FallbackPolicy) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn fallback(&self) -> FallbackPolicy {
        self.fallback
    }

    /// Adds one mapping. The source is normalized the same way input text is
    /// (lowercase, canonical decomposition) so table authors can write either
    /// form. An empty target means "delete".
    pub fn add_entry(&mut self, source: &str, target: &str) -> Result<(), TableError> {
        let source_cps: Vec<char> = source
            .chars()
            .flat_map(char::to_lowercase)
            .collect::<String>()
            .nfd()
            .collect();
        if source_cps.is_empty() {
            return Err(TableError::EmptySource);
        }
        let mut target_syms = Vec::with_capacity(target.len());
        for c in target.chars() {
            let sym = Sym::from_char(c)
                .filter(|s| s.is_letter_or_apostrophe())
                .ok_or(TableError::BadTarget {
                    entry: source.to_string(),
                    target: target.to_string(),
                    bad: c,
                })?;
            target_syms.push(sym);
        }
        self.max_source_len = self.max_source_len.max(source_cps.len());
        let bucket = self.entries.entry(source_cps[0]).or_default();
        // Last insertion wins on equal sources; user tables override built-ins.
        bucket.retain(|(src, _)| *src != source_cps);
        bucket.push((source_cps, target_syms));
        bucket.sort_by_key(|entry| std::cmp::Reverse(entry.0.len()));
        Ok(())
    }

    /// Loads a TSV table: `source-codepoints<TAB>target-letters` per line,
    /// `#` starts a comment, an empty target field deletes the source.
    pub fn load_table_str(&mut self, text: &str, path_label: &str) -> Result<(), TableError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches(['\r', '\n']);
            let content = line.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let mut fields = content.splitn(2, '\t');
            let source = fields.next().unwrap_or("").trim();
            let target = match fields.next() {
                Some(t) => t.trim(),
                None => {
                    return Err(TableError::Parse {
                        path: path_label.to_string(),
                        line: idx + 1,
                        message: "expected `source<TAB>target`".to_string(),
                    })
                }
            };
            if source.is_empty() {
                return Err(TableError::Parse {
                    path: path_label.to_string(),
                    line: idx + 1,
                    message: "empty source field".to_string(),
                });
            }
            self.add_entry(source, target)
                .map_err(|e| TableError::Parse {
                    path: path_label.to_string(),
                    line: idx + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(())
    }

    pub fn load_table_file(&mut self, path: &Path) -> Result<(), TableError> {
        let text = std::fs::read_to_string(path).map_err(|source| TableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.load_table_str(&text, &path.display().to_string())
    }

    fn lookup<'a>(&'a self, cps: &[char]) -> Option<(usize, &'a [Sym])> {
        let bucket = self.entries.get(&cps[0])?;
        bucket
            .iter()
            .find(|(src, _)| cps.len() >= src.len() && cps[..src.len()] == src[..])
            .map(|(src, syms)| (src.len(), syms.as_slice()))
    }

    /// Romanizes a single token (no whitespace, no separator). The result can
    /// be empty when every codepoint is removed.
    fn map_token(&self, token: &str, stats: &mut RomanizeStats) -> Vec<Sym> {
        let cps: Vec<char> = token
            .chars()
            .flat_map(char::to_lowercase)
            .collect::<String>()
            .nfd()
            .collect();
        let mut out = Vec::with_capacity(cps.len());
        let mut i = 0;
        while i < cps.len() {
            if let Some((len, syms)) = self.lookup(&cps[i..]) {
                out.extend_from_slice(syms);
                i += len;
            } else if is_combining_mark(cps[i]) {
                // Diacritic folding: unmapped combining marks vanish.
                i += 1;
            } else if !cps[i].is_alphabetic() {
                // Digits, punctuation and symbols are removed outright.
                i += 1;
            } else {
                stats.unmapped_codepoints += 1;
                if self.fallback == FallbackPolicy::Apostrophe {
                    out.push(alphabet::APOSTROPHE);
                }
                i += 1;
            }
        }
        out
    }
}

impl fmt::Debug for RomanScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RomanScheme")
            .field(
                "entries",
                &self.entries.values().map(Vec::len).sum::<usize>(),
            )
            .field("fallback", &self.fallback)
            .finish()
    }
}

/// Text over the canonical alphabet. Guaranteed to contain no blank, no
/// leading or trailing separator and no two consecutive separators.
#[derive(Clone, PartialEq, Eq)]
pub struct RomanizedText {
    symbols: Vec<Sym>,
    source: String,
}

impl RomanizedText {
    pub fn symbols(&self) -> &[Sym] {
        &self.symbols
    }

    /// The original input, retained for provenance.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn render(&self) -> String {
        alphabet::render(&self.symbols)
    }

    /// Symbols with a trailing separator appended, the shape the decoder and
    /// synthesizer expect for a complete utterance (every word acoustically
    /// ends in a separator). Empty text stays empty.
    pub fn with_trailing_separator(&self) -> Vec<Sym> {
        let mut syms = self.symbols.clone();
        if !syms.is_empty() {
            syms.push(SEPARATOR);
        }
        syms
    }

    /// Builds from raw symbols, enforcing separator discipline by collapsing
    /// runs and trimming the ends. Blanks are rejected.
    pub fn from_symbols(symbols: impl IntoIterator<Item = Sym>) -> RomanizedText {
        let mut out: Vec<Sym> = Vec::new();
        for sym in symbols {
            assert!(!sym.is_blank(), "romanized text cannot contain the blank");
            if sym.is_separator() && out.last().is_none_or(|s| s.is_separator()) {
                continue;
            }
            out.push(sym);
        }
        while matches!(out.last(), Some(s) if s.is_separator()) {
            out.pop();
        }
        let source = alphabet::render(&out);
        RomanizedText {
            symbols: out,
            source,
        }
    }
}

impl fmt::Debug for RomanizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RomanizedText({:?})", self.render())
    }
}

impl fmt::Display for RomanizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn is_token_separator(c: char) -> bool {
    c.is_whitespace() || c == '|'
}

/// Romanizes a single word into letters and apostrophes. The word must be
/// non-empty and must not contain whitespace or separators; the result may be
/// empty when every codepoint is removed.
pub fn romanize_word(word: &str, scheme: &RomanScheme) -> Result<Vec<Sym>, RomanizeError> {
    romanize_word_with_stats(word, scheme, &mut RomanizeStats::default())
}

pub fn romanize_word_with_stats(
    word: &str,
    scheme: &RomanScheme,
    stats: &mut RomanizeStats,
) -> Result<Vec<Sym>, RomanizeError> {
    if word.trim().is_empty() {
        return Err(RomanizeError::EmptyInput);
    }
    if word.chars().any(is_token_separator) {
        return Err(RomanizeError::EmbeddedSeparator(word.to_string()));
    }
    Ok(scheme.map_token(word, stats))
}

/// Romanizes free text: whitespace runs become single separators, words map
/// as in [`romanize_word`], words that romanize to nothing disappear. Total
/// and idempotent on its own output.
pub fn romanize_text(text: &str, scheme: &RomanScheme) -> RomanizedText {
    romanize_text_with_stats(text, scheme, &mut RomanizeStats::default())
}

pub fn romanize_text_with_stats(
    text: &str,
    scheme: &RomanScheme,
    stats: &mut RomanizeStats,
) -> RomanizedText {
    let mut symbols: Vec<Sym> = Vec::with_capacity(text.len());
    for token in text.split(is_token_separator) {
        if token.is_empty() {
            continue;
        }
        let mapped = scheme.map_token(token, stats);
        if mapped.is_empty() {
            continue;
        }
        if !symbols.is_empty() {
            symbols.push(SEPARATOR);
        }
        symbols.extend(mapped);
    }
    let source = text.to_string();
    RomanizedText { symbols, source }
}

/// Romanizes every line of `corpus` and returns exact per-symbol counts.
/// The returned set is always a subset of the canonical alphabet minus the
/// blank.
pub fn audit_vocabulary(
    corpus: impl BufRead,
    scheme: &RomanScheme,
) -> Result<BTreeMap<Sym, u64>, RomanizeError> {
    let mut counts: BTreeMap<Sym, u64> = BTreeMap::new();
    let mut stats = RomanizeStats::default();
    for line in corpus.lines() {
        let line = line?;
        for &sym in romanize_text_with_stats(&line, scheme, &mut stats).symbols() {
            *counts.entry(sym).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn scheme() -> RomanScheme {
        RomanScheme::builtin()
    }

    fn roman(text: &str) -> String {
        romanize_text(text, &scheme()).render()
    }

    #[test]
    fn ascii_letters_are_fixed_points() {
        let syms = romanize_word("abc", &scheme()).unwrap();
        assert_eq!(alphabet::render(&syms), "abc");
    }

    #[test]
    fn diacritics_fold_to_base_letters() {
        let syms = romanize_word("á", &scheme()).unwrap();
        assert_eq!(alphabet::render(&syms), "a");
        for accented in ["à", "â", "å", "ä", "ã", "Á"] {
            let syms = romanize_word(accented, &scheme()).unwrap();
            assert_eq!(alphabet::render(&syms), "a", "input {accented:?}");
        }
    }

    #[test]
    fn cyrillic_romanizes() {
        let syms = romanize_word("Привет", &scheme()).unwrap();
        assert_eq!(alphabet::render(&syms), "privet");
        let syms = romanize_word("йогурт", &scheme()).unwrap();
        assert_eq!(alphabet::render(&syms), "yogurt");
        assert_eq!(roman("Москва"), "moskva");
        assert_eq!(roman("хорошо"), "khorosho");
        assert_eq!(roman("щука объект"), "shchuka|obekt");
        assert_eq!(roman("Київ"), "kiyiv");
        assert_eq!(roman("ещё"), "eshche"); // е maps uniformly, ё folds to е
    }

    #[test]
    fn greek_romanizes() {
        assert_eq!(roman("Ελλάδα"), "ellada");
        assert_eq!(roman("Θεσσαλονίκη"), "thessaloniki");
        assert_eq!(roman("ψυχή"), "psychi");
    }

    #[test]
    fn devanagari_romanizes_with_virama_and_matras() {
        assert_eq!(roman("नमस्ते"), "namaste");
        assert_eq!(roman("हिंदी"), "hindii");
        assert_eq!(roman("भारत"), "bhaarata");
        assert_eq!(roman("ज़रा"), "zaraa"); // nukta form survives decomposition
        assert_eq!(roman("क्या"), "kyaa"); // conjunct via virama
    }

    #[test]
    fn latin_letters_without_decompositions_map() {
        assert_eq!(roman("straße"), "strasse");
        assert_eq!(roman("Łódź"), "lodz");
        assert_eq!(roman("œuf søster"), "oeuf|soster");
        assert_eq!(roman("ŋaŋa"), "nganga");
    }

    #[test]
    fn text_separator_discipline() {
        assert_eq!(roman("Él  corre."), "el|corre");
        assert_eq!(roman(""), "");
        assert_eq!(roman("don't"), "don't");
        assert_eq!(roman("  hola  "), "hola");
        assert_eq!(roman("… , !"), "");
    }

    #[test]
    fn digits_and_punctuation_are_removed() {
        assert_eq!(roman("a1b2c3"), "abc");
        assert_eq!(roman("3.14"), "");
    }

    #[test]
    fn empty_word_is_an_error() {
        assert!(matches!(
            romanize_word("", &scheme()),
            Err(RomanizeError::EmptyInput)
        ));
        assert!(matches!(
            romanize_word("   ", &scheme()),
            Err(RomanizeError::EmptyInput)
        ));
        assert!(matches!(
            romanize_word("a b", &scheme()),
            Err(RomanizeError::EmbeddedSeparator(_))
        ));
    }

    #[test]
    fn fallback_policy_applies_to_unsupported_scripts() {
        let mut stats = RomanizeStats::default();
        let dropped = romanize_text_with_stats("漢字", &scheme(), &mut stats);
        assert!(dropped.is_empty());
        assert_eq!(stats.unmapped_codepoints, 2);

        let apo = RomanScheme::builtin().with_fallback(FallbackPolicy::Apostrophe);
        let replaced = romanize_text("漢", &apo);
        assert_eq!(replaced.render(), "'");
    }

    #[test]
    fn idempotent_on_own_output() {
        let s = scheme();
        for text in ["Él  corre.", "Привет мир", "नमस्ते", "a|b", "don't stop"]
        {
            let once = romanize_text(text, &s);
            let twice = romanize_text(&once.render(), &s);
            assert_eq!(once.symbols(), twice.symbols(), "input {text:?}");
        }
    }

    #[test]
    fn audit_counts_are_exact() {
        let s = scheme();
        let counts = audit_vocabulary(Cursor::new("ab\nba\n"), &s).unwrap();
        assert_eq!(counts.len(), 2);
        assert_eq!(counts[&Sym::from_char('a').unwrap()], 2);
        assert_eq!(counts[&Sym::from_char('b').unwrap()], 2);

        let counts = audit_vocabulary(Cursor::new("a b\n"), &s).unwrap();
        assert_eq!(counts[&SEPARATOR], 1);
        assert_eq!(counts.len(), 3);
    }

    #[test]
    fn user_table_overrides_builtin() {
        let mut s = RomanScheme::builtin();
        s.load_table_str("х\th # harder transliteration\nщ\tsch\n", "inline")
            .unwrap();
        assert_eq!(romanize_text("хщ", &s).render(), "hsch");
    }

    #[test]
    fn table_rejects_non_canonical_targets() {
        let mut s = RomanScheme::empty();
        let err = s.load_table_str("x\tX7\n", "inline").unwrap_err();
        assert!(matches!(err, TableError::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_target_deletes() {
        let mut s = RomanScheme::builtin();
        s.load_table_str("q\t\n", "inline").unwrap();
        assert_eq!(romanize_text("quo", &s).render(), "uo");
    }
}
