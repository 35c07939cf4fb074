//! The closed canonical symbol set shared by the acoustic vocabulary, the
//! romanizer, lexicons and the decoder: a CTC blank, a word separator, an
//! apostrophe and the 26 lowercase Latin letters.

use std::fmt;

/// Number of canonical symbols, including the blank.
pub const ALPHABET_SIZE: usize = 29;

/// Display labels in vocabulary order.
pub const LABELS: [&str; ALPHABET_SIZE] = [
    "<blank>", "|", "'", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o",
    "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z",
];

/// Index into the canonical alphabet. Ordering follows vocabulary order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u8);

/// CTC blank; never produced by romanization.
pub const BLANK: Sym = Sym(0);
/// Word separator.
pub const SEPARATOR: Sym = Sym(1);
/// Apostrophe.
pub const APOSTROPHE: Sym = Sym(2);

impl Sym {
    pub fn from_index(index: usize) -> Option<Sym> {
        (index < ALPHABET_SIZE).then_some(Sym(index as u8))
    }

    /// Maps a canonical character (`a`-`z`, `'`, `|`) to its symbol.
    /// The blank has no character form.
    pub fn from_char(c: char) -> Option<Sym> {
        match c {
            'a'..='z' => Some(Sym(3 + (c as u8 - b'a'))),
            '\'' => Some(APOSTROPHE),
            '|' => Some(SEPARATOR),
            _ => None,
        }
    }

    pub fn from_label(label: &str) -> Option<Sym> {
        LABELS
            .iter()
            .position(|&l| l == label)
            .map(|i| Sym(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn label(self) -> &'static str {
        LABELS[self.0 as usize]
    }

    /// Character form; `None` for the blank.
    pub fn as_char(self) -> Option<char> {
        match self.0 {
            0 => None,
            1 => Some('|'),
            2 => Some('\''),
            i => Some((b'a' + i - 3) as char),
        }
    }

    pub fn is_blank(self) -> bool {
        self == BLANK
    }

    pub fn is_separator(self) -> bool {
        self == SEPARATOR
    }

    /// Letter or apostrophe: the symbols a script table may target.
    pub fn is_letter_or_apostrophe(self) -> bool {
        self.0 >= 2
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// All non-blank symbols in vocabulary order.
pub fn producible_symbols() -> impl Iterator<Item = Sym> {
    (1..ALPHABET_SIZE).map(|i| Sym(i as u8))
}

/// Compact character rendering, e.g. `[c, a, SEPARATOR]` -> `"ca|"`.
/// Blanks are not renderable and must not appear.
pub fn render(symbols: &[Sym]) -> String {
    symbols
        .iter()
        .map(|s| s.as_char().expect("blank symbol is not renderable"))
        .collect()
}

/// Space-separated label rendering used by lexicon files, e.g. `"c a s a |"`.
pub fn render_spelled(symbols: &[Sym]) -> String {
    symbols
        .iter()
        .map(|s| s.label())
        .collect::<Vec<_>>()
        .join(" ")
}
