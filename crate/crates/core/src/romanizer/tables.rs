//! Built-in script tables. All source strings are written in the form they
//! take after lowercasing and canonical decomposition, since that is what the
//! lookup engine sees.

use super::RomanScheme;

/// Identity mappings for the canonical characters themselves plus the common
/// typographic apostrophes. These make romanization idempotent on its own
/// output.
pub(super) fn install_core(scheme: &mut RomanScheme) {
    for c in 'a'..='z' {
        let s = c.to_string();
        scheme.add_entry(&s, &s).unwrap();
    }
    scheme.add_entry("'", "'").unwrap();
    // Right single quote, modifier apostrophe, okina, modifier prime.
    for apo in ["\u{2019}", "\u{2018}", "\u{02BC}", "\u{02BB}", "\u{02B9}"] {
        scheme.add_entry(apo, "'").unwrap();
    }
}

/// Latin letters that do not decompose into base + combining mark, so the
/// generic diacritic folding never reaches them.
const LATIN: &[(&str, &str)] = &[
    ("\u{00df}", "ss"), // ß
    ("\u{00e6}", "ae"), // æ
    ("\u{0153}", "oe"), // œ
    ("\u{00f8}", "o"),  // ø
    ("\u{0111}", "d"),  // đ
    ("\u{00f0}", "d"),  // ð
    ("\u{00fe}", "th"), // þ
    ("\u{0142}", "l"),  // ł
    ("\u{014b}", "ng"), // ŋ
    ("\u{0127}", "h"),  // ħ
    ("\u{0131}", "i"),  // ı
    ("\u{0133}", "ij"), // ĳ
    ("\u{017f}", "s"),  // ſ
    ("\u{0138}", "k"),  // ĸ
    // Extended Latin letters common in African and phonetic orthographies.
    ("\u{0254}", "o"),  // ɔ
    ("\u{025b}", "e"),  // ɛ
    ("\u{0259}", "e"),  // ə
    ("\u{018f}", "e"),  // Ə lowercases to ə, kept for safety
    ("\u{0263}", "g"),  // ɣ
    ("\u{0294}", "'"),  // ʔ
    ("\u{0253}", "b"),  // ɓ
    ("\u{0257}", "d"),  // ɗ
    ("\u{0199}", "k"),  // ƙ
    ("\u{01b4}", "y"),  // ƴ
    ("\u{028b}", "v"),  // ʋ
    ("\u{0272}", "ny"), // ɲ
    ("\u{014a}", "ng"), // Ŋ (lowercases to ŋ)
    ("\u{0283}", "sh"), // ʃ
    ("\u{0292}", "zh"), // ʒ
    ("\u{026a}", "i"),  // ɪ
    ("\u{028a}", "u"),  // ʊ
    ("\u{0251}", "a"),  // ɑ
    ("\u{0268}", "i"),  // ɨ
    ("\u{0289}", "u"),  // ʉ
];

pub(super) fn install_latin(scheme: &mut RomanScheme) {
    for (src, dst) in LATIN {
        scheme.add_entry(src, dst).unwrap();
    }
}

/// Cyrillic. Entries whose precomposed form decomposes (й, ё, ї, ў, ...) are
/// written as base + combining mark sequences.
const CYRILLIC: &[(&str, &str)] = &[
    ("а", "a"),
    ("б", "b"),
    ("в", "v"),
    ("г", "g"),
    ("д", "d"),
    ("е", "e"),
    ("ж", "zh"),
    ("з", "z"),
    ("и", "i"),
    ("и\u{0306}", "y"), // й
    ("к", "k"),
    ("л", "l"),
    ("м", "m"),
    ("н", "n"),
    ("о", "o"),
    ("п", "p"),
    ("р", "r"),
    ("с", "s"),
    ("т", "t"),
    ("у", "u"),
    ("у\u{0306}", "u"), // ў
    ("ф", "f"),
    ("х", "kh"),
    ("ц", "ts"),
    ("ч", "ch"),
    ("ш", "sh"),
    ("щ", "shch"),
    ("ъ", ""),
    ("ы", "y"),
    ("ь", ""),
    ("э", "e"),
    ("ю", "yu"),
    ("я", "ya"),
    // Ukrainian, Belarusian.
    ("і", "i"),
    ("і\u{0308}", "yi"), // ї
    ("є", "ye"),
    ("ґ", "g"),
    // South Slavic.
    ("ђ", "dj"),
    ("ј", "j"),
    ("љ", "lj"),
    ("њ", "nj"),
    ("ћ", "c"),
    ("џ", "dz"),
    ("ѓ", "gj"),
    ("ќ", "kj"),
    ("ѕ", "dz"),
    // Historic letters that still appear in word lists.
    ("ѣ", "e"),
    ("ѳ", "f"),
    ("ѵ", "i"),
    ("ѡ", "o"),
];

pub(super) fn install_cyrillic(scheme: &mut RomanScheme) {
    for (src, dst) in CYRILLIC {
        scheme.add_entry(src, dst).unwrap();
    }
}

const GREEK: &[(&str, &str)] = &[
    ("α", "a"),
    ("β", "v"),
    ("γ", "g"),
    ("δ", "d"),
    ("ε", "e"),
    ("ζ", "z"),
    ("η", "i"),
    ("θ", "th"),
    ("ι", "i"),
    ("κ", "k"),
    ("λ", "l"),
    ("μ", "m"),
    ("ν", "n"),
    ("ξ", "x"),
    ("ο", "o"),
    ("π", "p"),
    ("ρ", "r"),
    ("σ", "s"),
    ("ς", "s"),
    ("τ", "t"),
    ("υ", "y"),
    ("φ", "f"),
    ("χ", "ch"),
    ("ψ", "ps"),
    ("ω", "o"),
    ("ϐ", "v"),
    ("ϑ", "th"),
    ("ϰ", "k"),
    ("ϱ", "r"),
    ("ϲ", "s"),
    ("ϕ", "f"),
];

pub(super) fn install_greek(scheme: &mut RomanScheme) {
    for (src, dst) in GREEK {
        scheme.add_entry(src, dst).unwrap();
    }
}

// Devanagari is an abugida: a bare consonant carries an inherent "a", a
// following vowel sign replaces it and a following virama suppresses it. The
// engine stays purely table-driven by expanding every consonant x {bare,
// virama, vowel sign} combination into a multi-codepoint entry.

const DEVANAGARI_VOWELS: &[(&str, &str)] = &[
    ("\u{0905}", "a"),   // अ
    ("\u{0906}", "aa"),  // आ
    ("\u{0907}", "i"),   // इ
    ("\u{0908}", "ii"),  // ई
    ("\u{0909}", "u"),   // उ
    ("\u{090a}", "uu"),  // ऊ
    ("\u{090b}", "ri"),  // ऋ
    ("\u{0960}", "rii"), // ॠ
    ("\u{090c}", "li"),  // ऌ
    ("\u{0961}", "lii"), // ॡ
    ("\u{090d}", "e"),   // ऍ
    ("\u{090e}", "e"),   // ऎ
    ("\u{090f}", "e"),   // ए
    ("\u{0910}", "ai"),  // ऐ
    ("\u{0911}", "o"),   // ऑ
    ("\u{0912}", "o"),   // ऒ
    ("\u{0913}", "o"),   // ओ
    ("\u{0914}", "au"),  // औ
];

/// (consonant codepoints, romanized base). Nukta forms are listed decomposed,
/// matching the post-decomposition text the engine sees.
const DEVANAGARI_CONSONANTS: &[(&str, &str)] = &[
    ("\u{0915}", "k"),
    ("\u{0916}", "kh"),
    ("\u{0917}", "g"),
    ("\u{0918}", "gh"),
    ("\u{0919}", "n"),
    ("\u{091a}", "ch"),
    ("\u{091b}", "chh"),
    ("\u{091c}", "j"),
    ("\u{091d}", "jh"),
    ("\u{091e}", "n"),
    ("\u{091f}", "t"),
    ("\u{0920}", "th"),
    ("\u{0921}", "d"),
    ("\u{0922}", "dh"),
    ("\u{0923}", "n"),
    ("\u{0924}", "t"),
    ("\u{0925}", "th"),
    ("\u{0926}", "d"),
    ("\u{0927}", "dh"),
    ("\u{0928}", "n"),
    ("\u{092a}", "p"),
    ("\u{092b}", "ph"),
    ("\u{092c}", "b"),
    ("\u{092d}", "bh"),
    ("\u{092e}", "m"),
    ("\u{092f}", "y"),
    ("\u{0930}", "r"),
    ("\u{0932}", "l"),
    ("\u{0933}", "l"),
    ("\u{0935}", "v"),
    ("\u{0936}", "sh"),
    ("\u{0937}", "sh"),
    ("\u{0938}", "s"),
    ("\u{0939}", "h"),
    // Nukta forms, decomposed: base consonant + U+093C.
    ("\u{0915}\u{093c}", "q"),  // क़
    ("\u{0916}\u{093c}", "kh"), // ख़
    ("\u{0917}\u{093c}", "g"),  // ग़
    ("\u{091c}\u{093c}", "z"),  // ज़
    ("\u{0921}\u{093c}", "r"),  // ड़
    ("\u{0922}\u{093c}", "rh"), // ढ़
    ("\u{092b}\u{093c}", "f"),  // फ़
    ("\u{092f}\u{093c}", "y"),  // य़
    ("\u{0928}\u{093c}", "n"),  // ऩ
    ("\u{0930}\u{093c}", "r"),  // ऱ
    ("\u{0933}\u{093c}", "l"),  // ऴ
];

const DEVANAGARI_MATRAS: &[(&str, &str)] = &[
    ("\u{093e}", "aa"),  // ा
    ("\u{093f}", "i"),   // ि
    ("\u{0940}", "ii"),  // ी
    ("\u{0941}", "u"),   // ु
    ("\u{0942}", "uu"),  // ू
    ("\u{0943}", "ri"),  // ृ
    ("\u{0944}", "rii"), // ॄ
    ("\u{0962}", "li"),  // ॢ
    ("\u{0963}", "lii"), // ॣ
    ("\u{0945}", "e"),   // ॅ
    ("\u{0946}", "e"),   // ॆ
    ("\u{0947}", "e"),   // े
    ("\u{0948}", "ai"),  // ै
    ("\u{0949}", "o"),   // ॉ
    ("\u{094a}", "o"),   // ॊ
    ("\u{094b}", "o"),   // ो
    ("\u{094c}", "au"),  // ौ
];

const DEVANAGARI_VIRAMA: &str = "\u{094d}";

const DEVANAGARI_SIGNS: &[(&str, &str)] = &[
    ("\u{0902}", "n"),  // anusvara
    ("\u{0901}", "n"),  // candrabindu
    ("\u{0903}", "h"),  // visarga
    ("\u{093d}", "'"),  // avagraha
    ("\u{0950}", "om"), // ॐ
];

pub(super) fn install_devanagari(scheme: &mut RomanScheme) {
    for (src, dst) in DEVANAGARI_VOWELS.iter().chain(DEVANAGARI_SIGNS) {
        scheme.add_entry(src, dst).unwrap();
    }
    for (cons, base) in DEVANAGARI_CONSONANTS {
        let mut with_inherent = String::from(*base);
        with_inherent.push('a');
        scheme.add_entry(cons, &with_inherent).unwrap();
        scheme
            .add_entry(&format!("{cons}{DEVANAGARI_VIRAMA}"), base)
            .unwrap();
        for (matra, vowel) in DEVANAGARI_MATRAS {
            scheme
                .add_entry(&format!("{cons}{matra}"), &format!("{base}{vowel}"))
                .unwrap();
        }
    }
}
