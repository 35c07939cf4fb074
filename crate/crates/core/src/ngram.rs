//! Backoff n-gram language models (orders 1-3) over words, with absolute
//! discounting, incremental scoring for beam search, and ARPA text
//! serialization. All scores are log10, the ARPA convention; the decoder
//! converts to natural log at fusion time.
//!
//! Training uses interpolated absolute discounting:
//!
//! ```text
//! p(w)   = c(w) / (N + 1),          p(<unk>) = 1 / (N + 1)
//! p(w|h) = max(c(h.w) - D, 0) / c(h) + lambda(h) * p(w|h')
//! lambda(h) = D * N1+(h) / c(h)
//! ```
//!
//! where N is the total predicted-token count (includes `</s>` for sentence
//! input, never `<s>`), c(h) is the context total Sum_w c(h.w), N1+(h) the
//! number of distinct continuations of h, and h' drops the oldest word. With
//! integer counts and 0 < D < 1 every conditional distribution sums to one
//! exactly.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

pub const MAX_ORDER: usize = 3;

/// Sentinel log10 probability conventionally given to `<s>` in ARPA files;
/// `<s>` is never predicted.
const BOS_LOG_PROB: f64 = -99.0;

const UNK_ID: u32 = 0;
const BOS_ID: u32 = 1;
const EOS_ID: u32 = 2;

#[derive(Debug, Error)]
pub enum NGramError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("discount must lie strictly between 0 and 1, got {0}")]
    InvalidDiscount(f64),
    #[error("order must lie between 1 and {MAX_ORDER}, got {0}")]
    InvalidOrder(usize),
    #[error("count table contains an n-gram of order {got} but the model order is {max}")]
    CountOrderTooHigh { got: usize, max: usize },
    #[error("ARPA line {line}: {message}")]
    ArpaParse { line: usize, message: String },
    #[error("ARPA declares {declared} {order}-grams but lists {actual}")]
    CountMismatch {
        order: usize,
        declared: usize,
        actual: usize,
    },
}

/// N-gram key: up to `MAX_ORDER` word ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Key {
    words: [u32; MAX_ORDER],
    len: u8,
}

impl Key {
    fn new(words: &[u32]) -> Key {
        debug_assert!(!words.is_empty() && words.len() <= MAX_ORDER);
        let mut buf = [0u32; MAX_ORDER];
        buf[..words.len()].copy_from_slice(words);
        Key {
            words: buf,
            len: words.len() as u8,
        }
    }

    fn slice(&self) -> &[u32] {
        &self.words[..self.len as usize]
    }
}

/// Decoder-side LM state: the last `order - 1` accepted words. Two states
/// with equal contexts compare and hash equal, which is what hypothesis
/// merging keys on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LmState {
    context: [u32; MAX_ORDER - 1],
    len: u8,
}

impl LmState {
    fn context(&self) -> &[u32] {
        &self.context[..self.len as usize]
    }

    fn advance(&self, word: u32, order: usize) -> LmState {
        let keep = order.saturating_sub(1);
        let mut extended: Vec<u32> = self.context().to_vec();
        extended.push(word);
        let tail = &extended[extended.len().saturating_sub(keep)..];
        let mut context = [0u32; MAX_ORDER - 1];
        context[..tail.len()].copy_from_slice(tail);
        LmState {
            context,
            len: tail.len() as u8,
        }
    }
}

/// Immutable backoff n-gram model. Probabilities and backoff weights are
/// stored per order exactly as an ARPA file stores them.
pub struct NGramModel {
    order: usize,
    vocab: Vec<String>,
    word_ids: HashMap<String, u32>,
    /// probs[k-1]: k-gram -> log10 probability.
    probs: Vec<HashMap<Key, f64>>,
    /// backoffs[k-1]: k-word context -> log10 backoff weight.
    backoffs: Vec<HashMap<Key, f64>>,
    discount: f64,
}

/// Training input: tokenized sentences or an explicit n-gram count table
/// (mixed orders allowed, e.g. unigram and bigram counts side by side).
pub enum TrainingData<'a> {
    Sentences(&'a [Vec<String>]),
    Counts(&'a [(Vec<String>, u64)]),
}

impl NGramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Vocabulary including the reserved tokens.
    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn word_id(&self, word: &str) -> u32 {
        self.word_ids.get(word).copied().unwrap_or(UNK_ID)
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.word_ids.contains_key(word)
    }

    /// State at a sentence start: `<s>` context for orders above one.
    pub fn start_state(&self) -> LmState {
        if self.order > 1 {
            LmState::default().advance(BOS_ID, self.order)
        } else {
            LmState::default()
        }
    }

    /// Scores one word in context and returns the advanced state. Total via
    /// `<unk>`: unknown words score as the unknown token in the matched
    /// context.
    pub fn score_word(&self, state: LmState, word: &str) -> (LmState, f64) {
        self.score_word_id(state, self.word_id(word))
    }

    pub fn eos_id(&self) -> u32 {
        EOS_ID
    }

    pub fn score_word_id(&self, state: LmState, word: u32) -> (LmState, f64) {
        let word = if word as usize >= self.vocab.len() || word == BOS_ID {
            UNK_ID
        } else {
            word
        };
        let score = self.backoff_score(state.context(), word);
        (state.advance(word, self.order), score)
    }

    /// Standard ARPA evaluation: use the longest stored n-gram ending in
    /// `word`; otherwise accumulate the context's backoff weight and retry
    /// with the context shortened from the left.
    fn backoff_score(&self, context: &[u32], word: u32) -> f64 {
        // Clamp the context to order - 1 words (callers never exceed it).
        let mut start = context.len() - context.len().min(self.order - 1);
        let mut penalty = 0.0;
        loop {
            let ctx = &context[start..];
            let mut gram: Vec<u32> = ctx.to_vec();
            gram.push(word);
            if let Some(&logp) = self.probs[gram.len() - 1].get(&Key::new(&gram)) {
                return penalty + logp;
            }
            if ctx.is_empty() {
                // Unigram fallback: unknown words take the <unk> mass.
                return penalty
                    + self.probs[0]
                        .get(&Key::new(&[UNK_ID]))
                        .copied()
                        .unwrap_or(BOS_LOG_PROB);
            }
            if let Some(&bo) = self.backoffs[ctx.len() - 1].get(&Key::new(ctx)) {
                penalty += bo;
            }
            start += 1;
        }
    }

    /// Log10 probability of a full sentence: every word from the start state
    /// plus the `</s>` transition.
    pub fn score_sentence<S: AsRef<str>>(&self, words: &[S]) -> f64 {
        let mut state = self.start_state();
        let mut total = 0.0;
        for word in words {
            let (next, score) = self.score_word(state, word.as_ref());
            state = next;
            total += score;
        }
        let (_, eos) = self.score_word_id(state, EOS_ID);
        total + eos
    }

    /// Trains a model with absolute discounting. `discount` must lie in
    /// (0, 1); sentences are padded with `<s>`/`</s>`, count tables are used
    /// as-is (missing lower orders are derived by target marginalization).
    pub fn train(
        data: TrainingData,
        order: usize,
        discount: f64,
    ) -> Result<NGramModel, NGramError> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(NGramError::InvalidOrder(order));
        }
        if !(discount > 0.0 && discount < 1.0) || !discount.is_finite() {
            return Err(NGramError::InvalidDiscount(discount));
        }

        let mut vocab: Vec<String> = vec![UNK.into(), BOS.into(), EOS.into()];
        let mut word_ids: HashMap<String, u32> = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let intern = |word: &str, vocab: &mut Vec<String>, ids: &mut HashMap<String, u32>| {
            if let Some(&id) = ids.get(word) {
                id
            } else {
                let id = vocab.len() as u32;
                vocab.push(word.to_string());
                ids.insert(word.to_string(), id);
                id
            }
        };

        // counts[k-1]: k-gram counts. The unigram layer never counts <s>.
        let mut counts: Vec<HashMap<Key, u64>> = vec![HashMap::new(); order];
        match data {
            TrainingData::Sentences(sentences) => {
                for sentence in sentences {
                    let mut ids = Vec::with_capacity(sentence.len() + 2);
                    ids.push(BOS_ID);
                    for word in sentence {
                        ids.push(intern(word, &mut vocab, &mut word_ids));
                    }
                    ids.push(EOS_ID);
                    for k in 1..=order {
                        for window in ids.windows(k) {
                            if *window.last().unwrap() == BOS_ID {
                                continue;
                            }
                            *counts[k - 1].entry(Key::new(window)).or_insert(0) += 1;
                        }
                    }
                }
            }
            TrainingData::Counts(table) => {
                let mut provided = vec![false; order];
                for (gram, _) in table.iter() {
                    if gram.is_empty() {
                        continue;
                    }
                    if gram.len() > order {
                        return Err(NGramError::CountOrderTooHigh {
                            got: gram.len(),
                            max: order,
                        });
                    }
                    provided[gram.len() - 1] = true;
                }
                for (gram, count) in table.iter() {
                    if gram.is_empty() || *count == 0 {
                        continue;
                    }
                    let ids: Vec<u32> = gram
                        .iter()
                        .map(|w| intern(w, &mut vocab, &mut word_ids))
                        .collect();
                    if *ids.last().unwrap() == BOS_ID {
                        continue; // <s> is never a prediction target
                    }
                    *counts[ids.len() - 1].entry(Key::new(&ids)).or_insert(0) += count;
                }
                // Derive any wholly missing lower order from the order above
                // by summing over the oldest context word.
                for k in (1..order).rev() {
                    if provided[k - 1] || counts[k].is_empty() {
                        continue;
                    }
                    let derived: Vec<(Key, u64)> = counts[k]
                        .iter()
                        .map(|(key, &c)| (Key::new(&key.slice()[1..]), c))
                        .collect();
                    for (key, c) in derived {
                        if *key.slice().last().unwrap() == BOS_ID {
                            continue;
                        }
                        *counts[k - 1].entry(key).or_insert(0) += c;
                    }
                }
            }
        }

        let token_total: u64 = counts[0].values().sum();
        if token_total == 0 {
            return Err(NGramError::EmptyCorpus);
        }

        let mut model = NGramModel {
            order,
            vocab,
            word_ids,
            probs: vec![HashMap::new(); order],
            backoffs: vec![HashMap::new(); order.saturating_sub(1)],
            discount,
        };

        // Unigram layer: the +1 pseudo-count is the <unk> mass.
        let denom = (token_total + 1) as f64;
        for (key, &count) in &counts[0] {
            let extra = if key.slice() == [UNK_ID] { 1 } else { 0 };
            model.probs[0].insert(*key, (((count + extra) as f64) / denom).log10());
        }
        model.probs[0]
            .entry(Key::new(&[UNK_ID]))
            .or_insert_with(|| (1.0 / denom).log10());

        // Higher orders, bottom-up so interpolation can query the layer below.
        for k in 2..=order {
            let mut context_total: HashMap<Key, u64> = HashMap::new();
            let mut continuations: HashMap<Key, u64> = HashMap::new();
            for (key, &count) in &counts[k - 1] {
                let ctx = Key::new(&key.slice()[..k - 1]);
                *context_total.entry(ctx).or_insert(0) += count;
                *continuations.entry(ctx).or_insert(0) += 1;
            }
            for (ctx, &total) in &context_total {
                let lambda = discount * continuations[ctx] as f64 / total as f64;
                model.backoffs[k - 2].insert(*ctx, lambda.log10());
            }
            let grams: Vec<(Key, u64)> = counts[k - 1].iter().map(|(k, &c)| (*k, c)).collect();
            for (key, count) in grams {
                let ctx = key.slice();
                let total = context_total[&Key::new(&ctx[..k - 1])] as f64;
                let lambda = 10f64.powf(model.backoffs[k - 2][&Key::new(&ctx[..k - 1])]);
                let lower = 10f64.powf(model.backoff_score(&ctx[1..k - 1], *ctx.last().unwrap()));
                let p = ((count as f64 - discount).max(0.0)) / total + lambda * lower;
                model.probs[k - 1].insert(key, p.log10());
            }
        }
        Ok(model)
    }

    /// Serializes to ARPA text. N-grams are emitted in lexicographic word
    /// order so output is deterministic and diffable.
    pub fn write_arpa(&self) -> String {
        let mut sections: Vec<Vec<String>> = Vec::with_capacity(self.order);
        for k in 1..=self.order {
            let mut lines: Vec<(Vec<&str>, String)> = Vec::new();
            for (key, logp) in &self.probs[k - 1] {
                let words: Vec<&str> = key
                    .slice()
                    .iter()
                    .map(|&id| self.vocab[id as usize].as_str())
                    .collect();
                lines.push((words, self.format_gram_line(key, *logp)));
            }
            if k == 1 && self.order > 1 {
                // <s> is context-only: conventional -99 probability line.
                let key = Key::new(&[BOS_ID]);
                lines.push((vec![BOS], self.format_gram_line(&key, BOS_LOG_PROB)));
            }
            lines.sort();
            sections.push(lines.into_iter().map(|(_, line)| line).collect());
        }

        let mut out = String::from("\\data\\\n");
        for (k, section) in sections.iter().enumerate() {
            out.push_str(&format!("ngram {}={}\n", k + 1, section.len()));
        }
        for (k, section) in sections.iter().enumerate() {
            out.push_str(&format!("\n\\{}-grams:\n", k + 1));
            for line in section {
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str("\n\\end\\\n");
        out
    }

    fn format_gram_line(&self, key: &Key, logp: f64) -> String {
        let words: Vec<&str> = key
            .slice()
            .iter()
            .map(|&id| self.vocab[id as usize].as_str())
            .collect();
        let mut line = format!("{:.7}\t{}", logp, words.join(" "));
        if (key.len as usize) < self.order {
            if let Some(bo) = self.backoffs[key.len as usize - 1].get(key) {
                line.push_str(&format!("\t{:.7}", bo));
            }
        }
        line
    }

    /// Parses ARPA text. Declared counts must match section lengths; every
    /// word referenced by a higher-order gram must be listed as a unigram.
    pub fn read_arpa(text: &str) -> Result<NGramModel, NGramError> {
        let parse_err = |line: usize, message: String| NGramError::ArpaParse { line, message };

        enum Where {
            Preamble,
            Header,
            Body,
        }

        let mut state = Where::Preamble;
        let mut declared: Vec<usize> = Vec::new();
        let mut seen: Vec<usize> = Vec::new();
        let mut current: Option<usize> = None;
        let mut reached_end = false;
        let mut model: Option<NGramModel> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || reached_end {
                continue;
            }
            match state {
                Where::Preamble => {
                    if line == "\\data\\" {
                        state = Where::Header;
                    } else {
                        return Err(parse_err(line_no, "expected \\data\\ header".into()));
                    }
                }
                Where::Header => {
                    if let Some(rest) = line.strip_prefix("ngram ") {
                        let (k, n) = rest.split_once('=').ok_or_else(|| {
                            parse_err(line_no, "malformed `ngram k=count` line".into())
                        })?;
                        let k: usize = k
                            .trim()
                            .parse()
                            .map_err(|_| parse_err(line_no, "malformed ngram order".into()))?;
                        let n: usize = n
                            .trim()
                            .parse()
                            .map_err(|_| parse_err(line_no, "malformed ngram count".into()))?;
                        if k != declared.len() + 1 || k > MAX_ORDER {
                            return Err(parse_err(
                                line_no,
                                format!("ngram counts must cover orders 1..{MAX_ORDER} in order"),
                            ));
                        }
                        declared.push(n);
                    } else if line.starts_with('\\') {
                        if declared.is_empty() {
                            return Err(parse_err(line_no, "no ngram counts declared".into()));
                        }
                        let order = declared.len();
                        seen = vec![0; order];
                        model = Some(NGramModel {
                            order,
                            vocab: vec![UNK.into(), BOS.into(), EOS.into()],
                            word_ids: HashMap::from([
                                (UNK.to_string(), UNK_ID),
                                (BOS.to_string(), BOS_ID),
                                (EOS.to_string(), EOS_ID),
                            ]),
                            probs: vec![HashMap::new(); order],
                            backoffs: vec![HashMap::new(); order.saturating_sub(1)],
                            discount: 0.5,
                        });
                        state = Where::Body;
                        current = Some(Self::parse_section_header(line, order, line_no)?);
                    } else {
                        return Err(parse_err(
                            line_no,
                            "unexpected line in \\data\\ header".into(),
                        ));
                    }
                }
                Where::Body => {
                    let m = model.as_mut().expect("model exists in body");
                    if line == "\\end\\" {
                        reached_end = true;
                        continue;
                    }
                    if line.starts_with('\\') {
                        current = Some(Self::parse_section_header(line, m.order, line_no)?);
                        continue;
                    }
                    let k = current.expect("section set on body entry");
                    let order = m.order;
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    let has_backoff = match fields.len() {
                        n if n == k + 1 => false,
                        n if n == k + 2 && k < order => true,
                        _ => {
                            return Err(parse_err(
                                line_no,
                                format!("wrong field count for a {k}-gram line"),
                            ))
                        }
                    };
                    let logp: f64 = fields[0]
                        .parse()
                        .map_err(|_| parse_err(line_no, "malformed log probability".into()))?;
                    if !logp.is_finite() || (logp > 0.0 && (logp - BOS_LOG_PROB).abs() > 1e-9) {
                        return Err(parse_err(
                            line_no,
                            "log probability must be finite and <= 0".into(),
                        ));
                    }
                    let words = &fields[1..=k];
                    let ids: Vec<u32> = if k == 1 {
                        vec![m.intern_unigram(words[0])]
                    } else {
                        let mut ids = Vec::with_capacity(k);
                        for w in words {
                            ids.push(m.known_word(w).ok_or_else(|| {
                                parse_err(line_no, format!("word {w:?} missing from unigrams"))
                            })?);
                        }
                        ids
                    };
                    let key = Key::new(&ids);
                    seen[k - 1] += 1;
                    // <s> keeps its backoff weight but never a probability.
                    if !(k == 1 && ids[0] == BOS_ID) && m.probs[k - 1].insert(key, logp).is_some() {
                        return Err(parse_err(line_no, "duplicate n-gram".into()));
                    }
                    if has_backoff {
                        let bo: f64 = fields[k + 1]
                            .parse()
                            .map_err(|_| parse_err(line_no, "malformed backoff weight".into()))?;
                        if !bo.is_finite() {
                            return Err(parse_err(line_no, "backoff weight must be finite".into()));
                        }
                        m.backoffs[k - 1].insert(key, bo);
                    }
                }
            }
        }
        if !reached_end {
            return Err(parse_err(text.lines().count(), "missing \\end\\".into()));
        }
        let model = model.expect("model exists after \\end\\");
        for k in 1..=model.order {
            if seen[k - 1] != declared[k - 1] {
                return Err(NGramError::CountMismatch {
                    order: k,
                    declared: declared[k - 1],
                    actual: seen[k - 1],
                });
            }
        }
        Ok(model)
    }

    fn parse_section_header(line: &str, order: usize, line_no: usize) -> Result<usize, NGramError> {
        let k: usize = line
            .strip_prefix('\\')
            .and_then(|s| s.strip_suffix("-grams:"))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| NGramError::ArpaParse {
                line: line_no,
                message: format!("unrecognized section header {line:?}"),
            })?;
        if k == 0 || k > order {
            return Err(NGramError::ArpaParse {
                line: line_no,
                message: "section order exceeds declared orders".to_string(),
            });
        }
        Ok(k)
    }

    fn intern_unigram(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.word_ids.get(word) {
            return id;
        }
        let id = self.vocab.len() as u32;
        self.vocab.push(word.to_string());
        self.word_ids.insert(word.to_string(), id);
        id
    }

    fn known_word(&self, word: &str) -> Option<u32> {
        self.word_ids.get(word).copied()
    }

    /// Stored k-grams with their log10 probabilities, sorted by words.
    pub fn stored_ngrams(&self, k: usize) -> Vec<(Vec<String>, f64)> {
        assert!((1..=self.order).contains(&k));
        let mut out: Vec<(Vec<String>, f64)> = self.probs[k - 1]
            .iter()
            .map(|(key, &logp)| {
                let words = key
                    .slice()
                    .iter()
                    .map(|&id| self.vocab[id as usize].clone())
                    .collect();
                (words, logp)
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Stored contexts of the maximum order (length `order - 1`), for
    /// normalization checks. Empty for unigram models.
    pub fn max_order_contexts(&self) -> Vec<Vec<String>> {
        if self.order < 2 {
            return Vec::new();
        }
        let mut out: Vec<Vec<String>> = self.probs[self.order - 1]
            .keys()
            .map(|key| {
                key.slice()[..self.order - 1]
                    .iter()
                    .map(|&id| self.vocab[id as usize].clone())
                    .collect()
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Builds an [`LmState`] from explicit context words (most recent last).
    pub fn state_from_context<S: AsRef<str>>(&self, words: &[S]) -> LmState {
        let mut state = if self.order > 1 {
            self.start_state()
        } else {
            LmState::default()
        };
        for w in words {
            state = state.advance(self.word_id(w.as_ref()), self.order);
        }
        state
    }
}

impl fmt::Debug for NGramModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NGramModel")
            .field("order", &self.order)
            .field("vocab", &self.vocab.len())
            .field("discount", &self.discount)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentences(raw: &[&str]) -> Vec<Vec<String>> {
        raw.iter()
            .map(|s| s.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    fn counts(raw: &[(&str, u64)]) -> Vec<(Vec<String>, u64)> {
        raw.iter()
            .map(|(g, c)| (g.split_whitespace().map(str::to_string).collect(), *c))
            .collect()
    }

    const TOL: f64 = 1e-4;

    #[test]
    fn unigram_probabilities_from_counts() {
        let table = counts(&[("the", 3), ("cat", 1)]);
        let m = NGramModel::train(TrainingData::Counts(&table), 1, 0.5).unwrap();
        let (_, p_the) = m.score_word(m.start_state(), "the");
        assert!((p_the - (3f64 / 5.0).log10()).abs() < TOL, "{p_the}");
        assert!((p_the - (-0.2218)).abs() < TOL);
        let (_, p_unk) = m.score_word(m.start_state(), "zebra");
        assert!((p_unk - (-0.6990)).abs() < TOL, "{p_unk}");
    }

    #[test]
    fn bigram_absolute_discounting_hand_example() {
        let data = sentences(&["a b a b"]);
        let m = NGramModel::train(TrainingData::Sentences(&data), 2, 0.5).unwrap();
        let state = m.state_from_context(&["a"]);
        let (_, p) = m.score_word(state, "b");
        // (2 - 0.5)/2 + (0.5 * 1/2) * (2/6) = 0.8333...
        assert!((10f64.powf(p) - 0.8333333333).abs() < 1e-6, "{p}");
        assert!((p - (-0.0792)).abs() < TOL);
    }

    #[test]
    fn one_word_count_table_splits_mass_with_unk() {
        let table = counts(&[("x", 1)]);
        let m = NGramModel::train(TrainingData::Counts(&table), 1, 0.5).unwrap();
        let (_, p_x) = m.score_word(m.start_state(), "x");
        let (_, p_unk) = m.score_word(m.start_state(), "never-seen");
        assert!((10f64.powf(p_x) - 0.5).abs() < 1e-9);
        assert!((10f64.powf(p_unk) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let empty: Vec<Vec<String>> = Vec::new();
        assert!(matches!(
            NGramModel::train(TrainingData::Sentences(&empty), 1, 0.5),
            Err(NGramError::EmptyCorpus)
        ));
        let data = sentences(&["a"]);
        assert!(matches!(
            NGramModel::train(TrainingData::Sentences(&data), 1, 1.0),
            Err(NGramError::InvalidDiscount(_))
        ));
        assert!(matches!(
            NGramModel::train(TrainingData::Sentences(&data), 4, 0.5),
            Err(NGramError::InvalidOrder(4))
        ));
    }

    #[test]
    fn score_sentence_composes_word_scores() {
        let data = sentences(&["a b a b"]);
        let m = NGramModel::train(TrainingData::Sentences(&data), 2, 0.5).unwrap();
        let s0 = m.start_state();
        let (s1, p_a) = m.score_word(s0, "a");
        let (s2, p_b) = m.score_word(s1, "b");
        let (_, p_eos) = m.score_word(s2, EOS);
        let total = m.score_sentence(&["a", "b"]);
        assert!((total - (p_a + p_b + p_eos)).abs() < 1e-12);
        assert!(total <= 0.0);

        // Empty sentence scores just the </s> transition.
        let (_, eos_only) = m.score_word(m.start_state(), EOS);
        assert!((m.score_sentence::<&str>(&[]) - eos_only).abs() < 1e-12);
    }

    #[test]
    fn unknown_words_truncate_to_unk_in_state() {
        let data = sentences(&["a b a b"]);
        let m = NGramModel::train(TrainingData::Sentences(&data), 2, 0.5).unwrap();
        let (state, _) = m.score_word(m.start_state(), "mystery");
        assert_eq!(state, m.state_from_context(&[UNK]));
    }

    #[test]
    fn normalization_sums_to_one_for_stored_contexts() {
        let data = sentences(&["a b a b", "b c a", "a a c"]);
        for order in 1..=3 {
            let m = NGramModel::train(TrainingData::Sentences(&data), order, 0.5).unwrap();
            let contexts: Vec<Vec<String>> = if order == 1 {
                vec![Vec::new()]
            } else {
                m.max_order_contexts()
            };
            for ctx in contexts {
                let state = m.state_from_context(&ctx);
                let mut total = 0.0;
                for word in m.vocab() {
                    if word == BOS {
                        continue;
                    }
                    let (_, logp) = m.score_word(state, word);
                    total += 10f64.powf(logp);
                }
                assert!(
                    (total - 1.0).abs() < 1e-6,
                    "order {order} context {ctx:?} sums to {total}"
                );
            }
        }
    }

    #[test]
    fn unigram_probability_monotone_in_counts() {
        let base = counts(&[("w", 2), ("v", 5)]);
        let more = counts(&[("w", 3), ("v", 5)]);
        let m1 = NGramModel::train(TrainingData::Counts(&base), 1, 0.5).unwrap();
        let m2 = NGramModel::train(TrainingData::Counts(&more), 1, 0.5).unwrap();
        let (_, p1) = m1.score_word(m1.start_state(), "w");
        let (_, p2) = m2.score_word(m2.start_state(), "w");
        assert!(p2 > p1);
    }

    #[test]
    fn arpa_round_trip_preserves_scores() {
        let data = sentences(&["a b a b", "b a"]);
        for order in 1..=3 {
            let m = NGramModel::train(TrainingData::Sentences(&data), order, 0.5).unwrap();
            let text = m.write_arpa();
            let back = NGramModel::read_arpa(&text).unwrap();
            for words in [vec!["a", "b"], vec!["b", "a"], vec!["a", "zzz", "b"]] {
                let lhs = m.score_sentence(&words);
                let rhs = back.score_sentence(&words);
                assert!(
                    (lhs - rhs).abs() < 1e-6,
                    "order {order} {words:?}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn arpa_unigram_section_lists_unk() {
        let table = counts(&[("the", 3), ("cat", 1)]);
        let m = NGramModel::train(TrainingData::Counts(&table), 1, 0.5).unwrap();
        let text = m.write_arpa();
        assert!(text.contains("ngram 1=3"), "{text}");
        assert!(text.contains("<unk>"));
        assert!(!text.contains("<s>"));
    }

    #[test]
    fn arpa_count_mismatch_detected() {
        let text = "\\data\\\nngram 1=5\n\n\\1-grams:\n-0.5\ta\n-0.5\tb\n-0.5\tc\n-0.5\t<unk>\n\n\\end\\\n";
        let err = NGramModel::read_arpa(text).unwrap_err();
        assert!(matches!(
            err,
            NGramError::CountMismatch {
                order: 1,
                declared: 5,
                actual: 4
            }
        ));
    }

    #[test]
    fn arpa_parse_error_carries_line_number() {
        let text = "\\data\\\nngram 1=1\n\n\\1-grams:\nnot-a-number\ta\n\n\\end\\\n";
        match NGramModel::read_arpa(text) {
            Err(NGramError::ArpaParse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn backoff_path_never_beats_recomputed_explicit_entry() {
        // Removing an explicit bigram and rescoring via backoff must not
        // increase its probability once lambda weights are recomputed.
        let data = sentences(&["a b a b", "a c"]);
        let m = NGramModel::train(TrainingData::Sentences(&data), 2, 0.5).unwrap();
        let state = m.state_from_context(&["a"]);
        let (_, explicit) = m.score_word(state, "b");

        // Reconstruct without (a, b): counts a->c only.
        let table = counts(&[("a", 3), ("b", 3), ("c", 1), ("a c", 1)]);
        let reduced = NGramModel::train(TrainingData::Counts(&table), 2, 0.5).unwrap();
        let (_, via_backoff) = reduced.score_word(reduced.state_from_context(&["a"]), "b");
        assert!(via_backoff <= explicit + 1e-12);
    }

    #[test]
    fn mixed_order_count_table_uses_provided_lower_orders() {
        let table = counts(&[("a", 4), ("b", 2), ("a b", 2), ("b a", 1)]);
        let m = NGramModel::train(TrainingData::Counts(&table), 2, 0.5).unwrap();
        let (_, p) = m.score_word(m.state_from_context(&["a"]), "b");
        // (2-0.5)/2 + (0.5*1/2)*p_uni(b), p_uni(b)=2/7
        let expect = 1.5 / 2.0 + 0.25 * (2.0 / 7.0);
        assert!((10f64.powf(p) - expect).abs() < 1e-9);
    }

    #[test]
    fn bigram_only_count_table_derives_unigrams() {
        let table = counts(&[("a b", 2), ("b a", 1)]);
        let m = NGramModel::train(TrainingData::Counts(&table), 2, 0.5).unwrap();
        // Derived unigram targets: b:2, a:1 -> N=3.
        let (_, p_b) = m.score_word(m.start_state(), "b");
        assert!((10f64.powf(p_b) - 0.5).abs() < 1e-9, "{p_b}");
    }
}
