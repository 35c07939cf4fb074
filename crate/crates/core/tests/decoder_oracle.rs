//! Beam-vs-oracle stress beyond the basic randomized suite: higher-order
//! LMs (several live LM states at the root), words with internal letter
//! repeats (forced blank insertions), noisy synthesized emissions instead of
//! uniform noise, and homophone-heavy lexicons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zsasr_core::{
    beam_decode, oracle_decode_top2, synthesize, DecodeConfig, EmissionMatrix, Lexicon,
    LexiconTrie, NGramModel, RomanScheme, TrainingData, ALPHABET_SIZE,
};

fn scheme() -> RomanScheme {
    RomanScheme::builtin()
}

/// Words over {a, b}, repeats allowed, so spellings collide often and CTC
/// needs in-word blanks.
fn tight_lexicon(rng: &mut ChaCha8Rng) -> Lexicon {
    loop {
        let count = rng.gen_range(3..=6);
        let words: Vec<String> = (0..count)
            .map(|_| {
                let len = rng.gen_range(1..=3);
                (0..len)
                    .map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' })
                    .collect()
            })
            .collect();
        if let Ok(lex) = Lexicon::build(words.iter().map(String::as_str), &scheme()) {
            if lex.len() >= 2 {
                return lex;
            }
        }
    }
}

/// Minimum frames a spelling needs: one per symbol plus one blank between
/// equal neighbors.
fn min_frames(spelling: &[zsasr_core::Sym]) -> usize {
    spelling.len() + spelling.windows(2).filter(|w| w[0] == w[1]).count()
}

fn random_matrix(rng: &mut ChaCha8Rng, frames: usize) -> EmissionMatrix {
    let mut logp = Vec::with_capacity(frames * ALPHABET_SIZE);
    for _ in 0..frames {
        let probs: Vec<f64> = (0..ALPHABET_SIZE)
            .map(|_| rng.gen_range(0.01..1.0))
            .collect();
        let total: f64 = probs.iter().sum();
        logp.extend(probs.iter().map(|p| ((p / total).ln()) as f32));
    }
    EmissionMatrix::new("stress", frames, logp).unwrap()
}

fn random_sentences(rng: &mut ChaCha8Rng, lexicon: &Lexicon, n: usize) -> Vec<Vec<String>> {
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            (0..len)
                .map(|_| {
                    lexicon
                        .word(rng.gen_range(0..lexicon.len()) as u32)
                        .to_string()
                })
                .collect()
        })
        .collect()
}

fn check_instance(
    tag: &str,
    matrix: &EmissionMatrix,
    lexicon: &Lexicon,
    trie: &LexiconTrie,
    lm: Option<&NGramModel>,
    cfg: &DecodeConfig,
    max_words: usize,
) {
    let beam = beam_decode(matrix, trie, lexicon, lm, cfg);
    let (oracle, runner_up) = oracle_decode_top2(matrix, lexicon, lm, cfg, max_words).unwrap();
    if oracle.forced_finalization {
        // Nothing fits: the beam must have flagged a forced result too.
        assert!(beam.forced_finalization, "{tag}: beam found a parse the oracle says cannot exist");
        return;
    }
    assert!(
        (beam.total_score - oracle.total_score).abs() < 1e-6,
        "{tag}: beam {} vs oracle {} (beam {:?}, oracle {:?})",
        beam.total_score,
        oracle.total_score,
        beam.words,
        oracle.words
    );
    let unique = runner_up.is_none_or(|second| oracle.total_score - second > 1e-4);
    if unique {
        assert_eq!(beam.word_ids, oracle.word_ids, "{tag}: sequences diverge");
    }
}

#[test]
fn beam_matches_oracle_with_higher_order_lms_and_repeats() {
    for i in 0..80u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0DDC0DE + i);
        let lexicon = tight_lexicon(&mut rng);
        let trie = LexiconTrie::build(&lexicon);

        let per_word_floor = lexicon
            .entries()
            .iter()
            .map(|e| min_frames(&e.spelling))
            .min()
            .unwrap();
        let frames = rng.gen_range(per_word_floor.max(4)..=9.max(per_word_floor.max(4)));
        // The oracle must enumerate at least as many words as the frame
        // budget can hold, otherwise the unbounded beam could out-search it.
        let max_words = frames / per_word_floor;
        let matrix = random_matrix(&mut rng, frames);

        let order = 1 + (i % 3) as usize;
        let sentences = random_sentences(&mut rng, &lexicon, 6);
        let lm = NGramModel::train(TrainingData::Sentences(&sentences), order, 0.5).unwrap();
        let cfg = DecodeConfig {
            beam_size: 2000,
            beam_threshold: 1e9,
            lm_weight: [0.0, 0.5, 1.0][(i % 3) as usize],
            word_score: [-1.0, 0.0, 1.0][((i / 3) % 3) as usize],
            apply_eos: i % 2 == 0,
        };
        check_instance(
            &format!("instance {i} (order {order})"),
            &matrix,
            &lexicon,
            &trie,
            Some(&lm),
            &cfg,
            max_words,
        );
    }
}

#[test]
fn beam_matches_oracle_on_noisy_synthesized_utterances() {
    let words = ["pala", "palá", "bala", "lapa", "alba"];
    let lexicon = Lexicon::build(words, &scheme()).unwrap();
    let trie = LexiconTrie::build(&lexicon);
    let sentences: Vec<Vec<String>> = vec![
        vec!["pala".into(), "bala".into()],
        vec!["palá".into(), "lapa".into(), "alba".into()],
        vec!["bala".into()],
    ];
    for i in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51112 + i);
        let order = 1 + (i % 2) as usize;
        let lm = NGramModel::train(TrainingData::Sentences(&sentences), order, 0.5).unwrap();

        // Reference of one or two words, rendered with heavy noise.
        let len = rng.gen_range(1..=2);
        let reference: Vec<&str> = (0..len).map(|_| words[rng.gen_range(0..words.len())]).collect();
        let romanized = zsasr_core::romanize_text(&reference.join(" "), &scheme());
        let matrix = synthesize(
            format!("noisy{i}"),
            &romanized.with_trailing_separator(),
            rng.gen_range(1..=2),
            0.45,
            i,
        )
        .unwrap();

        let cfg = DecodeConfig {
            beam_size: 3000,
            beam_threshold: 1e9,
            lm_weight: 0.8,
            word_score: -0.4,
            apply_eos: true,
        };
        let per_word_floor = lexicon
            .entries()
            .iter()
            .map(|e| min_frames(&e.spelling))
            .min()
            .unwrap();
        check_instance(
            &format!("noisy {i} (order {order})"),
            &matrix,
            &lexicon,
            &trie,
            Some(&lm),
            &cfg,
            matrix.frames() / per_word_floor,
        );
    }
}
