//! Frame-level CTC emission matrices: the interface between any acoustic
//! model and the decoder. Probabilities are natural-log (the acoustic
//! convention); zero probability is the finite sentinel [`NEG_INF`] so all
//! arithmetic stays well-defined.
//!
//! The binary file format is little-endian: magic `CTCE`, u32 version (1),
//! u32 T, u32 V, V vocabulary entries (u16 byte length followed by UTF-8
//! bytes), then T*V float32 log-probabilities in row-major order.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::alphabet::{Sym, ALPHABET_SIZE, BLANK, LABELS};

/// Finite stand-in for log(0).
pub const NEG_INF: f32 = -1e30;

const MAGIC: &[u8; 4] = b"CTCE";
const VERSION: u32 = 1;
/// Frame rows must satisfy |log sum_v exp(logp)| <= this.
const ROW_SUM_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum EmissionError {
    #[error("bad emission file: {0}")]
    FormatError(String),
    #[error("payload holds {got} bytes but T*V*4 = {expected}")]
    DimensionError { expected: usize, got: usize },
    #[error("file vocabulary does not match the canonical alphabet ({0})")]
    VocabMismatch(String),
    #[error("frame {frame}: {message}")]
    InvalidRow { frame: usize, message: String },
    #[error("reference symbol sequence is empty")]
    EmptyReference,
    #[error("invalid synthesis parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// T x 29 natural-log probability matrix for one utterance. Validated on
/// construction: rows normalize within tolerance, no entry is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionMatrix {
    utterance_id: String,
    frames: usize,
    logp: Vec<f32>,
}

impl EmissionMatrix {
    pub fn new(
        utterance_id: impl Into<String>,
        frames: usize,
        logp: Vec<f32>,
    ) -> Result<EmissionMatrix, EmissionError> {
        if logp.len() != frames * ALPHABET_SIZE {
            return Err(EmissionError::DimensionError {
                expected: frames * ALPHABET_SIZE,
                got: logp.len(),
            });
        }
        let matrix = EmissionMatrix {
            utterance_id: utterance_id.into(),
            frames,
            logp,
        };
        matrix.validate()?;
        Ok(matrix)
    }

    fn validate(&self) -> Result<(), EmissionError> {
        for t in 0..self.frames {
            let row = self.row(t);
            let mut max = f64::NEG_INFINITY;
            for &x in row {
                // Entries live in [NEG_INF, 0]; anything else (positive, NaN,
                // -inf, below the sentinel) is malformed.
                if !(NEG_INF..=0.0).contains(&x) {
                    return Err(EmissionError::InvalidRow {
                        frame: t,
                        message: format!("entry {x} outside [{NEG_INF}, 0]"),
                    });
                }
                max = max.max(x as f64);
            }
            if max <= NEG_INF as f64 {
                return Err(EmissionError::InvalidRow {
                    frame: t,
                    message: "all entries are zero-probability".to_string(),
                });
            }
            let sum: f64 = row
                .iter()
                .filter(|&&x| x > NEG_INF)
                .map(|&x| ((x as f64) - max).exp())
                .sum();
            let log_sum = max + sum.ln();
            if log_sum.abs() > ROW_SUM_TOL {
                return Err(EmissionError::InvalidRow {
                    frame: t,
                    message: format!("row log-sum {log_sum} exceeds tolerance"),
                });
            }
        }
        Ok(())
    }

    pub fn utterance_id(&self) -> &str {
        &self.utterance_id
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.logp[t * ALPHABET_SIZE..(t + 1) * ALPHABET_SIZE]
    }

    pub fn logp(&self, t: usize, sym: Sym) -> f32 {
        self.logp[t * ALPHABET_SIZE + sym.index()]
    }

    pub fn write_to(&self, mut sink: impl Write) -> std::io::Result<()> {
        sink.write_all(MAGIC)?;
        sink.write_all(&VERSION.to_le_bytes())?;
        sink.write_all(&(self.frames as u32).to_le_bytes())?;
        sink.write_all(&(ALPHABET_SIZE as u32).to_le_bytes())?;
        for label in LABELS {
            sink.write_all(&(label.len() as u16).to_le_bytes())?;
            sink.write_all(label.as_bytes())?;
        }
        for &x in &self.logp {
            sink.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.logp.len() * 4 + 128);
        self.write_to(&mut out).expect("writing to Vec cannot fail");
        out
    }

    pub fn read_from(mut source: impl Read) -> Result<EmissionMatrix, EmissionError> {
        let mut bytes = Vec::new();
        source.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<EmissionMatrix, EmissionError> {
        let mut cursor = Cursor { bytes, pos: 0 };
        let magic = cursor.take(4)?;
        if magic != MAGIC {
            return Err(EmissionError::FormatError(format!(
                "bad magic {magic:?}, expected {MAGIC:?}"
            )));
        }
        let version = cursor.u32()?;
        if version != VERSION {
            return Err(EmissionError::FormatError(format!(
                "unsupported version {version}"
            )));
        }
        let frames = cursor.u32()? as usize;
        let vocab_len = cursor.u32()? as usize;
        if vocab_len != ALPHABET_SIZE {
            return Err(EmissionError::VocabMismatch(format!(
                "file has {vocab_len} symbols, expected {ALPHABET_SIZE}"
            )));
        }
        for expected in LABELS {
            let len = cursor.u16()? as usize;
            let raw = cursor.take(len)?;
            let label = std::str::from_utf8(raw)
                .map_err(|_| EmissionError::FormatError("vocab entry is not UTF-8".into()))?;
            if label != expected {
                return Err(EmissionError::VocabMismatch(format!(
                    "found {label:?} where {expected:?} belongs"
                )));
            }
        }
        let payload = &cursor.bytes[cursor.pos..];
        let expected = frames * ALPHABET_SIZE * 4;
        if payload.len() != expected {
            return Err(EmissionError::DimensionError {
                expected,
                got: payload.len(),
            });
        }
        let logp: Vec<f32> = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        EmissionMatrix::new(String::new(), frames, logp)
    }

    pub fn with_utterance_id(mut self, id: impl Into<String>) -> EmissionMatrix {
        self.utterance_id = id.into();
        self
    }

    /// Skips row validation. For in-crate tests that work with deliberately
    /// unnormalized scores.
    #[cfg(test)]
    pub(crate) fn new_unvalidated(
        utterance_id: impl Into<String>,
        frames: usize,
        logp: Vec<f32>,
    ) -> EmissionMatrix {
        assert_eq!(logp.len(), frames * ALPHABET_SIZE);
        EmissionMatrix {
            utterance_id: utterance_id.into(),
            frames,
            logp,
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], EmissionError> {
        if self.pos + n > self.bytes.len() {
            return Err(EmissionError::FormatError("truncated header".into()));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, EmissionError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn u16(&mut self) -> Result<u16, EmissionError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }
}

/// Deterministic per-utterance seed so batch synthesis is order-independent.
pub fn derive_seed(seed: u64, utterance_id: &str) -> u64 {
    seed ^ fnv1a64(utterance_id.as_bytes())
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Synthesizes emissions that peak on `reference`: `frames_per_symbol`
/// consecutive frames per symbol at probability `1 - noise` (the remainder
/// spread uniformly), plus one blank-dominated frame between consecutive
/// identical symbols. With `noise = 0` the off-target entries are [`NEG_INF`].
/// The seed drives only a per-frame jitter of the noise level (up to 10% of
/// `noise`, renormalized), so outputs are fully determined by the arguments.
pub fn synthesize(
    utterance_id: impl Into<String>,
    reference: &[Sym],
    frames_per_symbol: usize,
    noise: f64,
    seed: u64,
) -> Result<EmissionMatrix, EmissionError> {
    if reference.is_empty() {
        return Err(EmissionError::EmptyReference);
    }
    if reference.iter().any(|s| s.is_blank()) {
        return Err(EmissionError::InvalidParameter(
            "reference cannot contain the blank".to_string(),
        ));
    }
    if frames_per_symbol == 0 {
        return Err(EmissionError::InvalidParameter(
            "frames_per_symbol must be at least 1".to_string(),
        ));
    }
    if !(0.0..1.0).contains(&noise) {
        return Err(EmissionError::InvalidParameter(format!(
            "noise must lie in [0, 1), got {noise}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut logp: Vec<f32> = Vec::new();
    let mut frames = 0usize;
    let push_frame = |target: Sym, rng: &mut ChaCha8Rng, logp: &mut Vec<f32>| {
        let eps = if noise == 0.0 {
            0.0
        } else {
            let jitter = rng.gen_range(-0.1..=0.1);
            (noise * (1.0 + jitter)).clamp(0.0, 0.999)
        };
        let off = if eps == 0.0 {
            NEG_INF
        } else {
            (eps / (ALPHABET_SIZE - 1) as f64).ln() as f32
        };
        let hot = (1.0 - eps).ln() as f32;
        for i in 0..ALPHABET_SIZE {
            logp.push(if i == target.index() { hot } else { off });
        }
    };

    let mut prev: Option<Sym> = None;
    for &sym in reference {
        if prev == Some(sym) {
            push_frame(BLANK, &mut rng, &mut logp);
            frames += 1;
        }
        for _ in 0..frames_per_symbol {
            push_frame(sym, &mut rng, &mut logp);
            frames += 1;
        }
        prev = Some(sym);
    }
    EmissionMatrix::new(utterance_id, frames, logp)
}
