use alloc::vec::Vec;
use core::convert::Infallible;
use core::fmt;

use super::Provider;

/// Logit standing in for probability zero. Finite so that temperature
/// scaling accepts it; `exp` underflows to exactly 0 for any sane T.
pub const BLOCKED_LOGIT: f64 = -1e9;

/// Emits `seq[i]` at step `i`, then end-of-sequence forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedSequence {
    seq: Vec<usize>,
    eos: usize,
    vocab: usize,
}

impl ForcedSequence {
    pub fn new(seq: Vec<usize>, eos: usize, vocab: usize) -> Self {
        assert!(eos < vocab && seq.iter().all(|t| *t < vocab), "ids must be inside the vocabulary");
        ForcedSequence { seq, eos, vocab }
    }
}

impl Provider for ForcedSequence {
    type Error = Infallible;

    fn vocab_size(&self) -> usize {
        self.vocab
    }

    fn next_scores(&self, prefix: &[usize]) -> Result<Vec<f64>, Infallible> {
        let mut out = alloc::vec![BLOCKED_LOGIT; self.vocab];
        out[self.seq.get(prefix.len()).copied().unwrap_or(self.eos)] = 0.0;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BigramError {
    Empty,
    RowCount { vocab: usize, rows: usize },
    RowLength { row: usize, len: usize, vocab: usize },
    BadProbability { row: usize, col: usize },
}

impl fmt::Display for BigramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BigramError::Empty => f.write_str("empty bigram table"),
            BigramError::RowCount { vocab, rows } => {
                write!(f, "{vocab} tokens need {} rows (one per token plus the start row), got {rows}", vocab + 1)
            }
            BigramError::RowLength { row, len, vocab } => write!(f, "row {row} has {len} entries, expected {vocab}"),
            BigramError::BadProbability { row, col } => write!(f, "entry ({row}, {col}) is negative or not finite"),
        }
    }
}

impl core::error::Error for BigramError {}

/// `p(next | previous)` table. Row `v` conditions on token `v`; the last row
/// is the start-of-sentence context. Rows need not be normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct BigramProvider {
    logits: Vec<Vec<f64>>,
}

impl BigramProvider {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, BigramError> {
        let vocab = rows.first().map(Vec::len).ok_or(BigramError::Empty)?;
        if rows.len() != vocab + 1 {
            return Err(BigramError::RowCount { vocab, rows: rows.len() });
        }
        let mut logits = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != vocab {
                return Err(BigramError::RowLength { row: r, len: row.len(), vocab });
            }
            if let Some(col) = row.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(BigramError::BadProbability { row: r, col });
            }
            logits.push(row.iter().map(|&p| if p > 0.0 { libm::log(p) } else { BLOCKED_LOGIT }).collect());
        }
        Ok(BigramProvider { logits })
    }
}

impl Provider for BigramProvider {
    type Error = Infallible;

    fn vocab_size(&self) -> usize {
        self.logits.len() - 1
    }

    fn next_scores(&self, prefix: &[usize]) -> Result<Vec<f64>, Infallible> {
        let row = prefix.last().copied().unwrap_or(self.vocab_size());
        Ok(self.logits[row].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn bigram_validation() {
        assert_eq!(BigramProvider::new(vec![]), Err(BigramError::Empty));
        assert_eq!(BigramProvider::new(vec![vec![1.0]]), Err(BigramError::RowCount { vocab: 1, rows: 1 }));
        assert!(matches!(
            BigramProvider::new(vec![vec![1.0], vec![-1.0]]),
            Err(BigramError::BadProbability { row: 1, col: 0 })
        ));
        let p = BigramProvider::new(vec![vec![0.5, 0.5], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(p.next_scores(&[]).unwrap(), [BLOCKED_LOGIT, 0.0]);
        assert_eq!(p.next_scores(&[1]).unwrap(), [0.0, BLOCKED_LOGIT]);
    }
}
