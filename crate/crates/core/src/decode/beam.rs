use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::{advance_alignment, transform, AlignState, DecodeError, Realign};

/// Next-token scores (logits) for a given prefix of token ids.
///
/// Implementations must be deterministic: the same prefix always yields the
/// same scores. The vector length is the vocabulary size.
pub trait Provider {
    type Error;

    fn vocab_size(&self) -> usize;

    fn next_scores(&self, prefix: &[usize]) -> Result<Vec<f64>, Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeConfig {
    pub temperature: f64,
    pub boost: f64,
    pub beam_width: usize,
    /// Generated tokens per hypothesis, end-of-sequence included.
    pub max_len: usize,
    pub eos: usize,
    pub realign: Realign,
}

impl DecodeConfig {
    pub fn new(eos: usize) -> Self {
        DecodeConfig { temperature: 1.0, boost: 0.5, beam_width: 4, max_len: 128, eos, realign: Realign::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    /// Generated ids without the end-of-sequence token.
    pub tokens: Vec<usize>,
    pub log_prob: f64,
    /// `log_prob` divided by the number of generated tokens, counting the
    /// end-of-sequence token when present.
    pub score: f64,
    /// False when `max_len` ran out before end-of-sequence.
    pub finished: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BeamError<E> {
    Provider(E),
    Transform(DecodeError),
    ScoreLength { expected: usize, got: usize },
    ZeroBeamWidth,
    ZeroMaxLen,
}

impl<E: fmt::Display> fmt::Display for BeamError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeamError::Provider(e) => write!(f, "provider failed: {e}"),
            BeamError::Transform(e) => write!(f, "{e}"),
            BeamError::ScoreLength { expected, got } => {
                write!(f, "provider returned {got} scores for a vocabulary of {expected}")
            }
            BeamError::ZeroBeamWidth => f.write_str("beam width must be positive"),
            BeamError::ZeroMaxLen => f.write_str("max_len must be positive"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for BeamError<E> {}

impl<E> From<DecodeError> for BeamError<E> {
    fn from(e: DecodeError) -> Self {
        BeamError::Transform(e)
    }
}

struct Beam {
    tokens: Vec<usize>,
    log_prob: f64,
    state: AlignState,
}

/// Higher first, then the lexicographically smaller id sequence.
fn rank(a_score: f64, a_tokens: &[usize], b_score: f64, b_tokens: &[usize]) -> Ordering {
    b_score.total_cmp(&a_score).then_with(|| a_tokens.cmp(b_tokens))
}

/// Width-limited beam search over the temperature-then-boost chain.
///
/// Live hypotheses are ranked by raw log-probability; finished ones are
/// collected in a pool and ranked by length-normalized score. Returns at most
/// `beam_width` hypotheses, best first.
pub fn beam_search<P: Provider>(
    provider: &P,
    src: &[usize],
    config: &DecodeConfig,
) -> Result<Vec<Hypothesis>, BeamError<P::Error>> {
    if config.beam_width == 0 {
        return Err(BeamError::ZeroBeamWidth);
    }
    if config.max_len == 0 {
        return Err(BeamError::ZeroMaxLen);
    }
    let vocab = provider.vocab_size();
    let mut live = alloc::vec![Beam { tokens: Vec::new(), log_prob: 0.0, state: AlignState::new() }];
    let mut pool: Vec<Hypothesis> = Vec::new();

    for _ in 0..config.max_len {
        let mut cands: Vec<(usize, usize, f64)> = Vec::new();
        for (b, beam) in live.iter().enumerate() {
            let logits = provider.next_scores(&beam.tokens).map_err(BeamError::Provider)?;
            if logits.len() != vocab {
                return Err(BeamError::ScoreLength { expected: vocab, got: logits.len() });
            }
            let dist = transform(&logits, &beam.state, src, config.temperature, config.boost)?;
            for (v, &p) in dist.probs().iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let lp = beam.log_prob + libm::log(p);
                if v == config.eos {
                    let n = beam.tokens.len() + 1;
                    pool.push(Hypothesis { tokens: beam.tokens.clone(), log_prob: lp, score: lp / n as f64, finished: true });
                } else {
                    cands.push((b, v, lp));
                }
            }
        }
        let key = |&(b, v, _): &(usize, usize, f64)| {
            let mut t = live[b].tokens.clone();
            t.push(v);
            t
        };
        cands.sort_by(|x, y| rank(x.2, &key(x), y.2, &key(y)));
        cands.truncate(config.beam_width);
        live = cands
            .iter()
            .map(|c @ &(b, v, lp)| Beam {
                tokens: key(c),
                log_prob: lp,
                state: advance_alignment(&live[b].state, src, &v, config.realign),
            })
            .collect();
        if live.is_empty() {
            break;
        }
    }
    for beam in live {
        let n = beam.tokens.len().max(1);
        pool.push(Hypothesis { score: beam.log_prob / n as f64, tokens: beam.tokens, log_prob: beam.log_prob, finished: false });
    }
    pool.sort_by(|a, b| rank(a.score, &a.tokens, b.score, &b.tokens));
    pool.truncate(config.beam_width);
    Ok(pool)
}
