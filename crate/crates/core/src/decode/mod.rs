//! Decoding-time transforms and a small beam search.
//!
//! At every step the provider's scores go through a fixed chain:
//! temperature-scaled softmax first, then a multiplicative boost of the next
//! unconsumed source token,
//!
//! ```text
//! p'(s) = p(s) * (1 + lambda) / Z,   p'(v) = p(v) / Z,   Z = 1 + lambda * p(s)
//! ```
//!
//! which keeps the output on the simplex and leaves the order of all other
//! tokens unchanged. Which source token is "next" is tracked by
//! [`AlignState`], a monotone pointer into the source advanced by
//! [`advance_alignment`].

mod beam;
mod provider;

pub use beam::{beam_search, BeamError, DecodeConfig, Hypothesis, Provider};
pub use provider::{BigramError, BigramProvider, ForcedSequence, BLOCKED_LOGIT};

use alloc::vec::Vec;
use core::fmt;

use crate::align::{prefix_costs, CostModel};

/// Slack allowed on the sum of a probability vector.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DecodeError {
    EmptyVocabulary,
    NonFinite { index: usize },
    BadTemperature(f64),
    BadBoost(f64),
    NotADistribution,
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::EmptyVocabulary => f.write_str("empty score vector"),
            DecodeError::NonFinite { index } => write!(f, "score {index} is not finite"),
            DecodeError::BadTemperature(t) => write!(f, "temperature must be positive and finite, got {t}"),
            DecodeError::BadBoost(l) => write!(f, "boost must be non-negative and finite, got {l}"),
            DecodeError::NotADistribution => f.write_str("entries must be non-negative and sum to 1"),
        }
    }
}

impl core::error::Error for DecodeError {}

/// Probability vector over vocabulary ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, DecodeError> {
        if probs.is_empty() {
            return Err(DecodeError::EmptyVocabulary);
        }
        let ok = probs.iter().all(|p| p.is_finite() && *p >= 0.0)
            && (probs.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOLERANCE;
        if ok {
            Ok(Distribution(probs))
        } else {
            Err(DecodeError::NotADistribution)
        }
    }

    pub fn uniform(n: usize) -> Result<Self, DecodeError> {
        if n == 0 {
            return Err(DecodeError::EmptyVocabulary);
        }
        Ok(Distribution(alloc::vec![1.0 / n as f64; n]))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.0.iter().filter(|p| **p > 0.0).map(|p| p * libm::log(*p)).sum::<f64>()
    }
}

/// `softmax(logits / t)`, computed with the max subtracted.
pub fn apply_temperature(logits: &[f64], t: f64) -> Result<Distribution, DecodeError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(DecodeError::BadTemperature(t));
    }
    if logits.is_empty() {
        return Err(DecodeError::EmptyVocabulary);
    }
    if let Some(index) = logits.iter().position(|x| !x.is_finite()) {
        return Err(DecodeError::NonFinite { index });
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|x| libm::exp((x - max) / t)).collect();
    let z: f64 = out.iter().sum();
    for p in &mut out {
        *p /= z;
    }
    Ok(Distribution(out))
}

pub fn softmax(logits: &[f64]) -> Result<Distribution, DecodeError> {
    apply_temperature(logits, 1.0)
}

/// How the source pointer recovers after the output diverges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realign {
    /// Re-anchor on the longest tail of at most `k` emitted tokens that
    /// occurs in the source after the pointer, nearest occurrence first.
    Window(usize),
    /// Full edit-distance alignment of the emitted prefix against every
    /// source prefix at each step. Quadratic; meant for short inputs.
    Exact,
}

impl Default for Realign {
    fn default() -> Self {
        Realign::Window(2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignState<T = usize> {
    pub consumed: usize,
    /// One flag per emitted token: did it match the source token under the
    /// pointer?
    pub matched: Vec<bool>,
    pub emitted: Vec<T>,
}

impl<T> Default for AlignState<T> {
    fn default() -> Self {
        AlignState { consumed: 0, matched: Vec::new(), emitted: Vec::new() }
    }
}

impl<T: Clone + PartialEq> AlignState<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_exhausted(&self, src: &[T]) -> bool {
        self.consumed >= src.len()
    }
}

pub fn advance_alignment<T: Clone + PartialEq>(
    state: &AlignState<T>,
    src: &[T],
    emitted: &T,
    realign: Realign,
) -> AlignState<T> {
    let mut next = state.clone();
    next.emitted.push(emitted.clone());
    let hit = src.get(state.consumed) == Some(emitted);
    next.matched.push(hit);
    if hit {
        next.consumed += 1;
        return next;
    }
    if state.consumed >= src.len() {
        return next;
    }
    match realign {
        Realign::Window(k) => {
            let tail_max = k.min(next.emitted.len());
            for j in (1..=tail_max).rev() {
                let tail = &next.emitted[next.emitted.len() - j..];
                let found = (state.consumed + 1).max(j)..=src.len();
                if let Some(c) = found.into_iter().find(|&c| &src[c - j..c] == tail) {
                    next.consumed = c;
                    break;
                }
            }
        }
        Realign::Exact => {
            let costs = prefix_costs(src, &next.emitted, &CostModel::UNIT);
            let best = costs[state.consumed..].iter().copied().min().unwrap_or(0);
            let c = (state.consumed..costs.len()).rev().find(|&c| costs[c] == best).unwrap_or(state.consumed);
            next.consumed = c;
        }
    }
    next
}

/// Boosts the next source token, `src[state.consumed]`, by `1 + lambda`.
/// Identity when the source is exhausted or the id is out of range.
pub fn align_pred_boost<T>(
    dist: &Distribution,
    state: &AlignState<T>,
    src: &[usize],
    lambda: f64,
) -> Result<Distribution, DecodeError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(DecodeError::BadBoost(lambda));
    }
    let Some(&s) = src.get(state.consumed) else {
        return Ok(dist.clone());
    };
    if s >= dist.len() || lambda == 0.0 {
        return Ok(dist.clone());
    }
    let mut out = dist.0.clone();
    out[s] *= 1.0 + lambda;
    let z: f64 = out.iter().sum();
    for p in &mut out {
        *p /= z;
    }
    Ok(Distribution(out))
}

/// The per-step chain: temperature, then boost.
pub fn transform<T>(
    logits: &[f64],
    state: &AlignState<T>,
    src: &[usize],
    temperature: f64,
    lambda: f64,
) -> Result<Distribution, DecodeError> {
    align_pred_boost(&apply_temperature(logits, temperature)?, state, src, lambda)
}
