//! Rule-based error typing over a small closed taxonomy.
//!
//! Rules are tried in order and the first match wins:
//!
//! 1. `PUNCT`: every token on both sides is punctuation (Unicode `P*`:
//!    Pc, Pd, Ps, Pe, Pi, Pf, Po).
//! 2. `ORTH`: both sides are equal after lowercasing and removing the token
//!    boundaries (case and whitespace changes).
//! 3. `WO`: both sides hold the same multiset of tokens, more than one.
//! 4. `SPELL`: one-token replace, character edit distance at most half the
//!    longer token, same first letter ignoring case.
//! 5. otherwise `M` (insert), `U` (delete) or `R-OTHER` (replace).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::align::{Edit, EditOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorType {
    Punct,
    Orth,
    Spell,
    WordOrder,
    Missing,
    Unnecessary,
    ReplaceOther,
}

impl ErrorType {
    pub const ALL: [ErrorType; 7] = [
        ErrorType::Punct,
        ErrorType::Orth,
        ErrorType::Spell,
        ErrorType::WordOrder,
        ErrorType::Missing,
        ErrorType::Unnecessary,
        ErrorType::ReplaceOther,
    ];

    pub const fn label(self) -> &'static str {
        match self {
            ErrorType::Punct => "PUNCT",
            ErrorType::Orth => "ORTH",
            ErrorType::Spell => "SPELL",
            ErrorType::WordOrder => "WO",
            ErrorType::Missing => "M",
            ErrorType::Unnecessary => "U",
            ErrorType::ReplaceOther => "R-OTHER",
        }
    }

    pub fn from_label(label: &str) -> Option<ErrorType> {
        ErrorType::ALL.into_iter().find(|t| t.label() == label)
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// True for a non-empty token made only of Unicode punctuation.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.general_category_group() == GeneralCategoryGroup::Punctuation)
}

pub fn classify_error(edit: &Edit) -> ErrorType {
    let src = &edit.src_text;
    let tgt = &edit.tgt_text;
    if src.iter().chain(tgt).all(|t| is_punctuation(t)) {
        return ErrorType::Punct;
    }
    if !src.is_empty() && !tgt.is_empty() && folded(src) == folded(tgt) {
        return ErrorType::Orth;
    }
    if src.len() > 1 && sorted(src) == sorted(tgt) {
        return ErrorType::WordOrder;
    }
    if edit.op == EditOp::Replace && src.len() == 1 && tgt.len() == 1 && looks_like_spelling(&src[0], &tgt[0]) {
        return ErrorType::Spell;
    }
    match edit.op {
        EditOp::Insert => ErrorType::Missing,
        EditOp::Delete => ErrorType::Unnecessary,
        EditOp::Replace => ErrorType::ReplaceOther,
    }
}

fn folded(tokens: &[String]) -> String {
    tokens.iter().flat_map(|t| t.chars()).flat_map(char::to_lowercase).collect()
}

fn sorted(tokens: &[String]) -> Vec<&str> {
    let mut v: Vec<&str> = tokens.iter().map(String::as_str).collect();
    v.sort_unstable();
    v
}

fn looks_like_spelling(a: &str, b: &str) -> bool {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let same_first = match (a.first(), b.first()) {
        (Some(x), Some(y)) => x.to_lowercase().eq(y.to_lowercase()),
        _ => false,
    };
    if !same_first {
        return false;
    }
    let longest = a.len().max(b.len());
    2 * char_distance(&a, &b) <= longest
}

fn char_distance(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Counts of edits per error type.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErrorHistogram {
    counts: BTreeMap<ErrorType, usize>,
}

impl ErrorHistogram {
    pub fn from_edits<'a>(edits: impl IntoIterator<Item = &'a Edit>) -> Self {
        let mut h = ErrorHistogram::default();
        h.extend(edits);
        h
    }

    pub fn extend<'a>(&mut self, edits: impl IntoIterator<Item = &'a Edit>) {
        for e in edits {
            *self.counts.entry(classify_error(e)).or_default() += 1;
        }
    }

    pub fn add(&mut self, kind: ErrorType) {
        *self.counts.entry(kind).or_default() += 1;
    }

    pub fn merge(&mut self, other: &ErrorHistogram) {
        for (k, v) in &other.counts {
            *self.counts.entry(*k).or_default() += v;
        }
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, kind: ErrorType) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    /// Share of all edits; 0 for an empty histogram.
    pub fn proportion(&self, kind: ErrorType) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.count(kind) as f64 / n as f64,
        }
    }

    /// `(type, count, proportion)` for every type, in taxonomy order.
    pub fn rows(&self) -> impl Iterator<Item = (ErrorType, usize, f64)> + '_ {
        ErrorType::ALL.into_iter().map(|t| (t, self.count(t), self.proportion(t)))
    }

    /// Total variation distance between the two type distributions.
    pub fn distance(&self, other: &ErrorHistogram) -> f64 {
        ErrorType::ALL.into_iter().map(|t| (self.proportion(t) - other.proportion(t)).abs()).sum::<f64>() / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{align_tokens, tokenize, CostModel, Span};

    fn e(op: EditOp, src: &[&str], tgt: &[&str]) -> Edit {
        Edit {
            op,
            src_span: Span::new(0, src.len()),
            tgt_span: Span::new(0, tgt.len()),
            src_text: src.iter().map(|s| String::from(*s)).collect(),
            tgt_text: tgt.iter().map(|s| String::from(*s)).collect(),
        }
    }

    #[test]
    fn rule_examples() {
        assert_eq!(classify_error(&e(EditOp::Insert, &[], &[","])), ErrorType::Punct);
        assert_eq!(classify_error(&e(EditOp::Replace, &["."], &["!", "''"])), ErrorType::Punct);
        assert_eq!(classify_error(&e(EditOp::Replace, &["people"], &["People"])), ErrorType::Orth);
        assert_eq!(classify_error(&e(EditOp::Replace, &["some", "one"], &["someone"])), ErrorType::Orth);
        assert_eq!(classify_error(&e(EditOp::Replace, &["recieve"], &["receive"])), ErrorType::Spell);
        assert_eq!(classify_error(&e(EditOp::Replace, &["always", "is"], &["is", "always"])), ErrorType::WordOrder);
        assert_eq!(classify_error(&e(EditOp::Insert, &[], &["the"])), ErrorType::Missing);
        assert_eq!(classify_error(&e(EditOp::Delete, &["the"], &[])), ErrorType::Unnecessary);
        assert_eq!(classify_error(&e(EditOp::Replace, &["go"], &["went"])), ErrorType::ReplaceOther);
        // first letters differ
        assert_eq!(classify_error(&e(EditOp::Replace, &["cat"], &["hat"])), ErrorType::ReplaceOther);
        // $ is a symbol, not punctuation
        assert_eq!(classify_error(&e(EditOp::Insert, &[], &["$"])), ErrorType::Missing);
    }

    #[test]
    fn spelling_threshold_is_half_the_longer_token() {
        assert_eq!(char_distance(&['r', 'e', 'c', 'i', 'e', 'v', 'e'], &['r', 'e', 'c', 'e', 'i', 'v', 'e']), 2);
        // distance 2 over length 4: exactly 0.5
        assert!(looks_like_spelling("abcd", "abxy"));
        // distance 3 over length 4
        assert!(!looks_like_spelling("abcd", "axyz"));
    }

    #[test]
    fn histogram_proportions() {
        let mut h = ErrorHistogram::default();
        for t in [ErrorType::Punct, ErrorType::Punct, ErrorType::Spell, ErrorType::ReplaceOther] {
            h.add(t);
        }
        assert_eq!(h.proportion(ErrorType::Punct), 0.5);
        assert_eq!(h.proportion(ErrorType::Spell), 0.25);
        assert_eq!(h.proportion(ErrorType::ReplaceOther), 0.25);
        assert_eq!(h.rows().map(|r| r.2).sum::<f64>(), 1.0);

        let empty = ErrorHistogram::default();
        assert!(empty.rows().all(|(_, c, p)| c == 0 && p == 0.0));
        assert_eq!(h.distance(&h.clone()), 0.0);
    }

    #[test]
    fn histogram_from_aligned_edits() {
        let edits = align_tokens(&tokenize("He go to school"), &tokenize("He goes to school ."), &CostModel::UNIT);
        let h = ErrorHistogram::from_edits(&edits);
        assert_eq!(h.total(), 2);
        assert_eq!(h.count(ErrorType::Punct), 1);
        assert_eq!(h.count(ErrorType::Spell), 1);
    }
}
