//! Token vocabularies and bigram tables for the `decode` subcommand.
//!
//! A table is a JSON object `{token: {next_token: prob}}`. The context
//! `<s>` starts a sentence and the token `</s>` ends one. Tokens with no
//! entry of their own end the sentence with probability 1.
//!
//! A vocabulary is JSONL, `{"token": "...", "id": n}` per line, with ids
//! forming `0..n` and containing `</s>`. Without one, `</s>` gets id 0 and
//! the remaining tokens follow in sorted order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use gec_core::decode::BigramProvider;
use serde::Deserialize;

use crate::error::{Result, ToolError};
use crate::io::Lines;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Vocab {
    pub fn from_tokens(tokens: Vec<String>) -> std::result::Result<Self, String> {
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if ids.insert(t.clone(), i).is_some() {
                return Err(format!("token {t:?} listed twice"));
            }
        }
        if !ids.contains_key(EOS) {
            return Err(format!("vocabulary lacks {EOS}"));
        }
        if ids.contains_key(BOS) {
            return Err(format!("{BOS} is a context, not a token"));
        }
        Ok(Vocab { tokens, ids })
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn eos(&self) -> usize {
        self.ids[EOS]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Source ids; unknown tokens map past the end of the vocabulary, where
    /// the boost leaves the distribution alone.
    pub fn encode(&self, tokens: &[String]) -> Vec<usize> {
        tokens.iter().map(|t| self.id(t).unwrap_or(usize::MAX)).collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabLine {
    token: String,
    id: usize,
}

pub fn read_vocab(path: &Path) -> Result<Vocab> {
    let mut entries = BTreeMap::new();
    for r in Lines::open(path)? {
        let (line, text) = r?;
        if text.trim().is_empty() {
            continue;
        }
        let v: VocabLine = serde_json::from_str(&text).map_err(|e| ToolError::data(path, line, e.to_string()))?;
        if entries.insert(v.id, v.token).is_some() {
            return Err(ToolError::data(path, line, format!("id {} listed twice", v.id)));
        }
    }
    if !entries.keys().copied().eq(0..entries.len()) {
        return Err(ToolError::data(path, 0, "ids must be exactly 0..n"));
    }
    Vocab::from_tokens(entries.into_values().collect()).map_err(|m| ToolError::data(path, 0, m))
}

pub type Table = BTreeMap<String, BTreeMap<String, f64>>;

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| ToolError::data(path, e.line(), e.to_string()))
}

pub fn table_vocab(table: &Table) -> Vocab {
    let mut rest = BTreeSet::new();
    for (ctx, row) in table {
        if ctx != BOS && ctx != EOS {
            rest.insert(ctx.clone());
        }
        rest.extend(row.keys().filter(|t| *t != EOS && *t != BOS).cloned());
    }
    let tokens = std::iter::once(EOS.to_string()).chain(rest).collect();
    Vocab::from_tokens(tokens).expect("built with a single end token")
}

pub fn build_provider(table: &Table, vocab: &Vocab) -> std::result::Result<BigramProvider, String> {
    let v = vocab.len();
    let eos = vocab.eos();
    let mut rows = vec![vec![0.0; v]; v + 1];
    let mut seen = vec![false; v + 1];
    for (ctx, entries) in table {
        let r = match ctx.as_str() {
            BOS => v,
            t => vocab.id(t).ok_or_else(|| format!("context {t:?} is not in the vocabulary"))?,
        };
        for (next, &p) in entries {
            let c = vocab.id(next).ok_or_else(|| format!("token {next:?} is not in the vocabulary"))?;
            if !(p.is_finite() && p >= 0.0) {
                return Err(format!("p({next:?} | {ctx:?}) = {p} is not a probability"));
            }
            rows[r][c] = p;
        }
        seen[r] = entries.values().any(|p| *p > 0.0);
    }
    for (r, row) in rows.iter_mut().enumerate() {
        if !seen[r] {
            row[eos] = 1.0;
        }
    }
    BigramProvider::new(rows).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use gec_core::decode::{Provider, BLOCKED_LOGIT};

    fn table(json: &str) -> Table {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn derived_vocab_and_rows() {
        let t = table(r#"{"<s>": {"He": 1.0}, "He": {"goes": 0.5, "went": 0.5}, "goes": {"</s>": 1.0}}"#);
        let v = table_vocab(&t);
        assert_eq!((v.eos(), v.len()), (0, 4));
        assert_eq!(v.id("He"), Some(1));
        let p = build_provider(&t, &v).unwrap();
        let start = p.next_scores(&[]).unwrap();
        assert_eq!(start[1], 0.0);
        assert_eq!(start[0], BLOCKED_LOGIT);
        // "went" has no row: it ends the sentence
        let after_went = p.next_scores(&[v.id("went").unwrap()]).unwrap();
        assert_eq!(after_went[0], 0.0);
    }

    #[test]
    fn rejects_unknown_tokens_and_bad_probabilities() {
        let v = Vocab::from_tokens(vec![EOS.into(), "a".into()]).unwrap();
        assert!(build_provider(&table(r#"{"<s>": {"b": 1.0}}"#), &v).is_err());
        assert!(build_provider(&table(r#"{"<s>": {"a": -1.0}}"#), &v).is_err());
        assert!(Vocab::from_tokens(vec!["a".into()]).is_err());
        assert_eq!(v.encode(&["a".into(), "zzz".into()]), [1, usize::MAX]);
    }
}
