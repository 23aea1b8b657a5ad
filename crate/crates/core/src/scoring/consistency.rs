//! Agreement between the correct, explain and apply steps of one sentence.
//!
//! For a source sentence the model produces a correction, then explains it
//! as an edit script, then re-applies that script to the source. Three
//! measures compare the steps:
//!
//! - edit exact match: the explained edits equal, in order, the edits found
//!   by aligning the source with the correction;
//! - chain exact match: the re-applied sentence equals the correction;
//! - edit F0.5: explained edits scored against the aligned edits, matching
//!   on operation and text since paper-mode scripts carry no positions.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::Counts;
use crate::align::{align_tokens, CostModel};
use crate::editscript::{parse_script, ScriptMode, TextualEdit};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyRecord {
    pub edits_exact_match: bool,
    pub chain_exact_match: bool,
    pub edit_f_half: f64,
    pub counts: Counts,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none", default))]
    pub parse_error: Option<String>,
}

pub fn consistency_report(
    src: &[String],
    corrected: &[String],
    explained: &str,
    reapplied: &[String],
    costs: &CostModel,
) -> ConsistencyRecord {
    let reference: Vec<TextualEdit> = align_tokens(src, corrected, costs)
        .iter()
        .map(|e| TextualEdit::from_edit(e, ScriptMode::Paper))
        .collect();
    let chain_exact_match = corrected == reapplied;
    let explained = match parse_script(explained, ScriptMode::Paper) {
        Ok(p) => p.edits,
        Err(err) => {
            return ConsistencyRecord {
                edits_exact_match: false,
                chain_exact_match,
                edit_f_half: 0.0,
                counts: Counts { tp: 0, fp: 0, fn_: reference.len() },
                parse_error: Some(err.to_string()),
            };
        }
    };
    let edits_exact_match =
        explained.len() == reference.len() && explained.iter().zip(&reference).all(|(a, b)| a.same_text(b));

    let mut unmatched: Vec<&TextualEdit> = reference.iter().collect();
    let mut tp = 0;
    for e in &explained {
        if let Some(pos) = unmatched.iter().position(|r| r.same_text(e)) {
            unmatched.swap_remove(pos);
            tp += 1;
        }
    }
    let counts = Counts { tp, fp: explained.len() - tp, fn_: reference.len() - tp };
    ConsistencyRecord { edits_exact_match, chain_exact_match, edit_f_half: counts.f_half(), counts, parse_error: None }
}

/// Corpus-level rates; the F0.5 is computed from pooled counts.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencySummary {
    pub sentences: usize,
    pub edits_exact_match: f64,
    pub chain_exact_match: f64,
    pub edit_f_half: f64,
    pub counts: Counts,
    pub parse_failures: usize,
}

impl ConsistencySummary {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ConsistencyRecord>) -> Self {
        let mut s = ConsistencySummary::default();
        let (mut edits_ok, mut chain_ok) = (0usize, 0usize);
        for r in records {
            s.sentences += 1;
            edits_ok += usize::from(r.edits_exact_match);
            chain_ok += usize::from(r.chain_exact_match);
            s.counts += r.counts;
            s.parse_failures += usize::from(r.parse_error.is_some());
        }
        if s.sentences > 0 {
            s.edits_exact_match = edits_ok as f64 / s.sentences as f64;
            s.chain_exact_match = chain_ok as f64 / s.sentences as f64;
        }
        s.edit_f_half = s.counts.f_half();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::tokenize;
    use crate::editscript::serialize_edits;

    const SRC: &str = "People can also know much information about the celebrity in Twitter .";
    const TGT: &str = "People can also find out a great deal of information about celebrities from Twitter .";

    #[test]
    fn self_consistent_chain() {
        let (src, tgt) = (tokenize(SRC), tokenize(TGT));
        let script = serialize_edits(&align_tokens(&src, &tgt, &CostModel::UNIT), ScriptMode::Paper);
        let r = consistency_report(&src, &tgt, &script, &tgt, &CostModel::UNIT);
        assert!(r.edits_exact_match && r.chain_exact_match);
        assert_eq!(r.edit_f_half, 1.0);
    }

    #[test]
    fn split_span_edit_breaks_exact_match() {
        let (src, tgt) = (tokenize(SRC), tokenize(TGT));
        let script = serialize_edits(&align_tokens(&src, &tgt, &CostModel::UNIT), ScriptMode::Paper);
        let first = script.lines().next().unwrap();
        assert_eq!(first, "Replace know much with find out a great deal of");
        let split = script.replacen(first, "Replace know with find out\nReplace much with a great deal of", 1);
        let r = consistency_report(&src, &tgt, &split, &tgt, &CostModel::UNIT);
        assert!(!r.edits_exact_match);
        assert!(r.chain_exact_match);
        assert!(r.edit_f_half < 1.0);
        assert_eq!(r.counts, Counts { tp: 1, fp: 2, fn_: 1 });
    }

    #[test]
    fn dropped_edit_breaks_chain() {
        let (src, tgt) = (tokenize("a b c d"), tokenize("a x c y"));
        let script = "Replace b with x\nReplace d with y";
        let reapplied = tokenize("a x c d");
        let r = consistency_report(&src, &tgt, script, &reapplied, &CostModel::UNIT);
        assert!(r.edits_exact_match);
        assert!(!r.chain_exact_match);
    }

    #[test]
    fn parse_failure_is_a_non_match_with_reason() {
        let (src, tgt) = (tokenize("a b"), tokenize("a c"));
        let r = consistency_report(&src, &tgt, "Swap b c", &tgt, &CostModel::UNIT);
        assert!(!r.edits_exact_match);
        assert_eq!(r.edit_f_half, 0.0);
        assert!(r.parse_error.unwrap().contains("line 1"));
    }

    #[test]
    fn summary_rates() {
        let ok = ConsistencyRecord {
            edits_exact_match: true,
            chain_exact_match: true,
            edit_f_half: 1.0,
            counts: Counts { tp: 1, fp: 0, fn_: 0 },
            parse_error: None,
        };
        let bad = ConsistencyRecord { edits_exact_match: false, counts: Counts { tp: 0, fp: 1, fn_: 1 }, ..ok.clone() };
        let s = ConsistencySummary::from_records(&[ok.clone(), ok, bad]);
        assert_eq!(s.sentences, 3);
        assert!((s.edits_exact_match - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.chain_exact_match, 1.0);
        assert_eq!(s.counts, Counts { tp: 2, fp: 1, fn_: 1 });
    }
}
