//! Token alignment and edit extraction.
//!
//! Source and target sentences are aligned with a weighted Levenshtein DP over
//! whole tokens. The traceback yields a sequence of [`AlignOp`]s which is then
//! collapsed into span-level [`Edit`]s: every maximal run of adjacent
//! non-match operations becomes one edit when it contains at least one
//! replace (and two or more operations), or when it is made only of inserts
//! or only of deletes. Word-order changes surface as delete + insert.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub mod oracle;

/// Splits pre-tokenized text on Unicode whitespace.
///
/// Runs of whitespace collapse; every other character is kept verbatim.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split_whitespace().map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairError {
    EmptySource,
    EmptyTarget,
}

impl fmt::Display for PairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairError::EmptySource => f.write_str("source sentence is empty"),
            PairError::EmptyTarget => f.write_str("target sentence is empty"),
        }
    }
}

impl core::error::Error for PairError {}

/// A source/target sentence pair together with its document position.
///
/// `src_raw` and `tgt_raw` hold the whitespace-normalized text, so joining
/// the tokens with single spaces always reproduces them.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TokenizedPair {
    pub pair_id: String,
    pub doc_id: String,
    pub doc_index: u64,
    pub src_tokens: Vec<String>,
    pub tgt_tokens: Vec<String>,
    pub src_raw: String,
    pub tgt_raw: String,
}

impl TokenizedPair {
    pub fn new(
        pair_id: impl Into<String>,
        doc_id: impl Into<String>,
        doc_index: u64,
        src: &str,
        tgt: &str,
    ) -> Result<Self, PairError> {
        let src_tokens = tokenize(src);
        if src_tokens.is_empty() {
            return Err(PairError::EmptySource);
        }
        let tgt_tokens = tokenize(tgt);
        if tgt_tokens.is_empty() {
            return Err(PairError::EmptyTarget);
        }
        Ok(TokenizedPair {
            pair_id: pair_id.into(),
            doc_id: doc_id.into(),
            doc_index,
            src_raw: src_tokens.join(" "),
            tgt_raw: tgt_tokens.join(" "),
            src_tokens,
            tgt_tokens,
        })
    }

    /// True when source and target differ at the token level.
    pub fn is_errorful(&self) -> bool {
        self.src_tokens != self.tgt_tokens
    }
}

/// Half-open token interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub const fn len(&self) -> usize {
        self.end - self.start
    }

    pub const fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EditOp {
    Insert,
    Delete,
    Replace,
}

impl EditOp {
    /// The keyword used by the textual script grammar.
    pub const fn keyword(self) -> &'static str {
        match self {
            EditOp::Insert => "Insert",
            EditOp::Delete => "Delete",
            EditOp::Replace => "Replace",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edit {
    pub op: EditOp,
    pub src_span: Span,
    pub tgt_span: Span,
    pub src_text: Vec<String>,
    pub tgt_text: Vec<String>,
}

impl Edit {
    /// Builds an edit from spans, classifying the operation by span emptiness.
    ///
    /// Returns `None` when both spans are empty.
    pub fn from_spans(src: &[String], tgt: &[String], src_span: Span, tgt_span: Span) -> Option<Self> {
        let op = match (src_span.is_empty(), tgt_span.is_empty()) {
            (true, true) => return None,
            (true, false) => EditOp::Insert,
            (false, true) => EditOp::Delete,
            (false, false) => EditOp::Replace,
        };
        Some(Edit {
            op,
            src_span,
            tgt_span,
            src_text: src[src_span.start..src_span.end].to_vec(),
            tgt_text: tgt[tgt_span.start..tgt_span.end].to_vec(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EditScript {
    pub pair_id: String,
    pub edits: Vec<Edit>,
}

impl EditScript {
    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }
}

/// Per-operation costs. Matches always cost zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostModel {
    pub replace: u32,
    pub insert: u32,
    pub delete: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::UNIT
    }
}

impl CostModel {
    pub const UNIT: CostModel = CostModel { replace: 1, insert: 1, delete: 1 };

    pub const fn cost(&self, op: AlignOp) -> u32 {
        match op {
            AlignOp::Match => 0,
            AlignOp::Replace => self.replace,
            AlignOp::Insert => self.insert,
            AlignOp::Delete => self.delete,
        }
    }
}

/// A single step of a token alignment, before span merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlignOp {
    Match,
    Replace,
    Delete,
    Insert,
}

/// Total cost of an operation sequence.
pub fn ops_cost(ops: &[AlignOp], costs: &CostModel) -> u64 {
    ops.iter().map(|&op| u64::from(costs.cost(op))).sum()
}

struct DpTable {
    cols: usize,
    cells: Vec<u32>,
}

impl DpTable {
    #[inline]
    fn at(&self, i: usize, j: usize) -> u32 {
        self.cells[i * self.cols + j]
    }
}

fn fill_table<T: PartialEq>(src: &[T], tgt: &[T], costs: &CostModel) -> DpTable {
    let cols = tgt.len() + 1;
    let mut cells = vec![0u32; (src.len() + 1) * cols];
    for j in 1..cols {
        cells[j] = cells[j - 1] + costs.insert;
    }
    for i in 1..=src.len() {
        let row = i * cols;
        let prev = row - cols;
        cells[row] = cells[prev] + costs.delete;
        for j in 1..cols {
            let diag = if src[i - 1] == tgt[j - 1] {
                cells[prev + j - 1]
            } else {
                cells[prev + j - 1] + costs.replace
            };
            let del = cells[prev + j] + costs.delete;
            let ins = cells[row + j - 1] + costs.insert;
            cells[row + j] = diag.min(del).min(ins);
        }
    }
    DpTable { cols, cells }
}

/// Minimal-cost alignment as a sequence of steps from the start of both
/// sequences to their ends.
///
/// Ties during traceback prefer match, then replace, then delete, then insert.
pub fn align_ops<T: PartialEq>(src: &[T], tgt: &[T], costs: &CostModel) -> Vec<AlignOp> {
    let table = fill_table(src, tgt, costs);
    let (mut i, mut j) = (src.len(), tgt.len());
    let mut ops = Vec::with_capacity(i.max(j));
    while i > 0 || j > 0 {
        let here = table.at(i, j);
        if i > 0 && j > 0 {
            let diag = table.at(i - 1, j - 1);
            if src[i - 1] == tgt[j - 1] && diag == here {
                ops.push(AlignOp::Match);
                i -= 1;
                j -= 1;
                continue;
            }
            if src[i - 1] != tgt[j - 1] && diag + costs.replace == here {
                ops.push(AlignOp::Replace);
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && table.at(i - 1, j) + costs.delete == here {
            ops.push(AlignOp::Delete);
            i -= 1;
        } else {
            debug_assert!(j > 0 && table.at(i, j - 1) + costs.insert == here);
            ops.push(AlignOp::Insert);
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

/// Minimal alignment cost between the whole of `emitted` and every source
/// prefix: element `c` is the cost of aligning `src[..c]` with `emitted`.
pub fn prefix_costs<T: PartialEq>(src: &[T], emitted: &[T], costs: &CostModel) -> Vec<u32> {
    let table = fill_table(src, emitted, costs);
    (0..=src.len()).map(|i| table.at(i, emitted.len())).collect()
}

/// Collapses alignment steps into span edits.
pub fn merge_ops(ops: &[AlignOp], src: &[String], tgt: &[String]) -> Vec<Edit> {
    let mut edits = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let mut k = 0;
    while k < ops.len() {
        if ops[k] == AlignOp::Match {
            i += 1;
            j += 1;
            k += 1;
            continue;
        }
        let run_start = k;
        while k < ops.len() && ops[k] != AlignOp::Match {
            k += 1;
        }
        let run = &ops[run_start..k];
        let has_replace = run.contains(&AlignOp::Replace);
        let uniform = run.iter().all(|&op| op == run[0]);
        if (has_replace && run.len() >= 2) || uniform {
            let (si, sj) = (i, j);
            for &op in run {
                advance(op, &mut i, &mut j);
            }
            edits.extend(Edit::from_spans(src, tgt, Span::new(si, i), Span::new(sj, j)));
        } else {
            for &op in run {
                let (si, sj) = (i, j);
                advance(op, &mut i, &mut j);
                edits.extend(Edit::from_spans(src, tgt, Span::new(si, i), Span::new(sj, j)));
            }
        }
    }
    edits
}

fn advance(op: AlignOp, i: &mut usize, j: &mut usize) {
    match op {
        AlignOp::Match | AlignOp::Replace => {
            *i += 1;
            *j += 1;
        }
        AlignOp::Delete => *i += 1,
        AlignOp::Insert => *j += 1,
    }
}

/// Aligns two token sequences and returns merged span edits.
pub fn align_tokens(src: &[String], tgt: &[String], costs: &CostModel) -> Vec<Edit> {
    if src == tgt {
        return Vec::new();
    }
    let ops = align_ops(src, tgt, costs);
    merge_ops(&ops, src, tgt)
}

/// Extracts the edit script turning the pair's source into its target.
pub fn align_pair(pair: &TokenizedPair, costs: &CostModel) -> EditScript {
    EditScript {
        pair_id: pair.pair_id.clone(),
        edits: align_tokens(&pair.src_tokens, &pair.tgt_tokens, costs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("He go at school ."), ["He", "go", "at", "school", "."]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("a  b\tc"), ["a", "b", "c"]);
        assert_eq!(tokenize("  Ünï   cödé\u{3000}x "), ["Ünï", "cödé", "x"]);
    }

    #[test]
    fn pair_rejects_empty_sides() {
        assert_eq!(TokenizedPair::new("p", "d", 0, "  ", "x"), Err(PairError::EmptySource));
        assert_eq!(TokenizedPair::new("p", "d", 0, "x", ""), Err(PairError::EmptyTarget));
        let p = TokenizedPair::new("p", "d", 0, "a   b", "a\tb").unwrap();
        assert_eq!(p.src_raw, "a b");
        assert!(!p.is_errorful());
    }

    #[test]
    fn identity_pair_has_no_edits() {
        let p = TokenizedPair::new("1", "d", 0, "People with albinism have sensitive skin .", "People with albinism have sensitive skin .").unwrap();
        assert!(align_pair(&p, &CostModel::UNIT).is_empty());
    }

    #[test]
    fn albinism_pair_gives_two_replacements() {
        let p = TokenizedPair::new(
            "1",
            "d",
            0,
            "The people with albinism have sensitive skin and it needs regular treatment .",
            "People with albinism have sensitive skin and this needs regular treatment .",
        )
        .unwrap();
        let script = align_pair(&p, &CostModel::UNIT);
        assert_eq!(script.edits.len(), 2);
        let e0 = &script.edits[0];
        assert_eq!(e0.op, EditOp::Replace);
        assert_eq!(e0.src_text, ["The", "people"]);
        assert_eq!(e0.tgt_text, ["People"]);
        assert_eq!((e0.src_span, e0.tgt_span), (Span::new(0, 2), Span::new(0, 1)));
        let e1 = &script.edits[1];
        assert_eq!(e1.op, EditOp::Replace);
        assert_eq!((e1.src_text.as_slice(), e1.tgt_text.as_slice()), (&["it".to_string()][..], &["this".to_string()][..]));
        assert_eq!(e1.src_span, Span::new(8, 9));
    }

    #[test]
    fn replace_then_trailing_insert() {
        let edits = align_tokens(&toks("a b c"), &toks("a x c d"), &CostModel::UNIT);
        assert_eq!(edits.len(), 2);
        assert_eq!(edits[0].op, EditOp::Replace);
        assert_eq!((edits[0].src_text[0].as_str(), edits[0].tgt_text[0].as_str()), ("b", "x"));
        assert_eq!(edits[1].op, EditOp::Insert);
        assert_eq!(edits[1].src_span, Span::new(3, 3));
        assert_eq!(edits[1].tgt_text, ["d"]);
    }

    #[test]
    fn traceback_prefers_replace_over_delete() {
        let ops = align_ops(&["a", "b"], &["c"], &CostModel::UNIT);
        assert_eq!(ops, [AlignOp::Delete, AlignOp::Replace]);
    }

    #[test]
    fn insert_and_delete_runs_merge() {
        let edits = align_tokens(&toks("a b c d"), &toks("a d"), &CostModel::UNIT);
        assert_eq!(edits.len(), 1);
        assert_eq!(edits[0].op, EditOp::Delete);
        assert_eq!(edits[0].src_span, Span::new(1, 3));

        let edits = align_tokens(&toks("a d"), &toks("a b c d"), &CostModel::UNIT);
        assert_eq!(edits.len(), 1);
        assert_eq!(edits[0].op, EditOp::Insert);
        assert_eq!(edits[0].tgt_text, ["b", "c"]);
    }

    #[test]
    fn mixed_insert_delete_run_stays_split_under_costly_replace() {
        let costs = CostModel { replace: 5, insert: 1, delete: 1 };
        let ops = align_ops(&["x"], &["y"], &costs);
        // traceback runs from the end, so the preferred delete comes last
        assert_eq!(ops, [AlignOp::Insert, AlignOp::Delete]);
        let edits = align_tokens(&toks("x"), &toks("y"), &costs);
        assert_eq!(edits.len(), 2);
        assert_eq!(edits[0].op, EditOp::Insert);
        assert_eq!(edits[0].src_span, Span::new(0, 0));
        assert_eq!(edits[1].op, EditOp::Delete);
        assert_eq!(edits[1].src_span, Span::new(0, 1));
    }

    #[test]
    fn prefix_costs_last_row() {
        let c = prefix_costs(&["He", "goes", "home"], &["He", "went"], &CostModel::UNIT);
        assert_eq!(c, [2, 1, 1, 2]);
    }
}
