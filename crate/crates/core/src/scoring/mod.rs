//! Edit-level evaluation in the style of the M2 scorer.
//!
//! Hypothesis edits are extracted by aligning the source with the system
//! output and matched against gold edits on `(source span, correction)`; the
//! gold type string plays no part in matching. Precision and recall follow
//! the m2scorer convention that `0/0 = 1`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::align::{align_tokens, CostModel, Edit, EditOp, Span};

mod consistency;
mod errtype;

pub use consistency::{consistency_report, ConsistencyRecord, ConsistencySummary};
pub use errtype::{classify_error, is_punctuation, ErrorHistogram, ErrorType};

/// F-beta from precision and recall.
///
/// The formula is homogeneous, so inputs given as ratios yield a ratio and
/// inputs given as percentages yield a percentage. Returns 0 when both
/// inputs are 0.
pub fn f_beta(beta: f64, precision: f64, recall: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

/// `num / den`, with `0/0 = 1`.
pub fn ratio_or_one(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: usize,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio_or_one(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio_or_one(self.tp, self.tp + self.fn_)
    }

    pub fn f_half(&self) -> f64 {
        f_beta(0.5, self.precision(), self.recall())
    }
}

impl core::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts { tp: self.tp + o.tp, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_ }
    }
}

impl core::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreReport {
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f_half: f64,
    pub per_type: BTreeMap<ErrorType, Counts>,
}

impl ScoreReport {
    pub fn from_counts(counts: Counts, per_type: BTreeMap<ErrorType, Counts>) -> Self {
        ScoreReport {
            counts,
            precision: counts.precision(),
            recall: counts.recall(),
            f_half: counts.f_half(),
            per_type,
        }
    }
}

/// One gold correction from an M2 `A` line.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GoldEdit {
    pub span: Span,
    pub error_type: String,
    pub correction: Vec<String>,
    pub required: String,
    pub comment: String,
}

impl GoldEdit {
    pub fn new(start: usize, end: usize, error_type: &str, correction: &[&str]) -> Self {
        GoldEdit {
            span: Span::new(start, end),
            error_type: error_type.into(),
            correction: correction.iter().map(|s| String::from(*s)).collect(),
            required: "REQUIRED".into(),
            comment: "-NONE-".into(),
        }
    }

    /// The gold edit as a span edit over `src`. The target span is given in
    /// source coordinates since M2 does not record target offsets. `None` if
    /// the edit does nothing or falls outside the sentence.
    pub fn to_edit(&self, src: &[String]) -> Option<Edit> {
        if self.span.end > src.len() || self.span.start > self.span.end {
            return None;
        }
        let op = match (self.span.is_empty(), self.correction.is_empty()) {
            (true, true) => return None,
            (true, false) => EditOp::Insert,
            (false, true) => EditOp::Delete,
            (false, false) => EditOp::Replace,
        };
        Some(Edit {
            op,
            src_span: self.span,
            tgt_span: Span::new(self.span.start, self.span.start + self.correction.len()),
            src_text: src[self.span.start..self.span.end].to_vec(),
            tgt_text: self.correction.clone(),
        })
    }
}

/// A source sentence with gold edits per annotator.
///
/// An annotator present with an empty edit list made no corrections (the
/// M2 `noop` line).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct M2Record {
    pub src_tokens: Vec<String>,
    pub annotations: BTreeMap<u32, Vec<GoldEdit>>,
}

impl M2Record {
    /// Annotator ids, falling back to a single silent annotator `0`.
    pub fn annotator_ids(&self) -> Vec<u32> {
        if self.annotations.is_empty() {
            alloc::vec![0]
        } else {
            self.annotations.keys().copied().collect()
        }
    }

    pub fn gold(&self, annotator: u32) -> &[GoldEdit] {
        self.annotations.get(&annotator).map_or(&[], Vec::as_slice)
    }

    /// Applies one annotator's edits, producing that annotator's corrected
    /// sentence.
    pub fn corrected(&self, annotator: u32) -> Vec<String> {
        let mut out = Vec::with_capacity(self.src_tokens.len());
        let mut cursor = 0;
        for e in self.gold(annotator) {
            if e.span.start < cursor || e.span.end > self.src_tokens.len() {
                continue;
            }
            out.extend_from_slice(&self.src_tokens[cursor..e.span.start]);
            out.extend(e.correction.iter().cloned());
            cursor = e.span.end;
        }
        out.extend_from_slice(&self.src_tokens[cursor..]);
        out
    }
}

/// Hypothesis edits: the alignment of the source with the system output.
pub fn extract_hyp_edits(src: &[String], hyp: &[String], costs: &CostModel) -> Vec<Edit> {
    align_tokens(src, hyp, costs)
}

type EditKey<'a> = (Span, &'a [String]);

struct SentenceEval<'a> {
    hyp: Vec<Edit>,
    record: &'a M2Record,
}

impl SentenceEval<'_> {
    fn counts_against(&self, annotator: u32) -> (Counts, BTreeMap<ErrorType, Counts>) {
        let gold = self.record.gold(annotator);
        let gold_keys: BTreeSet<EditKey<'_>> = gold.iter().map(|g| (g.span, g.correction.as_slice())).collect();
        let hyp_keys: BTreeSet<EditKey<'_>> = self.hyp.iter().map(|e| (e.src_span, e.tgt_text.as_slice())).collect();

        let mut per_type: BTreeMap<ErrorType, Counts> = BTreeMap::new();
        let mut counts = Counts::default();
        for e in &self.hyp {
            let slot = per_type.entry(classify_error(e)).or_default();
            if gold_keys.contains(&(e.src_span, e.tgt_text.as_slice())) {
                counts.tp += 1;
                slot.tp += 1;
            } else {
                counts.fp += 1;
                slot.fp += 1;
            }
        }
        for g in gold {
            if !hyp_keys.contains(&(g.span, g.correction.as_slice())) {
                counts.fn_ += 1;
                let kind = g.to_edit(&self.record.src_tokens).map_or(ErrorType::ReplaceOther, |e| classify_error(&e));
                per_type.entry(kind).or_default().fn_ += 1;
            }
        }
        (counts, per_type)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EvalMode {
    /// Per sentence, the annotator that maximizes the running corpus F0.5.
    #[default]
    BestAnnotator,
    /// Score against each annotator separately, then average.
    AverageReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AverageBy {
    /// Mean of per-annotator precision, recall and F0.5.
    #[default]
    Score,
    /// Pool counts over annotators, then compute the ratios once.
    Counts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    LengthMismatch { hyps: usize, golds: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::LengthMismatch { hyps, golds } => {
                write!(f, "{hyps} hypotheses but {golds} gold records")
            }
        }
    }
}

impl core::error::Error for EvalError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub mode: EvalMode,
    pub average_by: AverageBy,
    pub costs: CostModel,
}

pub fn evaluate(hyps: &[Vec<String>], golds: &[M2Record], opts: EvalOptions) -> Result<ScoreReport, EvalError> {
    if hyps.len() != golds.len() {
        return Err(EvalError::LengthMismatch { hyps: hyps.len(), golds: golds.len() });
    }
    let sentences: Vec<SentenceEval<'_>> = hyps
        .iter()
        .zip(golds)
        .map(|(hyp, record)| SentenceEval { hyp: extract_hyp_edits(&record.src_tokens, hyp, &opts.costs), record })
        .collect();
    Ok(match opts.mode {
        EvalMode::BestAnnotator => best_annotator(&sentences),
        EvalMode::AverageReference => average_reference(&sentences, opts.average_by),
    })
}

fn merge_types(into: &mut BTreeMap<ErrorType, Counts>, from: BTreeMap<ErrorType, Counts>) {
    for (k, v) in from {
        *into.entry(k).or_default() += v;
    }
}

fn best_annotator(sentences: &[SentenceEval<'_>]) -> ScoreReport {
    let mut total = Counts::default();
    let mut per_type = BTreeMap::new();
    for s in sentences {
        let mut best: Option<(f64, Counts, BTreeMap<ErrorType, Counts>)> = None;
        for id in s.record.annotator_ids() {
            let (c, types) = s.counts_against(id);
            let f = (total + c).f_half();
            if best.as_ref().is_none_or(|(bf, _, _)| f > *bf) {
                best = Some((f, c, types));
            }
        }
        if let Some((_, c, types)) = best {
            total += c;
            merge_types(&mut per_type, types);
        }
    }
    ScoreReport::from_counts(total, per_type)
}

fn average_reference(sentences: &[SentenceEval<'_>], by: AverageBy) -> ScoreReport {
    let ids: BTreeSet<u32> = sentences.iter().flat_map(|s| s.record.annotator_ids()).collect();
    let mut reports = Vec::with_capacity(ids.len());
    let mut pooled = Counts::default();
    let mut per_type = BTreeMap::new();
    for &id in &ids {
        let mut counts = Counts::default();
        for s in sentences {
            let (c, types) = s.counts_against(id);
            counts += c;
            merge_types(&mut per_type, types);
        }
        pooled += counts;
        reports.push(ScoreReport::from_counts(counts, BTreeMap::new()));
    }
    match by {
        AverageBy::Counts => ScoreReport::from_counts(pooled, per_type),
        AverageBy::Score => {
            let n = reports.len().max(1) as f64;
            ScoreReport {
                counts: pooled,
                precision: reports.iter().map(|r| r.precision).sum::<f64>() / n,
                recall: reports.iter().map(|r| r.recall).sum::<f64>() / n,
                f_half: reports.iter().map(|r| r.f_half).sum::<f64>() / n,
                per_type,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::tokenize;

    fn rec(src: &str, annotators: &[(u32, &[GoldEdit])]) -> M2Record {
        M2Record {
            src_tokens: tokenize(src),
            annotations: annotators.iter().map(|(id, e)| (*id, e.to_vec())).collect(),
        }
    }

    fn best() -> EvalOptions {
        EvalOptions::default()
    }

    #[test]
    fn f_beta_table_rows() {
        assert!((f_beta(0.5, 75.43, 51.20) - 68.91).abs() < 0.01);
        assert!((f_beta(0.5, 78.00, 49.12) - 69.79).abs() < 0.01);
        assert_eq!(f_beta(0.5, 0.0, 0.0), 0.0);
        for p in [0.1, 0.37, 0.9, 1.0] {
            assert!((f_beta(0.5, p, p) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_and_no_edit_hypotheses() {
        let golds = [
            rec("He go to school .", &[(0, &[GoldEdit::new(1, 2, "R:VERB", &["goes"])])]),
            rec("I like it .", &[(0, &[])]),
        ];
        let perfect: Vec<_> = golds.iter().map(|g| g.corrected(0)).collect();
        let r = evaluate(&perfect, &golds, best()).unwrap();
        assert_eq!((r.precision, r.recall, r.f_half), (1.0, 1.0, 1.0));

        let no_edit: Vec<_> = golds.iter().map(|g| g.src_tokens.clone()).collect();
        let r = evaluate(&no_edit, &golds, best()).unwrap();
        assert_eq!(r.counts, Counts { tp: 0, fp: 0, fn_: 1 });
        assert_eq!((r.precision, r.recall, r.f_half), (1.0, 0.0, 0.0));
    }

    #[test]
    fn hand_counted_two_sentence_fixture() {
        let golds = [
            rec(
                "He go to school .",
                &[(0, &[GoldEdit::new(1, 2, "R:VERB", &["goes"]), GoldEdit::new(3, 3, "M:DET", &["the"])])],
            ),
            rec("It is a very apple .", &[(0, &[GoldEdit::new(2, 3, "R:DET", &["an"])])]),
        ];
        // tp: go->goes, a->an; fp: .->!; fn: missing "the"
        let hyps = [tokenize("He goes to school ."), tokenize("It is an very apple !")];
        let r = evaluate(&hyps, &golds, best()).unwrap();
        assert_eq!(r.counts, Counts { tp: 2, fp: 1, fn_: 1 });
        assert!((r.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.f_half - 2.0 / 3.0).abs() < 1e-12);

        let hyps = [tokenize("He goes to the school ."), tokenize("It is an very apple !")];
        let r = evaluate(&hyps, &golds, best()).unwrap();
        assert_eq!(r.counts, Counts { tp: 3, fp: 1, fn_: 0 });

        // "a very" -> "an" merges into one replace over [2,4): no span match
        let hyps = [tokenize("He goes to school ."), tokenize("It is an apple .")];
        let r = evaluate(&hyps, &golds, best()).unwrap();
        assert_eq!(r.counts, Counts { tp: 1, fp: 1, fn_: 2 });
    }

    #[test]
    fn best_annotator_picks_the_better_reference_and_ties_go_low() {
        let golds = [rec(
            "a b c",
            &[(0, &[GoldEdit::new(0, 1, "R:OTHER", &["x"])]), (1, &[GoldEdit::new(1, 2, "R:OTHER", &["y"])])],
        )];
        let r = evaluate(&[tokenize("a y c")], &golds, best()).unwrap();
        assert_eq!(r.counts, Counts { tp: 1, fp: 0, fn_: 0 });

        // Both annotators score 0; annotator 0 wins the tie and contributes its fn.
        let golds = [rec("a b c", &[(0, &[GoldEdit::new(0, 1, "R", &["x"])]), (1, &[])])];
        let r = evaluate(&[tokenize("a b z")], &golds, best()).unwrap();
        assert_eq!(r.counts, Counts { tp: 0, fp: 1, fn_: 1 });
    }

    #[test]
    fn average_reference_averages_f_scores() {
        let golds = [rec(
            "a b c",
            &[(0, &[GoldEdit::new(0, 1, "R", &["x"])]), (1, &[GoldEdit::new(1, 2, "R", &["y"])])],
        )];
        let opts = EvalOptions { mode: EvalMode::AverageReference, ..Default::default() };
        let r = evaluate(&[tokenize("a y c")], &golds, opts).unwrap();
        // annotator 0: tp 0 fp 1 fn 1 -> F 0; annotator 1: perfect -> F 1
        assert!((r.f_half - 0.5).abs() < 1e-12);
        assert_eq!(r.counts, Counts { tp: 1, fp: 1, fn_: 1 });

        let pooled = EvalOptions { average_by: AverageBy::Counts, ..opts };
        let r = evaluate(&[tokenize("a y c")], &golds, pooled).unwrap();
        assert!((r.f_half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_fatal() {
        let golds = [rec("a", &[])];
        assert_eq!(
            evaluate(&[], &golds, best()),
            Err(EvalError::LengthMismatch { hyps: 0, golds: 1 })
        );
    }

    #[test]
    fn gold_edit_conversion() {
        let src = tokenize("He go home");
        let e = GoldEdit::new(1, 2, "R:VERB", &["went"]).to_edit(&src).unwrap();
        assert_eq!(e.op, crate::align::EditOp::Replace);
        assert_eq!(e.tgt_text, ["went"]);
        assert_eq!(GoldEdit::new(1, 2, "U", &[]).to_edit(&src).unwrap().op, crate::align::EditOp::Delete);
        assert_eq!(GoldEdit::new(3, 3, "M", &["!"]).to_edit(&src).unwrap().op, crate::align::EditOp::Insert);
        assert!(GoldEdit::new(2, 5, "R", &["x"]).to_edit(&src).is_none());
    }
}
