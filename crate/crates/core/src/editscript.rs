//! Textual edit scripts.
//!
//! One edit per line, joined with `\n`, no trailing newline:
//!
//! ```text
//! Delete <src>
//! Insert <tgt>
//! Replace <src> with <tgt>
//! ```
//!
//! An empty script is the single line `No correction`. In anchored mode each
//! line ends with ` @<i>`, the source token index where the edit starts. A
//! replace whose source side itself contains the token `with` is written as
//! ` @<i>/<n>` where `n` is the source length, so anchored scripts always
//! parse back unambiguously.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::align::{Edit, EditOp, EditScript};

pub const NO_CORRECTION: &str = "No correction";
const WITH: &str = "with";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ScriptMode {
    #[default]
    Paper,
    Anchored,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TextualEdit {
    pub op: EditOp,
    pub src_text: Vec<String>,
    pub tgt_text: Vec<String>,
    pub anchor: Option<usize>,
}

impl TextualEdit {
    pub fn delete(src: &[&str]) -> Self {
        Self::new(EditOp::Delete, src, &[])
    }

    pub fn insert(tgt: &[&str]) -> Self {
        Self::new(EditOp::Insert, &[], tgt)
    }

    pub fn replace(src: &[&str], tgt: &[&str]) -> Self {
        Self::new(EditOp::Replace, src, tgt)
    }

    fn new(op: EditOp, src: &[&str], tgt: &[&str]) -> Self {
        TextualEdit {
            op,
            src_text: src.iter().map(|s| s.to_string()).collect(),
            tgt_text: tgt.iter().map(|s| s.to_string()).collect(),
            anchor: None,
        }
    }

    pub fn at(mut self, anchor: usize) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn from_edit(edit: &Edit, mode: ScriptMode) -> Self {
        TextualEdit {
            op: edit.op,
            src_text: edit.src_text.clone(),
            tgt_text: edit.tgt_text.clone(),
            anchor: match mode {
                ScriptMode::Paper => None,
                ScriptMode::Anchored => Some(edit.src_span.start),
            },
        }
    }

    /// Same operation and text, ignoring the anchor.
    pub fn same_text(&self, other: &TextualEdit) -> bool {
        self.op == other.op && self.src_text == other.src_text && self.tgt_text == other.tgt_text
    }

    fn write_line(&self, out: &mut String) {
        out.push_str(self.op.keyword());
        match self.op {
            EditOp::Delete => push_tokens(out, &self.src_text),
            EditOp::Insert => push_tokens(out, &self.tgt_text),
            EditOp::Replace => {
                push_tokens(out, &self.src_text);
                out.push(' ');
                out.push_str(WITH);
                push_tokens(out, &self.tgt_text);
            }
        }
        if let Some(anchor) = self.anchor {
            out.push_str(" @");
            push_usize(out, anchor);
            if self.op == EditOp::Replace && self.src_text.iter().any(|t| t == WITH) {
                out.push('/');
                push_usize(out, self.src_text.len());
            }
        }
    }
}

fn push_tokens(out: &mut String, tokens: &[String]) {
    for t in tokens {
        out.push(' ');
        out.push_str(t);
    }
}

fn push_usize(out: &mut String, v: usize) {
    use core::fmt::Write;
    let _ = write!(out, "{v}");
}

pub fn serialize_script(script: &EditScript, mode: ScriptMode) -> String {
    serialize_edits(&script.edits, mode)
}

pub fn serialize_edits(edits: &[Edit], mode: ScriptMode) -> String {
    let textual: Vec<TextualEdit> = edits.iter().map(|e| TextualEdit::from_edit(e, mode)).collect();
    serialize_textual(&textual)
}

/// Writes textual edits; anchors are emitted only where present.
pub fn serialize_textual(edits: &[TextualEdit]) -> String {
    if edits.is_empty() {
        return NO_CORRECTION.to_string();
    }
    let mut out = String::new();
    for (n, e) in edits.iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        e.write_line(&mut out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    pub mode: ScriptMode,
    /// Reject replace lines whose sides contain a bare `with` token.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineErrorKind {
    EmptyScript,
    EmptyLine,
    UnknownOperation(String),
    MissingText,
    MissingSeparator,
    MissingAnchor,
    BadAnchor(String),
    /// `No correction` mixed with other lines.
    StrayNoCorrection,
    /// Strict mode: the separator could be placed in more than one way.
    AmbiguousWith,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based.
    pub line: usize,
    pub kind: LineErrorKind,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            LineErrorKind::EmptyScript => f.write_str("empty script"),
            LineErrorKind::EmptyLine => f.write_str("empty line"),
            LineErrorKind::UnknownOperation(op) => write!(f, "unknown operation `{op}`"),
            LineErrorKind::MissingText => f.write_str("operation has no tokens"),
            LineErrorKind::MissingSeparator => f.write_str("replace without ` with ` separator"),
            LineErrorKind::MissingAnchor => f.write_str("missing `@<index>` anchor"),
            LineErrorKind::BadAnchor(a) => write!(f, "malformed anchor `{a}`"),
            LineErrorKind::StrayNoCorrection => f.write_str("`No correction` must be the whole script"),
            LineErrorKind::AmbiguousWith => f.write_str("ambiguous `with` in replace"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptParseError {
    pub errors: Vec<LineError>,
}

impl fmt::Display for ScriptParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, e) in self.errors.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ScriptParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedScript {
    pub edits: Vec<TextualEdit>,
    /// 1-based lines of replace edits where `with` also occurs inside a side.
    pub ambiguous_lines: Vec<usize>,
}

impl ParsedScript {
    pub fn has_warnings(&self) -> bool {
        !self.ambiguous_lines.is_empty()
    }
}

pub fn parse_script(text: &str, mode: ScriptMode) -> Result<ParsedScript, ScriptParseError> {
    parse_script_with(text, ParseOptions { mode, strict: false })
}

pub fn parse_script_with(text: &str, opts: ParseOptions) -> Result<ParsedScript, ScriptParseError> {
    if text.trim().is_empty() {
        return Err(ScriptParseError { errors: alloc::vec![LineError { line: 1, kind: LineErrorKind::EmptyScript }] });
    }
    if text.trim() == NO_CORRECTION {
        return Ok(ParsedScript::default());
    }
    let mut parsed = ParsedScript::default();
    let mut errors = Vec::new();
    for (idx, line) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        match parse_line(line, opts) {
            Ok((edit, ambiguous)) => {
                if ambiguous {
                    parsed.ambiguous_lines.push(line_no);
                }
                parsed.edits.push(edit);
            }
            Err(kind) => errors.push(LineError { line: line_no, kind }),
        }
    }
    if errors.is_empty() {
        Ok(parsed)
    } else {
        Err(ScriptParseError { errors })
    }
}

fn parse_line(line: &str, opts: ParseOptions) -> Result<(TextualEdit, bool), LineErrorKind> {
    if line.trim() == NO_CORRECTION {
        return Err(LineErrorKind::StrayNoCorrection);
    }
    let mut tokens: Vec<&str> = line.split_whitespace().collect();
    let Some((&keyword, _)) = tokens.split_first() else {
        return Err(LineErrorKind::EmptyLine);
    };
    let op = match keyword {
        "Insert" => EditOp::Insert,
        "Delete" => EditOp::Delete,
        "Replace" => EditOp::Replace,
        other => return Err(LineErrorKind::UnknownOperation(other.to_string())),
    };
    let mut anchor = None;
    let mut src_len_hint = None;
    if opts.mode == ScriptMode::Anchored {
        let last = match tokens.last() {
            Some(t) if tokens.len() > 1 && t.starts_with('@') => *t,
            _ => return Err(LineErrorKind::MissingAnchor),
        };
        let (index, len) = parse_anchor(&last[1..]).ok_or_else(|| LineErrorKind::BadAnchor(last.to_string()))?;
        anchor = Some(index);
        src_len_hint = len;
        tokens.pop();
    }
    let rest = &tokens[1..];
    if rest.is_empty() {
        return Err(LineErrorKind::MissingText);
    }
    let owned = |ts: &[&str]| ts.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let edit = match op {
        EditOp::Delete => TextualEdit { op, src_text: owned(rest), tgt_text: Vec::new(), anchor },
        EditOp::Insert => TextualEdit { op, src_text: Vec::new(), tgt_text: owned(rest), anchor },
        EditOp::Replace => {
            let split = match src_len_hint {
                Some(n) if n >= 1 && n + 1 < rest.len() && rest[n] == WITH => n,
                Some(_) => return Err(LineErrorKind::MissingSeparator),
                None => (1..rest.len().saturating_sub(1))
                    .find(|&p| rest[p] == WITH)
                    .ok_or(LineErrorKind::MissingSeparator)?,
            };
            let ambiguous = src_len_hint.is_none() && rest.iter().filter(|t| **t == WITH).count() > 1;
            if ambiguous && opts.strict {
                return Err(LineErrorKind::AmbiguousWith);
            }
            let edit = TextualEdit { op, src_text: owned(&rest[..split]), tgt_text: owned(&rest[split + 1..]), anchor };
            return Ok((edit, ambiguous));
        }
    };
    Ok((edit, false))
}

fn parse_anchor(s: &str) -> Option<(usize, Option<usize>)> {
    let digits = |d: &str| -> Option<usize> {
        if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        d.parse().ok()
    };
    match s.split_once('/') {
        Some((i, n)) => Some((digits(i)?, Some(digits(n)?))),
        None => Some((digits(s)?, None)),
    }
}

/// Where an insert without an anchor lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum InsertPlacement {
    /// Right after the tokens consumed so far.
    #[default]
    AtCursor,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ApplyOptions {
    pub unanchored_insert: InsertPlacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SkipReason {
    /// Source text does not occur at or after the cursor.
    NotFound,
    /// Source text does not occur at the anchor.
    AnchorMismatch,
    /// Anchor lies before text already consumed.
    AnchorBehindCursor,
    AnchorOutOfRange,
    UnanchoredInsert,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ApplyOutcome {
    pub result: Vec<String>,
    pub applied: usize,
    pub skipped: Vec<(TextualEdit, SkipReason)>,
}

pub fn apply_script(src: &[String], edits: &[TextualEdit]) -> ApplyOutcome {
    apply_script_with(src, edits, ApplyOptions::default())
}

/// Applies edits left to right with a monotone cursor over the source.
///
/// Unanchored deletes and replaces bind to the first occurrence of their
/// source text at or after the cursor. Anchored edits must match exactly at
/// their anchor. Edits that cannot be placed are reported in `skipped`.
pub fn apply_script_with(src: &[String], edits: &[TextualEdit], opts: ApplyOptions) -> ApplyOutcome {
    let mut out = ApplyOutcome { result: Vec::with_capacity(src.len()), applied: 0, skipped: Vec::new() };
    let mut cursor = 0usize;
    for edit in edits {
        let position = match edit.anchor {
            Some(anchor) => locate_anchored(src, cursor, anchor, &edit.src_text),
            None if edit.op == EditOp::Insert => match opts.unanchored_insert {
                InsertPlacement::AtCursor => Ok(cursor),
                InsertPlacement::Skip => Err(SkipReason::UnanchoredInsert),
            },
            None => find_from(src, cursor, &edit.src_text).ok_or(SkipReason::NotFound),
        };
        match position {
            Ok(at) => {
                out.result.extend_from_slice(&src[cursor..at]);
                out.result.extend_from_slice(&edit.tgt_text);
                cursor = at + edit.src_text.len();
                out.applied += 1;
            }
            Err(reason) => out.skipped.push((edit.clone(), reason)),
        }
    }
    out.result.extend_from_slice(&src[cursor..]);
    out
}

fn locate_anchored(src: &[String], cursor: usize, anchor: usize, needle: &[String]) -> Result<usize, SkipReason> {
    if anchor < cursor {
        return Err(SkipReason::AnchorBehindCursor);
    }
    if anchor + needle.len() > src.len() {
        return Err(SkipReason::AnchorOutOfRange);
    }
    if src[anchor..anchor + needle.len()] == *needle {
        Ok(anchor)
    } else {
        Err(SkipReason::AnchorMismatch)
    }
}

fn find_from(src: &[String], cursor: usize, needle: &[String]) -> Option<usize> {
    if needle.is_empty() || needle.len() > src.len() {
        return None;
    }
    (cursor..=src.len() - needle.len()).find(|&p| src[p..p + needle.len()] == *needle)
}
