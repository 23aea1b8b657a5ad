use std::path::{Path, PathBuf};

use gec_core::align::tokenize;
use gec_core::editscript::{
    apply_script_with, parse_script_with, serialize_textual, ApplyOptions, ParseOptions, SkipReason,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use unicode_normalization::UnicodeNormalization;

use super::{finish, header, to_json};
use crate::cli::{ApplyArgs, Global};
use crate::corpus::read_sentences;
use crate::error::{Result, ToolError};
use crate::io::{create, write_line, Lines};
use crate::output::is_header;
use crate::par::{ordered_map, pool};

#[derive(Deserialize)]
struct ScriptRecord {
    script: String,
    #[serde(default)]
    src: Option<String>,
    #[serde(default)]
    id: Option<Value>,
}

struct Job {
    line: usize,
    id: Option<Value>,
    script: String,
    src: String,
}

#[derive(Serialize)]
struct Skip {
    edit: String,
    reason: SkipReason,
}

#[derive(Serialize)]
struct ReportLine {
    line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<Value>,
    applied: usize,
    skipped: Vec<Skip>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    ambiguous_lines: Vec<usize>,
}

#[derive(Serialize, Default)]
struct Summary {
    sentences: usize,
    applied: usize,
    skipped: usize,
    sentences_with_skips: usize,
}

type Numbered<T> = Box<dyn Iterator<Item = Result<(usize, T)>>>;

/// Script records, skipping headers and blank lines, paired with sources.
struct Jobs {
    scripts: PathBuf,
    records: Numbered<ScriptRecord>,
    sources: Option<(PathBuf, Numbered<String>)>,
    nfc: bool,
    done: bool,
}

impl Jobs {
    fn open(a: &ApplyArgs) -> Result<Self> {
        let path = a.scripts.clone();
        let records = Lines::open(&a.scripts)?.filter_map(move |r| {
            let (line, text) = match r {
                Ok(x) => x,
                Err(e) => return Some(Err(e)),
            };
            if text.trim().is_empty() {
                return None;
            }
            let parsed = serde_json::from_str::<Value>(&text).and_then(|v| {
                if is_header(&v) {
                    Ok(None)
                } else {
                    serde_json::from_value::<ScriptRecord>(v).map(Some)
                }
            });
            match parsed {
                Ok(rec) => rec.map(|r| Ok((line, r))),
                Err(e) => Some(Err(ToolError::data(&path, line, e.to_string()))),
            }
        });
        let sources = match &a.input {
            Some(p) => Some((p.clone(), Box::new(read_sentences(p, a.nfc)?) as Numbered<String>)),
            None => None,
        };
        Ok(Jobs { scripts: a.scripts.clone(), records: Box::new(records), sources, nfc: a.nfc, done: false })
    }

    fn step(&mut self) -> Option<Result<Job>> {
        let (line, rec) = match self.records.next() {
            Some(Ok(x)) => x,
            Some(Err(e)) => return Some(Err(e)),
            None => {
                let (path, lines) = self.sources.as_mut()?;
                return lines.next().map(|r| {
                    r.and_then(|(n, _)| Err(ToolError::data(path.as_path(), n, "more source sentences than scripts")))
                });
            }
        };
        let src = match (&mut self.sources, rec.src) {
            (Some((path, lines)), _) => match lines.next() {
                Some(Ok((_, s))) => s,
                Some(Err(e)) => return Some(Err(e)),
                None => {
                    let msg = format!("more scripts than source sentences in {}", path.display());
                    return Some(Err(ToolError::data(&self.scripts, line, msg)));
                }
            },
            (None, Some(s)) if self.nfc => s.nfc().collect(),
            (None, Some(s)) => s,
            (None, None) => return Some(Err(ToolError::data(&self.scripts, line, "record has no `src`; pass --input"))),
        };
        Some(Ok(Job { line, id: rec.id, script: rec.script, src }))
    }
}

impl Iterator for Jobs {
    type Item = Result<Job>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let r = self.step();
        self.done = !matches!(r, Some(Ok(_)));
        r
    }
}

pub fn run(g: &Global, a: &ApplyArgs) -> Result<()> {
    let pool = pool(g.jobs)?;
    let parse_opts = ParseOptions { mode: a.mode.into(), strict: a.strict };
    let apply_opts = ApplyOptions { unanchored_insert: a.unanchored_insert.into() };
    let scripts: PathBuf = a.scripts.clone();

    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    let report_path: Option<&Path> = a.report.as_deref();
    let mut report: Box<dyn std::io::Write> = match report_path {
        Some(p) => create(Some(p))?,
        None => Box::new(std::io::stderr()),
    };
    write_line(&mut report, report_path, &header("apply", g, a).line())?;

    let mut summary = Summary::default();
    ordered_map(
        &pool,
        Jobs::open(a)?,
        |job| {
            let parsed = parse_script_with(&job.script, parse_opts)
                .map_err(|e| ToolError::data(&scripts, job.line, format!("bad script: {e}")))?;
            let outcome = apply_script_with(&tokenize(&job.src), &parsed.edits, apply_opts);
            let report = ReportLine {
                line: job.line,
                id: job.id,
                applied: outcome.applied,
                skipped: outcome
                    .skipped
                    .into_iter()
                    .map(|(e, reason)| Skip { edit: serialize_textual(std::slice::from_ref(&e)), reason })
                    .collect(),
                ambiguous_lines: parsed.ambiguous_lines,
            };
            Ok((outcome.result.join(" "), report))
        },
        |(corrected, r)| {
            summary.sentences += 1;
            summary.applied += r.applied;
            summary.skipped += r.skipped.len();
            write_line(&mut out, out_path, &corrected)?;
            if !r.skipped.is_empty() || !r.ambiguous_lines.is_empty() {
                summary.sentences_with_skips += usize::from(!r.skipped.is_empty());
                write_line(&mut report, report_path, &to_json(&r))?;
            }
            Ok(())
        },
    )?;
    write_line(&mut report, report_path, &to_json(&serde_json::json!({ "summary": summary })))?;
    finish(out, out_path)?;
    finish(report, report_path)
}
