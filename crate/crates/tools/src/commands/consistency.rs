use std::path::Path;

use gec_core::align::{tokenize, CostModel};
use gec_core::scoring::{consistency_report, ConsistencyRecord, ConsistencySummary};
use serde::Serialize;
use serde_json::{json, Value};

use super::{check_same_length, finish, header, report, to_json};
use crate::cli::{ConsistencyArgs, Global};
use crate::corpus::read_sentences;
use crate::error::{Result, ToolError};
use crate::io::{create, write_line, Lines};
use crate::output::{is_header, percent};
use crate::par::pool;

fn sentences(path: &Path, nfc: bool) -> Result<Vec<Vec<String>>> {
    read_sentences(path, nfc)?.map(|r| r.map(|(_, s)| tokenize(&s))).collect()
}

/// Explain outputs hold newlines, so each line is a JSON string or an
/// object with a `script` field.
fn scripts(path: &Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for r in Lines::open(path)? {
        let (line, text) = r?;
        if text.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| ToolError::data(path, line, e.to_string()))?;
        if is_header(&v) {
            continue;
        }
        match v {
            Value::String(s) => out.push(s),
            Value::Object(mut o) => match o.remove("script") {
                Some(Value::String(s)) => out.push(s),
                _ => return Err(ToolError::data(path, line, "expected a string `script` field")),
            },
            _ => return Err(ToolError::data(path, line, "expected a JSON string or object")),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct Numbered<'a> {
    line: usize,
    #[serde(flatten)]
    record: &'a ConsistencyRecord,
}

pub fn run(g: &Global, a: &ConsistencyArgs) -> Result<()> {
    let pool = pool(g.jobs)?;
    let src = sentences(&a.src, a.nfc)?;
    let corrected = sentences(&a.corrected, a.nfc)?;
    let reapplied = sentences(&a.reapplied, a.nfc)?;
    let explained = scripts(&a.explained)?;
    check_same_length(&[
        (&a.src, src.len()),
        (&a.corrected, corrected.len()),
        (&a.explained, explained.len()),
        (&a.reapplied, reapplied.len()),
    ])?;

    let records: Vec<ConsistencyRecord> = pool.install(|| {
        use rayon::prelude::*;
        (0..src.len())
            .into_par_iter()
            .map(|i| consistency_report(&src[i], &corrected[i], &explained[i], &reapplied[i], &CostModel::UNIT))
            .collect()
    });
    let summary = ConsistencySummary::from_records(&records);
    let head = header("consistency", g, a);

    if let Some(p) = &a.records {
        let mut f = create(Some(p))?;
        write_line(&mut f, Some(p), &head.line())?;
        for (i, r) in records.iter().enumerate() {
            write_line(&mut f, Some(p), &to_json(&Numbered { line: i + 1, record: r }))?;
        }
        finish(f, Some(p))?;
    }

    let body = json!({
        "sentences": summary.sentences,
        "edits_exact_match": percent(summary.edits_exact_match),
        "chain_exact_match": percent(summary.chain_exact_match),
        "edit_f05": percent(summary.edit_f_half),
        "tp": summary.counts.tp,
        "fp": summary.counts.fp,
        "fn": summary.counts.fn_,
        "parse_failures": summary.parse_failures,
    });
    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    write_line(&mut out, out_path, &report(&head, body))?;
    finish(out, out_path)
}
