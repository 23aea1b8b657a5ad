//! Parallel-corpus readers.
//!
//! Two formats are accepted:
//!
//! - TSV: one pair per line, `src<TAB>tgt`;
//! - JSONL: `{"id", "doc_id", "doc_index", "src", "tgt"}` per line, where
//!   only `src` and `tgt` are required.
//!
//! Missing identifiers default to the 1-based line number for `id` and
//! `doc_id`, and to 0 for `doc_index`. Blank lines are skipped. Both readers
//! stream; nothing is materialized beyond the current line.

use std::path::Path;

use gec_core::align::{PairError, TokenizedPair};
use serde::Deserialize;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Result, ToolError};
use crate::io::Lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    Jsonl,
}

impl Format {
    /// `.jsonl`/`.json` means JSONL, anything else TSV.
    pub fn guess(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => Format::Jsonl,
            _ => Format::Tsv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRecord {
    pub line: usize,
    pub id: String,
    pub doc_id: String,
    pub doc_index: u64,
    pub src: String,
    pub tgt: String,
}

impl PairRecord {
    pub fn tokenize(&self, file: &Path) -> Result<TokenizedPair> {
        TokenizedPair::new(self.id.clone(), self.doc_id.clone(), self.doc_index, &self.src, &self.tgt).map_err(|e| {
            let side = match e {
                PairError::EmptySource => "source",
                PairError::EmptyTarget => "target",
            };
            ToolError::data(file, self.line, format!("empty {side} sentence"))
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPair {
    #[serde(default)]
    id: Option<Ident>,
    #[serde(default)]
    doc_id: Option<Ident>,
    #[serde(default)]
    doc_index: Option<u64>,
    src: String,
    tgt: String,
}

/// Identifiers may be written as strings or integers.
#[derive(Deserialize)]
#[serde(untagged)]
enum Ident {
    Str(String),
    Int(i64),
}

impl Ident {
    fn into_string(self) -> String {
        match self {
            Ident::Str(s) => s,
            Ident::Int(n) => n.to_string(),
        }
    }
}

pub struct PairReader {
    lines: Lines,
    format: Format,
    nfc: bool,
}

impl PairReader {
    pub fn open(path: &Path, format: Option<Format>, nfc: bool) -> Result<Self> {
        let format = format.unwrap_or_else(|| Format::guess(path));
        Ok(PairReader { lines: Lines::open(path)?, format, nfc })
    }

    pub fn path(&self) -> &Path {
        self.lines.path()
    }

    fn parse(&self, line: usize, text: &str) -> Result<PairRecord> {
        let path = self.lines.path();
        let mut rec = match self.format {
            Format::Tsv => {
                let mut cols = text.split('\t');
                let (Some(src), Some(tgt), None) = (cols.next(), cols.next(), cols.next()) else {
                    return Err(ToolError::data(path, line, "expected exactly two tab-separated columns"));
                };
                PairRecord {
                    line,
                    id: line.to_string(),
                    doc_id: line.to_string(),
                    doc_index: 0,
                    src: src.to_string(),
                    tgt: tgt.to_string(),
                }
            }
            Format::Jsonl => {
                let j: JsonPair = serde_json::from_str(text).map_err(|e| ToolError::data(path, line, e.to_string()))?;
                PairRecord {
                    line,
                    id: j.id.map_or_else(|| line.to_string(), Ident::into_string),
                    doc_id: j.doc_id.map_or_else(|| line.to_string(), Ident::into_string),
                    doc_index: j.doc_index.unwrap_or(0),
                    src: j.src,
                    tgt: j.tgt,
                }
            }
        };
        if self.nfc {
            rec.src = rec.src.nfc().collect();
            rec.tgt = rec.tgt.nfc().collect();
        }
        Ok(rec)
    }
}

impl Iterator for PairReader {
    type Item = Result<PairRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (line, text) = match self.lines.next()? {
                Ok(x) => x,
                Err(e) => return Some(Err(e)),
            };
            if text.trim().is_empty() {
                continue;
            }
            return Some(self.parse(line, &text));
        }
    }
}

/// Plain text, one sentence per line; blank lines are kept as empty
/// sentences so line counts stay aligned with parallel files.
pub fn read_sentences(path: &Path, nfc: bool) -> Result<impl Iterator<Item = Result<(usize, String)>>> {
    Ok(Lines::open(path)?.map(move |r| r.map(|(n, s)| (n, if nfc { s.nfc().collect() } else { s }))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn tsv_defaults() {
        let f = write("a b\ta c\n\nx\tx\n", ".tsv");
        let recs: Vec<PairRecord> = PairReader::open(f.path(), None, false).unwrap().map(|r| r.unwrap()).collect();
        assert_eq!(recs.len(), 2);
        assert_eq!((recs[1].id.as_str(), recs[1].doc_id.as_str(), recs[1].doc_index), ("3", "3", 0));
    }

    #[test]
    fn jsonl_fields_and_defaults() {
        let f = write(
            "{\"id\":7,\"doc_id\":\"d1\",\"doc_index\":2,\"src\":\"a\",\"tgt\":\"b\"}\n{\"src\":\"a\",\"tgt\":\"a\"}\n",
            ".jsonl",
        );
        let recs: Vec<PairRecord> = PairReader::open(f.path(), None, false).unwrap().map(|r| r.unwrap()).collect();
        assert_eq!((recs[0].id.as_str(), recs[0].doc_id.as_str(), recs[0].doc_index), ("7", "d1", 2));
        assert_eq!((recs[1].id.as_str(), recs[1].doc_id.as_str(), recs[1].doc_index), ("2", "2", 0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let f = write("ok\tok\nbroken\n", ".tsv");
        let err = PairReader::open(f.path(), None, false).unwrap().nth(1).unwrap().unwrap_err();
        assert!(matches!(err, ToolError::Data { line: 2, .. }));
        let f = write("{\"src\":\"a\"}\n", ".jsonl");
        let err = PairReader::open(f.path(), None, false).unwrap().next().unwrap().unwrap_err();
        assert!(matches!(err, ToolError::Data { line: 1, .. }));
        let f = write("  \tb\n", ".tsv");
        let rec = PairReader::open(f.path(), None, false).unwrap().next().unwrap().unwrap();
        assert!(matches!(rec.tokenize(f.path()), Err(ToolError::Data { line: 1, .. })));
    }

    #[test]
    fn nfc_is_opt_in() {
        let f = write("cafe\u{301}\tcaf\u{e9}\n", ".tsv");
        let raw = PairReader::open(f.path(), None, false).unwrap().next().unwrap().unwrap();
        assert!(raw.tokenize(f.path()).unwrap().is_errorful());
        let nfc = PairReader::open(f.path(), None, true).unwrap().next().unwrap().unwrap();
        assert!(!nfc.tokenize(f.path()).unwrap().is_errorful());
    }
}
