//! Reading and writing M2 files.
//!
//! ```text
//! S The cat sat on mat .
//! A 4 4|||M:DET|||the|||REQUIRED|||-NONE-|||0
//! A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||1
//!
//! ```
//!
//! A deletion has an empty correction field. The `noop` line marks an
//! annotator who made no corrections; it is kept as an empty edit list. The
//! writer emits annotators in id order, so reading then writing a file
//! whose `A` lines are already grouped by annotator reproduces it byte for
//! byte.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use gec_core::align::{tokenize, Span};
use gec_core::scoring::{GoldEdit, M2Record};

use crate::error::{Result, ToolError};
use crate::io::Lines;

const NOOP: &str = "noop";
const NONE: &str = "-NONE-";

pub struct M2Reader {
    lines: Lines,
    pending: Option<(usize, M2Record)>,
    last_end: BTreeMap<u32, usize>,
}

impl M2Reader {
    pub fn open(path: &Path) -> Result<Self> {
        Ok(M2Reader { lines: Lines::open(path)?, pending: None, last_end: BTreeMap::new() })
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> ToolError {
        ToolError::data(self.lines.path(), line, msg)
    }

    fn add_edit(&mut self, line: usize, body: &str) -> Result<()> {
        let Some(rec_len) = self.pending.as_ref().map(|(_, r)| r.src_tokens.len()) else {
            return Err(self.err(line, "edit line before any S line"));
        };
        let fields: Vec<&str> = body.split("|||").collect();
        let [span, kind, corr, required, comment, annot] = fields[..] else {
            return Err(self.err(line, format!("expected 6 |||-separated fields, found {}", fields.len())));
        };
        let annotator: u32 = annot.trim().parse().map_err(|_| self.err(line, format!("bad annotator id {annot:?}")))?;
        let mut nums = span.split(' ');
        let (Some(a), Some(b), None) = (nums.next(), nums.next(), nums.next()) else {
            return Err(self.err(line, format!("bad span {span:?}")));
        };
        let edit = if kind == NOOP || (a == "-1" && b == "-1") {
            None
        } else {
            let (Ok(start), Ok(end)) = (a.parse::<usize>(), b.parse::<usize>()) else {
                return Err(self.err(line, format!("bad span {span:?}")));
            };
            if start > end || end > rec_len {
                return Err(self.err(line, format!("span {start} {end} outside a {rec_len}-token sentence")));
            }
            if start < self.last_end.get(&annotator).copied().unwrap_or(0) {
                return Err(self.err(
                    line,
                    format!("span {start} {end} overlaps or precedes an earlier edit of annotator {annotator}"),
                ));
            }
            self.last_end.insert(annotator, end);
            Some(GoldEdit {
                span: Span::new(start, end),
                error_type: kind.to_string(),
                correction: tokenize(corr),
                required: required.to_string(),
                comment: comment.to_string(),
            })
        };
        let (_, rec) = self.pending.as_mut().expect("checked above");
        let slot = rec.annotations.entry(annotator).or_default();
        slot.extend(edit);
        Ok(())
    }
}

impl Iterator for M2Reader {
    /// `(line of the S line, record)`.
    type Item = Result<(usize, M2Record)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let Some(next) = self.lines.next() else {
                return self.pending.take().map(Ok);
            };
            let (line, text) = match next {
                Ok(x) => x,
                Err(e) => return Some(Err(e)),
            };
            if text.trim().is_empty() {
                if let Some(done) = self.pending.take() {
                    return Some(Ok(done));
                }
                continue;
            }
            if let Some(src) = text.strip_prefix("S ").or(if text == "S" { Some("") } else { None }) {
                let finished = self.pending.take();
                self.last_end.clear();
                self.pending = Some((line, M2Record { src_tokens: tokenize(src), annotations: BTreeMap::new() }));
                if let Some(done) = finished {
                    return Some(Ok(done));
                }
            } else if let Some(body) = text.strip_prefix("A ") {
                if let Err(e) = self.add_edit(line, body) {
                    return Some(Err(e));
                }
            } else {
                return Some(Err(self.err(line, "expected a line starting with S or A")));
            }
        }
    }
}

pub fn read_m2(path: &Path) -> Result<Vec<M2Record>> {
    M2Reader::open(path)?.map(|r| r.map(|(_, rec)| rec)).collect()
}

pub fn write_record(out: &mut dyn Write, rec: &M2Record) -> std::io::Result<()> {
    writeln!(out, "S {}", rec.src_tokens.join(" "))?;
    for (id, edits) in &rec.annotations {
        if edits.is_empty() {
            writeln!(out, "A -1 -1|||{NOOP}|||{NONE}|||REQUIRED|||{NONE}|||{id}")?;
        }
        for e in edits {
            writeln!(
                out,
                "A {} {}|||{}|||{}|||{}|||{}|||{id}",
                e.span.start,
                e.span.end,
                e.error_type,
                e.correction.join(" "),
                e.required,
                e.comment
            )?;
        }
    }
    writeln!(out)
}

pub fn write_m2(records: &[M2Record]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        write_record(&mut out, r).expect("writing to a Vec cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
S He go to school yesterday .
A 1 2|||R:VERB|||went|||REQUIRED|||-NONE-|||0
A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||1

S She like apple
A 1 2|||R:VERB:SVA|||likes|||REQUIRED|||-NONE-|||0
A 3 3|||M:PUNCT|||.|||REQUIRED|||-NONE-|||0
A 1 2|||R:VERB:SVA|||likes|||REQUIRED|||-NONE-|||1

S Nothing wrong here .

";

    fn file(s: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(s.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_and_round_trips() {
        let f = file(FIXTURE);
        let recs = read_m2(f.path()).unwrap();
        assert_eq!(recs.len(), 3);
        let g = &recs[0].gold(0)[0];
        assert_eq!((g.span, g.correction.as_slice()), (Span::new(1, 2), &["went".to_string()][..]));
        assert!(recs[0].annotations[&1].is_empty());
        assert!(recs[2].annotations.is_empty());
        assert_eq!(String::from_utf8(write_m2(&recs)).unwrap(), FIXTURE);
    }

    #[test]
    fn deletion_has_empty_correction() {
        let f = file("S a b c\nA 1 2|||U:DET||||||REQUIRED|||-NONE-|||0\n\n");
        let recs = read_m2(f.path()).unwrap();
        assert!(recs[0].gold(0)[0].correction.is_empty());
        assert_eq!(recs[0].corrected(0), ["a", "c"]);
        assert_eq!(String::from_utf8(write_m2(&recs)).unwrap(), "S a b c\nA 1 2|||U:DET||||||REQUIRED|||-NONE-|||0\n\n");
    }

    #[test]
    fn malformed_lines_report_their_number() {
        for (text, line) in [
            ("S a b\nA 1 2|||R|||x|||REQUIRED|||0\n", 2),
            ("S a b\nA 1 5|||R|||x|||REQUIRED|||-NONE-|||0\n", 2),
            ("S a b\n\nS c\nA x 1|||R|||x|||REQUIRED|||-NONE-|||0\n", 4),
            ("A 0 1|||R|||x|||REQUIRED|||-NONE-|||0\n", 1),
            ("S a b c\nA 1 3|||R|||x|||REQUIRED|||-NONE-|||0\nA 2 3|||R|||y|||REQUIRED|||-NONE-|||0\n", 3),
            ("S a\nhello\n", 2),
        ] {
            let f = file(text);
            match read_m2(f.path()) {
                Err(ToolError::Data { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
