use std::path::Path;

use gec_core::align::{align_tokens, CostModel};
use gec_core::scoring::{classify_error, ErrorHistogram, ErrorType};
use serde_json::{json, Value};

use super::{finish, header, report};
use crate::cli::{Global, StatsArgs};
use crate::corpus::{Format, PairReader};
use crate::error::Result;
use crate::io::{create, write_line};
use crate::m2::M2Reader;
use crate::output::percent;
use crate::par::{ordered_map, pool};

#[derive(Default)]
struct Tally {
    sentences: usize,
    errorful: usize,
    hist: ErrorHistogram,
}

impl Tally {
    fn json(&self) -> Value {
        let types: Vec<Value> = self
            .hist
            .rows()
            .map(|(t, n, p)| json!({ "type": t.label(), "count": n, "percent": percent(p) }))
            .collect();
        let pct = if self.sentences == 0 { 0.0 } else { self.errorful as f64 / self.sentences as f64 };
        json!({
            "sentences": self.sentences,
            "errorful": self.errorful,
            "pct_errorful": percent(pct),
            "edits": self.hist.total(),
            "types": types,
        })
    }
}

fn is_m2(path: &Path, flag: bool) -> bool {
    flag || path.extension().is_some_and(|e| e.eq_ignore_ascii_case("m2"))
}

/// Parallel corpora are aligned; M2 files contribute every annotator's
/// edits, and a sentence is errorful if any annotator edited it.
fn tally(pool: &rayon::ThreadPool, path: &Path, m2: bool, format: Option<Format>, nfc: bool) -> Result<Tally> {
    let mut t = Tally::default();
    if is_m2(path, m2) {
        for r in M2Reader::open(path)? {
            let (_, rec) = r?;
            t.sentences += 1;
            let mut any = false;
            for edits in rec.annotations.values() {
                for e in edits.iter().filter_map(|g| g.to_edit(&rec.src_tokens)) {
                    t.hist.add(classify_error(&e));
                    any = true;
                }
            }
            t.errorful += usize::from(any);
        }
        return Ok(t);
    }
    let reader = PairReader::open(path, format, nfc)?;
    ordered_map(
        pool,
        reader,
        |rec| {
            let pair = rec.tokenize(path)?;
            let edits = align_tokens(&pair.src_tokens, &pair.tgt_tokens, &CostModel::UNIT);
            Ok(edits.iter().map(classify_error).collect::<Vec<ErrorType>>())
        },
        |types| {
            t.sentences += 1;
            t.errorful += usize::from(!types.is_empty());
            types.into_iter().for_each(|k| t.hist.add(k));
            Ok(())
        },
    )?;
    Ok(t)
}

pub fn run(g: &Global, a: &StatsArgs) -> Result<()> {
    let pool = pool(g.jobs)?;
    let main = tally(&pool, &a.input, a.m2, g.format, a.nfc)?;
    let other = match &a.compare {
        Some(p) => Some(tally(&pool, p, a.m2, g.format, a.nfc)?),
        None => None,
    };
    let head = header("stats", g, a);

    let mut body = json!({ "input": main.json() });
    if let Some(o) = &other {
        body["compare"] = o.json();
        body["distance"] = json!((main.hist.distance(&o.hist) * 1e6).round() / 1e6);
    }
    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    write_line(&mut out, out_path, &report(&head, body))?;
    finish(out, out_path)?;

    if let Some(p) = &a.plot_data {
        let mut f = create(Some(p))?;
        write_line(&mut f, Some(p), &format!("# {}", head.line()))?;
        let mut cols = String::from("type\tcount\tpercent");
        if other.is_some() {
            cols.push_str("\tcompare_count\tcompare_percent");
        }
        write_line(&mut f, Some(p), &cols)?;
        for t in ErrorType::ALL {
            let mut row = format!("{t}\t{}\t{:.2}", main.hist.count(t), percent(main.hist.proportion(t)));
            if let Some(o) = &other {
                row.push_str(&format!("\t{}\t{:.2}", o.hist.count(t), percent(o.hist.proportion(t))));
            }
            write_line(&mut f, Some(p), &row)?;
        }
        finish(f, Some(p))?;
    }
    Ok(())
}
