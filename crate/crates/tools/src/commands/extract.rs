use gec_core::align::{align_pair, CostModel, Edit};
use gec_core::editscript::{serialize_script, ScriptMode};
use serde::Serialize;

use super::{finish, header, to_json};
use crate::cli::{ExtractArgs, Global};
use crate::corpus::PairReader;
use crate::error::Result;
use crate::io::{create, write_line};
use crate::par::{ordered_map, pool};

#[derive(Serialize)]
struct Record<'a> {
    id: &'a str,
    doc_id: &'a str,
    doc_index: u64,
    src: &'a str,
    tgt: &'a str,
    script: String,
    edits: &'a [Edit],
}

pub fn run(g: &Global, a: &ExtractArgs) -> Result<()> {
    let pool = pool(g.jobs)?;
    let reader = PairReader::open(&a.corpus.input, g.format, a.corpus.nfc)?;
    let path = reader.path().to_path_buf();
    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    write_line(&mut out, out_path, &header("extract", g, a).line())?;
    let mode = ScriptMode::from(a.mode);
    ordered_map(
        &pool,
        reader,
        |rec| {
            let pair = rec.tokenize(&path)?;
            let script = align_pair(&pair, &CostModel::UNIT);
            Ok(to_json(&Record {
                id: &pair.pair_id,
                doc_id: &pair.doc_id,
                doc_index: pair.doc_index,
                src: &pair.src_raw,
                tgt: &pair.tgt_raw,
                script: serialize_script(&script, mode),
                edits: &script.edits,
            }))
        },
        |line| write_line(&mut out, out_path, &line),
    )?;
    finish(out, out_path)
}
