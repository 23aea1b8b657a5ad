use gec_core::align::{align_pair, CostModel, EditScript};
use gec_core::taskgen::{expand_pair, Task, TaskInstance};
use serde::Serialize;

use super::{finish, header, to_json};
use crate::cli::{GenTasksArgs, Global};
use crate::corpus::PairReader;
use crate::error::Result;
use crate::io::{create, write_line};
use crate::par::{ordered_map, pool};

#[derive(Serialize)]
struct Record<'a> {
    task: Task,
    input: &'a str,
    target: &'a str,
    pair_id: &'a str,
    doc_id: &'a str,
    doc_index: u64,
}

pub fn run(g: &Global, a: &GenTasksArgs) -> Result<()> {
    let pool = pool(g.jobs)?;
    let reader = PairReader::open(&a.corpus.input, g.format, a.corpus.nfc)?;
    let path = reader.path().to_path_buf();
    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    write_line(&mut out, out_path, &header("gen-tasks", g, a).line())?;
    let needs_script = a.tasks.iter().any(|t| t != Task::Correct);
    ordered_map(
        &pool,
        reader,
        |rec| {
            let pair = rec.tokenize(&path)?;
            let script = if needs_script {
                align_pair(&pair, &CostModel::UNIT)
            } else {
                EditScript { pair_id: pair.pair_id.clone(), edits: Vec::new() }
            };
            let mut lines = String::new();
            for TaskInstance { task, input, target, pair_id } in expand_pair(&pair, &script, a.tasks) {
                if !lines.is_empty() {
                    lines.push('\n');
                }
                lines.push_str(&to_json(&Record {
                    task,
                    input: &input,
                    target: &target,
                    pair_id: &pair_id,
                    doc_id: &pair.doc_id,
                    doc_index: pair.doc_index,
                }));
            }
            Ok(lines)
        },
        |lines| write_line(&mut out, out_path, &lines),
    )?;
    finish(out, out_path)
}
