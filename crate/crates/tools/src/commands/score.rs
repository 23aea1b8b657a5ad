use gec_core::align::{tokenize, CostModel};
use gec_core::scoring::{evaluate, Counts, EvalOptions, ScoreReport};
use serde_json::{Map, Value};

use super::{finish, header, report};
use crate::cli::{Global, ScoreArgs};
use crate::corpus::read_sentences;
use crate::error::{Result, ToolError};
use crate::io::{create, write_line};
use crate::m2::read_m2;
use crate::output::percent;

fn counts_json(c: &Counts) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tp".into(), c.tp.into());
    m.insert("fp".into(), c.fp.into());
    m.insert("fn".into(), c.fn_.into());
    m
}

/// Percentages with two decimals, the layout of published result tables.
pub fn report_json(r: &ScoreReport) -> Value {
    let mut m = counts_json(&r.counts);
    m.insert("precision".into(), percent(r.precision).into());
    m.insert("recall".into(), percent(r.recall).into());
    m.insert("f05".into(), percent(r.f_half).into());
    let per_type: Map<String, Value> = r
        .per_type
        .iter()
        .map(|(t, c)| {
            let mut e = counts_json(c);
            e.insert("precision".into(), percent(c.precision()).into());
            e.insert("recall".into(), percent(c.recall()).into());
            e.insert("f05".into(), percent(c.f_half()).into());
            (t.label().to_string(), Value::Object(e))
        })
        .collect();
    m.insert("per_type".into(), Value::Object(per_type));
    Value::Object(m)
}

pub fn run(g: &Global, a: &ScoreArgs) -> Result<()> {
    let hyps: Vec<Vec<String>> =
        read_sentences(&a.hyp, a.nfc)?.map(|r| r.map(|(_, s)| tokenize(&s))).collect::<Result<_>>()?;
    let golds = read_m2(&a.gold)?;
    if hyps.len() != golds.len() {
        let line = if hyps.len() > golds.len() { golds.len() + 1 } else { 0 };
        let msg = format!("{} hypotheses but {} gold sentences in {}", hyps.len(), golds.len(), a.gold.display());
        return Err(ToolError::data(&a.hyp, line, msg));
    }
    let (mode, average_by) = a.eval_mode();
    let r = evaluate(&hyps, &golds, EvalOptions { mode, average_by, costs: CostModel::UNIT })
        .expect("lengths checked");
    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    let mut full = report_json(&r);
    full.as_object_mut().unwrap().insert("sentences".into(), hyps.len().into());
    write_line(&mut out, out_path, &report(&header("score", g, a), full))?;
    finish(out, out_path)
}
