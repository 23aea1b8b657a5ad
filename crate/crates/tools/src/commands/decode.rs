use gec_core::align::tokenize;
use gec_core::decode::{beam_search, BeamError, DecodeConfig, Realign};
use serde::Serialize;

use super::{finish, header, to_json};
use crate::bigram::{build_provider, read_table, read_vocab, table_vocab};
use crate::cli::{DecodeArgs, Global};
use crate::corpus::read_sentences;
use crate::error::{Result, ToolError};
use crate::io::{create, write_line};
use crate::par::{ordered_map, pool};

#[derive(Serialize)]
struct Hyp {
    text: String,
    log_prob: f64,
    score: f64,
    finished: bool,
}

#[derive(Serialize)]
struct Record<'a> {
    line: usize,
    src: &'a str,
    hypotheses: Vec<Hyp>,
}

pub fn run(g: &Global, a: &DecodeArgs) -> Result<()> {
    if a.nbest == 0 {
        return Err(ToolError::usage("--nbest must be at least 1"));
    }
    let pool = pool(g.jobs)?;
    let table = read_table(&a.table)?;
    let vocab = match &a.vocab {
        Some(p) => read_vocab(p)?,
        None => table_vocab(&table),
    };
    let provider = build_provider(&table, &vocab).map_err(|m| ToolError::data(&a.table, 0, m))?;
    let config = DecodeConfig {
        temperature: a.temperature,
        boost: a.boost,
        beam_width: a.beam,
        max_len: a.max_len,
        eos: vocab.eos(),
        realign: if a.exact_realign { Realign::Exact } else { Realign::Window(a.window) },
    };

    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    write_line(&mut out, out_path, &header("decode", g, a).with("vocab_size", vocab.len()).line())?;
    ordered_map(
        &pool,
        read_sentences(&a.input, a.nfc)?,
        |(line, text)| {
            let src = tokenize(&text);
            let ids = vocab.encode(&src);
            let hyps = beam_search(&provider, &ids, &config).map_err(|e| match e {
                BeamError::Transform(d) => ToolError::usage(format!("bad decoding parameters: {d:?}")),
                other => ToolError::data(&a.input, line, format!("{other:?}")),
            })?;
            let hypotheses = hyps
                .into_iter()
                .take(a.nbest)
                .map(|h| Hyp {
                    text: h.tokens.iter().filter(|&&t| t != config.eos).map(|&t| vocab.token(t)).collect::<Vec<_>>().join(" "),
                    log_prob: h.log_prob,
                    score: h.score,
                    finished: h.finished,
                })
                .collect();
            Ok(to_json(&Record { line, src: &src.join(" "), hypotheses }))
        },
        |l| write_line(&mut out, out_path, &l),
    )?;
    finish(out, out_path)
}
