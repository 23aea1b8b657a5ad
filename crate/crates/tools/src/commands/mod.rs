//! One module per subcommand.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::cli::{Cli, Command, Global};
use crate::error::{Result, ToolError};
use crate::output::Header;

mod apply;
mod consistency;
mod decode;
mod extract;
mod gen_tasks;
mod schedule;
mod score;
mod stats;

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Extract(a) => extract::run(g, a),
        Command::GenTasks(a) => gen_tasks::run(g, a),
        Command::Apply(a) => apply::run(g, a),
        Command::Score(a) => score::run(g, a),
        Command::Schedule(a) => schedule::run(g, a),
        Command::Stats(a) => stats::run(g, a),
        Command::Consistency(a) => consistency::run(g, a),
        Command::Decode(a) => decode::run(g, a),
    }
}

/// Header over the global flags and the subcommand's own.
fn header<A: Serialize>(command: &'static str, g: &Global, args: &A) -> Header {
    Header::new(command, &serde_json::json!({ "global": g, "args": args }))
}

fn finish(mut out: Box<dyn Write>, path: Option<&Path>) -> Result<()> {
    out.flush().map_err(|e| ToolError::io(path.unwrap_or(Path::new("-")), e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("records serialize")
}

/// A JSON report object with the header as its first field.
fn report(header: &Header, body: serde_json::Value) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("header".into(), serde_json::to_value(header).expect("headers serialize"));
    if let serde_json::Value::Object(fields) = body {
        obj.extend(fields);
    }
    serde_json::to_string_pretty(&obj).expect("reports serialize")
}

/// Zips line-aligned files, failing on the first length mismatch.
fn check_same_length(files: &[(&Path, usize)]) -> Result<()> {
    let (first, n) = files[0];
    for &(path, m) in &files[1..] {
        if m != n {
            let (short, line) = if m < n { (path, m + 1) } else { (first, n + 1) };
            return Err(ToolError::data(
                short,
                line,
                format!("{} has {n} lines but {} has {m}", first.display(), path.display()),
            ));
        }
    }
    Ok(())
}
