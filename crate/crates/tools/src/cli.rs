//! Argument definitions and `--config` handling.
//!
//! A config file is a JSON object whose keys are long flag names, valid for
//! the global options and the chosen subcommand:
//!
//! ```json
//! {"mode": "anchored", "jobs": 4, "nfc": true, "dataset": ["NUCLE=nucle.tsv"]}
//! ```
//!
//! Booleans switch flags on or off, arrays repeat a flag, everything else
//! is passed as the flag's value. Flags given on the command line override
//! the config; repeated flags accumulate.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gec_core::editscript::{InsertPlacement, ScriptMode};
use gec_core::scoring::{AverageBy, EvalMode};
use gec_core::TaskSet;
use serde::Serialize;
use serde_json::Value;

use crate::corpus::Format;
use crate::error::{Result, ToolError};

#[derive(Debug, Parser)]
#[command(name = "gec", version, about = "Edit extraction, task generation, scoring, scheduling and decoding for GEC")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Corpus format; guessed from the extension when omitted
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Overrides the seed of every shuffle in a schedule policy
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file of default flag values
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align each pair and write its edit script
    Extract(ExtractArgs),
    /// Expand pairs into prefixed task instances
    GenTasks(GenTasksArgs),
    /// Apply edit scripts to source sentences
    Apply(ApplyArgs),
    /// Score hypotheses against M2 gold annotations
    Score(ScoreArgs),
    /// Build a staged training manifest
    Schedule(ScheduleArgs),
    /// Error-type histogram of a corpus or M2 file
    Stats(StatsArgs),
    /// Agreement between correct, explain and apply outputs
    Consistency(ConsistencyArgs),
    /// Beam search over a bigram table with temperature and Align-Pred
    Decode(DecodeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Extract(_) => "extract",
            Command::GenTasks(_) => "gen-tasks",
            Command::Apply(_) => "apply",
            Command::Score(_) => "score",
            Command::Schedule(_) => "schedule",
            Command::Stats(_) => "stats",
            Command::Consistency(_) => "consistency",
            Command::Decode(_) => "decode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Paper,
    Anchored,
}

impl From<ModeArg> for ScriptMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => ScriptMode::Paper,
            ModeArg::Anchored => ScriptMode::Anchored,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorpusIn {
    /// Parallel corpus, `-` for stdin
    #[arg(long, short, default_value = "-")]
    pub input: PathBuf,
    /// Unicode NFC-normalize text before tokenizing
    #[arg(long)]
    pub nfc: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub corpus: CorpusIn,
    #[arg(long, short, value_enum, default_value = "paper")]
    pub mode: ModeArg,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenTasksArgs {
    #[command(flatten)]
    pub corpus: CorpusIn,
    /// Comma-separated subset of correct,explain,apply,edit
    #[arg(long, short, default_value = "correct,explain,apply,edit", value_parser = parse_tasks)]
    pub tasks: TaskSet,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

fn parse_tasks(s: &str) -> std::result::Result<TaskSet, String> {
    s.parse().map_err(|e: gec_core::taskgen::TaskSetError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InsertArg {
    Cursor,
    Skip,
}

impl From<InsertArg> for InsertPlacement {
    fn from(a: InsertArg) -> Self {
        match a {
            InsertArg::Cursor => InsertPlacement::AtCursor,
            InsertArg::Skip => InsertPlacement::Skip,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ApplyArgs {
    /// JSONL with a `script` field per line (header lines are skipped)
    #[arg(long, short)]
    pub scripts: PathBuf,
    /// Source sentences, one per line; defaults to each record's `src`
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, short, value_enum, default_value = "paper")]
    pub mode: ModeArg,
    /// Where inserts without an anchor go
    #[arg(long, value_enum, default_value = "cursor")]
    pub unanchored_insert: InsertArg,
    /// Reject replace lines with an ambiguous `with`
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub nfc: bool,
    /// Corrected sentences
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Skip report JSONL (default: stderr)
    #[arg(long)]
    #[serde(skip)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    Best,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AverageByArg {
    Score,
    Counts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScoreArgs {
    /// System output, one tokenized sentence per line
    #[arg(long)]
    pub hyp: PathBuf,
    /// Gold M2 file
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, short, value_enum, default_value = "best")]
    pub mode: ScoreMode,
    /// How `--mode average` combines annotators
    #[arg(long, value_enum, default_value = "score")]
    pub average_by: AverageByArg,
    #[arg(long)]
    pub nfc: bool,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl ScoreArgs {
    pub fn eval_mode(&self) -> (EvalMode, AverageBy) {
        let mode = match self.mode {
            ScoreMode::Best => EvalMode::BestAnnotator,
            ScoreMode::Average => EvalMode::AverageReference,
        };
        let by = match self.average_by {
            AverageByArg::Score => AverageBy::Score,
            AverageByArg::Counts => AverageBy::Counts,
        };
        (mode, by)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScheduleArgs {
    /// Policy JSON
    #[arg(long, short)]
    pub policy: PathBuf,
    /// JSON array of dataset descriptors; paths are relative to this file
    #[arg(long)]
    pub datasets: Option<PathBuf>,
    /// A standard dataset (Lang-8, NUCLE, FCE, W&I+L) as NAME=PATH
    #[arg(long = "dataset", value_name = "NAME=PATH")]
    pub dataset: Vec<String>,
    #[arg(long)]
    pub nfc: bool,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StatsArgs {
    /// Parallel corpus, or an M2 file (`.m2` or `--m2`)
    #[arg(long, short, default_value = "-")]
    pub input: PathBuf,
    #[arg(long)]
    pub m2: bool,
    /// Second corpus or M2 file to compare against
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long)]
    pub nfc: bool,
    /// Bar-chart data as TSV: type, count, proportion
    #[arg(long)]
    #[serde(skip)]
    pub plot_data: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConsistencyArgs {
    /// Source sentences, one per line
    #[arg(long)]
    pub src: PathBuf,
    /// Output of the correct task, one per line
    #[arg(long)]
    pub corrected: PathBuf,
    /// Output of the explain task: JSONL, a string or `{"script": ...}`
    #[arg(long)]
    pub explained: PathBuf,
    /// Output of the apply task, one per line
    #[arg(long)]
    pub reapplied: PathBuf,
    #[arg(long)]
    pub nfc: bool,
    /// Per-sentence records JSONL
    #[arg(long)]
    #[serde(skip)]
    pub records: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecodeArgs {
    /// Bigram table JSON `{token: {next: prob}}`
    #[arg(long)]
    pub table: PathBuf,
    /// Token-id vocabulary JSONL; derived from the table when omitted
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Source sentences, one per line
    #[arg(long, short, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    /// Align-Pred strength; 0 disables it
    #[arg(long, default_value_t = 0.5)]
    pub boost: f64,
    #[arg(long, default_value_t = 4)]
    pub beam: usize,
    #[arg(long, default_value_t = 128)]
    pub max_len: usize,
    /// Realignment window after divergence
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    /// Realign by full edit distance at every step instead of a window
    #[arg(long)]
    pub exact_realign: bool,
    /// Hypotheses per sentence
    #[arg(long, default_value_t = 1)]
    pub nbest: usize,
    #[arg(long)]
    pub nfc: bool,
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

/// Options that take a value, for locating the subcommand in argv.
const GLOBAL_VALUED: [&str; 4] = ["--format", "--jobs", "--seed", "--config"];

/// Parses argv, splicing flags from `--config` right after the subcommand
/// name so that command-line flags win.
pub fn parse(args: Vec<OsString>) -> std::result::Result<Cli, CliError> {
    let first = Cli::try_parse_from(&args).map_err(CliError::Clap)?;
    let Some(path) = first.global.config.clone() else {
        return Ok(first);
    };
    let name = first.command.name();
    let extra = config_args(&path).map_err(CliError::Tool)?;
    let at = subcommand_position(&args, name).expect("clap found the subcommand");
    let mut spliced = args[..=at].to_vec();
    spliced.extend(extra);
    spliced.extend_from_slice(&args[at + 1..]);
    Cli::try_parse_from(spliced).map_err(CliError::Clap)
}

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Tool(ToolError),
}

fn subcommand_position(args: &[OsString], name: &str) -> Option<usize> {
    let mut skip_value = false;
    for (i, a) in args.iter().enumerate().skip(1) {
        if skip_value {
            skip_value = false;
            continue;
        }
        let s = a.to_string_lossy();
        if s == name {
            return Some(i);
        }
        skip_value = GLOBAL_VALUED.contains(&s.as_ref());
    }
    None
}

fn config_args(path: &std::path::Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| ToolError::data(path, e.line(), e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(ToolError::data(path, 1, "config must be a JSON object"));
    };
    let mut out = Vec::new();
    for (key, v) in map {
        if key == "config" {
            return Err(ToolError::data(path, 1, "config files cannot nest"));
        }
        let flag = format!("--{key}");
        let items = match v {
            Value::Array(items) => items,
            other => vec![other],
        };
        for item in items {
            match item {
                Value::Bool(true) => out.push(flag.clone().into()),
                Value::Bool(false) | Value::Null => {}
                Value::String(s) => out.push(format!("{flag}={s}").into()),
                Value::Number(n) => out.push(format!("{flag}={n}").into()),
                _ => return Err(ToolError::data(path, 1, format!("`{key}`: nested values are not flags"))),
            }
        }
    }
    Ok(out)
}
