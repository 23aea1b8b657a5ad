//! Data-side machinery for multi-task grammatical error correction training.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It covers:
//!
//! - [`align`]: whitespace tokenization, token-level edit-distance alignment
//!   and extraction of insert/delete/replace edit scripts;
//! - [`editscript`]: the textual edit-script grammar, its parser and a
//!   deterministic applier;
//! - [`taskgen`]: the four prefixed seq2seq task encodings
//!   (`<correct>`, `<explain>`, `<apply>`, `<edit>`);
//! - [`scoring`]: M2-style edit matching, F0.5, multi-reference averaging,
//!   error typing and chain-consistency metrics;
//! - [`schedule`]: stage-partitioned, ordered and batch-packed training
//!   manifests;
//! - [`decode`]: temperature scaling, source-token boosting with a monotone
//!   alignment state, and a small beam search over pluggable providers.
//!
//! File formats and the command-line tool live in the `gec-tools` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod align;
pub mod decode;
pub mod editscript;
pub mod schedule;
pub mod scoring;
pub mod taskgen;

pub use align::{align_pair, tokenize, CostModel, Edit, EditOp, EditScript, Span, TokenizedPair};
pub use editscript::{apply_script, parse_script, serialize_script, ScriptMode, TextualEdit};
pub use taskgen::{Task, TaskInstance, TaskSet};
