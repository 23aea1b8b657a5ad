//! Command-line tooling around `gec-core`: corpus readers, M2 files,
//! run headers and the `gec` subcommands.

pub mod bigram;
pub mod cli;
pub mod commands;
pub mod corpus;
pub mod error;
pub mod io;
pub mod m2;
pub mod output;
pub mod par;
