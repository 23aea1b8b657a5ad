//! Seq2seq task encodings.
//!
//! Every parallel pair expands into up to four prefixed instances:
//!
//! | task    | input                                          | target            |
//! |---------|------------------------------------------------|-------------------|
//! | Correct | `<correct> {src}`                              | `{tgt}`           |
//! | Explain | `<explain> Input: {src}\nTarget: {tgt}`        | edit script       |
//! | Apply   | `<apply> Input: {src}\nDo: {script}`           | `{tgt}`           |
//! | Edit    | `<edit> {src}`                                 | edit script       |
//!
//! Scripts are always serialized in paper mode.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::align::{align_pair, CostModel, EditScript, TokenizedPair};
use crate::editscript::{serialize_script, ScriptMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Task {
    Correct,
    Explain,
    Apply,
    Edit,
}

impl Task {
    /// Emission order within a pair.
    pub const ALL: [Task; 4] = [Task::Correct, Task::Explain, Task::Apply, Task::Edit];

    pub const fn name(self) -> &'static str {
        match self {
            Task::Correct => "correct",
            Task::Explain => "explain",
            Task::Apply => "apply",
            Task::Edit => "edit",
        }
    }

    /// The literal input prefix, trailing space included.
    pub const fn prefix(self) -> &'static str {
        match self {
            Task::Correct => "<correct> ",
            Task::Explain => "<explain> ",
            Task::Apply => "<apply> ",
            Task::Edit => "<edit> ",
        }
    }

    pub fn from_input(input: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| input.starts_with(t.prefix()))
    }

    const fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownTask(pub String);

impl fmt::Display for UnknownTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown task `{}` (expected correct, explain, apply or edit)", self.0)
    }
}

impl core::error::Error for UnknownTask {}

impl FromStr for Task {
    type Err = UnknownTask;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownTask(s.into()))
    }
}

/// A non-empty set of tasks.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TaskSet(u8);

impl TaskSet {
    pub const CORRECT_ONLY: TaskSet = TaskSet(1);
    pub const ALL: TaskSet = TaskSet(0b1111);

    /// Returns `None` for an empty selection.
    pub fn new(tasks: impl IntoIterator<Item = Task>) -> Option<TaskSet> {
        let bits = tasks.into_iter().fold(0u8, |acc, t| acc | t.bit());
        (bits != 0).then_some(TaskSet(bits))
    }

    pub fn contains(self, task: Task) -> bool {
        self.0 & task.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Enabled tasks in emission order.
    pub fn iter(self) -> impl Iterator<Item = Task> {
        Task::ALL.into_iter().filter(move |t| self.contains(*t))
    }
}

impl Default for TaskSet {
    fn default() -> Self {
        TaskSet::ALL
    }
}

impl fmt::Debug for TaskSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for TaskSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            f.write_str(t.name())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskSetError {
    Empty,
    Unknown(UnknownTask),
}

impl fmt::Display for TaskSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskSetError::Empty => f.write_str("task set must not be empty"),
            TaskSetError::Unknown(u) => u.fmt(f),
        }
    }
}

impl core::error::Error for TaskSetError {}

impl FromStr for TaskSet {
    type Err = TaskSetError;

    /// Parses a comma-separated list such as `correct,explain,apply`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tasks = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(Task::from_str)
            .collect::<Result<Vec<_>, _>>()
            .map_err(TaskSetError::Unknown)?;
        TaskSet::new(tasks).ok_or(TaskSetError::Empty)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for TaskSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for TaskSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let tasks = Vec::<Task>::deserialize(d)?;
        TaskSet::new(tasks).ok_or_else(|| serde::de::Error::custom("task set must not be empty"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskInstance {
    pub task: Task,
    pub input: String,
    pub target: String,
    pub pair_id: String,
}

fn instance(task: Task, pair: &TokenizedPair, body: &[&str], target: String) -> TaskInstance {
    let mut input = String::from(task.prefix());
    for part in body {
        input.push_str(part);
    }
    TaskInstance { task, input, target, pair_id: pair.pair_id.clone() }
}

pub fn gen_correct(pair: &TokenizedPair) -> TaskInstance {
    instance(Task::Correct, pair, &[&pair.src_raw], pair.tgt_raw.clone())
}

pub fn gen_explain(pair: &TokenizedPair, script: &EditScript) -> TaskInstance {
    let target = serialize_script(script, ScriptMode::Paper);
    instance(Task::Explain, pair, &["Input: ", &pair.src_raw, "\nTarget: ", &pair.tgt_raw], target)
}

pub fn gen_apply(pair: &TokenizedPair, script: &EditScript) -> TaskInstance {
    let body = serialize_script(script, ScriptMode::Paper);
    instance(Task::Apply, pair, &["Input: ", &pair.src_raw, "\nDo: ", &body], pair.tgt_raw.clone())
}

pub fn gen_edit(pair: &TokenizedPair, script: &EditScript) -> TaskInstance {
    instance(Task::Edit, pair, &[&pair.src_raw], serialize_script(script, ScriptMode::Paper))
}

/// Instances for one pair, adjacent and in [`Task::ALL`] order.
pub fn expand_pair(pair: &TokenizedPair, script: &EditScript, tasks: TaskSet) -> Vec<TaskInstance> {
    tasks
        .iter()
        .map(|task| match task {
            Task::Correct => gen_correct(pair),
            Task::Explain => gen_explain(pair, script),
            Task::Apply => gen_apply(pair, script),
            Task::Edit => gen_edit(pair, script),
        })
        .collect()
}

/// Lazily expands a pair stream; pair order is preserved.
pub fn expand_corpus<'a, I>(pairs: I, tasks: TaskSet, costs: CostModel) -> impl Iterator<Item = TaskInstance> + 'a
where
    I: IntoIterator<Item = &'a TokenizedPair>,
    I::IntoIter: 'a,
{
    pairs.into_iter().flat_map(move |pair| {
        let needs_script = tasks.iter().any(|t| t != Task::Correct);
        let script = if needs_script {
            align_pair(pair, &costs)
        } else {
            EditScript { pair_id: String::new(), edits: Vec::new() }
        };
        expand_pair(pair, &script, tasks)
    })
}
