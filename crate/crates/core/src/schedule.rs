//! Staged, ordered and batch-packed training manifests.
//!
//! A manifest lists every training instance in the order a trainer should
//! consume it. Stages run I, II, III. Inside a stage the datasets either
//! follow their declared rank one after another (strict order) or are
//! randomly interleaved under a seed. Inside a dataset, documents keep their
//! first-appearance order and sentences their `doc_index` order (preserve),
//! or the sentences are shuffled under a seed. Every sentence then expands
//! into its stage's tasks, adjacently, and the result is packed greedily
//! into batches.
//!
//! Random interleaving draws the next dataset with probability proportional
//! to its remaining sentences, so the relative order inside each dataset
//! survives; combined with a within-dataset shuffle it gives a uniform
//! shuffle of the whole stage.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::taskgen::{Task, TaskSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Stage {
    I,
    II,
    III,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::I, Stage::II, Stage::III];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Stage::I => "I",
            Stage::II => "II",
            Stage::III => "III",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetDescriptor {
    pub name: String,
    pub path: String,
    pub stages: Vec<Stage>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub errorful_only: bool,
    pub rank: u32,
}

impl DatasetDescriptor {
    pub fn new(name: &str, path: &str, stages: &[Stage], rank: u32) -> Self {
        DatasetDescriptor { name: name.into(), path: path.into(), stages: stages.to_vec(), errorful_only: false, rank }
    }

    /// The four fine-tuning corpora with their default stages and ranks;
    /// `None` for any other name.
    pub fn standard(name: &str, path: &str) -> Option<Self> {
        let (stages, rank): (&[Stage], u32) = match name {
            "Lang-8" => (&[Stage::II], 0),
            "NUCLE" => (&[Stage::II], 1),
            "FCE" => (&[Stage::II], 2),
            "W&I+L" => (&[Stage::II, Stage::III], 3),
            _ => return None,
        };
        Some(DatasetDescriptor::new(name, path, stages, rank))
    }

    pub fn in_stage(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }
}

/// One sentence pair as far as scheduling is concerned.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleItem {
    pub pair_id: String,
    pub doc_id: String,
    pub doc_index: u64,
    pub errorful: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetCorpus {
    pub descriptor: DatasetDescriptor,
    pub items: Vec<ScheduleItem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum WithinOrder {
    #[default]
    Preserve,
    Shuffle { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum AcrossOrder {
    #[default]
    StrictOrder,
    Shuffle { seed: u64 },
}

/// Per-stage task sets. Defaults: stage I `correct`, stages II and III
/// `correct,explain,apply`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageTasks {
    #[cfg_attr(feature = "serde", serde(rename = "I"))]
    pub stage1: TaskSet,
    #[cfg_attr(feature = "serde", serde(rename = "II"))]
    pub stage2: TaskSet,
    #[cfg_attr(feature = "serde", serde(rename = "III"))]
    pub stage3: TaskSet,
}

impl StageTasks {
    pub fn uniform(tasks: TaskSet) -> Self {
        StageTasks { stage1: tasks, stage2: tasks, stage3: tasks }
    }

    pub fn get(&self, stage: Stage) -> TaskSet {
        match stage {
            Stage::I => self.stage1,
            Stage::II => self.stage2,
            Stage::III => self.stage3,
        }
    }
}

impl Default for StageTasks {
    fn default() -> Self {
        let multi = TaskSet::new([Task::Correct, Task::Explain, Task::Apply]).unwrap();
        StageTasks { stage1: TaskSet::CORRECT_ONLY, stage2: multi, stage3: multi }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SchedulePolicy {
    #[cfg_attr(feature = "serde", serde(default))]
    pub within_dataset: WithinOrder,
    #[cfg_attr(feature = "serde", serde(default))]
    pub across_datasets: AcrossOrder,
    #[cfg_attr(feature = "serde", serde(default))]
    pub tasks: StageTasks,
    pub batch_size: usize,
    /// Repeat count per stage (I, II, III).
    #[cfg_attr(feature = "serde", serde(default = "default_epochs"))]
    pub epochs: [u32; 3],
}

#[cfg(feature = "serde")]
fn default_epochs() -> [u32; 3] {
    [1; 3]
}

impl SchedulePolicy {
    pub fn new(batch_size: usize) -> Self {
        SchedulePolicy {
            within_dataset: WithinOrder::Preserve,
            across_datasets: AcrossOrder::StrictOrder,
            tasks: StageTasks::default(),
            batch_size,
            epochs: [1; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifestEntry {
    pub stage: Stage,
    pub dataset: String,
    pub doc_id: String,
    pub doc_index: u64,
    pub pair_id: String,
    pub task: Task,
    pub batch_index: u64,
}

/// Entry range `[start, end)` of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageBoundary {
    pub stage: Stage,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScheduleManifest {
    pub entries: Vec<ManifestEntry>,
    pub stage_boundaries: Vec<StageBoundary>,
}

impl ScheduleManifest {
    pub fn stage_entries(&self, stage: Stage) -> &[ManifestEntry] {
        self.stage_boundaries
            .iter()
            .find(|b| b.stage == stage)
            .map_or(&[][..], |b| &self.entries[b.start..b.end])
    }

    pub fn batch_count(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.batch_index + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    NoDatasets,
    ZeroBatchSize,
    DuplicateName(String),
    DuplicateRank { stage: Stage, rank: u32, first: String, second: String },
    DuplicateDocIndex { dataset: String, doc_id: String, doc_index: u64 },
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::NoDatasets => f.write_str("no datasets given"),
            ScheduleError::ZeroBatchSize => f.write_str("batch size must be positive"),
            ScheduleError::DuplicateName(n) => write!(f, "dataset {n:?} declared twice"),
            ScheduleError::DuplicateRank { stage, rank, first, second } => {
                write!(f, "datasets {first:?} and {second:?} share rank {rank} in stage {stage}")
            }
            ScheduleError::DuplicateDocIndex { dataset, doc_id, doc_index } => {
                write!(f, "dataset {dataset:?}: document {doc_id:?} repeats index {doc_index}")
            }
        }
    }
}

impl core::error::Error for ScheduleError {}

pub fn build_manifest(corpora: &[DatasetCorpus], policy: &SchedulePolicy) -> Result<ScheduleManifest, ScheduleError> {
    validate(corpora, policy)?;

    let mut manifest = ScheduleManifest::default();
    let mut next_batch = 0u64;
    for stage in Stage::ALL {
        let mut members: Vec<&DatasetCorpus> = corpora.iter().filter(|c| c.descriptor.in_stage(stage)).collect();
        members.sort_by_key(|c| c.descriptor.rank);
        let tasks = policy.tasks.get(stage);
        let start = manifest.entries.len();

        for epoch in 0..policy.epochs[stage.index()] {
            let mut streams = Vec::with_capacity(members.len());
            for corpus in &members {
                let seed_salt = mix(stage.index() as u64, u64::from(corpus.descriptor.rank), u64::from(epoch));
                streams.push(order_within(corpus, policy.within_dataset, seed_salt)?);
            }
            let picks = order_across(&streams, policy.across_datasets, mix(stage.index() as u64, u64::MAX, u64::from(epoch)));

            let segment_start = manifest.entries.len();
            for (d, item) in picks {
                let dataset = &members[d].descriptor.name;
                for task in tasks.iter() {
                    manifest.entries.push(ManifestEntry {
                        stage,
                        dataset: dataset.clone(),
                        doc_id: item.doc_id.clone(),
                        doc_index: item.doc_index,
                        pair_id: item.pair_id.clone(),
                        task,
                        batch_index: 0,
                    });
                }
            }
            next_batch = pack_from(&mut manifest.entries[segment_start..], policy.batch_size, next_batch);
        }
        manifest.stage_boundaries.push(StageBoundary { stage, start, end: manifest.entries.len() });
    }
    Ok(manifest)
}

fn validate(corpora: &[DatasetCorpus], policy: &SchedulePolicy) -> Result<(), ScheduleError> {
    if corpora.is_empty() {
        return Err(ScheduleError::NoDatasets);
    }
    if policy.batch_size == 0 {
        return Err(ScheduleError::ZeroBatchSize);
    }
    let mut names = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    for c in corpora {
        let d = &c.descriptor;
        if names.insert(d.name.as_str(), ()).is_some() {
            return Err(ScheduleError::DuplicateName(d.name.clone()));
        }
        for &stage in &d.stages {
            if let Some(first) = ranks.insert((stage, d.rank), d.name.as_str()) {
                if first != d.name {
                    return Err(ScheduleError::DuplicateRank {
                        stage,
                        rank: d.rank,
                        first: first.into(),
                        second: d.name.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn order_within(corpus: &DatasetCorpus, order: WithinOrder, salt: u64) -> Result<Vec<&ScheduleItem>, ScheduleError> {
    let kept = corpus.items.iter().filter(|it| !corpus.descriptor.errorful_only || it.errorful);
    match order {
        WithinOrder::Preserve => {
            let mut first_seen: BTreeMap<&str, usize> = BTreeMap::new();
            let mut items: Vec<(usize, &ScheduleItem)> = Vec::new();
            for it in kept {
                let n = first_seen.len();
                let doc = *first_seen.entry(it.doc_id.as_str()).or_insert(n);
                items.push((doc, it));
            }
            items.sort_by_key(|(doc, it)| (*doc, it.doc_index));
            if let Some(w) = items.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1.doc_index == w[1].1.doc_index) {
                return Err(ScheduleError::DuplicateDocIndex {
                    dataset: corpus.descriptor.name.clone(),
                    doc_id: w[0].1.doc_id.clone(),
                    doc_index: w[0].1.doc_index,
                });
            }
            Ok(items.into_iter().map(|(_, it)| it).collect())
        }
        WithinOrder::Shuffle { seed } => {
            let mut items: Vec<&ScheduleItem> = kept.collect();
            items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ salt));
            Ok(items)
        }
    }
}

/// Merges the per-dataset streams into `(dataset position, item)` picks.
fn order_across<'a>(
    streams: &[Vec<&'a ScheduleItem>],
    order: AcrossOrder,
    salt: u64,
) -> Vec<(usize, &'a ScheduleItem)> {
    let total: usize = streams.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(total);
    match order {
        AcrossOrder::StrictOrder => {
            for (d, s) in streams.iter().enumerate() {
                out.extend(s.iter().map(|it| (d, *it)));
            }
        }
        AcrossOrder::Shuffle { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
            let mut cursor = alloc::vec![0usize; streams.len()];
            for remaining in (1..=total).rev() {
                let mut r = rng.random_range(0..remaining);
                let d = (0..streams.len())
                    .find(|&d| {
                        let left = streams[d].len() - cursor[d];
                        if r < left {
                            true
                        } else {
                            r -= left;
                            false
                        }
                    })
                    .expect("remaining count covers all streams");
                out.push((d, streams[d][cursor[d]]));
                cursor[d] += 1;
            }
        }
    }
    out
}

/// splitmix64 over the three salts.
fn mix(a: u64, b: u64, c: u64) -> u64 {
    let mut z = a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.rotate_left(21) ^ c.rotate_left(42);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Greedy sequential packing: entries keep their order, batch `k` holds
/// entries `k*size .. (k+1)*size`.
pub fn batch_pack(entries: &mut [ManifestEntry], batch_size: usize) {
    assert!(batch_size > 0, "batch size must be positive");
    pack_from(entries, batch_size, 0);
}

fn pack_from(entries: &mut [ManifestEntry], batch_size: usize, first: u64) -> u64 {
    for (i, e) in entries.iter_mut().enumerate() {
        e.batch_index = first + (i / batch_size) as u64;
    }
    first + entries.len().div_ceil(batch_size) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetStats {
    pub n_sentences: usize,
    pub n_errorful: usize,
    /// Percentage, 0 for an empty corpus.
    pub pct_errorful: f64,
}

impl DatasetStats {
    pub fn from_flags(errorful: impl IntoIterator<Item = bool>) -> Self {
        let mut s = DatasetStats::default();
        for e in errorful {
            s.n_sentences += 1;
            s.n_errorful += usize::from(e);
        }
        if s.n_sentences > 0 {
            s.pct_errorful = 100.0 * s.n_errorful as f64 / s.n_sentences as f64;
        }
        s
    }
}

/// Sentence count and share of errorful pairs.
pub fn dataset_stats<'a>(pairs: impl IntoIterator<Item = &'a crate::align::TokenizedPair>) -> DatasetStats {
    DatasetStats::from_flags(pairs.into_iter().map(|p| p.is_errorful()))
}
