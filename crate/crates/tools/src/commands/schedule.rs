use std::collections::HashMap;
use std::path::{Path, PathBuf};

use gec_core::schedule::{
    build_manifest, AcrossOrder, DatasetCorpus, DatasetDescriptor, ScheduleError, ScheduleItem, SchedulePolicy,
    WithinOrder,
};

use super::{finish, header, to_json};
use crate::cli::{Global, ScheduleArgs};
use crate::corpus::{Format, PairReader};
use crate::error::{Result, ToolError};
use crate::io::{create, write_line};
use crate::output::config_hash;
use crate::par::{ordered_map, pool};

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| ToolError::data(path, e.line(), e.to_string()))
}

pub fn load_policy(path: &Path, seed: Option<u64>) -> Result<SchedulePolicy> {
    let mut policy: SchedulePolicy = read_json(path)?;
    if let Some(seed) = seed {
        if let WithinOrder::Shuffle { seed: s } = &mut policy.within_dataset {
            *s = seed;
        }
        if let AcrossOrder::Shuffle { seed: s } = &mut policy.across_datasets {
            *s = seed;
        }
    }
    Ok(policy)
}

/// Descriptors with their paths resolved against the working directory.
fn descriptors(a: &ScheduleArgs) -> Result<Vec<(DatasetDescriptor, PathBuf)>> {
    let mut out = Vec::new();
    if let Some(file) = &a.datasets {
        let base = file.parent().unwrap_or(Path::new(""));
        let list: Vec<DatasetDescriptor> = read_json(file)?;
        out.extend(list.into_iter().map(|d| {
            let p = base.join(&d.path);
            (d, p)
        }));
    }
    for spec in &a.dataset {
        let Some((name, path)) = spec.split_once('=') else {
            return Err(ToolError::usage(format!("--dataset expects NAME=PATH, got {spec:?}")));
        };
        let d = DatasetDescriptor::standard(name, path).ok_or_else(|| {
            ToolError::usage(format!("unknown dataset {name:?}; use Lang-8, NUCLE, FCE or W&I+L, or --datasets"))
        })?;
        out.push((d, PathBuf::from(path)));
    }
    if out.is_empty() {
        return Err(ToolError::usage("no datasets: pass --datasets or --dataset"));
    }
    Ok(out)
}

fn read_corpus(
    pool: &rayon::ThreadPool,
    descriptor: DatasetDescriptor,
    path: &Path,
    format: Option<Format>,
    nfc: bool,
) -> Result<DatasetCorpus> {
    let reader = PairReader::open(path, format, nfc)?;
    let mut items = Vec::new();
    let mut seen: HashMap<(String, u64), usize> = HashMap::new();
    ordered_map(
        pool,
        reader,
        |rec| {
            let line = rec.line;
            let pair = rec.tokenize(path)?;
            let errorful = pair.is_errorful();
            Ok((line, ScheduleItem { pair_id: pair.pair_id, doc_id: pair.doc_id, doc_index: pair.doc_index, errorful }))
        },
        |(line, item)| {
            if let Some(first) = seen.insert((item.doc_id.clone(), item.doc_index), line) {
                let msg = format!("document {:?} index {} already used on line {first}", item.doc_id, item.doc_index);
                return Err(ToolError::data(path, line, msg));
            }
            items.push(item);
            Ok(())
        },
    )?;
    Ok(DatasetCorpus { descriptor, items })
}

pub fn run(g: &Global, a: &ScheduleArgs) -> Result<()> {
    let pool = pool(g.jobs)?;
    let policy = load_policy(&a.policy, g.seed)?;
    let corpora = descriptors(a)?
        .into_iter()
        .map(|(d, path)| read_corpus(&pool, d, &path, g.format, a.nfc))
        .collect::<Result<Vec<_>>>()?;
    let manifest = build_manifest(&corpora, &policy).map_err(|e| match e {
        ScheduleError::ZeroBatchSize => ToolError::data(&a.policy, 0, e.to_string()),
        ScheduleError::DuplicateName(_) | ScheduleError::DuplicateRank { .. } => match &a.datasets {
            Some(p) => ToolError::data(p, 0, e.to_string()),
            None => ToolError::usage(e.to_string()),
        },
        _ => ToolError::usage(e.to_string()),
    })?;

    let head = header("schedule", g, a)
        .with("policy_hash", config_hash(&policy))
        .with("stage_boundaries", &manifest.stage_boundaries)
        .with("entries", manifest.entries.len())
        .with("batches", manifest.batch_count());
    let out_path = a.output.as_deref();
    let mut out = create(out_path)?;
    write_line(&mut out, out_path, &head.line())?;
    for e in &manifest.entries {
        write_line(&mut out, out_path, &to_json(e))?;
    }
    finish(out, out_path)
}
