//! Ordered parallel map over a fallible stream.
//!
//! Input is pulled in fixed-size chunks; each chunk is mapped on the rayon
//! pool and handed to the sink in input order, so output never depends on
//! the number of threads and memory stays bounded by the chunk size.

use rayon::prelude::*;

use crate::error::{Result, ToolError};

pub const CHUNK: usize = 4096;

pub fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(ToolError::usage("--jobs must be at least 1"));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| ToolError::usage(format!("cannot start worker threads: {e}")))
}

/// Maps `f` over `input` in parallel and feeds results to `sink` in order.
/// Stops at the first error from the input, `f` or the sink.
pub fn ordered_map<I, T, U, F, S>(pool: &rayon::ThreadPool, input: I, f: F, mut sink: S) -> Result<()>
where
    I: Iterator<Item = Result<T>>,
    T: Send,
    U: Send,
    F: Fn(T) -> Result<U> + Sync,
    S: FnMut(U) -> Result<()>,
{
    let mut input = input.peekable();
    let mut chunk = Vec::with_capacity(CHUNK);
    while input.peek().is_some() {
        chunk.clear();
        for item in input.by_ref().take(CHUNK) {
            chunk.push(item?);
        }
        let mapped: Vec<Result<U>> = pool.install(|| chunk.par_drain(..).map(&f).collect());
        for m in mapped {
            sink(m?)?;
        }
    }
    Ok(())
}
