//! Reference edit distance for desk-scale verification.
//!
//! Computed top-down over suffix pairs with memoization, independent of the
//! bottom-up prefix table used by [`super::align_ops`].

use alloc::vec;
use core::fmt;

use super::CostModel;

pub const MAX_ORACLE_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTooLong {
    pub src_len: usize,
    pub tgt_len: usize,
}

impl fmt::Display for OracleTooLong {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "oracle accepts at most {MAX_ORACLE_LEN} tokens per side (got {} and {})",
            self.src_len, self.tgt_len
        )
    }
}

impl core::error::Error for OracleTooLong {}

pub fn edit_distance_oracle<T: PartialEq>(src: &[T], tgt: &[T], costs: &CostModel) -> Result<u64, OracleTooLong> {
    if src.len() > MAX_ORACLE_LEN || tgt.len() > MAX_ORACLE_LEN {
        return Err(OracleTooLong { src_len: src.len(), tgt_len: tgt.len() });
    }
    let mut memo = vec![None; (src.len() + 1) * (tgt.len() + 1)];
    Ok(suffix_cost(src, tgt, 0, 0, costs, &mut memo))
}

fn suffix_cost<T: PartialEq>(
    src: &[T],
    tgt: &[T],
    i: usize,
    j: usize,
    costs: &CostModel,
    memo: &mut [Option<u64>],
) -> u64 {
    let key = i * (tgt.len() + 1) + j;
    if let Some(v) = memo[key] {
        return v;
    }
    let v = if i == src.len() {
        (tgt.len() - j) as u64 * u64::from(costs.insert)
    } else if j == tgt.len() {
        (src.len() - i) as u64 * u64::from(costs.delete)
    } else {
        let step = if src[i] == tgt[j] { 0 } else { u64::from(costs.replace) };
        let diag = step + suffix_cost(src, tgt, i + 1, j + 1, costs, memo);
        let del = u64::from(costs.delete) + suffix_cost(src, tgt, i + 1, j, costs, memo);
        let ins = u64::from(costs.insert) + suffix_cost(src, tgt, i, j + 1, costs, memo);
        diag.min(del).min(ins)
    };
    memo[key] = Some(v);
    v
}
