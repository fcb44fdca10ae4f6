//! Multi-threaded drivers for the exhaustive checks and the lift sweep.
//!
//! Each driver returns exactly what its sequential counterpart returns: work
//! is split into contiguous blocks of the canonical order and the reduction
//! keeps the least index, so thread count and scheduling never show up in
//! the result.

use std::sync::atomic::{AtomicU64, Ordering};

use largeness_core::chain::{cr_evidence, CrEvidence, CrParams};
use largeness_core::lift::{lift_at, LiftSearch, PairMatrix};
use largeness_core::witness::{cr_degree_with, CrFullChecker, Degree, Verdict};
use largeness_core::{Elem, ElemRange, Error, GroundSet, Result};
use rayon::prelude::*;

const MIN_BLOCK: u64 = 512;
const MAX_BLOCK: u64 = 1 << 16;

/// Parallel exhaustive CR check; the counterexample is the lexicographically
/// least one, as in the sequential enumeration.
pub fn check_cr_full(a: &GroundSet, n: usize, r: usize, guard: u128) -> Result<Verdict> {
    let checker = CrFullChecker::new(a, n, r, guard)?;
    let total = checker.total();
    let threads = rayon::current_num_threads() as u64;
    if threads <= 1 || total <= MIN_BLOCK {
        return Ok(checker.verdict_from(checker.scan(0, total, &|_| false)));
    }
    let block = (total / (threads * 16)).clamp(MIN_BLOCK, MAX_BLOCK);
    let best = AtomicU64::new(u64::MAX);
    (0..total.div_ceil(block)).into_par_iter().for_each(|b| {
        let start = b * block;
        if start >= best.load(Ordering::Relaxed) {
            return;
        }
        let end = (start + block).min(total);
        if let Some(k) = checker.scan(start, end, &|k| k >= best.load(Ordering::Relaxed)) {
            best.fetch_min(k, Ordering::Relaxed);
        }
    });
    let first = best.into_inner();
    Ok(checker.verdict_from((first != u64::MAX).then_some(first)))
}

pub fn cr_degree(a: &GroundSet, n: usize, r_max: usize, guard: u128) -> Result<Degree> {
    cr_degree_with(a, n, r_max, guard, check_cr_full)
}

/// Per-level CR evidence, computed concurrently and returned in level order.
pub fn chain_cr_evidence(sets: &[GroundSet], params: &CrParams) -> Result<Vec<CrEvidence>> {
    sets.par_iter().map(|c| cr_evidence(c, params)).collect()
}

/// Same contract as the library's sequential sweep: first `s` in canonical
/// order wins, a window overflow ends the sweep.
pub fn lift_sweep(a_set: &GroundSet, mp: &PairMatrix, steps: usize, s_range: ElemRange, base_range: ElemRange) -> Result<LiftSearch> {
    let chunk = (rayon::current_num_threads() * 4).max(1);
    let candidates: Vec<Elem> = s_range.iter().collect();
    let mut tried = 0;
    for group in candidates.chunks(chunk) {
        let results: Vec<_> = group.par_iter().map(|&s| lift_at(a_set, mp, steps, s, base_range)).collect();
        for (&s, res) in group.iter().zip(results) {
            match res {
                Ok(Some(outcome)) => return Ok(LiftSearch { outcome: Some(outcome), tried: tried + 1, overflow_at: None }),
                Ok(None) => tried += 1,
                Err(Error::WindowOverflow(_)) if !a_set.semigroup().is_total() => {
                    return Ok(LiftSearch { outcome: None, tried, overflow_at: Some(s) });
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(LiftSearch { outcome: None, tried, overflow_at: None })
}
