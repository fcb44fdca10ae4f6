//! Desk check of van der Waerden numbers: does every `c`-colouring of
//! `[1, N]` contain a monochromatic `k`-term progression?

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{usage, Error, Result};

/// Default ceiling on `c^N`.
pub const DEFAULT_VDW_GUARD: u128 = 1 << 24;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VdwVerdict {
    Holds,
    /// Lexicographically least colouring of `1..=N` without a monochromatic
    /// `k`-AP; entry `i` is the colour of `i + 1`.
    Counterexample(Vec<u8>),
}

/// Colours positions left to right and backtracks as soon as the newest
/// position closes a monochromatic progression, so the first complete
/// colouring reached is the lexicographically least counterexample.
pub fn vdw_check(terms: usize, colors: usize, upto: usize, guard: u128) -> Result<VdwVerdict> {
    if terms == 0 || colors == 0 {
        return Err(usage("terms and colors must be at least 1"));
    }
    if colors > u8::MAX as usize {
        return Err(usage("at most 255 colours"));
    }
    let required = (colors as u128).checked_pow(upto as u32).unwrap_or(u128::MAX);
    if required > guard {
        return Err(Error::CostGuard { required, limit: guard });
    }
    let mut coloring = vec![0u8; upto];
    if upto == 0 {
        return Ok(VdwVerdict::Counterexample(coloring));
    }
    let mut pos = 0usize;
    let mut next_color = vec![0usize; upto];
    loop {
        if next_color[pos] == colors {
            next_color[pos] = 0;
            if pos == 0 {
                return Ok(VdwVerdict::Holds);
            }
            pos -= 1;
            continue;
        }
        coloring[pos] = next_color[pos] as u8;
        next_color[pos] += 1;
        if closes_progression(&coloring, pos, terms) {
            continue;
        }
        if pos + 1 == upto {
            return Ok(VdwVerdict::Counterexample(coloring));
        }
        pos += 1;
    }
}

/// Some `k`-AP ending at `last` (0-based) is monochromatic in `coloring[..=last]`.
fn closes_progression(coloring: &[u8], last: usize, k: usize) -> bool {
    if k == 1 {
        return true;
    }
    let c = coloring[last];
    (1..=last / (k - 1)).any(|d| (1..k).all(|i| coloring[last - i * d] == c))
}

/// Some `k`-AP inside `1..=N` is monochromatic.
pub fn has_monochromatic_ap(coloring: &[u8], k: usize) -> bool {
    (0..coloring.len()).any(|last| closes_progression(&coloring[..=last], last, k))
}
