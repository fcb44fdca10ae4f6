//! Witness re-validation by direct membership arithmetic.
//!
//! Nothing here shares code with the search kernels: sums are replayed term
//! by term with [`Semigroup::add`], and membership is a plain lookup. Every
//! searcher runs its result through this module before returning it.

use alloc::format;
use alloc::string::String;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::semigroup::{Elem, Semigroup};
use crate::set::GroundSet;

fn reject(msg: String) -> Error {
    Error::InvalidWitness(msg)
}

fn plus(sg: &Semigroup, x: Elem, y: Elem) -> Result<Option<Elem>> {
    sg.add(x, y)
}

/// Sum of `terms` in the given order, `None` if any partial sum is undefined.
fn fold_sum(sg: &Semigroup, terms: impl IntoIterator<Item = Elem>) -> Result<Option<Elem>> {
    let mut acc: Option<Elem> = None;
    for t in terms {
        acc = match acc {
            None => Some(t),
            Some(a) => match plus(sg, a, t)? {
                Some(v) => Some(v),
                None => return Ok(None),
            },
        };
    }
    Ok(acc)
}

/// `alpha` must be a non-empty mask over the matrix rows and, for every
/// column `j`, `s + M_{α,j}` must be defined and in `a`.
pub fn check_cr_witness(a: &GroundSet, m: &Matrix, alpha: u64, s: Elem) -> Result<()> {
    a.ensure_same_sg(m)?;
    let sg = m.semigroup();
    if alpha == 0 {
        return Err(reject("empty row set".into()));
    }
    if m.rows() < 64 && alpha >> m.rows() != 0 {
        return Err(reject(format!("row mask {alpha:#b} names rows beyond {}", m.rows())));
    }
    sg.check(s)?;
    for j in 0..m.cols() {
        let rows = (0..m.rows()).filter(|&i| alpha >> i & 1 == 1).map(|i| m.get(i, j));
        let Some(col) = fold_sum(sg, rows)? else {
            return Err(reject(format!("column {} sum is undefined", j + 1)));
        };
        match plus(sg, s, col)? {
            Some(v) if a.contains(v) => {}
            Some(v) => {
                return Err(reject(format!(
                    "column {}: {} is not in the set",
                    j + 1,
                    sg.value(v)
                )))
            }
            None => return Err(reject(format!("column {}: shifted sum is undefined", j + 1))),
        }
    }
    Ok(())
}

/// For every sequence `f`: `a + Σ_{n∈H} f(n)` is defined and in the set.
pub fn check_j_witness(set: &GroundSet, seqs: &[alloc::vec::Vec<Elem>], a: Elem, h: u64) -> Result<()> {
    let sg = set.semigroup();
    if h == 0 {
        return Err(reject("empty index set H".into()));
    }
    sg.check(a)?;
    for (k, f) in seqs.iter().enumerate() {
        if f.len() < 64 && h >> f.len() != 0 {
            return Err(reject(format!("H reaches past the horizon of sequence {}", k + 1)));
        }
        let terms = f.iter().enumerate().filter(|(n, _)| h >> n & 1 == 1).map(|(_, &e)| e);
        let total = fold_sum(sg, core::iter::once(a).chain(terms))?;
        if !total.is_some_and(|v| set.contains(v)) {
            return Err(reject(format!("sequence {} misses the set", k + 1)));
        }
    }
    Ok(())
}

/// Every `y` in `target` has some `t ∈ shifts` with `t + y ∈ a`.
pub fn check_cover(a: &GroundSet, shifts: &[Elem], target: impl IntoIterator<Item = Elem>) -> Result<()> {
    let sg = a.semigroup();
    for y in target {
        let mut hit = false;
        for &t in shifts {
            if plus(sg, t, y)?.is_some_and(|v| a.contains(v)) {
                hit = true;
                break;
            }
        }
        if !hit {
            return Err(reject(format!("{} is not covered by any shift", sg.value(y))));
        }
    }
    Ok(())
}

/// `probe + x ⊆ a`.
pub fn check_thick(a: &GroundSet, probe: &[Elem], x: Elem) -> Result<()> {
    let sg = a.semigroup();
    for &e in probe {
        if !plus(sg, e, x)?.is_some_and(|v| a.contains(v)) {
            return Err(reject(format!("{} + {} is not in the set", sg.value(e), sg.value(x))));
        }
    }
    Ok(())
}

/// `probe + x ⊆ ⋃_{t ∈ shifts} (−t + a)`.
pub fn check_pws(a: &GroundSet, shifts: &[Elem], probe: &[Elem], x: Elem) -> Result<()> {
    let sg = a.semigroup();
    for &e in probe {
        let Some(y) = plus(sg, e, x)? else {
            return Err(reject(format!("{} + {} is undefined", sg.value(e), sg.value(x))));
        };
        check_cover(a, shifts, [y])?;
    }
    Ok(())
}

/// `a, a+b, ..., a+L·b` are all defined and in `set`. The terms are built by
/// repeated addition of `b`, never by multiplication.
pub fn is_ap_pair(set: &GroundSet, steps: usize, a: Elem, b: Elem) -> bool {
    let sg = set.semigroup();
    let mut term = a;
    if !set.contains(term) {
        return false;
    }
    for _ in 0..steps {
        match sg.sum(term, b) {
            Some(next) if set.contains(next) => term = next,
            _ => return false,
        }
    }
    true
}

impl GroundSet {
    pub(crate) fn ensure_same_sg(&self, m: &Matrix) -> Result<()> {
        if crate::set::same_semigroup(self.semigroup(), m.semigroup()) {
            Ok(())
        } else {
            Err(Error::SemigroupMismatch)
        }
    }
}
