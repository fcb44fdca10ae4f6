//! CR-set and J-set witness search.
//!
//! A CR witness for `(A, M)` is a non-empty row set `α` and a shift `s` with
//! `s + M_{α,j} ∈ A` for every column `j`. The kernel fixes `α`, computes the
//! column sums `c_j`, and intersects the preimages `−c_j + A` with the allowed
//! shifts; the first surviving bit is the canonical `s` for that `α`.
//!
//! Row sets are tried by ascending popcount and then ascending mask, shifts in
//! canonical element order, so every result is the first valid pair in that
//! order. A J witness is the same search on the matrix whose rows are the
//! sequence positions and whose columns are the sequences.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{usage, Error, Result};
use crate::matrix::Matrix;
use crate::semigroup::{Elem, ElemRange, Semigroup};
use crate::set::{same_semigroup, GroundSet};
use crate::subsets::{Subsets, MAX_BITS};
use crate::validate;

/// Default ceiling on `|S|^{r·n}` enumerations.
pub const DEFAULT_COST_GUARD: u128 = 100_000_000;

/// Universes up to this size get a precomputed table of all preimages.
const PREIMAGE_TABLE_MAX: u32 = 2048;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CrWitness {
    /// Row mask, bit `i` = row `i + 1`.
    pub alpha: u64,
    pub s: Elem,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct JWitness {
    pub a: Elem,
    /// Position mask, bit `n` = position `n + 1`.
    pub h: u64,
}

/// Shift targets for one set: `−c + A` restricted to the allowed shifts.
pub(crate) struct ShiftTargets<'a> {
    set: &'a GroundSet,
    allowed: BitSet,
    table: Option<Vec<BitSet>>,
}

impl<'a> ShiftTargets<'a> {
    pub(crate) fn new(set: &'a GroundSet, range: ElemRange) -> Self {
        let sg = set.semigroup();
        let mut allowed = BitSet::new(sg.size() as usize);
        for e in range.iter() {
            allowed.insert(e.idx());
        }
        let table = (sg.size() <= PREIMAGE_TABLE_MAX && !set.is_empty()).then(|| {
            sg.elements()
                .map(|c| {
                    let mut pre = set.preimage_unchecked(c).bits().clone();
                    pre.intersect_with(&allowed);
                    pre
                })
                .collect()
        });
        ShiftTargets { set, allowed, table }
    }

    /// First allowed `s` with `s + c ∈ A` for every `c` in `sums`.
    pub(crate) fn first_shift(&self, sums: &[Elem]) -> Option<Elem> {
        if self.set.is_empty() {
            return None;
        }
        match &self.table {
            Some(table) => {
                let (first, rest) = sums.split_first()?;
                if rest.is_empty() {
                    return table[first.idx()].first().map(|i| Elem(i as u32));
                }
                let mut acc = table[first.idx()].clone();
                for c in rest {
                    acc.intersect_with(&table[c.idx()]);
                }
                acc.first().map(|i| Elem(i as u32))
            }
            None => {
                let sg = self.set.semigroup();
                self.allowed.iter().map(|i| Elem(i as u32)).find(|&s| {
                    sums.iter().all(|&c| sg.sum(s, c).is_some_and(|v| self.set.contains(v)))
                })
            }
        }
    }
}

/// Column sums of a row-major `rows × cols` entry block under `alpha`.
fn column_sums(sg: &Semigroup, entries: &[Elem], cols: usize, alpha: u64, out: &mut Vec<Elem>) -> bool {
    out.clear();
    for j in 0..cols {
        let mut acc: Option<Elem> = None;
        let mut mask = alpha;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let e = entries[i * cols + j];
            acc = Some(match acc {
                None => e,
                Some(a) => match sg.sum(a, e) {
                    Some(v) => v,
                    None => return false,
                },
            });
        }
        out.push(acc.expect("alpha is non-empty"));
    }
    true
}

fn search_entries(targets: &ShiftTargets<'_>, sg: &Semigroup, entries: &[Elem], rows: usize, cols: usize, scratch: &mut Vec<Elem>) -> Option<CrWitness> {
    for alpha in Subsets::new(rows as u32) {
        if !column_sums(sg, entries, cols, alpha, scratch) {
            continue;
        }
        if let Some(s) = targets.first_shift(scratch) {
            return Some(CrWitness { alpha, s });
        }
    }
    None
}

fn check_rows(rows: usize) -> Result<()> {
    if rows > MAX_BITS as usize {
        return Err(usage(format!("at most {MAX_BITS} rows can be searched, got {rows}")));
    }
    Ok(())
}

/// The first `(α, s)` in search order with `s ∈ range`, re-validated before
/// it is returned.
pub fn find_cr_witness(a: &GroundSet, m: &Matrix, range: ElemRange) -> Result<Option<CrWitness>> {
    a.ensure_same_sg(m)?;
    check_rows(m.rows())?;
    let sg = m.semigroup();
    ElemRange::new(sg, range.start, range.end)?;
    let targets = ShiftTargets::new(a, range);
    let mut scratch = Vec::with_capacity(m.cols());
    let found = search_entries(&targets, sg, m.entries(), m.rows(), m.cols(), &mut scratch);
    if let Some(w) = found {
        validate::check_cr_witness(a, m, w.alpha, w.s)?;
    }
    Ok(found)
}

/// A finite family of sequences truncated to a common horizon.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeqFamily {
    sg: Arc<Semigroup>,
    seqs: Vec<Vec<Elem>>,
    horizon: usize,
}

impl SeqFamily {
    /// Truncates every sequence to `horizon` terms.
    pub fn new(sg: &Arc<Semigroup>, seqs: Vec<Vec<Elem>>, horizon: usize) -> Result<Self> {
        if seqs.is_empty() {
            return Err(usage("empty sequence family"));
        }
        if horizon == 0 || horizon > MAX_BITS as usize {
            return Err(usage(format!("horizon must be in 1..={MAX_BITS}")));
        }
        let mut seqs = seqs;
        for (k, f) in seqs.iter_mut().enumerate() {
            if f.len() < horizon {
                return Err(usage(format!(
                    "sequence {} has {} terms, fewer than the horizon {horizon}",
                    k + 1,
                    f.len()
                )));
            }
            f.truncate(horizon);
            for &e in f.iter() {
                sg.check(e)?;
            }
        }
        Ok(SeqFamily { sg: sg.clone(), seqs, horizon })
    }

    /// Horizon = length of the shortest sequence.
    pub fn from_sequences(sg: &Arc<Semigroup>, seqs: Vec<Vec<Elem>>) -> Result<Self> {
        let horizon = seqs.iter().map(Vec::len).min().unwrap_or(0).min(MAX_BITS as usize);
        SeqFamily::new(sg, seqs, horizon)
    }

    pub fn semigroup(&self) -> &Arc<Semigroup> {
        &self.sg
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn sequences(&self) -> &[Vec<Elem>] {
        &self.seqs
    }

    /// The `horizon × |family|` matrix with `M[n][f] = f(n)`.
    pub fn position_matrix(&self) -> Matrix {
        Matrix::from_fn(&self.sg, self.horizon, self.seqs.len(), |n, f| self.seqs[f][n])
            .expect("family shape was validated")
    }
}

pub fn find_j_witness(a: &GroundSet, family: &SeqFamily, range: ElemRange) -> Result<Option<JWitness>> {
    if !same_semigroup(a.semigroup(), family.semigroup()) {
        return Err(Error::SemigroupMismatch);
    }
    let m = family.position_matrix();
    let found = find_cr_witness(a, &m, range)?.map(|w| JWitness { a: w.s, h: w.alpha });
    if let Some(w) = found {
        validate::check_j_witness(a, family.sequences(), w.a, w.h)?;
    }
    Ok(found)
}

/// Result of a universal check over all `r × n` matrices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Holds,
    /// The lexicographically least matrix without a witness, with its
    /// position in the enumeration.
    Fails { counterexample: Matrix, index: u64 },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Exhaustive checker for "every `r × n` matrix has a witness" on a finite
/// semigroup. The enumeration is lexicographic over row-major entries, so
/// matrix number `k` is `k` written in base `|S|` with the first entry most
/// significant. [`CrFullChecker::scan`] works on any contiguous block of that
/// order, which is how callers split the work across threads.
pub struct CrFullChecker<'a> {
    set: &'a GroundSet,
    targets: ShiftTargets<'a>,
    rows: usize,
    cols: usize,
    total: u64,
}

/// `|S|^{r·n}`, if it fits in a `u128`.
pub fn matrix_count(sg: &Semigroup, rows: usize, cols: usize) -> Option<u128> {
    let cells = u32::try_from(rows.checked_mul(cols)?).ok()?;
    (sg.size() as u128).checked_pow(cells)
}

impl<'a> CrFullChecker<'a> {
    pub fn new(set: &'a GroundSet, cols: usize, rows: usize, guard: u128) -> Result<Self> {
        let sg = set.semigroup();
        if !sg.is_total() {
            return Err(Error::Unsupported(
                "universal CR checks need a finite semigroup with total addition; windows only support witness search".into(),
            ));
        }
        if rows == 0 || cols == 0 {
            return Err(usage("n and r must be at least 1"));
        }
        check_rows(rows)?;
        let required = matrix_count(sg, rows, cols).unwrap_or(u128::MAX);
        if required > guard || required > u64::MAX as u128 {
            return Err(Error::CostGuard { required, limit: guard });
        }
        Ok(CrFullChecker {
            set,
            targets: ShiftTargets::new(set, ElemRange::all(sg)),
            rows,
            cols,
            total: required as u64,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    fn decode(&self, mut index: u64, out: &mut [Elem]) {
        let base = self.set.semigroup().size() as u64;
        for slot in out.iter_mut().rev() {
            *slot = Elem((index % base) as u32);
            index /= base;
        }
    }

    pub fn matrix_at(&self, index: u64) -> Matrix {
        let mut entries = alloc::vec![Elem(0); self.rows * self.cols];
        self.decode(index, &mut entries);
        Matrix::new(self.set.semigroup(), self.rows, self.cols, entries).expect("valid shape")
    }

    /// First index in `start..end` whose matrix has no witness. `stop(k)` is
    /// polled before each matrix `k`; returning true abandons the block.
    pub fn scan(&self, start: u64, end: u64, stop: &dyn Fn(u64) -> bool) -> Option<u64> {
        let sg = self.set.semigroup();
        let base = sg.size();
        let mut entries = alloc::vec![Elem(0); self.rows * self.cols];
        self.decode(start, &mut entries);
        let mut scratch = Vec::with_capacity(self.cols);
        let mut k = start;
        while k < end.min(self.total) {
            if stop(k) {
                return None;
            }
            if search_entries(&self.targets, sg, &entries, self.rows, self.cols, &mut scratch).is_none() {
                return Some(k);
            }
            // odometer increment, last entry fastest
            for slot in entries.iter_mut().rev() {
                slot.0 += 1;
                if slot.0 < base {
                    break;
                }
                slot.0 = 0;
            }
            k += 1;
        }
        None
    }

    pub fn verdict_from(&self, first_failure: Option<u64>) -> Verdict {
        match first_failure {
            None => Verdict::Holds,
            Some(index) => Verdict::Fails { counterexample: self.matrix_at(index), index },
        }
    }
}

/// Does every `r × n` matrix over `a`'s semigroup admit a witness?
pub fn check_cr_full(a: &GroundSet, n: usize, r: usize, guard: u128) -> Result<Verdict> {
    let checker = CrFullChecker::new(a, n, r, guard)?;
    let first = checker.scan(0, checker.total(), &|_| false);
    Ok(checker.verdict_from(first))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Degree {
    /// Least `r` at which the full check holds.
    Found(usize),
    NotFoundUpTo(usize),
}

/// Least `r ≤ r_max` with [`check_cr_full`] holding. Holding at `r` implies
/// holding at `r + 1` (ignore the extra rows), so the first hit is minimal.
pub fn cr_degree(a: &GroundSet, n: usize, r_max: usize, guard: u128) -> Result<Degree> {
    cr_degree_with(a, n, r_max, guard, check_cr_full)
}

/// [`cr_degree`] with a caller-supplied full checker (e.g. a parallel one).
pub fn cr_degree_with(
    a: &GroundSet,
    n: usize,
    r_max: usize,
    guard: u128,
    mut check: impl FnMut(&GroundSet, usize, usize, u128) -> Result<Verdict>,
) -> Result<Degree> {
    if r_max == 0 {
        return Err(usage("r_max must be at least 1"));
    }
    for r in 1..=r_max {
        if check(a, n, r, guard)?.holds() {
            return Ok(Degree::Found(r));
        }
    }
    Ok(Degree::NotFoundUpTo(r_max))
}

/// An arithmetic progression extracted from a CR witness on the matrix whose
/// rows are all `(1, 2, ..., n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ApWitness {
    pub witness: CrWitness,
    pub s: Elem,
    /// Common difference `|α|`.
    pub d: u64,
    /// `s + j·d` for `j = 1..=n`.
    pub terms: Vec<Elem>,
}

/// The generator matrix `M_ij = j` used for AP extraction. Needs a window or
/// the table of `Z_m`, where the integers `1..=n` have a meaning.
pub fn generator_matrix(sg: &Arc<Semigroup>, n: usize, r: usize) -> Result<Matrix> {
    let gens: Vec<Elem> = if let Some(w) = sg.as_window() {
        (1..=n as u64)
            .map(|j| sg.nat(j).ok_or_else(|| usage(format!("{j} is not in the window [{}, {}]", w.lo, w.hi))))
            .collect::<Result<_>>()?
    } else if let Some(t) = sg.as_table().filter(|t| t.is_cyclic()) {
        (1..=n as u64).map(|j| Elem((j % t.order() as u64) as u32)).collect()
    } else {
        return Err(usage("AP extraction needs a window of the naturals or the table of Z_m"));
    };
    Matrix::from_fn(sg, r, n, |_, j| gens[j])
}

pub fn extract_ap(a: &GroundSet, n: usize, r: usize, range: ElemRange) -> Result<Option<ApWitness>> {
    if n == 0 || r == 0 {
        return Err(usage("n and r must be at least 1"));
    }
    let m = generator_matrix(a.semigroup(), n, r)?;
    let Some(w) = find_cr_witness(a, &m, range)? else {
        return Ok(None);
    };
    let sg = a.semigroup();
    let terms = (0..n)
        .map(|j| {
            let col = m.row_sum_unchecked(w.alpha, j).expect("validated witness");
            sg.sum(w.s, col).expect("validated witness")
        })
        .collect::<Vec<_>>();
    debug_assert!(terms.iter().all(|&t| a.contains(t)));
    Ok(Some(ApWitness { witness: w, s: w.s, d: w.alpha.count_ones() as u64, terms }))
}

/// Moves a witness for `(M, A)` to one for `(M, t + A)`: same `α`, shift `t + s`.
pub fn translate_witness(w: CrWitness, t: Elem, m: &Matrix, a: &GroundSet) -> Result<CrWitness> {
    validate::check_cr_witness(a, m, w.alpha, w.s)?;
    let sg = a.semigroup();
    let s = sg
        .add(t, w.s)?
        .ok_or_else(|| Error::WindowOverflow(format!("{} + {} leaves the window", sg.value(t), sg.value(w.s))))?;
    let moved = CrWitness { alpha: w.alpha, s };
    let shifted = a.translate(t)?;
    validate::check_cr_witness(&shifted, m, moved.alpha, moved.s).map_err(|e| match e {
        Error::InvalidWitness(msg) => Error::WindowOverflow(msg),
        other => other,
    })?;
    Ok(moved)
}
