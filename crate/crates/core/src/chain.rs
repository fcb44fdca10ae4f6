//! Finite chain certificates for essential CR-sets.
//!
//! A certificate is a decreasing list `C₁ ⊇ C₂ ⊇ … ⊇ C_N` of subsets of `A`,
//! a shift map assigning to each recorded `(n, x)` with `x ∈ C_n` a level
//! `m` with `C_m ⊆ −x + C_n`, and parameters for CR evidence on each level.
//! Levels are numbered from 1. Only these `N` levels are checked; the report
//! says so through its `horizon`.
//!
//! On windows the inclusion `C_m ⊆ −x + C_n` is only checked at `y` where
//! `x + y` is defined, and the report is flagged window-relative.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{usage, Error, Result};
use crate::lift::{ap_pair_set_in, PairBox};
use crate::matrix::Matrix;
use crate::semigroup::{Elem, ElemRange, Semigroup};
use crate::set::{same_semigroup, GroundSet};
use crate::validate::is_ap_pair;
use crate::witness::{check_cr_full, find_cr_witness, DEFAULT_COST_GUARD};

/// How CR-ness of each level is evidenced.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrParams {
    pub n: usize,
    pub r: usize,
    /// Shift range for panel witnesses; whole universe when `None`.
    pub s_range: Option<ElemRange>,
    /// Matrices each level must have a witness for.
    pub panel: Vec<Matrix>,
    /// Run the exhaustive `r × n` check (finite semigroups only).
    pub full: bool,
    pub guard: u128,
}

impl Default for CrParams {
    fn default() -> Self {
        CrParams { n: 1, r: 1, s_range: None, panel: Vec::new(), full: false, guard: DEFAULT_COST_GUARD }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainCertificate {
    pub sets: Vec<GroundSet>,
    /// `(n, x) ↦ m`, claiming `C_m ⊆ −x + C_n`.
    pub shift_map: BTreeMap<(usize, Elem), usize>,
    pub cr: CrParams,
}

impl ChainCertificate {
    pub fn new(sets: Vec<GroundSet>, shift_map: BTreeMap<(usize, Elem), usize>, cr: CrParams) -> Result<Self> {
        let first = sets.first().ok_or_else(|| usage("a chain needs at least one level"))?;
        for s in &sets[1..] {
            first.ensure_same(s)?;
        }
        for (&(n, x), &m) in &shift_map {
            if n == 0 || n > sets.len() || m == 0 || m > sets.len() {
                return Err(usage(format!("shift entry (n={n}, m={m}) names a level outside 1..={}", sets.len())));
            }
            first.semigroup().check(x)?;
        }
        for p in &cr.panel {
            if !same_semigroup(p.semigroup(), first.semigroup()) {
                return Err(Error::SemigroupMismatch);
            }
        }
        Ok(ChainCertificate { sets, shift_map, cr })
    }

    pub fn semigroup(&self) -> &Arc<Semigroup> {
        self.sets[0].semigroup()
    }

    pub fn level(&self, n: usize) -> &GroundSet {
        &self.sets[n - 1]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Fills every missing `(n, x)` with the least `m` satisfying the
    /// inclusion, if any. Returns the entries that stayed missing.
    pub fn search_shifts(&mut self) -> Vec<(usize, Elem)> {
        let mut unresolved = Vec::new();
        for n in 1..=self.len() {
            let members: Vec<Elem> = self.level(n).members().collect();
            for x in members {
                if self.shift_map.contains_key(&(n, x)) {
                    continue;
                }
                match (1..=self.len()).find(|&m| first_shift_gap(self.level(m), x, self.level(n)).is_none()) {
                    Some(m) => {
                        self.shift_map.insert((n, x), m);
                    }
                    None => unresolved.push((n, x)),
                }
            }
        }
        unresolved
    }
}

/// First `y ∈ inner` with `x + y` defined but outside `outer`.
fn first_shift_gap(inner: &GroundSet, x: Elem, outer: &GroundSet) -> Option<Elem> {
    let sg = inner.semigroup();
    inner.members().find(|&y| sg.sum(x, y).is_some_and(|z| !outer.contains(z)))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShiftFailure {
    pub n: usize,
    pub x: Elem,
    pub m: usize,
    /// Element of `C_m` that `x` moves outside `C_n`.
    pub y: Elem,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CrEvidence {
    /// Exhaustive check over all `r × n` matrices.
    Exact { holds: bool },
    /// Witness search against the panel; lists panel indices without a witness.
    Sampled { matrices: usize, failures: Vec<usize> },
    Unchecked,
}

impl CrEvidence {
    pub fn passed(&self) -> bool {
        match self {
            CrEvidence::Exact { holds } => *holds,
            CrEvidence::Sampled { failures, .. } => failures.is_empty(),
            CrEvidence::Unchecked => false,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainReport {
    /// Number of levels checked; nothing is claimed beyond it.
    pub horizon: usize,
    pub window_relative: bool,
    /// `(level, element)` of level members outside `A`.
    pub outside_base: Vec<(usize, Elem)>,
    /// Levels `i >= 2` with `C_i ⊄ C_{i−1}`.
    pub decrease_violations: Vec<usize>,
    pub shift_checked: usize,
    pub shift_failures: Vec<ShiftFailure>,
    pub shift_missing: Vec<(usize, Elem)>,
    pub cr: Vec<CrEvidence>,
}

impl ChainReport {
    pub fn containment_ok(&self) -> bool {
        self.outside_base.is_empty() && self.decrease_violations.is_empty()
    }

    pub fn shift_ok(&self) -> bool {
        self.shift_failures.is_empty() && self.shift_missing.is_empty()
    }

    pub fn cr_ok(&self) -> bool {
        self.cr.iter().all(CrEvidence::passed)
    }

    pub fn passed(&self) -> bool {
        self.containment_ok() && self.shift_ok() && self.cr_ok()
    }
}

/// Containment and decrease, then the shift conditions, then CR evidence.
pub fn validate_chain(cert: &ChainCertificate, base: &GroundSet) -> Result<ChainReport> {
    let (containment, decrease) = check_structure(cert, base)?;
    let (checked, failures, missing) = check_shifts(cert);
    let cr = cert.sets.iter().map(|c| cr_evidence(c, &cert.cr)).collect::<Result<Vec<_>>>()?;
    Ok(ChainReport {
        horizon: cert.len(),
        window_relative: !cert.semigroup().is_total(),
        outside_base: containment,
        decrease_violations: decrease,
        shift_checked: checked,
        shift_failures: failures,
        shift_missing: missing,
        cr,
    })
}

/// Validation without CR evidence (every level reported `Unchecked`).
pub fn validate_chain_structure(cert: &ChainCertificate, base: &GroundSet) -> Result<ChainReport> {
    let (containment, decrease) = check_structure(cert, base)?;
    let (checked, failures, missing) = check_shifts(cert);
    Ok(ChainReport {
        horizon: cert.len(),
        window_relative: !cert.semigroup().is_total(),
        outside_base: containment,
        decrease_violations: decrease,
        shift_checked: checked,
        shift_failures: failures,
        shift_missing: missing,
        cr: alloc::vec![CrEvidence::Unchecked; cert.len()],
    })
}

/// Members outside the base, and levels that do not shrink.
type Structure = (Vec<(usize, Elem)>, Vec<usize>);

fn check_structure(cert: &ChainCertificate, base: &GroundSet) -> Result<Structure> {
    cert.sets[0].ensure_same(base)?;
    let mut outside = Vec::new();
    for (i, c) in cert.sets.iter().enumerate() {
        if let Some(x) = c.members().find(|&x| !base.contains(x)) {
            outside.push((i + 1, x));
        }
    }
    let decrease = (1..cert.len())
        .filter(|&i| !cert.sets[i].bits().is_subset(cert.sets[i - 1].bits()))
        .map(|i| i + 1)
        .collect();
    Ok((outside, decrease))
}

fn check_shifts(cert: &ChainCertificate) -> (usize, Vec<ShiftFailure>, Vec<(usize, Elem)>) {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut missing = Vec::new();
    for n in 1..=cert.len() {
        for x in cert.level(n).members() {
            let Some(&m) = cert.shift_map.get(&(n, x)) else {
                missing.push((n, x));
                continue;
            };
            checked += 1;
            if let Some(y) = first_shift_gap(cert.level(m), x, cert.level(n)) {
                failures.push(ShiftFailure { n, x, m, y });
            }
        }
    }
    (checked, failures, missing)
}

/// CR evidence for one level according to `params`.
pub fn cr_evidence(c: &GroundSet, params: &CrParams) -> Result<CrEvidence> {
    let sg = c.semigroup();
    if params.full && sg.is_total() {
        let holds = check_cr_full(c, params.n, params.r, params.guard)?.holds();
        return Ok(CrEvidence::Exact { holds });
    }
    if params.panel.is_empty() {
        return Ok(CrEvidence::Unchecked);
    }
    let range = params.s_range.unwrap_or_else(|| ElemRange::all(sg));
    let mut failures = Vec::new();
    for (i, m) in params.panel.iter().enumerate() {
        if find_cr_witness(c, m, range)?.is_none() {
            failures.push(i);
        }
    }
    Ok(CrEvidence::Sampled { matrices: params.panel.len(), failures })
}

/// One B-side shift verification: `B_N ⊆ −(a, b) + B_n` with
/// `N = max_i m(n, a + i·b)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiftedShift {
    pub n: usize,
    pub pair: Elem,
    /// `m(n, a + i·b)` for `i = 0..=L`.
    pub parts: Vec<usize>,
    pub level: usize,
    pub holds: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiftedChain {
    /// Certificate over `S × S` with sets `B_i` and the computed shift map.
    pub cert: ChainCertificate,
    pub steps: usize,
    pub bounds: PairBox,
    pub checks: Vec<LiftedShift>,
    /// `(n, (a, b), x)`: the A-side map has no entry for `(n, x)`, `x = a + i·b`.
    pub gaps: Vec<(usize, Elem, Elem)>,
}

impl LiftedChain {
    pub fn verified(&self) -> bool {
        self.gaps.is_empty() && self.checks.iter().all(|c| c.holds)
    }
}

/// Lifts a chain for `A` to one for the AP-pair sets `B_i` of its levels.
///
/// For `(a, b) ∈ B_n` the level `N` is the largest of the A-side levels
/// recorded for the progression terms `a + i·b`; the inclusion
/// `B_N ⊆ −(a, b) + B_n` is then verified pair by pair over the box. On
/// windows a pair of `B_N` is only tested when the translated progression
/// stays inside the window.
pub fn lift_chain(cert: &ChainCertificate, steps: usize, bounds: PairBox) -> Result<LiftedChain> {
    if steps == 0 {
        return Err(usage("the number of progression steps L must be at least 1"));
    }
    let sg = cert.semigroup().clone();
    let product = Arc::new(sg.square()?);
    let b_sets = cert
        .sets
        .iter()
        .map(|c| ap_pair_set_in(&product, c, steps, bounds).map(|ap| ap.set))
        .collect::<Result<Vec<_>>>()?;
    let mut shift_map = BTreeMap::new();
    let mut checks = Vec::new();
    let mut gaps = Vec::new();
    for n in 1..=cert.len() {
        for pair in b_sets[n - 1].members() {
            let (a, b) = product.split(pair);
            let mut parts = Vec::with_capacity(steps + 1);
            let mut term = Some(a);
            for _ in 0..=steps {
                let x = term.expect("members of B_n have defined progressions");
                match cert.shift_map.get(&(n, x)) {
                    Some(&m) => parts.push(m),
                    None => gaps.push((n, pair, x)),
                }
                term = sg.sum(x, b);
            }
            if parts.len() != steps + 1 {
                continue;
            }
            let level = *parts.iter().max().expect("steps + 1 >= 2 parts");
            let holds = b_sets[level - 1].members().all(|q| {
                let (a1, b1) = product.split(q);
                match (sg.sum(a, a1), sg.sum(b, b1)) {
                    (Some(a2), Some(b2)) => {
                        let in_window = progression_defined(&sg, a2, b2, steps);
                        !in_window || b_sets[n - 1].contains(product.join(a2, b2))
                    }
                    _ => !sg.is_total(),
                }
            });
            shift_map.insert((n, pair), level);
            checks.push(LiftedShift { n, pair, parts, level, holds });
        }
    }
    let lifted = ChainCertificate::new(
        b_sets,
        shift_map,
        CrParams { panel: Vec::new(), s_range: None, ..cert.cr.clone() },
    )?;
    Ok(LiftedChain { cert: lifted, steps, bounds, checks, gaps })
}

fn progression_defined(sg: &Semigroup, a: Elem, b: Elem, steps: usize) -> bool {
    let mut term = a;
    for _ in 0..steps {
        match sg.sum(term, b) {
            Some(t) => term = t,
            None => return false,
        }
    }
    true
}

/// Direct AP-pair membership, for callers that want the base relation.
pub fn in_ap_pair_set(c: &GroundSet, steps: usize, a: Elem, b: Elem) -> bool {
    is_ap_pair(c, steps, a, b)
}
