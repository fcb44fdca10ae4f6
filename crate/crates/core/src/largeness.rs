//! Syndetic, thick and piecewise syndetic witnesses.
//!
//! On a total semigroup the shifts and the cover target are the whole
//! universe and every negative answer is exact. On a window `[lo, hi]` no
//! shift can cover the right edge, so a [`Scope`] fixes the shifts to
//! `[lo, limit]` and the target to the elements every such shift can reach,
//! `[lo, hi − limit]`. The part of the window outside the target is
//! reported as the uncovered tail.

use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{usage, Result};
use crate::semigroup::{Elem, Semigroup, Shape};
use crate::set::GroundSet;
use crate::validate;

/// Which shifts may be used and which elements must be covered.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scope {
    pub shifts: Vec<Elem>,
    pub target: BitSet,
}

impl Scope {
    /// Whole universe for total semigroups; on windows the shifts run up to
    /// the midpoint `lo + (hi − lo) / 2` (componentwise for products).
    pub fn default_for(sg: &Semigroup) -> Self {
        let shifts: Vec<Elem> = sg.elements().filter(|&e| in_lower_half(sg, e)).collect();
        Scope::with_shifts(sg, shifts)
    }

    /// Shifts of a window limited to values `<= limit`.
    pub fn window_limit(sg: &Semigroup, limit: u64) -> Result<Self> {
        let w = sg.as_window().ok_or_else(|| usage("a shift limit needs a window"))?;
        if limit < w.lo || limit > w.hi {
            return Err(usage("shift limit outside the window"));
        }
        let shifts = (w.lo..=limit).map(|v| sg.nat(v).expect("in window")).collect();
        Ok(Scope::with_shifts(sg, shifts))
    }

    /// Target = elements `y` with `t + y` defined for every allowed shift `t`.
    pub fn with_shifts(sg: &Semigroup, shifts: Vec<Elem>) -> Self {
        let mut target = BitSet::new(sg.size() as usize);
        for y in sg.elements() {
            if shifts.iter().all(|&t| sg.sum(t, y).is_some()) {
                target.insert(y.idx());
            }
        }
        Scope { shifts, target }
    }

    pub fn is_whole(&self, sg: &Semigroup) -> bool {
        self.target.is_full() && self.shifts.len() == sg.size() as usize
    }
}

fn in_lower_half(sg: &Semigroup, e: Elem) -> bool {
    match sg.shape() {
        Shape::Table(_) => true,
        Shape::Window(w) => (e.0 as u64) <= (w.hi - w.lo) / 2,
        Shape::Product(l, r) => {
            let (a, b) = sg.split(e);
            in_lower_half(l, a) && in_lower_half(r, b)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SyndeticWitness {
    pub shifts: Vec<Elem>,
    /// `⋃_{t∈F} −t + A` over the whole universe.
    pub covered: BitSet,
    /// Universe elements outside the target that the shifts miss.
    pub uncovered_tail: Vec<Elem>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThickWitness {
    pub probe: Vec<Elem>,
    pub x: Elem,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PwsWitness {
    pub shifts: Vec<Elem>,
    pub inner: ThickWitness,
}

struct Cover<'a> {
    target: &'a BitSet,
    pre: Vec<BitSet>,
    /// For each target element, the largest shift index whose preimage holds it.
    last_hit: Vec<Option<usize>>,
}

impl Cover<'_> {
    fn first_uncovered(&self, covered: &BitSet) -> Option<usize> {
        self.target.iter().find(|&y| !covered.contains(y))
    }

    /// Lexicographically first `k`-subset (by shift index) covering the target.
    fn exact(&self, k: usize) -> Option<Vec<usize>> {
        let mut chosen = Vec::with_capacity(k);
        let covered = BitSet::new(self.target.len());
        self.dfs(0, k, &covered, &mut chosen).then_some(chosen)
    }

    fn dfs(&self, start: usize, left: usize, covered: &BitSet, chosen: &mut Vec<usize>) -> bool {
        let Some(y) = self.first_uncovered(covered) else {
            return true;
        };
        if left == 0 {
            return false;
        }
        let Some(last) = self.last_hit[y] else {
            return false;
        };
        for i in start..self.pre.len() {
            // y must still be coverable by index i or later
            if i > last {
                return false;
            }
            let mut next = covered.clone();
            next.union_with(&self.pre[i]);
            chosen.push(i);
            if self.dfs(i + 1, left - 1, &next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// Greedy set cover, ties to the smallest shift; `None` if the shifts
    /// cannot cover the target at all.
    fn greedy_size(&self) -> Option<usize> {
        let mut covered = BitSet::new(self.target.len());
        let mut used = 0;
        while self.first_uncovered(&covered).is_some() {
            let gain = |p: &BitSet| p.iter().filter(|&y| self.target.contains(y) && !covered.contains(y)).count();
            let (best, g) = self
                .pre
                .iter()
                .enumerate()
                .map(|(i, p)| (i, gain(p)))
                .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if g == 0 {
                return None;
            }
            covered.union_with(&self.pre[best]);
            used += 1;
        }
        Some(used)
    }
}

/// Minimum-cardinality shift set `F` (at most `max_card`) with
/// `⋃_{t∈F} −t + A` covering the scope's target; among sets of that size the
/// lexicographically first is returned. `None` is exact on total semigroups
/// and window-relative otherwise.
pub fn find_syndetic_witness(a: &GroundSet, max_card: usize, scope: &Scope) -> Result<Option<SyndeticWitness>> {
    if max_card == 0 {
        return Err(usage("max_card must be at least 1"));
    }
    let sg = a.semigroup();
    if a.is_empty() || scope.shifts.is_empty() {
        return Ok(None);
    }
    let pre: Vec<BitSet> = scope.shifts.iter().map(|&t| a.preimage_unchecked(t).bits().clone()).collect();
    let mut last_hit = alloc::vec![None; sg.size() as usize];
    for (i, p) in pre.iter().enumerate() {
        for y in p.iter() {
            last_hit[y] = Some(i);
        }
    }
    let cover = Cover { target: &scope.target, pre, last_hit };
    let Some(greedy) = cover.greedy_size() else {
        return Ok(None);
    };
    for k in 1..=greedy.min(max_card) {
        if let Some(idx) = cover.exact(k) {
            let shifts: Vec<Elem> = idx.iter().map(|&i| scope.shifts[i]).collect();
            let mut covered = BitSet::new(sg.size() as usize);
            for &i in &idx {
                covered.union_with(&cover.pre[i]);
            }
            let uncovered_tail = sg
                .elements()
                .filter(|e| !scope.target.contains(e.idx()) && !covered.contains(e.idx()))
                .collect();
            let target = scope.target.iter().map(|i| Elem(i as u32));
            validate::check_cover(a, &shifts, target)?;
            return Ok(Some(SyndeticWitness { shifts, covered, uncovered_tail }));
        }
    }
    Ok(None)
}

fn check_probe(sg: &Semigroup, probe: &[Elem]) -> Result<()> {
    if probe.is_empty() {
        return Err(usage("the probe set E must be non-empty"));
    }
    probe.iter().try_for_each(|&e| sg.check(e))
}

/// First `x ∈ set` (in canonical order) such that `probe + x ⊆ bits`.
fn first_translate_inside(sg: &Semigroup, bits: &BitSet, probe: &[Elem]) -> Option<Elem> {
    sg.elements()
        .find(|&x| probe.iter().all(|&e| sg.sum(e, x).is_some_and(|v| bits.contains(v.idx()))))
}

/// First `x` in canonical order with `probe + x ⊆ A`.
pub fn find_thick_witness(a: &GroundSet, probe: &[Elem]) -> Result<Option<ThickWitness>> {
    let sg = a.semigroup();
    check_probe(sg, probe)?;
    let found = first_translate_inside(sg, a.bits(), probe);
    if let Some(x) = found {
        validate::check_thick(a, probe, x)?;
    }
    Ok(found.map(|x| ThickWitness { probe: probe.to_vec(), x }))
}

/// `F` with `|F| <= max_card` and `x` with `probe + x ⊆ ⋃_{t∈F} −t + A`,
/// searching `|F|` ascending, then `F` lexicographically, then `x`.
pub fn find_pws_witness(a: &GroundSet, max_card: usize, probe: &[Elem], scope: &Scope) -> Result<Option<PwsWitness>> {
    let sg = a.semigroup();
    check_probe(sg, probe)?;
    if max_card == 0 {
        return Err(usage("max_card must be at least 1"));
    }
    if a.is_empty() {
        return Ok(None);
    }
    let pre: Vec<BitSet> = scope.shifts.iter().map(|&t| a.preimage_unchecked(t).bits().clone()).collect();
    for k in 1..=max_card.min(pre.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mut union = pre[idx[0]].clone();
            for &i in &idx[1..] {
                union.union_with(&pre[i]);
            }
            if let Some(x) = first_translate_inside(sg, &union, probe) {
                let shifts: Vec<Elem> = idx.iter().map(|&i| scope.shifts[i]).collect();
                validate::check_pws(a, &shifts, probe, x)?;
                return Ok(Some(PwsWitness { shifts, inner: ThickWitness { probe: probe.to_vec(), x } }));
            }
            if !next_combination(&mut idx, pre.len()) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}
