//! Transfer of CR witnesses from a set `A ⊆ S` to its AP-pair set
//! `C = {(a, b) : a, a+b, ..., a+L·b ∈ A} ⊆ S × S`.
//!
//! Given a pair matrix `M' = (M¹, M²)` over `S × S` and a free element `s`,
//! the lifted matrix is the concatenation of the blocks
//! `Mᵏ = M¹ + k·(s + M²)` for `k = 0..=L`. A witness `(α, a)` for the lifted
//! matrix and `A` puts `a + Σ_{i∈α} M¹_ij + k·(|α|·s + Σ_{i∈α} M²_ij)` in `A`
//! for every column `j` and every `k`, which is exactly the statement that
//! `(α, (a, |α|·s))` witnesses `M'` against `C`.
//!
//! `L` counts steps, so progressions have `L + 1` terms and the lifted matrix
//! has `L + 1` blocks.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{usage, Error, Result};
use crate::matrix::Matrix;
use crate::semigroup::{Elem, ElemRange, Semigroup};
use crate::set::{same_semigroup, GroundSet};
use crate::validate;
use crate::witness::{find_cr_witness, CrWitness};

/// An `r × n` matrix over `S × S`, held as its two coordinate matrices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairMatrix {
    first: Matrix,
    second: Matrix,
}

impl PairMatrix {
    pub fn new(first: Matrix, second: Matrix) -> Result<Self> {
        if !same_semigroup(first.semigroup(), second.semigroup()) {
            return Err(Error::SemigroupMismatch);
        }
        if (first.rows(), first.cols()) != (second.rows(), second.cols()) {
            return Err(usage("coordinate matrices differ in shape"));
        }
        Ok(PairMatrix { first, second })
    }

    /// Splits a matrix over a product `S × S` into its coordinates.
    pub fn from_product_matrix(m: &Matrix) -> Result<Self> {
        let sg = m.semigroup();
        let (l, r) = sg.factors().ok_or_else(|| usage("pair matrices live over S × S"))?;
        if l != r {
            return Err(usage("pair matrices need both factors equal"));
        }
        let base = Arc::new(l.clone());
        let (rows, cols) = (m.rows(), m.cols());
        let first = Matrix::from_fn(&base, rows, cols, |i, j| sg.split(m.get(i, j)).0)?;
        let second = Matrix::from_fn(&base, rows, cols, |i, j| sg.split(m.get(i, j)).1)?;
        Ok(PairMatrix { first, second })
    }

    /// Reassembles the matrix over `product`, which must be `S × S`.
    pub fn to_product_matrix(&self, product: &Arc<Semigroup>) -> Result<Matrix> {
        check_square(product, self.base())?;
        Matrix::from_fn(product, self.rows(), self.cols(), |i, j| {
            product.join(self.first.get(i, j), self.second.get(i, j))
        })
    }

    pub fn base(&self) -> &Arc<Semigroup> {
        self.first.semigroup()
    }

    pub fn first(&self) -> &Matrix {
        &self.first
    }

    pub fn second(&self) -> &Matrix {
        &self.second
    }

    pub fn rows(&self) -> usize {
        self.first.rows()
    }

    pub fn cols(&self) -> usize {
        self.first.cols()
    }
}

fn check_square(product: &Semigroup, base: &Semigroup) -> Result<()> {
    match product.factors() {
        Some((l, r)) if l == base && r == base => Ok(()),
        _ => Err(Error::SemigroupMismatch),
    }
}

/// `M¹ + k·(s + M²)` for `k = 0..=steps`, concatenated in ascending `k`.
pub fn build_lifted_matrix(mp: &PairMatrix, s: Elem, steps: usize) -> Result<Matrix> {
    if steps == 0 {
        return Err(usage("the number of progression steps L must be at least 1"));
    }
    let sg = mp.base();
    sg.check(s)?;
    let (rows, cols) = (mp.rows(), mp.cols());
    let mut blocks = Vec::with_capacity(steps + 1);
    blocks.push(mp.first.clone());
    for k in 1..=steps {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let entry = sg
                    .sum(s, mp.second.get(i, j))
                    .and_then(|inner| sg.times(k as u64, inner))
                    .and_then(|scaled| sg.sum(mp.first.get(i, j), scaled))
                    .ok_or_else(|| {
                        Error::WindowOverflow(format!("lifted entry (i={}, j={}, k={k}) is undefined", i + 1, j + 1))
                    })?;
                entries.push(entry);
            }
        }
        blocks.push(Matrix::new(sg, rows, cols, entries)?);
    }
    Matrix::concat_all(&blocks)
}

/// A rectangle `first × second` of `S × S`, both sides in canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PairBox {
    pub first: ElemRange,
    pub second: ElemRange,
}

impl PairBox {
    pub fn all(sg: &Semigroup) -> Self {
        PairBox { first: ElemRange::all(sg), second: ElemRange::all(sg) }
    }

    pub fn contains(&self, a: Elem, b: Elem) -> bool {
        (self.first.start..=self.first.end).contains(&a) && (self.second.start..=self.second.end).contains(&b)
    }
}

/// `{(a, b) ∈ box : a, a+b, ..., a+L·b ∈ A}` materialized over `S × S`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ApPairSet {
    pub steps: usize,
    pub bounds: PairBox,
    pub set: GroundSet,
}

impl ApPairSet {
    pub fn product(&self) -> &Arc<Semigroup> {
        self.set.semigroup()
    }

    pub fn contains(&self, a: Elem, b: Elem) -> bool {
        self.set.contains(self.product().join(a, b))
    }
}

/// Exact membership over the box by direct enumeration; pairs whose
/// progression leaves a window are not members.
pub fn ap_pair_set(a: &GroundSet, steps: usize, bounds: PairBox) -> Result<ApPairSet> {
    let product = Arc::new(a.semigroup().square()?);
    ap_pair_set_in(&product, a, steps, bounds)
}

/// [`ap_pair_set`] over an existing `S × S` handle.
pub fn ap_pair_set_in(product: &Arc<Semigroup>, a: &GroundSet, steps: usize, bounds: PairBox) -> Result<ApPairSet> {
    let sg = a.semigroup();
    check_square(product, sg)?;
    ElemRange::new(sg, bounds.first.start, bounds.first.end)?;
    ElemRange::new(sg, bounds.second.start, bounds.second.end)?;
    let mut set = GroundSet::empty(product);
    for x in bounds.first.iter().filter(|&x| a.contains(x)) {
        for d in bounds.second.iter() {
            if validate::is_ap_pair(a, steps, x, d) {
                set.insert(product.join(x, d))?;
            }
        }
    }
    Ok(ApPairSet { steps, bounds, set })
}

/// A witness over `S × S` for `(M', C)` together with what it certifies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairWitness {
    pub alpha: u64,
    /// `a`, the first coordinate of the shift.
    pub a: Elem,
    /// `|α|·s`, the second coordinate of the shift.
    pub scaled_s: Elem,
    /// For each column `j`: `(a + Σ_{i∈α} M¹_ij, |α|·s + Σ_{i∈α} M²_ij) ∈ C`.
    pub pairs: Vec<(Elem, Elem)>,
}

impl PairWitness {
    /// The witness as a product element shift.
    pub fn as_cr_witness(&self, product: &Semigroup) -> CrWitness {
        CrWitness { alpha: self.alpha, s: product.join(self.a, self.scaled_s) }
    }
}

/// Turns a witness `(α, a)` for the lifted matrix and `A` into
/// `(α, (a, |α|·s))` for `(M', C)`. The base witness is checked first and
/// the result is replayed against `A` term by term.
pub fn lift_witness(mp: &PairMatrix, s: Elem, steps: usize, a_set: &GroundSet, base: CrWitness) -> Result<PairWitness> {
    let sg = mp.base();
    if !same_semigroup(sg, a_set.semigroup()) {
        return Err(Error::SemigroupMismatch);
    }
    let lifted = build_lifted_matrix(mp, s, steps)?;
    if let Err(e) = validate::check_cr_witness(a_set, &lifted, base.alpha, base.s) {
        let n = mp.cols();
        // locate the first failing (j, k) for the caller
        let col = (0..lifted.cols()).find(|&c| {
            lifted
                .row_sum_unchecked(base.alpha, c)
                .and_then(|v| sg.sum(base.s, v))
                .is_none_or(|v| !a_set.contains(v))
        });
        return Err(match col {
            Some(c) => Error::InvalidWitness(format!("base witness fails at column j={}, block k={}", c % n + 1, c / n)),
            None => e,
        });
    }
    let count = base.alpha.count_ones() as u64;
    let scaled_s = sg
        .times(count, s)
        .ok_or_else(|| Error::WindowOverflow(format!("{count}·{} is undefined", sg.value(s))))?;
    let mut pairs = Vec::with_capacity(mp.cols());
    for j in 0..mp.cols() {
        let sum1 = mp.first.row_sum(base.alpha, j)?;
        let sum2 = mp.second.row_sum(base.alpha, j)?;
        let x = sum1.and_then(|v| sg.sum(base.s, v));
        let d = sum2.and_then(|v| sg.sum(scaled_s, v));
        let (Some(x), Some(d)) = (x, d) else {
            return Err(Error::WindowOverflow(format!("pair column {} is undefined", j + 1)));
        };
        if !validate::is_ap_pair(a_set, steps, x, d) {
            return Err(Error::InvalidWitness(format!(
                "column {}: ({}, {}) does not generate a progression in A",
                j + 1,
                sg.value(x),
                sg.value(d)
            )));
        }
        pairs.push((x, d));
    }
    Ok(PairWitness { alpha: base.alpha, a: base.s, scaled_s, pairs })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiftOutcome {
    pub s: Elem,
    pub lifted: Matrix,
    pub base: CrWitness,
    pub witness: PairWitness,
    /// Smallest box holding every certified pair; the witness was checked
    /// against the AP-pair set materialized over it.
    pub bounds: PairBox,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiftSearch {
    pub outcome: Option<LiftOutcome>,
    /// Values of `s` actually tried.
    pub tried: u64,
    /// The `s` at which the lifted matrix first left the window; the sweep
    /// stops there since larger `s` overflow as well.
    pub overflow_at: Option<Elem>,
}

/// One step of the sweep: lift at `s`, search a base witness, transfer it.
pub fn lift_at(a_set: &GroundSet, mp: &PairMatrix, steps: usize, s: Elem, base_range: ElemRange) -> Result<Option<LiftOutcome>> {
    let lifted = build_lifted_matrix(mp, s, steps)?;
    let Some(base) = find_cr_witness(a_set, &lifted, base_range)? else {
        return Ok(None);
    };
    let witness = lift_witness(mp, s, steps, a_set, base)?;
    let sg = a_set.semigroup();
    let (mut lo1, mut hi1, mut lo2, mut hi2) = (Elem(u32::MAX), Elem(0), Elem(u32::MAX), Elem(0));
    for &(x, d) in &witness.pairs {
        lo1 = lo1.min(x);
        hi1 = hi1.max(x);
        lo2 = lo2.min(d);
        hi2 = hi2.max(d);
    }
    let bounds = PairBox { first: ElemRange::new(sg, lo1, hi1)?, second: ElemRange::new(sg, lo2, hi2)? };
    let c = ap_pair_set(a_set, steps, bounds)?;
    if let Some(&(x, d)) = witness.pairs.iter().find(|&&(x, d)| !c.contains(x, d)) {
        return Err(Error::InvalidWitness(format!(
            "({}, {}) is missing from the AP-pair set",
            sg.value(x),
            sg.value(d)
        )));
    }
    Ok(Some(LiftOutcome { s, lifted, base, witness, bounds }))
}

/// Sweeps `s` in canonical order over `s_range` and returns the first `s`
/// for which the lifted matrix has a base witness (searched over
/// `base_range`), lifted and validated.
pub fn lift_end_to_end(a_set: &GroundSet, mp: &PairMatrix, steps: usize, s_range: ElemRange, base_range: ElemRange) -> Result<LiftSearch> {
    let mut tried = 0;
    for s in s_range.iter() {
        match lift_at(a_set, mp, steps, s, base_range) {
            Ok(Some(outcome)) => return Ok(LiftSearch { outcome: Some(outcome), tried: tried + 1, overflow_at: None }),
            Ok(None) => tried += 1,
            Err(Error::WindowOverflow(_)) if !a_set.semigroup().is_total() => {
                return Ok(LiftSearch { outcome: None, tried, overflow_at: Some(s) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(LiftSearch { outcome: None, tried, overflow_at: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn z(m: u32) -> Arc<Semigroup> {
        Arc::new(Semigroup::cyclic(m))
    }

    fn mat(sg: &Arc<Semigroup>, rows: &[&[u32]]) -> Matrix {
        let rows: Vec<Vec<Elem>> = rows.iter().map(|r| r.iter().map(|&x| Elem(x)).collect()).collect();
        Matrix::from_rows(sg, &rows).unwrap()
    }

    fn z9_pair() -> PairMatrix {
        let z9 = z(9);
        PairMatrix::new(mat(&z9, &[&[1, 2], &[2, 4]]), mat(&z9, &[&[1, 1], &[2, 1]])).unwrap()
    }

    #[test]
    fn lifted_matrix_z9() {
        let mp = z9_pair();
        let lifted = build_lifted_matrix(&mp, Elem(1), 1).unwrap();
        // oracle: scalar recomputation (M¹ + k(s + M²)) mod 9
        let m1 = [[1u32, 2], [2, 4]];
        let m2 = [[1u32, 1], [2, 1]];
        let expected: Vec<Vec<u32>> = (0..2)
            .map(|i| (0..=1).flat_map(|k| (0..2).map(move |j| (m1[i][j] + k * (1 + m2[i][j])) % 9)).collect())
            .collect();
        assert_eq!(expected, [vec![1, 2, 3, 4], vec![2, 4, 5, 6]]);
        assert_eq!(lifted, mat(&z(9), &[&[1, 2, 3, 4], &[2, 4, 5, 6]]));
    }

    #[test]
    fn shape_and_zero_block() {
        let mp = z9_pair();
        for steps in 1..4 {
            for s in 0..9 {
                let lifted = build_lifted_matrix(&mp, Elem(s), steps).unwrap();
                assert_eq!(lifted.cols(), (steps + 1) * mp.cols());
                for i in 0..2 {
                    assert_eq!(&lifted.row(i)[..2], mp.first().row(i));
                }
            }
        }
        assert!(matches!(build_lifted_matrix(&mp, Elem(0), 0), Err(Error::Usage(_))));
    }

    /// Column sums of M² agree mod 3 over both rows, so α = {1, 2} works.
    fn z9_liftable() -> PairMatrix {
        let z9 = z(9);
        PairMatrix::new(mat(&z9, &[&[1, 2], &[2, 4]]), mat(&z9, &[&[1, 1], &[2, 2]])).unwrap()
    }

    #[test]
    fn z9_base_search_can_fail() {
        // with M² = [[1,1],[2,1]] no α equalizes the lifted columns mod 3
        let z9 = z(9);
        let a = GroundSet::from_elems(&z9, [Elem(0), Elem(3), Elem(6)]).unwrap();
        for s in z9.elements() {
            let lifted = build_lifted_matrix(&z9_pair(), s, 1).unwrap();
            assert_eq!(find_cr_witness(&a, &lifted, ElemRange::all(&z9)).unwrap(), None);
        }
    }

    #[test]
    fn z9_lift_validates() {
        let z9 = z(9);
        let a = GroundSet::from_elems(&z9, [Elem(0), Elem(3), Elem(6)]).unwrap();
        let mp = z9_liftable();
        let lifted = build_lifted_matrix(&mp, Elem(0), 1).unwrap();
        let base = find_cr_witness(&a, &lifted, ElemRange::all(&z9)).unwrap().unwrap();
        assert_eq!(base, CrWitness { alpha: 0b11, s: Elem(0) });
        let w = lift_witness(&mp, Elem(0), 1, &a, base).unwrap();
        for &(x, d) in &w.pairs {
            assert!(a.contains(x) && a.contains(z9.sum(x, d).unwrap()));
        }
        assert_eq!(w.scaled_s, z9.times(base.alpha.count_ones() as u64, Elem(0)).unwrap());
    }

    #[test]
    fn single_row_alpha_keeps_s() {
        let z5 = z(5);
        let mp = PairMatrix::new(mat(&z5, &[&[1]]), mat(&z5, &[&[2]])).unwrap();
        let all = GroundSet::universe(&z5);
        let base = CrWitness { alpha: 1, s: Elem(0) };
        let w = lift_witness(&mp, Elem(3), 2, &all, base).unwrap();
        assert_eq!(w.scaled_s, Elem(3));
    }

    #[test]
    fn invalid_base_is_located() {
        let z9 = z(9);
        let a = GroundSet::from_elems(&z9, [Elem(0), Elem(3), Elem(6)]).unwrap();
        let err = lift_witness(&z9_pair(), Elem(1), 1, &a, CrWitness { alpha: 1, s: Elem(0) }).unwrap_err();
        assert_eq!(err, Error::InvalidWitness("base witness fails at column j=1, block k=0".into()));
    }

    #[test]
    fn ap_pairs_on_window() {
        let w = Arc::new(Semigroup::nat_window(1, 20).unwrap());
        let a = GroundSet::from_predicate(&w, |e| (e.0 + 1) % 3 == 0);
        let c = ap_pair_set(&a, 2, PairBox::all(&w)).unwrap();
        let n = |v| w.nat(v).unwrap();
        assert!(c.contains(n(3), n(3)));
        assert!(!c.contains(n(3), n(2)));
        // oracle: direct scan
        let count = (1..=20u64)
            .flat_map(|x| (1..=20u64).map(move |d| (x, d)))
            .filter(|&(x, d)| (0..=2).all(|i| x + i * d <= 20 && (x + i * d) % 3 == 0))
            .count();
        assert_eq!(c.set.len(), count);
    }

    #[test]
    fn ap_pairs_two_terms_and_empty() {
        let z6 = z(6);
        let a = GroundSet::from_elems(&z6, [Elem(1), Elem(4)]).unwrap();
        let c = ap_pair_set(&a, 1, PairBox::all(&z6)).unwrap();
        for x in z6.elements() {
            for d in z6.elements() {
                assert_eq!(c.contains(x, d), a.contains(x) && a.contains(z6.sum(x, d).unwrap()));
            }
        }
        assert!(ap_pair_set(&GroundSet::empty(&z6), 2, PairBox::all(&z6)).unwrap().set.is_empty());
    }

    #[test]
    fn end_to_end() {
        let z9 = z(9);
        let a = GroundSet::from_elems(&z9, [Elem(0), Elem(3), Elem(6)]).unwrap();
        let all = ElemRange::all(&z9);
        let got = lift_end_to_end(&a, &z9_liftable(), 2, all, all).unwrap();
        let out = got.outcome.unwrap();
        assert_eq!(out.lifted.cols(), 6);
        for &(x, d) in &out.witness.pairs {
            assert!(crate::validate::is_ap_pair(&a, 2, x, d));
        }
        let none = lift_end_to_end(&a, &z9_pair(), 2, all, all).unwrap();
        assert_eq!((none.outcome, none.tried), (None, 9));

        let full = lift_end_to_end(&GroundSet::universe(&z9), &z9_pair(), 2, all, all).unwrap();
        assert_eq!((full.outcome.unwrap().s, full.tried), (Elem(0), 1));
        let none = lift_end_to_end(&GroundSet::empty(&z9), &z9_pair(), 2, all, all).unwrap();
        assert_eq!((none.outcome, none.tried), (None, 9));
    }

    #[test]
    fn window_overflow_stops_sweep() {
        let w = Arc::new(Semigroup::nat_window(1, 30).unwrap());
        let n = |v| w.nat(v).unwrap();
        let mp = PairMatrix::new(
            Matrix::from_rows(&w, &[vec![n(1)]]).unwrap(),
            Matrix::from_rows(&w, &[vec![n(2)]]).unwrap(),
        )
        .unwrap();
        assert!(build_lifted_matrix(&mp, n(27), 1).is_ok());
        assert!(matches!(build_lifted_matrix(&mp, n(28), 1), Err(Error::WindowOverflow(_))));
        let evens = GroundSet::empty(&w);
        let got = lift_end_to_end(&evens, &mp, 1, ElemRange::all(&w), ElemRange::all(&w)).unwrap();
        // 1 + (s + 2) <= 30 holds up to s = 27
        assert_eq!(got.overflow_at, Some(n(28)));
    }

    #[test]
    fn decomposition_round_trip() {
        let z4 = z(4);
        let p = Arc::new(z4.square().unwrap());
        let m = Matrix::from_fn(&p, 2, 3, |i, j| Elem(((i * 7 + j * 5) % 16) as u32)).unwrap();
        let mp = PairMatrix::from_product_matrix(&m).unwrap();
        assert_eq!(mp.to_product_matrix(&p).unwrap(), m);
    }
}
