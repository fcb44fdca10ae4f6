//! Subsets of a semigroup's universe and the translation operators on them.

use alloc::sync::Arc;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::semigroup::{Elem, Semigroup};

/// Two handles denote the same semigroup.
pub fn same_semigroup(a: &Arc<Semigroup>, b: &Arc<Semigroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A subset `A` of a semigroup's universe, stored densely.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroundSet {
    sg: Arc<Semigroup>,
    bits: BitSet,
}

impl GroundSet {
    pub fn empty(sg: &Arc<Semigroup>) -> Self {
        GroundSet { sg: sg.clone(), bits: BitSet::new(sg.size() as usize) }
    }

    pub fn universe(sg: &Arc<Semigroup>) -> Self {
        GroundSet { sg: sg.clone(), bits: BitSet::full(sg.size() as usize) }
    }

    pub fn from_elems(sg: &Arc<Semigroup>, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let mut set = GroundSet::empty(sg);
        for e in elems {
            sg.check(e)?;
            set.bits.insert(e.idx());
        }
        Ok(set)
    }

    pub fn from_predicate(sg: &Arc<Semigroup>, mut pred: impl FnMut(Elem) -> bool) -> Self {
        let mut set = GroundSet::empty(sg);
        for e in sg.elements() {
            if pred(e) {
                set.bits.insert(e.idx());
            }
        }
        set
    }

    pub fn from_bits(sg: &Arc<Semigroup>, bits: BitSet) -> Result<Self> {
        if bits.len() != sg.size() as usize {
            return Err(Error::Usage("bit vector length differs from the universe size".into()));
        }
        Ok(GroundSet { sg: sg.clone(), bits })
    }

    /// `{(a, b) : a ∈ left, b ∈ right}` inside `product`, whose factors must
    /// be the owning semigroups of `left` and `right`.
    pub fn box_product(product: &Arc<Semigroup>, left: &GroundSet, right: &GroundSet) -> Result<Self> {
        let (l, r) = product
            .factors()
            .ok_or_else(|| Error::Usage("box_product needs a product semigroup".into()))?;
        if *l != *left.sg || *r != *right.sg {
            return Err(Error::SemigroupMismatch);
        }
        let mut set = GroundSet::empty(product);
        for a in left.members() {
            for b in right.members() {
                set.bits.insert(product.join(a, b).idx());
            }
        }
        Ok(set)
    }

    pub fn semigroup(&self) -> &Arc<Semigroup> {
        &self.sg
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    /// Total over codes: anything outside the universe is simply not a member.
    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        self.bits.contains(x.idx())
    }

    pub fn members(&self) -> impl Iterator<Item = Elem> + '_ {
        self.bits.iter().map(|i| Elem(i as u32))
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_universe(&self) -> bool {
        self.bits.is_full()
    }

    pub fn insert(&mut self, x: Elem) -> Result<()> {
        self.sg.check(x)?;
        self.bits.insert(x.idx());
        Ok(())
    }

    pub fn ensure_same(&self, other: &GroundSet) -> Result<()> {
        if same_semigroup(&self.sg, &other.sg) {
            Ok(())
        } else {
            Err(Error::SemigroupMismatch)
        }
    }

    pub fn is_subset(&self, other: &GroundSet) -> Result<bool> {
        self.ensure_same(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    pub fn union(&self, other: &GroundSet) -> Result<GroundSet> {
        self.ensure_same(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn intersection(&self, other: &GroundSet) -> Result<GroundSet> {
        self.ensure_same(other)?;
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        Ok(out)
    }

    /// `−t + A = {y : t + y ∈ A}`. On windows, `y` qualifies only when
    /// `t + y` is defined.
    pub fn preimage_shift(&self, t: Elem) -> Result<GroundSet> {
        self.sg.check(t)?;
        Ok(self.preimage_unchecked(t))
    }

    pub(crate) fn preimage_unchecked(&self, t: Elem) -> GroundSet {
        let sg = &self.sg;
        let mut out = GroundSet::empty(sg);
        for y in sg.elements() {
            if sg.sum(t, y).is_some_and(|z| self.contains(z)) {
                out.bits.insert(y.idx());
            }
        }
        out
    }

    /// `t + A = {t + a : a ∈ A}`, dropping sums that are undefined.
    pub fn translate(&self, t: Elem) -> Result<GroundSet> {
        self.sg.check(t)?;
        let mut out = GroundSet::empty(&self.sg);
        for a in self.members() {
            if let Some(z) = self.sg.sum(t, a) {
                out.bits.insert(z.idx());
            }
        }
        Ok(out)
    }
}
