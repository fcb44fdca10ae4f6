//! Concrete commutative semigroups: Cayley tables, windows of the naturals,
//! and binary products.
//!
//! Elements are addressed by dense codes. For a table the code is the row
//! index, for a window `[lo, hi]` it is `value - lo`, and for a product it is
//! `left * |right| + right`, so code order is the canonical element order
//! (index order, integer order, lexicographic pairs) everywhere.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Largest universe we are willing to index densely.
pub const MAX_UNIVERSE: u64 = 1 << 26;

/// Tables up to this order get an exhaustive associativity check.
pub const EXHAUSTIVE_ASSOC_MAX_ORDER: u32 = 64;

/// Random triples drawn when the table is too large for the exhaustive check.
pub const SAMPLED_ASSOC_TRIPLES: u64 = 100_000;

const ASSOC_SEED: u64 = 0x5eed_a550_c1a7_1e55;

/// Violations kept verbatim in a report; the totals are always exact.
const REPORT_CAP: usize = 256;

/// Canonical code of an element, meaningful only relative to its semigroup.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Elem(pub u32);

impl Elem {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// The structured (I/O facing) form of an element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Value {
    Index(u32),
    Nat(u64),
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Index(i) => write!(f, "{i}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteTable {
    order: u32,
    table: Vec<u32>,
}

impl FiniteTable {
    /// Structural checks only: square, non-empty, entries in range.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Structural("empty table".into()));
        }
        if m as u64 > MAX_UNIVERSE {
            return Err(Error::Structural(format!("order {m} exceeds {MAX_UNIVERSE}")));
        }
        let mut table = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Structural(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v as usize >= m {
                    return Err(Error::Structural(format!(
                        "entry [{i}][{j}] = {v} is out of range for order {m}"
                    )));
                }
            }
            table.extend_from_slice(row);
        }
        Ok(FiniteTable { order: m as u32, table })
    }

    /// Addition table of Z_m.
    pub fn cyclic(m: u32) -> Self {
        assert!(m >= 1, "Z_0 does not exist");
        let table = (0..m).flat_map(|x| (0..m).map(move |y| (x + y) % m)).collect();
        FiniteTable { order: m, table }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.table[x as usize * self.order as usize + y as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.table.chunks(self.order as usize)
    }

    /// True when this is literally the table of Z_m with generator 1.
    pub fn is_cyclic(&self) -> bool {
        let m = self.order;
        (0..m).all(|x| (0..m).all(|y| self.get(x, y) == (x + y) % m))
    }
}

/// The interval `[lo, hi]` of the naturals; `x + y` is defined iff it is `<= hi`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NatWindow {
    pub lo: u64,
    pub hi: u64,
}

impl NatWindow {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Structural(format!("empty window [{lo}, {hi}]")));
        }
        if hi - lo + 1 > MAX_UNIVERSE {
            return Err(Error::Structural(format!("window [{lo}, {hi}] is too wide")));
        }
        Ok(NatWindow { lo, hi })
    }

    pub fn size(&self) -> u32 {
        (self.hi - self.lo + 1) as u32
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Repr {
    Table(FiniteTable),
    Window(NatWindow),
    Product(Box<Semigroup>, Box<Semigroup>, u32),
}

/// A validated commutative semigroup with a finite, canonically ordered universe.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Semigroup(Repr);

/// Borrowed view of a semigroup's variant.
#[derive(Clone, Copy, Debug)]
pub enum Shape<'a> {
    Table(&'a FiniteTable),
    Window(NatWindow),
    Product(&'a Semigroup, &'a Semigroup),
}

impl Semigroup {
    /// Builds a table semigroup, refusing tables that fail validation.
    pub fn finite_table(table: FiniteTable) -> Result<Self> {
        let report = validate_table(&table);
        if !report.is_valid() {
            return Err(Error::InvalidSemigroup(report));
        }
        Ok(Semigroup(Repr::Table(table)))
    }

    pub fn cyclic(m: u32) -> Self {
        Semigroup(Repr::Table(FiniteTable::cyclic(m)))
    }

    pub fn nat_window(lo: u64, hi: u64) -> Result<Self> {
        Ok(Semigroup(Repr::Window(NatWindow::new(lo, hi)?)))
    }

    pub fn product(left: Semigroup, right: Semigroup) -> Result<Self> {
        let size = left.size() as u64 * right.size() as u64;
        if size > MAX_UNIVERSE {
            return Err(Error::Structural(format!("product universe of {size} elements is too large")));
        }
        let rsize = right.size();
        Ok(Semigroup(Repr::Product(Box::new(left), Box::new(right), rsize)))
    }

    /// `S × S`.
    pub fn square(&self) -> Result<Self> {
        Semigroup::product(self.clone(), self.clone())
    }

    pub fn shape(&self) -> Shape<'_> {
        match &self.0 {
            Repr::Table(t) => Shape::Table(t),
            Repr::Window(w) => Shape::Window(*w),
            Repr::Product(l, r, _) => Shape::Product(l, r),
        }
    }

    pub fn as_window(&self) -> Option<NatWindow> {
        match self.0 {
            Repr::Window(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_table(&self) -> Option<&FiniteTable> {
        match &self.0 {
            Repr::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn factors(&self) -> Option<(&Semigroup, &Semigroup)> {
        match &self.0 {
            Repr::Product(l, r, _) => Some((l, r)),
            _ => None,
        }
    }

    pub fn size(&self) -> u32 {
        match &self.0 {
            Repr::Table(t) => t.order,
            Repr::Window(w) => w.size(),
            Repr::Product(l, _, rs) => l.size() * rs,
        }
    }

    /// Addition is defined everywhere (no window anywhere in the structure).
    /// Negative search results are only proofs on total semigroups.
    pub fn is_total(&self) -> bool {
        match &self.0 {
            Repr::Table(_) => true,
            Repr::Window(_) => false,
            Repr::Product(l, r, _) => l.is_total() && r.is_total(),
        }
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.size()
    }

    pub fn check(&self, x: Elem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ForeignElement { code: x.0, size: self.size() })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.size()).map(Elem)
    }

    #[inline]
    pub fn split(&self, x: Elem) -> (Elem, Elem) {
        match &self.0 {
            Repr::Product(_, _, rs) => (Elem(x.0 / rs), Elem(x.0 % rs)),
            _ => panic!("split on a non-product semigroup"),
        }
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        match &self.0 {
            Repr::Product(_, _, rs) => Elem(a.0 * rs + b.0),
            _ => panic!("join on a non-product semigroup"),
        }
    }

    /// Unchecked sum for the search kernels; `None` means undefined
    /// (a window overflowed somewhere).
    #[inline]
    pub fn sum(&self, x: Elem, y: Elem) -> Option<Elem> {
        debug_assert!(self.contains(x) && self.contains(y));
        match &self.0 {
            Repr::Table(t) => Some(Elem(t.get(x.0, y.0))),
            Repr::Window(w) => {
                let code = w.lo + x.0 as u64 + y.0 as u64;
                (code + w.lo <= w.hi).then_some(Elem(code as u32))
            }
            Repr::Product(l, r, rs) => {
                let a = l.sum(Elem(x.0 / rs), Elem(y.0 / rs))?;
                let b = r.sum(Elem(x.0 % rs), Elem(y.0 % rs))?;
                Some(Elem(a.0 * rs + b.0))
            }
        }
    }

    /// The semigroup sum; `Ok(None)` when a window addition is undefined.
    pub fn add(&self, x: Elem, y: Elem) -> Result<Option<Elem>> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.sum(x, y))
    }

    /// `k`-fold sum `x + x + ... + x`, unchecked, `k >= 1`.
    pub fn times(&self, k: u64, x: Elem) -> Option<Elem> {
        debug_assert!(k >= 1);
        // Double-and-add. On windows every partial sum is bounded by the
        // full sum, so an undefined intermediate means an undefined result.
        let mut acc: Option<Elem> = None;
        let mut base = x;
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base,
                    Some(a) => self.sum(a, base)?,
                });
            }
            k >>= 1;
            if k == 0 {
                return acc;
            }
            base = self.sum(base, base)?;
        }
    }

    pub fn repeat_add(&self, k: u64, x: Elem) -> Result<Option<Elem>> {
        if k == 0 {
            return Err(Error::Usage("repeat_add needs k >= 1; a semigroup has no neutral element".into()));
        }
        self.check(x)?;
        Ok(self.times(k, x))
    }

    pub fn value(&self, x: Elem) -> Value {
        match &self.0 {
            Repr::Table(_) => Value::Index(x.0),
            Repr::Window(w) => Value::Nat(w.lo + x.0 as u64),
            Repr::Product(l, r, _) => {
                let (a, b) = self.split(x);
                Value::pair(l.value(a), r.value(b))
            }
        }
    }

    pub fn elem(&self, v: &Value) -> Result<Elem> {
        let scalar = match v {
            Value::Index(i) => Some(*i as u64),
            Value::Nat(n) => Some(*n),
            Value::Pair(..) => None,
        };
        match (&self.0, scalar, v) {
            (Repr::Table(t), Some(i), _) if i < t.order as u64 => Ok(Elem(i as u32)),
            (Repr::Window(w), Some(n), _) if (w.lo..=w.hi).contains(&n) => {
                Ok(Elem((n - w.lo) as u32))
            }
            (Repr::Product(l, r, _), None, Value::Pair(a, b)) => {
                Ok(self.join(l.elem(a)?, r.elem(b)?))
            }
            _ => Err(Error::Usage(format!("{v} is not an element of this semigroup"))),
        }
    }

    /// Element of a window with the given integer value.
    pub fn nat(&self, n: u64) -> Option<Elem> {
        self.elem(&Value::Nat(n)).ok()
    }
}

/// Inclusive range of element codes, i.e. a contiguous stretch of the
/// canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ElemRange {
    pub start: Elem,
    pub end: Elem,
}

impl ElemRange {
    pub fn all(s: &Semigroup) -> Self {
        ElemRange { start: Elem(0), end: Elem(s.size() - 1) }
    }

    pub fn new(s: &Semigroup, start: Elem, end: Elem) -> Result<Self> {
        s.check(start)?;
        s.check(end)?;
        if start > end {
            return Err(Error::Usage(format!("empty element range {}..{}", start.0, end.0)));
        }
        Ok(ElemRange { start, end })
    }

    pub fn covers(&self, s: &Semigroup) -> bool {
        *self == ElemRange::all(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + Clone {
        (self.start.0..=self.end.0).map(Elem)
    }

    pub fn len(&self) -> u64 {
        (self.end.0 - self.start.0) as u64 + 1
    }

    /// Always false: a range holds at least its start.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Outcome of checking the semigroup axioms; empty lists mean valid.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    /// `(x, y)` with `x < y` and `x + y != y + x` (first few only).
    pub commutativity: Vec<(u32, u32)>,
    pub commutativity_total: u64,
    /// `(x, y, z)` with `(x + y) + z != x + (y + z)` (first few only).
    pub associativity: Vec<(u32, u32, u32)>,
    pub associativity_total: u64,
    /// Associativity was checked on a random sample instead of all triples.
    pub sampled: bool,
    pub triples_checked: u64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.commutativity_total == 0 && self.associativity_total == 0
    }

    fn merge(&mut self, other: ValidationReport) {
        self.commutativity_total += other.commutativity_total;
        self.associativity_total += other.associativity_total;
        self.commutativity.extend(other.commutativity);
        self.associativity.extend(other.associativity);
        self.sampled |= other.sampled;
        self.triples_checked += other.triples_checked;
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} commutativity and {} associativity violations",
            self.commutativity_total, self.associativity_total
        )?;
        if let Some((x, y)) = self.commutativity.first() {
            write!(f, "; first non-commuting pair ({x}, {y})")?;
        }
        if let Some((x, y, z)) = self.associativity.first() {
            write!(f, "; first non-associative triple ({x}, {y}, {z})")?;
        }
        if self.sampled {
            write!(f, " (associativity sampled over {} triples)", self.triples_checked)?;
        }
        Ok(())
    }
}

/// Checks commutativity (all pairs) and associativity (all triples up to
/// order 64, a fixed-seed random sample above).
pub fn validate_table(t: &FiniteTable) -> ValidationReport {
    let m = t.order;
    let mut report = ValidationReport::default();
    for x in 0..m {
        for y in x + 1..m {
            if t.get(x, y) != t.get(y, x) {
                report.commutativity_total += 1;
                if report.commutativity.len() < REPORT_CAP {
                    report.commutativity.push((x, y));
                }
            }
        }
    }
    let check = |x: u32, y: u32, z: u32, report: &mut ValidationReport| {
        report.triples_checked += 1;
        if t.get(t.get(x, y), z) != t.get(x, t.get(y, z)) {
            report.associativity_total += 1;
            if report.associativity.len() < REPORT_CAP {
                report.associativity.push((x, y, z));
            }
        }
    };
    if m <= EXHAUSTIVE_ASSOC_MAX_ORDER {
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    check(x, y, z, &mut report);
                }
            }
        }
    } else {
        report.sampled = true;
        let mut rng = ChaCha8Rng::seed_from_u64(ASSOC_SEED);
        for _ in 0..SAMPLED_ASSOC_TRIPLES {
            let x = (rng.next_u64() % m as u64) as u32;
            let y = (rng.next_u64() % m as u64) as u32;
            let z = (rng.next_u64() % m as u64) as u32;
            check(x, y, z, &mut report);
        }
    }
    report
}

/// Validation of an arbitrary semigroup; windows are valid by construction
/// and products are valid iff both factors are.
pub fn validate_semigroup(s: &Semigroup) -> ValidationReport {
    match s.shape() {
        Shape::Table(t) => validate_table(t),
        Shape::Window(_) => ValidationReport::default(),
        Shape::Product(l, r) => {
            let mut rep = validate_semigroup(l);
            rep.merge(validate_semigroup(r));
            rep
        }
    }
}
