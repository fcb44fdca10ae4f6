//! Matrices over a semigroup, the test objects of the CR condition.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{usage, Error, Result};
use crate::semigroup::{Elem, Semigroup};
use crate::set::same_semigroup;

/// An `r × n` matrix with entries in one semigroup, stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    sg: Arc<Semigroup>,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

impl Matrix {
    pub fn new(sg: &Arc<Semigroup>, rows: usize, cols: usize, entries: Vec<Elem>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(usage(format!("a matrix needs r, n >= 1, got {rows}×{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(usage(format!(
                "{rows}×{cols} matrix given {} entries",
                entries.len()
            )));
        }
        for &e in &entries {
            sg.check(e)?;
        }
        Ok(Matrix { sg: sg.clone(), rows, cols, entries })
    }

    pub fn from_rows(sg: &Arc<Semigroup>, rows: &[Vec<Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(usage("ragged matrix rows"));
        }
        Matrix::new(sg, rows.len(), cols, rows.concat())
    }

    /// Every entry computed by `f(i, j)` (0-based).
    pub fn from_fn(sg: &Arc<Semigroup>, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Result<Self> {
        let entries = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Matrix::new(sg, rows, cols, entries)
    }

    pub fn semigroup(&self) -> &Arc<Semigroup> {
        &self.sg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// `M_{α,j} = Σ_{i∈α} M_{ij}`, accumulated in ascending row order.
    /// `alpha` is a row bit mask (bit `i` = row `i`, 0-based), `j` is 0-based.
    pub fn row_sum(&self, alpha: u64, j: usize) -> Result<Option<Elem>> {
        if alpha == 0 {
            return Err(usage("row_sum over an empty row set"));
        }
        if alpha >> self.rows.min(63) != 0 || self.rows > 63 {
            return Err(usage(format!("row mask {alpha:#b} exceeds {} rows", self.rows)));
        }
        if j >= self.cols {
            return Err(usage(format!("column {j} out of range for {} columns", self.cols)));
        }
        Ok(self.row_sum_unchecked(alpha, j))
    }

    #[inline]
    pub(crate) fn row_sum_unchecked(&self, alpha: u64, j: usize) -> Option<Elem> {
        let mut acc: Option<Elem> = None;
        let mut mask = alpha;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let e = self.get(i, j);
            acc = Some(match acc {
                None => e,
                Some(a) => self.sg.sum(a, e)?,
            });
        }
        acc
    }

    /// The `r × (n₁ + n₂)` matrix with the columns of `self` followed by
    /// those of `other`.
    pub fn concat(&self, other: &Matrix) -> Result<Matrix> {
        if !same_semigroup(&self.sg, &other.sg) {
            return Err(Error::SemigroupMismatch);
        }
        if self.rows != other.rows {
            return Err(usage(format!(
                "cannot concatenate a {}-row matrix with a {}-row matrix",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.extend_from_slice(other.row(i));
        }
        Ok(Matrix { sg: self.sg.clone(), rows: self.rows, cols, entries })
    }

    /// Left fold of [`Matrix::concat`] over a non-empty list.
    pub fn concat_all(parts: &[Matrix]) -> Result<Matrix> {
        let (first, rest) = parts.split_first().ok_or_else(|| usage("nothing to concatenate"))?;
        rest.iter().try_fold(first.clone(), |acc, m| acc.concat(m))
    }
}
