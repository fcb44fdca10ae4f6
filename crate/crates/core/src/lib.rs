//! Computational largeness notions over commutative semigroups.
//!
//! Everything here is finite: semigroups are Cayley tables, bounded windows
//! `[lo, hi]` of the naturals with partial addition, or products of those.
//! Elements are dense canonical codes ([`Elem`]) so that subsets are bit
//! vectors and the search kernels reduce to bitwise intersections.
//!
//! The crate is `no_std` (it needs `alloc`); IO, the CLI and parallel
//! fan-out live in the `largeness` crate.
#![no_std]

extern crate alloc;

pub mod bitset;
pub mod chain;
pub mod error;
pub mod largeness;
pub mod lift;
pub mod matrix;
pub mod semigroup;
pub mod set;
pub mod subsets;
pub mod validate;
pub mod vdw;
pub mod witness;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use semigroup::{Elem, ElemRange, FiniteTable, NatWindow, Semigroup, ValidationReport, Value};
pub use set::GroundSet;
