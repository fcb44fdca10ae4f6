//! Non-empty subsets of `{0, .., r-1}` as bit masks, ordered by ascending
//! popcount and then ascending mask value.

/// Iterator over the non-empty masks of `r` bits in popcount-then-mask order.
#[derive(Clone, Debug)]
pub struct Subsets {
    r: u32,
    k: u32,
    next: Option<u64>,
}

/// Longest row/position set a mask can address.
pub const MAX_BITS: u32 = 63;

impl Subsets {
    pub fn new(r: u32) -> Self {
        assert!(r <= MAX_BITS, "subsets of more than {MAX_BITS} rows");
        Subsets { r, k: 1, next: (r >= 1).then_some(1) }
    }
}

impl Iterator for Subsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        // Gosper's hack: next mask with the same popcount.
        let c = cur & cur.wrapping_neg();
        let r = cur + c;
        let succ = (((r ^ cur) >> 2) / c) | r;
        self.next = if succ >> self.r == 0 {
            Some(succ)
        } else if self.k < self.r {
            self.k += 1;
            Some((1u64 << self.k) - 1)
        } else {
            None
        };
        Some(cur)
    }
}

/// 1-based indices of the set bits, for display.
pub fn mask_indices(mask: u64) -> impl Iterator<Item = u32> {
    (0..64).filter(move |i| mask >> i & 1 == 1).map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn order_for_three_rows() {
        let all: Vec<u64> = Subsets::new(3).collect();
        assert_eq!(all, [0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111]);
    }

    #[test]
    fn counts() {
        for r in 0..12u32 {
            let v: Vec<u64> = Subsets::new(r).collect();
            assert_eq!(v.len(), (1usize << r) - 1);
            assert!(v.windows(2).all(|w| (w[0].count_ones(), w[0]) < (w[1].count_ones(), w[1])));
        }
    }

    #[test]
    fn one_based_indices() {
        assert_eq!(mask_indices(0b101).collect::<Vec<_>>(), [1, 3]);
    }
}
