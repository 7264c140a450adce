//! Fixed-width bitset over a dense index range.
//!
//! Used three ways: as the BFS memo key for subset constructions (Hash/Eq on the
//! block words), as the set of windows carried through the construction algorithm,
//! and as the jointly-periodic membership table over configuration space.

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitSet {
    bits: usize,
    blocks: Box<[u64]>,
}

impl BitSet {
    /// Empty set over the index range `0..bits`.
    pub fn new(bits: usize) -> Self {
        let words = bits.div_ceil(64).max(1);
        BitSet {
            bits,
            blocks: vec![0u64; words].into_boxed_slice(),
        }
    }

    /// Set containing every index in `0..bits`.
    pub fn full(bits: usize) -> Self {
        let mut s = Self::new(bits);
        for i in 0..bits {
            s.insert(i);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.bits
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.bits);
        self.blocks[i / 64] |= 1u64 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.bits);
        self.blocks[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.bits);
        self.blocks[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn count(&self) -> u64 {
        self.blocks.iter().map(|b| b.count_ones() as u64).sum()
    }

    /// In-place union.
    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.bits, other.bits);
        for (a, b) in self.blocks.iter_mut().zip(other.blocks.iter()) {
            *a |= *b;
        }
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_contains_count() {
        let mut s = BitSet::new(130);
        assert!(s.is_empty());
        for i in [0usize, 63, 64, 129] {
            s.insert(i);
        }
        assert_eq!(s.count(), 4);
        assert!(s.contains(64));
        assert!(!s.contains(65));
        s.remove(64);
        assert_eq!(s.iter_ones().collect::<Vec<_>>(), vec![0, 63, 129]);
    }

    #[test]
    fn full_and_union() {
        let f = BitSet::full(70);
        assert_eq!(f.count(), 70);
        let mut a = BitSet::new(70);
        a.insert(3);
        let mut b = BitSet::new(70);
        b.insert(69);
        a.union_with(&b);
        assert_eq!(a.iter_ones().collect::<Vec<_>>(), vec![3, 69]);
    }

    #[test]
    fn equal_sets_hash_equal() {
        use std::collections::HashSet;
        let mut a = BitSet::new(100);
        let mut b = BitSet::new(100);
        a.insert(7);
        b.insert(7);
        let mut memo = HashSet::new();
        memo.insert(a);
        assert!(memo.contains(&b));
    }
}
