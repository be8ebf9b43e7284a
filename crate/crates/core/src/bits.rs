//! Fixed-capacity bit sets used as adjacency rows.

use alloc::vec;
use alloc::vec::Vec;

/// Bit set over `0..capacity`, backed by 64-bit words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitRow {
    words: Vec<u64>,
    capacity: usize,
}

impl BitRow {
    pub fn new(capacity: usize) -> Self {
        BitRow {
            words: vec![0; capacity.div_ceil(64)],
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.capacity);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.capacity);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.capacity);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of set bits shared with `other`. Capacities must match.
    pub fn intersection_count(&self, other: &BitRow) -> usize {
        debug_assert_eq!(self.capacity, other.capacity);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersect_with(&mut self, other: &BitRow) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitRow) {
        debug_assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Iterates set bits in increasing order.
    pub fn iter(&self) -> BitIter<'_> {
        BitIter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Smallest set bit at index `>= from`, if any.
    pub fn next_at_or_after(&self, from: usize) -> Option<usize> {
        if from >= self.capacity {
            return None;
        }
        let mut wi = from / 64;
        let mut w = self.words[wi] & (!0u64 << (from % 64));
        loop {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }
}

pub struct BitIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * 64 + bit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_iter() {
        let mut b = BitRow::new(130);
        for i in [0, 63, 64, 100, 129] {
            b.insert(i);
        }
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 100, 129]);
        assert_eq!(b.count(), 5);
        b.remove(64);
        assert!(!b.contains(64));
        assert_eq!(b.count(), 4);
    }

    #[test]
    fn intersection() {
        let mut a = BitRow::new(70);
        let mut b = BitRow::new(70);
        for i in 0..70 {
            if i % 2 == 0 {
                a.insert(i);
            }
            if i % 3 == 0 {
                b.insert(i);
            }
        }
        assert_eq!(a.intersection_count(&b), (0..70).filter(|i| i % 6 == 0).count());
    }

    #[test]
    fn next_at_or_after() {
        let mut b = BitRow::new(200);
        b.insert(5);
        b.insert(150);
        assert_eq!(b.next_at_or_after(0), Some(5));
        assert_eq!(b.next_at_or_after(5), Some(5));
        assert_eq!(b.next_at_or_after(6), Some(150));
        assert_eq!(b.next_at_or_after(151), None);
    }
}
