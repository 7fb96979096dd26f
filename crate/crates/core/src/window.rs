//! Flat layout for tables indexed by digit tuples over a range of levels.
//!
//! A window `lo..hi` covers the levels `lo, lo+1, ..., hi-1`. A tuple
//! `(a_lo, ..., a_{hi-1})` of field-element indices is stored at
//! `sum_t a_{lo+t} * q^(hi-1-lo-t)`, so the highest level varies fastest and
//! tables enumerate tuples in lexicographic order.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if hi < lo {
            return Err(Error::Window(format!("empty level range {lo}..{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn size(&self, q: usize) -> usize {
        q.pow(self.len() as u32)
    }

    pub fn contains_level(&self, level: i32) -> bool {
        (self.lo..self.hi).contains(&level)
    }

    /// Distance between consecutive values of `level` in the flat index.
    pub fn stride(&self, level: i32, q: usize) -> usize {
        debug_assert!(self.contains_level(level));
        q.pow((self.hi - 1 - level) as u32)
    }

    pub fn decode(&self, mut index: usize, q: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for slot in out.iter_mut().rev() {
            *slot = index % q;
            index /= q;
        }
        out
    }

    pub fn encode(&self, digits: &[usize], q: usize) -> usize {
        debug_assert_eq!(digits.len(), self.len());
        digits.iter().fold(0, |acc, &d| acc * q + d)
    }

    /// Digit at `level` of a flat index; zero for levels outside the window.
    pub fn digit_at(&self, index: usize, level: i32, q: usize) -> usize {
        if !self.contains_level(level) {
            return 0;
        }
        (index / self.stride(level, q)) % q
    }

    pub fn union(&self, other: &Window) -> Window {
        Window { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.lo <= other.lo && self.hi >= other.hi
    }
}

/// How a table is extended across levels added to its window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extend {
    /// The function is supported where the new digit is zero.
    ZeroPad,
    /// The function does not depend on the new digit.
    Replicate,
}

/// Re-indexes `values` from `from` onto the larger window `to`.
pub fn extend_table<T: Copy + Default>(
    values: &[T],
    from: Window,
    to: Window,
    q: usize,
    below: Extend,
    above: Extend,
) -> Vec<T> {
    debug_assert!(to.covers(&from));
    let mut out = vec![T::default(); to.size(q)];
    let high_extra = (to.hi - from.hi) as usize;
    let inner = from.size(q);
    let high_block = q.pow(high_extra as u32);
    for (idx, slot) in out.iter_mut().enumerate() {
        let high = idx % high_block;
        let rest = idx / high_block;
        let mid = rest % inner;
        let low = rest / inner;
        let keep_low = below == Extend::Replicate || low == 0;
        let keep_high = above == Extend::Replicate || high == 0;
        if keep_low && keep_high {
            *slot = values[mid];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_roundtrip() {
        let w = Window::new(-2, 1).unwrap();
        assert_eq!(w.size(3), 27);
        for i in 0..27 {
            assert_eq!(w.encode(&w.decode(i, 3), 3), i);
        }
        // highest level fastest
        assert_eq!(w.decode(1, 3), vec![0, 0, 1]);
        assert_eq!(w.digit_at(1, 0, 3), 1);
        assert_eq!(w.digit_at(9, -2, 3), 1);
        assert_eq!(w.digit_at(9, 5, 3), 0);
    }

    #[test]
    fn extension_modes() {
        let from = Window::new(0, 1).unwrap();
        let to = Window::new(-1, 2).unwrap();
        let vals = [1.0, 2.0];
        let ext = extend_table(&vals, from, to, 2, Extend::ZeroPad, Extend::Replicate);
        // tuples (a_-1, a_0, a_1)
        assert_eq!(ext, vec![1.0, 1.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        let ext = extend_table(&vals, from, to, 2, Extend::Replicate, Extend::ZeroPad);
        assert_eq!(ext, vec![1.0, 0.0, 2.0, 0.0, 1.0, 0.0, 2.0, 0.0]);
    }

    #[test]
    fn rejects_reversed_range() {
        assert!(Window::new(1, 0).is_err());
        assert!(Window::new(2, 2).unwrap().is_empty());
    }
}
