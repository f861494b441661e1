//! Square lattice `[-L, L]²` stored row-major, `m` selecting the row.

use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    half_width: usize,
}

impl Lattice {
    pub fn new(half_width: usize) -> Self {
        Lattice { half_width }
    }

    #[inline]
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Sites per row, `2L + 1`.
    #[inline]
    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, m: i64, n: i64) -> bool {
        let l = self.half_width as i64;
        m.abs() <= l && n.abs() <= l
    }

    /// Flat index of `(m, n)`. Panics in debug builds when out of range.
    #[inline]
    pub fn index(&self, m: i64, n: i64) -> usize {
        debug_assert!(self.contains(m, n));
        let l = self.half_width as i64;
        ((m + l) as usize) * self.side() + (n + l) as usize
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (i64, i64) {
        let l = self.half_width as i64;
        let side = self.side();
        ((index / side) as i64 - l, (index % side) as i64 - l)
    }

    pub fn origin(&self) -> usize {
        self.index(0, 0)
    }
}
