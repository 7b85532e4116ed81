use std::fmt;

use crate::gf2::{low_mask, Gf2Vector};

/// A subset of the points `0..n` of one geometry, as a single-word mask.
///
/// Ordering is by integer value of the mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        PointSet(low_mask(n))
    }

    pub fn singleton(p: usize) -> Self {
        PointSet(1u64 << p)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(pts: I) -> Self {
        PointSet(pts.into_iter().fold(0u64, |m, p| m | 1u64 << p))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, p: usize) -> bool {
        self.0 >> p & 1 == 1
    }

    pub fn insert(&mut self, p: usize) {
        self.0 |= 1u64 << p;
    }

    pub fn union(self, o: Self) -> Self {
        PointSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        PointSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        PointSet(self.0 & !o.0)
    }

    pub fn symmetric_difference(self, o: Self) -> Self {
        PointSet(self.0 ^ o.0)
    }

    /// Complement within the points `0..n`.
    pub fn complement(self, n: usize) -> Self {
        PointSet(!self.0 & low_mask(n))
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Points {
        Points(self.0)
    }

    /// Characteristic vector in GF(2)^n.
    pub fn to_vector(self, n: usize) -> Gf2Vector {
        Gf2Vector::new(self.0, n).expect("point set within range")
    }

    /// Lowercase hex of ceil(n/8) bytes, byte 0 holding points 0..8 with
    /// point 8i+j at bit j of byte i.
    pub fn to_hex(self, n: usize) -> String {
        let bytes = n.div_ceil(8);
        (0..bytes)
            .map(|i| format!("{:02x}", (self.0 >> (8 * i)) & 0xff))
            .collect()
    }

    pub fn from_hex(s: &str, n: usize) -> Option<Self> {
        let bytes = n.div_ceil(8);
        if s.len() != 2 * bytes || !s.is_ascii() {
            return None;
        }
        let mut mask = 0u64;
        for i in 0..bytes {
            let b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok()?;
            mask |= (b as u64) << (8 * i);
        }
        (mask & !low_mask(n) == 0).then_some(PointSet(mask))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl IntoIterator for PointSet {
    type Item = usize;
    type IntoIter = Points;

    fn into_iter(self) -> Points {
        self.iter()
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_points(iter)
    }
}

/// Ascending iterator over the points of a [`PointSet`].
#[derive(Clone)]
pub struct Points(u64);

impl Iterator for Points {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Points {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hex_layout() {
        // point 0 is the low bit of the first byte
        assert_eq!(PointSet::singleton(0).to_hex(45), "010000000000");
        assert_eq!(PointSet::singleton(9).to_hex(45), "000200000000");
        assert_eq!(PointSet::full(45).to_hex(45), "ffffffffff1f");
        assert_eq!(PointSet::full(15).to_hex(15), "ff7f");
    }

    #[test]
    fn hex_rejects_garbage() {
        assert_eq!(PointSet::from_hex("zz", 8), None);
        assert_eq!(PointSet::from_hex("ff", 3), None);
        assert_eq!(PointSet::from_hex("0100", 8), None);
    }

    proptest! {
        #[test]
        fn hex_round_trip(n in 1usize..=64, raw in any::<u64>()) {
            let s = PointSet(raw & low_mask(n));
            prop_assert_eq!(PointSet::from_hex(&s.to_hex(n), n), Some(s));
        }
    }
}
