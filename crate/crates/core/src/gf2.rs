//! Bit-packed GF(2) linear algebra over single-word vectors.
//!
//! Coordinate `i` of a vector is bit `i` of its mask (bit 0 least significant),
//! so a point set over points `0..n` is directly its characteristic vector.

use std::fmt;

use crate::error::{Error, Result};

/// Largest ambient dimension a single-word vector can hold.
pub const MAX_LEN: usize = 64;

/// Largest subspace dimension `enumerate_nonzero` will expand.
pub const MAX_ENUMERATION_DIM: usize = 24;

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A vector in GF(2)^len.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    bits: u64,
    len: u8,
}

#[allow(clippy::len_without_is_empty)]
impl Gf2Vector {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::Capacity(format!(
                "vector length {len} exceeds {MAX_LEN}"
            )));
        }
        if bits & !low_mask(len) != 0 {
            return Err(Error::InvalidInput(format!(
                "bits {bits:#x} set beyond length {len}"
            )));
        }
        Ok(Self {
            bits,
            len: len as u8,
        })
    }

    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_LEN);
        Self {
            bits: 0,
            len: len as u8,
        }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Standard bilinear form: parity of the overlap.
    pub fn dot(self, other: Self) -> bool {
        (self.bits & other.bits).count_ones() % 2 == 1
    }
}

impl std::ops::Add for Gf2Vector {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.len, rhs.len);
        Self {
            bits: self.bits ^ rhs.bits,
            len: self.len,
        }
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // coordinate order, index 0 first
        let s: String = (0..self.len())
            .map(|i| if self.bits >> i & 1 == 1 { '1' } else { '0' })
            .collect();
        write!(f, "Gf2Vector({s})")
    }
}

/// A matrix over GF(2) stored as row masks of a common length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn new(cols: usize, rows: Vec<u64>) -> Result<Self> {
        if cols > MAX_LEN {
            return Err(Error::Capacity(format!("{cols} columns exceed {MAX_LEN}")));
        }
        if let Some(r) = rows.iter().find(|r| **r & !low_mask(cols) != 0) {
            return Err(Error::InvalidInput(format!(
                "row {r:#x} has bits beyond column {cols}"
            )));
        }
        Ok(Self { cols, rows })
    }

    pub fn from_vectors(cols: usize, rows: &[Gf2Vector]) -> Result<Self> {
        if let Some(v) = rows.iter().find(|v| v.len() != cols) {
            return Err(Error::InvalidInput(format!(
                "row of length {} in a {cols}-column matrix",
                v.len()
            )));
        }
        Self::new(cols, rows.iter().map(|v| v.bits).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| 1u64 << i).collect()).expect("n <= 64")
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = Gf2Vector> + '_ {
        let len = self.cols as u8;
        self.rows.iter().map(move |&bits| Gf2Vector { bits, len })
    }

    pub fn row_masks(&self) -> &[u64] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        reduce(&self.rows).len()
    }

    /// All vectors with even overlap against every row.
    pub fn nullspace(&self) -> Gf2Subspace {
        let rref = reduce(&self.rows);
        let pivots: Vec<u32> = rref.iter().map(|r| r.trailing_zeros()).collect();
        let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | 1u64 << p);
        let mut basis = Vec::with_capacity(self.cols - rref.len());
        for free in (0..self.cols).filter(|c| pivot_mask >> c & 1 == 0) {
            let mut v = 1u64 << free;
            for (row, &p) in rref.iter().zip(&pivots) {
                if row >> free & 1 == 1 {
                    v |= 1u64 << p;
                }
            }
            basis.push(v);
        }
        Gf2Subspace {
            len: self.cols,
            basis: reduce(&basis),
        }
    }
}

/// Fully reduced row-echelon form, keyed on the lowest set bit of each row.
///
/// Returned rows are nonzero, sorted by strictly increasing pivot, and every
/// pivot column is set in exactly one row.
fn reduce(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            if v >> b.trailing_zeros() & 1 == 1 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let p = v.trailing_zeros();
        for b in basis.iter_mut() {
            if *b >> p & 1 == 1 {
                *b ^= v;
            }
        }
        basis.push(v);
    }
    basis.sort_by_key(|b| b.trailing_zeros());
    basis
}

/// A subspace of GF(2)^len held as a canonical reduced basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gf2Subspace {
    len: usize,
    basis: Vec<u64>,
}

impl Gf2Subspace {
    pub fn span(len: usize, vectors: &[Gf2Vector]) -> Result<Self> {
        let m = Gf2Matrix::from_vectors(len, vectors)?;
        Ok(Self {
            len,
            basis: reduce(&m.rows),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_len(&self) -> usize {
        self.len
    }

    pub fn basis(&self) -> impl Iterator<Item = Gf2Vector> + '_ {
        let len = self.len as u8;
        self.basis.iter().map(move |&bits| Gf2Vector { bits, len })
    }

    pub fn contains(&self, v: Gf2Vector) -> bool {
        let mut bits = v.bits;
        for &b in &self.basis {
            if bits >> b.trailing_zeros() & 1 == 1 {
                bits ^= b;
            }
        }
        bits == 0
    }

    /// Every nonzero vector of the subspace, ascending as integers.
    pub fn enumerate_nonzero(&self) -> Result<Vec<Gf2Vector>> {
        let dim = self.dim();
        if dim > MAX_ENUMERATION_DIM {
            return Err(Error::Capacity(format!(
                "subspace of dimension {dim} exceeds enumeration limit {MAX_ENUMERATION_DIM}"
            )));
        }
        let len = self.len as u8;
        let mut out: Vec<Gf2Vector> = (1u32..1 << dim)
            .map(|coords| {
                let bits = self
                    .basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| coords >> i & 1 == 1)
                    .fold(0u64, |acc, (_, b)| acc ^ b);
                Gf2Vector { bits, len }
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// Dimension of the span of `vectors`.
pub fn span_dimension(vectors: &[Gf2Vector]) -> usize {
    let bits: Vec<u64> = vectors.iter().map(|v| v.bits).collect();
    reduce(&bits).len()
}
