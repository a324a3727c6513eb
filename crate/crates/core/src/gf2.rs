//! Dense, bit-packed linear algebra over GF(2).
//!
//! Rows are stored as `u64` words. All reductions pick the lowest available
//! column as pivot, so every derived basis is reproducible across runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters; any other character is skipped.
    pub fn parse(s: &str) -> Self {
        Self::from_bits(s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let t = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Restriction to the given coordinates, in order.
    pub fn select(&self, indices: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if self.get(i) {
                out.set(j, true);
            }
        }
        out
    }

    /// Scatters this vector into a vector of length `len`: coordinate `j`
    /// lands on `indices[j]`.
    pub fn scatter(&self, len: usize, indices: &[usize]) -> BitVector {
        assert_eq!(indices.len(), self.len);
        let mut out = BitVector::zeros(len);
        for j in self.iter_ones() {
            out.set(indices[j], true);
        }
        out
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Compares supports lexicographically: the vector whose first differing
    /// coordinate is set in `self` and not in `other` comes first.
    pub fn support_cmp(&self, other: &BitVector) -> std::cmp::Ordering {
        self.support().cmp(&other.support())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            len: usize,
            support: Vec<usize>,
        }
        Repr {
            len: self.len,
            support: self.support(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            len: usize,
            support: Vec<usize>,
        }
        let r = Repr::deserialize(d)?;
        if let Some(&bad) = r.support.iter().find(|&&i| i >= r.len) {
            return Err(serde::de::Error::custom(format!(
                "support index {bad} out of range for length {}",
                r.len
            )));
        }
        Ok(BitVector::from_support(r.len, &r.support))
    }
}

/// A row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Result of reducing a matrix to reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    /// Reduced matrix; nonzero rows first, one per pivot.
    pub reduced: BitMatrix,
    /// Pivot column of each nonzero row of `reduced`.
    pub pivots: Vec<usize>,
    /// Invertible matrix with `transform * original = reduced`.
    pub transform: BitMatrix,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the pivot rows. Returns the residual and the
    /// combination of pivot rows (indexed by pivot position) that was added.
    pub fn reduce(&self, v: &BitVector) -> (BitVector, BitVector) {
        let mut residual = v.clone();
        let mut combo = BitVector::zeros(self.pivots.len());
        for (i, &p) in self.pivots.iter().enumerate() {
            if residual.get(p) {
                residual.xor_assign(self.reduced.row(i));
                combo.set(i, true);
            }
        }
        (residual, combo)
    }

    /// Returns `x` with `x * original = b`, if it exists.
    pub fn solve_left(&self, b: &BitVector) -> Option<BitVector> {
        let (residual, combo) = self.reduce(b);
        if !residual.is_zero() {
            return None;
        }
        let mut x = BitVector::zeros(self.transform.cols());
        for i in combo.iter_ones() {
            x.xor_assign(self.transform.row(i));
        }
        Some(x)
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).0.is_zero()
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn empty(cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        BitMatrix { cols, rows }
    }

    pub fn from_supports(cols: usize, supports: &[Vec<usize>]) -> Self {
        BitMatrix {
            cols,
            rows: supports
                .iter()
                .map(|s| BitVector::from_support(cols, s))
                .collect(),
        }
    }

    /// Parses rows written as `0`/`1` strings.
    pub fn parse(rows: &[&str]) -> Self {
        let rows: Vec<BitVector> = rows.iter().map(|r| BitVector::parse(r)).collect();
        let cols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(cols, rows)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVector {
        &mut self.rows[i]
    }

    pub fn iter_rows(&self) -> std::slice::Iter<'_, BitVector> {
        self.rows.iter()
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(BitVector::support).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows(), "dimension mismatch in product");
        let rows = self
            .rows
            .iter()
            .map(|r| other.combine_rows(r))
            .collect();
        BitMatrix {
            cols: other.cols,
            rows,
        }
    }

    /// `self * other^T`, computed by row inner products.
    pub fn mul_transpose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "dimension mismatch in product");
        let rows = self
            .rows
            .iter()
            .map(|a| BitVector::from_bits(other.rows.iter().map(|b| a.dot(b))))
            .collect();
        BitMatrix {
            cols: other.rows(),
            rows,
        }
    }

    /// `self * v^T` as a vector over the rows (the syndrome of `v`).
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        BitVector::from_bits(self.rows.iter().map(|r| r.dot(v)))
    }

    /// `x * self`: the sum of the rows selected by `x`.
    pub fn combine_rows(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.rows(), "dimension mismatch");
        let mut out = BitVector::zeros(self.cols);
        for i in x.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        BitMatrix {
            cols: self.cols,
            rows,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows(), other.rows(), "row mismatch in hstack");
        BitMatrix {
            cols: self.cols + other.cols,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: cols.len(),
            rows: self.rows.iter().map(|r| r.select(cols)).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Column indices that are zero in every row.
    pub fn zero_columns(&self) -> Vec<usize> {
        let mut used = BitVector::zeros(self.cols);
        for r in &self.rows {
            for (a, b) in used.words.iter_mut().zip(&r.words) {
                *a |= b;
            }
        }
        (0..self.cols).filter(|&c| !used.get(c)).collect()
    }

    pub fn rref(&self) -> Rref {
        let n = self.rows();
        let mut rows = self.rows.clone();
        let mut transform: Vec<BitVector> = (0..n).map(|i| BitVector::unit(n, i)).collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == n {
                break;
            }
            let Some(p) = (next..n).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            transform.swap(next, p);
            for r in 0..n {
                if r != next && rows[r].get(col) {
                    let (src, dst) = split_pair(&mut rows, next, r);
                    dst.xor_assign(src);
                    let (src, dst) = split_pair(&mut transform, next, r);
                    dst.xor_assign(src);
                }
            }
            pivots.push(col);
            next += 1;
        }
        Rref {
            reduced: BitMatrix {
                cols: self.cols,
                rows,
            },
            pivots,
            transform: BitMatrix {
                cols: n,
                rows: transform,
            },
        }
    }

    /// Echelon reduction without a transform, for rank and row-space queries.
    fn echelon(&self) -> (Vec<BitVector>, Vec<usize>) {
        let mut rows: Vec<BitVector> = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        let n = rows.len();
        for col in 0..self.cols {
            if next == n {
                break;
            }
            let Some(p) = (next..n).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            for r in 0..n {
                if r != next && rows[r].get(col) {
                    let (src, dst) = split_pair(&mut rows, next, r);
                    dst.xor_assign(src);
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Reduced basis of the row space.
    pub fn rowspace_basis(&self) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: self.echelon().0,
        }
    }

    /// Basis of `{v : self * v^T = 0}`, one row per free column.
    pub fn kernel_basis(&self) -> BitMatrix {
        let (rows, pivots) = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(self.cols);
            v.set(free, true);
            for (row, &p) in rows.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix {
            cols: self.cols,
            rows: basis,
        }
    }

    /// Solves `x * self = b`.
    pub fn solve_left(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                found: b.len(),
            });
        }
        Ok(self.rref().solve_left(b))
    }

    pub fn in_rowspace(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                found: v.len(),
            });
        }
        let (rows, pivots) = self.echelon();
        let mut r = v.clone();
        for (row, &p) in rows.iter().zip(&pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        Ok(r.is_zero())
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows() != self.cols {
            return None;
        }
        let rref = self.rref();
        (rref.rank() == self.cols).then_some(rref.transform)
    }
}

/// Incrementally built echelon basis of a subspace.
///
/// Each stored row has its pivot (lowest set bit) cleared in every row
/// inserted after it, so reducing in insertion order is exact.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    cols: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        RowEchelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_matrix(m: &BitMatrix) -> Self {
        let mut e = Self::new(m.cols());
        for r in m.iter_rows() {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the subspace; returns `false` if it was already inside.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        let r = self.reduce(v);
        match r.first_one() {
            Some(p) => {
                self.rows.push(r);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }
}

fn split_pair<T>(v: &mut [T], src: usize, dst: usize) -> (&T, &mut T) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = v.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            supports: Vec<Vec<usize>>,
        }
        Repr {
            rows: self.rows(),
            cols: self.cols,
            supports: self.supports(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            supports: Vec<Vec<usize>>,
        }
        let r = Repr::deserialize(d)?;
        if r.supports.len() != r.rows {
            return Err(serde::de::Error::custom(format!(
                "declared {} rows but found {}",
                r.rows,
                r.supports.len()
            )));
        }
        for s in &r.supports {
            if let Some(&bad) = s.iter().find(|&&i| i >= r.cols) {
                return Err(serde::de::Error::custom(format!(
                    "column index {bad} out of range for {} columns",
                    r.cols
                )));
            }
        }
        Ok(BitMatrix::from_supports(r.cols, &r.supports))
    }
}
