use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::int::Int;
use super::LinalgError;

/// Sparse integer vector: entries sorted by index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseVec {
    entries: Vec<(usize, Int)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(index: usize) -> Self {
        SparseVec { entries: vec![(index, Int::ONE)] }
    }

    /// Builds a vector from unsorted pairs, summing duplicates and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Int)>>(pairs: I) -> Self {
        let mut map: BTreeMap<usize, Int> = BTreeMap::new();
        for (i, v) in pairs {
            let e = map.entry(i).or_insert(Int::ZERO);
            *e = &*e + &v;
        }
        SparseVec { entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(values: &[i64]) -> Self {
        SparseVec { entries: values.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, Int::from(*v))).collect() }
    }

    pub fn entries(&self) -> &[(usize, Int)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Int)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Int)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn leading(&self) -> Option<(usize, &Int)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, index: usize) -> Int {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(p) => self.entries[p].1.clone(),
            Err(_) => Int::ZERO,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: &Int, other: &SparseVec) -> SparseVec {
        if factor.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, va)), Some((ib, vb))) => {
                    if ia < ib {
                        out.push((*ia, va.clone()));
                        a.next();
                    } else if ib < ia {
                        out.push((*ib, factor * vb));
                        b.next();
                    } else {
                        let s = va + &(factor * vb);
                        if !s.is_zero() {
                            out.push((*ia, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((ia, va)), None) => {
                    out.push((*ia, va.clone()));
                    a.next();
                }
                (None, Some((ib, vb))) => {
                    out.push((*ib, factor * vb));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    /// `alpha * self + beta * other`
    pub fn combine(&self, alpha: &Int, beta: &Int, other: &SparseVec) -> SparseVec {
        self.scale(alpha).axpy(beta, other)
    }

    pub fn scale(&self, factor: &Int) -> SparseVec {
        if factor.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, v * factor)).collect() }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect() }
    }

    pub fn dot(&self, other: &SparseVec) -> Int {
        let mut acc = Int::ZERO;
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (ia, ib) = (self.entries[a].0, other.entries[b].0);
            if ia == ib {
                acc = &acc + &(&self.entries[a].1 * &other.entries[b].1);
                a += 1;
                b += 1;
            } else if ia < ib {
                a += 1;
            } else {
                b += 1;
            }
        }
        acc
    }

    /// Keeps only indices accepted by `f`, renumbering them through it.
    pub fn remap<F: Fn(usize) -> Option<usize>>(&self, f: F) -> SparseVec {
        let mut entries: Vec<(usize, Int)> = self.entries.iter().filter_map(|(i, v)| f(*i).map(|j| (j, v.clone()))).collect();
        entries.sort_by_key(|(i, _)| *i);
        SparseVec { entries }
    }

    pub fn reduce_mod(&self, m: &Int) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, v.mod_floor(m))).filter(|(_, v)| !v.is_zero()).collect() }
    }
}

/// Sparse integer matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: Vec<SparseVec>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseIntMatrix { rows: n, cols: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.max_index().is_none_or(|m| m < rows)));
        SparseIntMatrix { rows, cols }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let cols = (0..c).map(|j| SparseVec::from_pairs((0..r).filter(|&i| rows[i][j] != 0).map(|i| (i, Int::from(rows[i][j]))))).collect();
        SparseIntMatrix { rows: r, cols }
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, Int)]) -> Result<Self, LinalgError> {
        let mut buckets: Vec<Vec<(usize, Int)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            if *r >= rows || *c >= cols {
                return Err(LinalgError::IndexOutOfBounds { row: *r, col: *c, rows, cols });
            }
            buckets[*c].push((*r, v.clone()));
        }
        Ok(SparseIntMatrix { rows, cols: buckets.into_iter().map(SparseVec::from_pairs).collect() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<SparseVec> {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Int {
        self.cols[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Int)> {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(i, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Int>> {
        let mut out = vec![vec![Int::ZERO; self.ncols()]; self.rows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut buckets: Vec<Vec<(usize, Int)>> = vec![Vec::new(); self.rows];
        for (i, j, v) in self.triplets() {
            buckets[i].push((j, v.clone()));
        }
        SparseIntMatrix { rows: self.ncols(), cols: buckets.into_iter().map(SparseVec::from_pairs).collect() }
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        for (j, v) in x.iter() {
            acc = acc.axpy(v, &self.cols[j]);
        }
        acc
    }

    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix, LinalgError> {
        if self.ncols() != other.nrows() {
            return Err(LinalgError::DimensionMismatch {
                context: "matrix product",
                left: (self.rows, self.ncols()),
                right: (other.rows, other.ncols()),
            });
        }
        Ok(SparseIntMatrix { rows: self.rows, cols: other.cols.iter().map(|c| self.mul_vec(c)).collect() })
    }

    /// Submatrix on the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseIntMatrix {
        let mut row_map = vec![usize::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            row_map[r] = k;
        }
        let cols = cols.iter().map(|&c| self.cols[c].remap(|i| (row_map[i] != usize::MAX).then(|| row_map[i]))).collect();
        SparseIntMatrix { rows: rows.len(), cols }
    }

    pub fn hstack(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                context: "horizontal stack",
                left: (self.rows, self.ncols()),
                right: (other.rows, other.ncols()),
            });
        }
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Ok(SparseIntMatrix { rows: self.rows, cols })
    }

    pub fn neg(&self) -> SparseIntMatrix {
        SparseIntMatrix { rows: self.rows, cols: self.cols.iter().map(|c| c.neg()).collect() }
    }

    pub fn reduce_mod(&self, m: &Int) -> SparseIntMatrix {
        SparseIntMatrix { rows: self.rows, cols: self.cols.iter().map(|c| c.reduce_mod(m)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_cancels() {
        let a = SparseVec::from_dense(&[1, 2, 0, 3]);
        let b = SparseVec::from_dense(&[1, 0, 5, 3]);
        let c = a.axpy(&Int::from(-1), &b);
        assert_eq!(c, SparseVec::from_dense(&[0, 2, -5, 0]));
        assert_eq!(a.dot(&b), Int::from(10));
    }

    #[test]
    fn product_and_transpose() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 2], vec![0, 3]]);
        let t = m.transpose();
        assert_eq!(t.to_dense()[1][0], Int::from(2));
        let p = m.mul(&t).unwrap();
        assert_eq!(p, SparseIntMatrix::from_dense(&[vec![5, 6], vec![6, 9]]));
        assert!(m.mul(&SparseIntMatrix::zeros(3, 1)).is_err());
    }
}
