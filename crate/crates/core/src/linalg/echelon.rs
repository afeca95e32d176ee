//! Column echelon forms over ℤ, kernels and sublattices of ℤⁿ.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sparse::{SparseIntMatrix, SparseVec};
use super::LinalgError;

/// Incremental column echelon reduction. Every stored pivot has a distinct
/// leading index and a positive leading entry. With `track` set, each vector
/// carries the combination of inserted columns that produced it.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, (SparseVec, SparseVec)>,
    track: bool,
    inserted: usize,
    kernel: Vec<SparseVec>,
}

impl Echelon {
    pub fn new(track: bool) -> Self {
        Echelon { pivots: BTreeMap::new(), track, inserted: 0, kernel: Vec::new() }
    }

    /// Inserts a vector. Returns true if it enlarged the span's rank.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let tag = if self.track { SparseVec::unit(self.inserted) } else { SparseVec::new() };
        self.inserted += 1;
        self.insert_tagged(v, tag)
    }

    fn insert_tagged(&mut self, mut v: SparseVec, mut t: SparseVec) -> bool {
        loop {
            let Some((i, b)) = v.leading().map(|(i, b)| (i, b.clone())) else {
                if self.track {
                    self.kernel.push(t);
                }
                return false;
            };
            let Some((p, tp)) = self.pivots.get(&i) else {
                if b.is_negative() {
                    v = v.neg();
                    t = t.neg();
                }
                self.pivots.insert(i, (v, t));
                return true;
            };
            let a = p.get(i);
            if a.divides(&b) {
                let f = -b.div_exact(&a);
                v = v.axpy(&f, p);
                if self.track {
                    t = t.axpy(&f, tp);
                }
            } else {
                let (g, s, u) = a.ext_gcd(&b);
                let (x, y) = (-b.div_exact(&g), a.div_exact(&g));
                let new_p = p.combine(&s, &u, &v);
                let new_v = p.combine(&x, &y, &v);
                let (new_tp, new_t) =
                    if self.track { (tp.combine(&s, &u, &t), tp.combine(&x, &y, &t)) } else { (SparseVec::new(), SparseVec::new()) };
                self.pivots.insert(i, (new_p, new_tp));
                v = new_v;
                t = new_t;
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel vectors found so far (only with tracking).
    pub fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    pub fn into_basis(self) -> Vec<SparseVec> {
        self.pivots.into_values().map(|(v, _)| v).collect()
    }
}

/// A sublattice of ℤⁿ held as an echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    basis: Vec<SparseVec>,
}

impl Lattice {
    pub fn from_generators<I: IntoIterator<Item = SparseVec>>(dim: usize, gens: I) -> Lattice {
        let mut e = Echelon::new(false);
        for g in gens {
            e.insert(g);
        }
        Lattice { dim, basis: e.into_basis() }
    }

    /// Wraps vectors whose leading indices are already distinct.
    pub fn from_echelon(dim: usize, mut basis: Vec<SparseVec>) -> Lattice {
        basis.retain(|v| !v.is_zero());
        basis.sort_by_key(|v| v.leading().map(|(i, _)| i));
        debug_assert!(basis.windows(2).all(|w| w[0].leading().unwrap().0 < w[1].leading().unwrap().0));
        Lattice { dim, basis }
    }

    pub fn full(dim: usize) -> Lattice {
        Lattice { dim, basis: (0..dim).map(SparseVec::unit).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn to_matrix(&self) -> SparseIntMatrix {
        SparseIntMatrix::from_columns(self.dim, self.basis.clone())
    }

    /// Coordinates of `v` in the basis.
    pub fn coordinates(&self, v: &SparseVec) -> Result<SparseVec, LinalgError> {
        let mut rest = v.clone();
        let mut coeffs = Vec::new();
        let mut k = 0;
        while let Some((i, b)) = rest.leading().map(|(i, b)| (i, b.clone())) {
            while k < self.basis.len() && self.basis[k].leading().unwrap().0 < i {
                k += 1;
            }
            let Some(p) = self.basis.get(k) else { return Err(LinalgError::NotInLattice) };
            let (li, a) = p.leading().unwrap();
            if li != i || !a.divides(&b) {
                return Err(LinalgError::NotInLattice);
            }
            let c = b.div_exact(a);
            rest = rest.axpy(&-&c, p);
            coeffs.push((k, c));
        }
        Ok(SparseVec::from_pairs(coeffs))
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.coordinates(v).is_ok()
    }

    /// Coordinates of every column of `m`.
    pub fn solve(&self, m: &SparseIntMatrix) -> Result<SparseIntMatrix, LinalgError> {
        let cols = m.columns().iter().map(|c| self.coordinates(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(SparseIntMatrix::from_columns(self.rank(), cols))
    }

    /// True when ℤⁿ / L is torsion-free.
    pub fn is_saturated(&self) -> bool {
        super::snf::elementary_divisors(&self.to_matrix()).iter().all(|d| d.is_unit())
    }
}

/// Saturated basis of `{x : Mx = 0}`.
pub fn integer_kernel(m: &SparseIntMatrix) -> SparseIntMatrix {
    let mut e = Echelon::new(true);
    for c in m.columns() {
        e.insert(c.clone());
    }
    let basis = Lattice::from_generators(m.ncols(), e.kernel.iter().cloned());
    basis.to_matrix()
}

/// Basis of `{x : Mx ∈ colspan(S)}`. The result is saturated exactly when
/// `colspan(S)` is.
pub fn relative_kernel(m: &SparseIntMatrix, s: &SparseIntMatrix) -> Result<SparseIntMatrix, LinalgError> {
    let stacked = m.hstack(&s.neg())?;
    let n = m.ncols();
    let k = integer_kernel(&stacked);
    let gens = k.columns().iter().map(|c| c.remap(|i| (i < n).then_some(i)));
    Ok(Lattice::from_generators(n, gens).to_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(m: &SparseIntMatrix, j: usize) -> Vec<i64> {
        (0..m.nrows()).map(|i| m.get(i, j).to_i64().unwrap()).collect()
    }

    #[test]
    fn kernel_examples() {
        let k = integer_kernel(&SparseIntMatrix::from_dense(&[vec![1, 1]]));
        assert_eq!(k.ncols(), 1);
        let v = col(&k, 0);
        assert!(v == vec![1, -1] || v == vec![-1, 1]);
        assert_eq!(integer_kernel(&SparseIntMatrix::identity(3)).ncols(), 0);
        let k = integer_kernel(&SparseIntMatrix::from_dense(&[vec![2, 4]]));
        let v = col(&k, 0);
        assert!(v == vec![2, -1] || v == vec![-2, 1]);
    }

    #[test]
    fn relative_kernel_examples() {
        let id = SparseIntMatrix::identity(2);
        let all = relative_kernel(&id, &SparseIntMatrix::identity(2)).unwrap();
        assert_eq!(all.ncols(), 2);
        assert_eq!(relative_kernel(&id, &SparseIntMatrix::zeros(2, 1)).unwrap().ncols(), 0);
        let s = SparseIntMatrix::from_dense(&[vec![2], vec![0]]);
        let r = relative_kernel(&id, &s).unwrap();
        assert_eq!(r.ncols(), 1);
        assert_eq!(col(&r, 0), vec![2, 0]);
    }

    #[test]
    fn coordinates_roundtrip() {
        let l = Lattice::from_generators(3, [SparseVec::from_dense(&[2, 1, 0]), SparseVec::from_dense(&[0, 3, 3])]);
        let v = SparseVec::from_dense(&[4, 5, 3]);
        let c = l.coordinates(&v).unwrap();
        assert_eq!(l.to_matrix().mul_vec(&c), v);
        assert!(!l.contains(&SparseVec::from_dense(&[1, 0, 0])));
        assert!(!l.is_saturated());
    }
}
