//! Homology of complexes of `ℤ/m`-modules that are submodules of free ones.
//!
//! Degree `k` is the image in `(ℤ/m)^{a_k}` of the columns of `spans[k]`
//! (integer vectors; the submodule always contains `m·ℤ^{a_k}` implicitly).
//! `images[k]` holds the differential of each spanning column, again as
//! integer vectors in the ambient coordinates of the target degree.

use super::echelon::{relative_kernel, Lattice};
use super::field::{rank_mod_p, reduce, FpEchelon, FpHomologyBasis, FpVec};
use super::homology::{from_mod_orders, AbelianGroup, CoefficientRing};
use super::snf::elementary_divisors;
use super::{Int, LinalgError, SparseIntMatrix, SparseVec};

#[derive(Clone, Debug)]
pub struct ModularComplex {
    pub modulus: u64,
    pub lo: i64,
    pub cohomological: bool,
    pub spans: Vec<SparseIntMatrix>,
    pub images: Vec<SparseIntMatrix>,
}

impl ModularComplex {
    pub fn new(
        modulus: u64,
        lo: i64,
        cohomological: bool,
        spans: Vec<SparseIntMatrix>,
        images: Vec<SparseIntMatrix>,
    ) -> Result<Self, LinalgError> {
        if modulus < 2 {
            return Err(LinalgError::InvalidRing(format!("Z/{modulus}")));
        }
        let c = ModularComplex { modulus, lo, cohomological, spans, images };
        for (i, (s, d)) in c.spans.iter().zip(&c.images).enumerate() {
            let target = c.ambient(c.target(lo + i as i64));
            if s.ncols() != d.ncols() || d.nrows() != target {
                return Err(LinalgError::DimensionMismatch {
                    context: "modular complex",
                    left: (s.nrows(), s.ncols()),
                    right: (d.nrows(), d.ncols()),
                });
            }
        }
        Ok(c)
    }

    fn index(&self, k: i64) -> Option<usize> {
        (k >= self.lo && k < self.lo + self.spans.len() as i64).then(|| (k - self.lo) as usize)
    }

    fn target(&self, k: i64) -> i64 {
        if self.cohomological {
            k + 1
        } else {
            k - 1
        }
    }

    fn source(&self, k: i64) -> i64 {
        if self.cohomological {
            k - 1
        } else {
            k + 1
        }
    }

    pub fn degrees(&self) -> std::ops::Range<i64> {
        self.lo..self.lo + self.spans.len() as i64
    }

    fn ambient(&self, k: i64) -> usize {
        self.index(k).map_or(0, |i| self.spans[i].nrows())
    }

    fn span(&self, k: i64) -> SparseIntMatrix {
        self.index(k).map_or_else(|| SparseIntMatrix::zeros(0, 0), |i| self.spans[i].clone())
    }

    fn image(&self, k: i64) -> SparseIntMatrix {
        let rows = self.ambient(self.target(k));
        self.index(k).map_or_else(|| SparseIntMatrix::zeros(rows, 0), |i| self.images[i].clone())
    }

    /// Homology in degree `k`, in the module category of `ℤ/m`.
    pub fn homology(&self, k: i64) -> AbelianGroup {
        let m = Int::from(self.modulus as i64);
        let ring = CoefficientRing::Mod(self.modulus);
        if ring.is_field() {
            let p = self.modulus;
            let h = rank_mod_p(&self.span(k), p) - rank_mod_p(&self.image(k), p) - rank_mod_p(&self.image(self.source(k)), p);
            return AbelianGroup::new(h, Vec::new()).tensor(ring);
        }
        let amb = self.ambient(k);
        let span = self.span(k);
        let out = self.image(k);
        let target = out.nrows();
        // Cycles: {x ∈ span : dx ≡ 0}, plus m·ℤ^amb.
        let coeffs = relative_kernel(&out, &scalar(target, &m)).expect("shapes agree");
        let mut gens: Vec<SparseVec> = coeffs.columns().iter().map(|c| span.mul_vec(c)).collect();
        gens.extend(scalar(amb, &m).into_columns());
        let cycles = Lattice::from_generators(amb, gens);
        let mut bounds = self.image(self.source(k)).into_columns();
        bounds.extend(scalar(amb, &m).into_columns());
        let b = SparseIntMatrix::from_columns(amb, bounds);
        let b = cycles.solve(&b).expect("boundaries are cycles");
        let mut orders: Vec<Int> = elementary_divisors(&b);
        orders.resize(cycles.rank(), Int::ZERO);
        from_mod_orders(orders, &m)
    }

    /// Basis of `H_k` in ambient coordinates when the modulus is prime.
    pub fn fp_homology_basis(&self, k: i64) -> Option<FpHomologyBasis> {
        let p = self.modulus;
        if !CoefficientRing::Mod(p).is_field() {
            return None;
        }
        let span = self.span(k);
        let mut e = FpEchelon::new(p);
        for col in self.image(k).columns() {
            e.insert(reduce(col, p));
        }
        let cycles: Vec<FpVec> = e
            .kernel()
            .iter()
            .map(|t| {
                let combo = SparseVec::from_pairs(t.iter().map(|&(i, x)| (i, Int::from(x as i64))));
                reduce(&span.mul_vec(&combo), p)
            })
            .collect();
        let boundaries = self.image(self.source(k)).columns().iter().map(|c| reduce(c, p)).collect();
        Some(FpHomologyBasis::from_parts(p, cycles, boundaries))
    }

    pub fn homology_all(&self) -> Vec<(i64, AbelianGroup)> {
        self.degrees().map(|k| (k, self.homology(k))).collect()
    }
}

fn scalar(n: usize, m: &Int) -> SparseIntMatrix {
    SparseIntMatrix::from_columns(n, (0..n).map(|i| SparseVec::from_pairs([(i, m.clone())])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_mod_four() {
        let d1 = SparseIntMatrix::from_dense(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        let c = ModularComplex::new(
            4,
            0,
            false,
            vec![SparseIntMatrix::identity(3), SparseIntMatrix::identity(3)],
            vec![SparseIntMatrix::zeros(0, 3), d1],
        )
        .unwrap();
        let h: Vec<_> = c.homology_all().into_iter().map(|(_, g)| g).collect();
        assert_eq!(h, vec![AbelianGroup::free(1), AbelianGroup::free(1)]);
    }

    #[test]
    fn submodule_of_index_two() {
        // ℤ/4 ⊃ 2ℤ/4 ≅ ℤ/2 with zero differential.
        let c =
            ModularComplex::new(4, 0, false, vec![SparseIntMatrix::from_dense(&[vec![2]])], vec![SparseIntMatrix::zeros(0, 1)]).unwrap();
        assert_eq!(c.homology(0), AbelianGroup::new(0, vec![Int::from(2)]));
        let c2 =
            ModularComplex::new(3, 0, false, vec![SparseIntMatrix::from_dense(&[vec![3]])], vec![SparseIntMatrix::zeros(0, 1)]).unwrap();
        assert_eq!(c2.homology(0), AbelianGroup::zero());
    }
}
