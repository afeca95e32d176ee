//! Ordinary simplicial (co)homology, used as an independent reference for
//! manifold links.

use crate::complex::{facets_of, FilteredComplex};
use crate::linalg::{AbelianGroup, ChainComplex, CoefficientRing, Int, SparseIntMatrix, SparseVec};

fn boundaries(fc: &FilteredComplex) -> (Vec<usize>, Vec<SparseIntMatrix>) {
    let top = fc.top_dim();
    let dims: Vec<usize> = (0..=top).map(|k| fc.simplices(k).len()).collect();
    let mut mats = vec![SparseIntMatrix::zeros(0, dims[0])];
    for k in 1..=top {
        let cols = fc
            .simplices(k)
            .iter()
            .map(|s| {
                SparseVec::from_pairs(facets_of(s).map(|(i, f)| {
                    let row = fc.simplex_index(&f).expect("faces are simplices");
                    (row, Int::from(if i % 2 == 0 { 1 } else { -1 }))
                }))
            })
            .collect();
        mats.push(SparseIntMatrix::from_columns(dims[k - 1], cols));
    }
    (dims, mats)
}

/// `H_k(|X|; R)` of the underlying simplicial complex, ignoring the filtration.
pub fn simplicial_homology(fc: &FilteredComplex, ring: CoefficientRing) -> Vec<AbelianGroup> {
    let (dims, mats) = boundaries(fc);
    let c = ChainComplex::homological(0, dims, mats).expect("simplicial boundary squares to zero");
    c.homology_all(ring).into_iter().map(|(_, g)| g).collect()
}

/// `H^k(|X|; R)` of the underlying simplicial complex.
pub fn simplicial_cohomology(fc: &FilteredComplex, ring: CoefficientRing) -> Vec<AbelianGroup> {
    let (dims, mats) = boundaries(fc);
    let n = dims.len();
    let d = (0..n).map(|k| if k + 1 < n { mats[k + 1].transpose() } else { SparseIntMatrix::zeros(0, dims[k]) }).collect();
    let c = ChainComplex::cohomological(0, dims, d).expect("simplicial coboundary squares to zero");
    c.homology_all(ring).into_iter().map(|(_, g)| g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::base;

    #[test]
    fn projective_spaces() {
        let z = CoefficientRing::Integers;
        let g = |s: &str| AbelianGroup::parse(s).unwrap();
        assert_eq!(simplicial_homology(&base("rp2").unwrap(), z), vec![g("Z"), g("Z/2"), g("0")]);
        assert_eq!(simplicial_cohomology(&base("rp2").unwrap(), z), vec![g("Z"), g("0"), g("Z/2")]);
        assert_eq!(simplicial_cohomology(&base("rp3").unwrap(), z), vec![g("Z"), g("0"), g("Z/2"), g("Z")]);
        let f2 = CoefficientRing::Mod(2);
        assert!(simplicial_cohomology(&base("rp3").unwrap(), f2).iter().all(|x| x.rank == 1 || !x.torsion.is_empty()));
    }
}
