//! Tame intersection chains, intersection homology and its Borel–Moore
//! version.

mod bm;

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{ComplexError, FilteredComplex, Perversity, Simplex};
use crate::linalg::field::{kernel_over, rank_over};
use crate::linalg::{AbelianGroup, ChainComplex, CoefficientRing, Int, Lattice, LinalgError, ModularComplex, SparseIntMatrix, SparseVec};
use crate::perverse::{constrained_basis, image_in, Basis};

pub use bm::{borel_moore_ih, max_subdivision_depth, origin_by_id, pull_back, subdivide_around, BorelMooreResult, OpenModel};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Borel-Moore groups did not stabilize up to subdivision depth {depth}")]
    Unstable { depth: usize },
}

/// `𝔡σ`: the simplicial boundary in level-sorted order, without the faces
/// that miss the regular part.
pub fn tame_boundary(fc: &FilteredComplex, s: &[u32]) -> Vec<(Simplex, i64)> {
    if s.len() < 2 {
        return Vec::new();
    }
    (0..s.len())
        .filter_map(|i| {
            let mut f = s.to_vec();
            f.remove(i);
            fc.is_regular(&f).then_some((f, if i % 2 == 0 { 1 } else { -1 }))
        })
        .collect()
}

/// `‖σ‖_i = dim σ⁻¹X_{n-i}` for `i = 0..=n`, with `None` for `-∞`.
pub fn perverse_degree(fc: &FilteredComplex, s: &[u32]) -> Vec<Option<i64>> {
    let n = fc.dim();
    (0..=n)
        .map(|i| {
            let c = fc.count_up_to(s, n - i);
            (c > 0).then(|| c as i64 - 1)
        })
        .collect()
}

/// `‖σ‖_S`: `-∞` unless `σ` meets `S`, else `‖σ‖_{codim S}`.
pub fn perverse_degree_along(fc: &FilteredComplex, s: &[u32], stratum: usize) -> Option<i64> {
    let st = &fc.strata()[stratum];
    if fc.stratum_met(s, st.level) != Some(stratum) {
        return None;
    }
    Some(fc.count_up_to(s, st.level) as i64 - 1)
}

/// `‖σ‖_S ≤ dim σ - codim S + p̄(S)` for every singular stratum `S`.
pub fn is_allowable(fc: &FilteredComplex, s: &[u32], p: &Perversity) -> bool {
    let n = fc.dim();
    let k = s.len() as i64 - 1;
    let mut start = 0;
    while start < s.len() {
        let j = fc.level(s[start]);
        let mut end = start;
        while end < s.len() && fc.level(s[end]) == j {
            end += 1;
        }
        if j < n {
            let stratum = fc.stratum_of_vertex(s[start]);
            let norm = end as i64 - 1;
            if norm > k - (n - j) as i64 + p.value(stratum) {
                return false;
            }
        }
        start = end;
    }
    true
}

/// Allowable regular simplices of one degree, in a fixed order.
pub type SimplexBasis = Basis<Simplex>;

/// A presentation of `C^p̄_*(X)` or of `C^p̄_*(X)/C^p̄_*(N)`.
///
/// In degree `k` the chains live in the free module on `coords[k]` (allowable
/// regular `k`-simplices outside `N`) and form the lattice `lattices[k]`.
/// `complex` is the induced chain complex in lattice coordinates.
#[derive(Clone, Debug)]
pub struct IntersectionComplex {
    pub coords: Vec<SimplexBasis>,
    pub lattices: Vec<Lattice>,
    pub complex: ChainComplex,
}

impl IntersectionComplex {
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Chain in simplex coordinates of a lattice-coordinate vector.
    pub fn chain(&self, k: usize, x: &SparseVec) -> SparseVec {
        self.lattices[k].to_matrix().mul_vec(x)
    }

    /// Lattice coordinates of a chain given in simplex coordinates.
    pub fn lattice_coords(&self, k: usize, chain: &SparseVec) -> Result<SparseVec, LinalgError> {
        self.lattices[k].coordinates(chain)
    }

    /// Homology of this integral complex with coefficients by universal
    /// coefficients. For `ℤ/m`-chains use [`perverse_homology`].
    pub fn homology(&self, ring: CoefficientRing) -> Vec<AbelianGroup> {
        self.complex.homology_all(ring).into_iter().map(|(_, g)| g).collect()
    }
}

/// Allowable regular `k`-simplices, for `k = 0..=n`.
pub fn allowable_simplices(fc: &FilteredComplex, p: &Perversity) -> Vec<Vec<Simplex>> {
    (0..=fc.dim()).map(|k| fc.simplices(k).iter().filter(|s| fc.is_regular(s) && is_allowable(fc, s, p)).cloned().collect()).collect()
}

/// Basis of `C^p̄_k` inside the free module on allowable `k`-simplices.
fn absolute_basis(fc: &FilteredComplex, p: &Perversity, allowable: &[Vec<Simplex>], k: usize, modulus: Option<&Int>) -> Vec<SparseVec> {
    let below: HashSet<&Simplex> = if k > 0 { allowable[k - 1].iter().collect() } else { HashSet::new() };
    constrained_basis(
        &allowable[k],
        |s| tame_boundary(fc, s),
        |f| {
            debug_assert!(below.contains(f) || !is_allowable(fc, f, p));
            below.contains(f)
        },
        modulus,
    )
}

/// Coordinates, lattices and boundary images (in coordinates of the degree
/// below) of the allowable chains relative to `N`.
type Presentation = (Vec<SimplexBasis>, Vec<Lattice>, Vec<SparseIntMatrix>);

fn presentation(fc: &FilteredComplex, p: &Perversity, n_simplices: &[Simplex], modulus: Option<&Int>) -> Result<Presentation, ChainError> {
    let n = fc.dim();
    let allowable = allowable_simplices(fc, p);
    let in_n: HashSet<Simplex> = faces_closure(n_simplices);
    for s in n_simplices {
        if !fc.contains(s) {
            return Err(ComplexError::NotSubcomplex(fc.describe(s)).into());
        }
    }
    let full: Vec<SimplexBasis> = allowable.iter().map(|a| SimplexBasis::new(a.clone())).collect();
    let coords: Vec<SimplexBasis> =
        allowable.iter().map(|a| SimplexBasis::new(a.iter().filter(|s| !in_n.contains(*s)).cloned().collect())).collect();
    let lattices: Vec<Lattice> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let basis = absolute_basis(fc, p, &allowable, k, modulus);
            if in_n.is_empty() {
                Lattice::from_echelon(full[k].len(), basis)
            } else {
                let to = &coords[k];
                let projected = basis.iter().map(|v| v.remap(|i| to.index(&full[k].items[i])));
                Lattice::from_generators(to.len(), projected)
            }
        })
        .collect();
    let mut images = vec![SparseIntMatrix::zeros(0, lattices[0].rank())];
    for k in 1..=n {
        let from = &coords[k];
        let to = &coords[k - 1];
        let cols = lattices[k]
            .basis()
            .par_iter()
            .map(|v| image_in(v, from, to, |s| tame_boundary(fc, s), |f| in_n.contains(f), modulus))
            .collect::<Result<Vec<_>, _>>()?;
        images.push(SparseIntMatrix::from_columns(to.len(), cols));
    }
    Ok((coords, lattices, images))
}

/// `C^p̄_*(X)` when `n_simplices` is empty, else `C^p̄_*(X)/C^p̄_*(N)` for the
/// subcomplex `N` generated by `n_simplices`.
pub fn relative_intersection_complex(
    fc: &FilteredComplex,
    p: &Perversity,
    n_simplices: &[Simplex],
) -> Result<IntersectionComplex, ChainError> {
    let (coords, lattices, images) = presentation(fc, p, n_simplices, None)?;
    let mut diffs = vec![images[0].clone()];
    for k in 1..images.len() {
        diffs.push(lattices[k - 1].solve(&images[k])?);
    }
    let dims = lattices.iter().map(|l| l.rank()).collect();
    let complex = ChainComplex::homological(0, dims, diffs)?;
    Ok(IntersectionComplex { coords, lattices, complex })
}

/// `C^p̄_*(X; ℤ/m)`, relative to `N` as above, built from `ℤ/m`-chains,
/// with the simplex coordinates of each degree.
pub fn modular_intersection_complex(
    fc: &FilteredComplex,
    p: &Perversity,
    n_simplices: &[Simplex],
    m: u64,
) -> Result<(Vec<SimplexBasis>, ModularComplex), ChainError> {
    let (coords, lattices, images) = presentation(fc, p, n_simplices, Some(&Int::from(m as i64)))?;
    let spans = lattices.iter().map(|l| l.to_matrix()).collect();
    Ok((coords, ModularComplex::new(m, 0, false, spans, images)?))
}

/// `𝕳^p̄_*(X, N; R)`: integral chains for `ℤ` and `ℚ`, `ℤ/m`-chains for `ℤ/m`.
pub fn perverse_homology(
    fc: &FilteredComplex,
    p: &Perversity,
    n_simplices: &[Simplex],
    ring: CoefficientRing,
) -> Result<Vec<AbelianGroup>, ChainError> {
    Ok(match ring {
        CoefficientRing::Mod(m) => {
            modular_intersection_complex(fc, p, n_simplices, m)?.1.homology_all().into_iter().map(|(_, g)| g).collect()
        }
        _ => relative_intersection_complex(fc, p, n_simplices)?.homology(ring),
    })
}

/// Cycles and boundaries of `C^p̄_*(X, N) ⊗ F` for `F = ℚ` (`p = 0`) or
/// `𝔽_p`, as integral lifts in simplex coordinates. For `𝔽_p` the chains are
/// the `ℤ/p`-chains, not the reduction of the integral ones.
#[derive(Clone, Debug)]
pub struct FieldChains {
    pub p: u64,
    pub coords: Vec<SimplexBasis>,
    pub cycles: Vec<Vec<SparseVec>>,
    pub boundaries: Vec<Vec<SparseVec>>,
}

impl FieldChains {
    pub fn new(fc: &FilteredComplex, p: &Perversity, n_simplices: &[Simplex], ring: CoefficientRing) -> Result<FieldChains, ChainError> {
        if !ring.is_field() {
            return Err(ChainError::Linalg(LinalgError::InvalidRing(ring.to_string())));
        }
        let q = ring.characteristic();
        let modulus = (q > 0).then(|| Int::from(q as i64));
        let (coords, lattices, images) = presentation(fc, p, n_simplices, modulus.as_ref())?;
        let n = coords.len();
        let cycles = (0..n)
            .map(|k| {
                let span = lattices[k].to_matrix();
                kernel_over(&images[k], q).iter().map(|t| span.mul_vec(t)).collect()
            })
            .collect();
        let boundaries = (0..n).map(|k| if k + 1 < n { images[k + 1].columns().to_vec() } else { Vec::new() }).collect();
        Ok(FieldChains { p: q, coords, cycles, boundaries })
    }

    pub fn dim(&self, k: usize) -> usize {
        rank_over(self.cycles[k].iter().chain(&self.boundaries[k]), self.p) - rank_over(&self.boundaries[k], self.p)
    }
}

pub(crate) fn faces_closure(simplices: &[Simplex]) -> HashSet<Simplex> {
    let mut out = HashSet::new();
    for s in simplices {
        let m = s.len();
        for mask in 1u32..(1u32 << m) {
            out.insert((0..m).filter(|&i| mask & (1 << i) != 0).map(|i| s[i]).collect::<Simplex>());
        }
    }
    out
}

pub fn intersection_complex(fc: &FilteredComplex, p: &Perversity) -> Result<IntersectionComplex, ChainError> {
    relative_intersection_complex(fc, p, &[])
}

/// `𝕳^p̄_k(X; R)` for `k = 0..=n`.
pub fn intersection_homology(fc: &FilteredComplex, p: &Perversity, ring: CoefficientRing) -> Result<Vec<AbelianGroup>, ChainError> {
    perverse_homology(fc, p, &[], ring)
}

/// Homology of `C^p̄_*(X)/C^p̄_*(N)` for a subcomplex `N` given by vertex ids.
pub fn relative_intersection_homology(
    fc: &FilteredComplex,
    sub: &FilteredComplex,
    p: &Perversity,
    ring: CoefficientRing,
) -> Result<Vec<AbelianGroup>, ChainError> {
    let simplices = fc.subcomplex_simplices(sub)?;
    perverse_homology(fc, p, &simplices, ring)
}

/// Simplices of the closed star of a vertex set.
pub fn closed_star(fc: &FilteredComplex, a: &BTreeSet<u32>) -> Vec<Simplex> {
    fc.closed_star(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::PerversitySpec;

    fn cone_two_points() -> FilteredComplex {
        FilteredComplex::new(
            "c2",
            1,
            vec![("v".into(), 0), ("a".into(), 1), ("b".into(), 1)],
            vec![vec!["v".into(), "a".into()], vec!["v".into(), "b".into()]],
        )
        .unwrap()
    }

    #[test]
    fn tame_boundary_drops_singular_faces() {
        let c = cone_two_points();
        assert_eq!(tame_boundary(&c, &[0, 1]), vec![(vec![1], 1)]);
    }

    #[test]
    fn allowability_examples() {
        let c = cone_two_points();
        let zero = c.make_perversity(&PerversitySpec::Zero).unwrap();
        let minus = c.make_perversity(&PerversitySpec::Constant(-1)).unwrap();
        assert!(is_allowable(&c, &[0, 1], &zero));
        assert!(!is_allowable(&c, &[0, 1], &minus));
        assert_eq!(perverse_degree_along(&c, &[0, 1], 0), Some(0));
        assert_eq!(perverse_degree_along(&c, &[1], 0), None);
        assert_eq!(perverse_degree(&c, &[0, 1]), vec![Some(1), Some(0)]);
    }

    #[test]
    fn cone_on_two_points_homology() {
        let c = cone_two_points();
        let zero = c.make_perversity(&PerversitySpec::Zero).unwrap();
        let h = intersection_homology(&c, &zero, CoefficientRing::Integers).unwrap();
        assert_eq!(h, vec![AbelianGroup::zero(), AbelianGroup::zero()]);
        let minus = c.make_perversity(&PerversitySpec::Constant(-1)).unwrap();
        let h = intersection_homology(&c, &minus, CoefficientRing::Integers).unwrap();
        assert_eq!(h, vec![AbelianGroup::free(2), AbelianGroup::zero()]);
    }
}
