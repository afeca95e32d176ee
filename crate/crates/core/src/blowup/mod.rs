//! Blown-up cochains and blown-up intersection cohomology.
//!
//! A regular simplex `σ = σ_0 * ... * σ_n` blows up to
//! `cσ_0 × ... × cσ_{n-1} × σ_n`. A compatible family of cochains on these
//! blow-ups is the same as a function on the cells `(F, ε)`: a regular simplex
//! `F` of `X` together with a flag `ε_i` for every singular level, where
//! `ε_i = 1` means the cell is the cone `v_i * F_i` (forced when `F_i = ∅`)
//! and `ε_i = 0` means the face `F_i` itself.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{intersection_complex, intersection_homology, ChainError};
use crate::complex::{FilteredComplex, Perversity, Simplex};
use crate::linalg::{AbelianGroup, ChainComplex, CoefficientRing, Int, Lattice, ModularComplex, SparseIntMatrix, SparseVec};
use crate::perverse::{constrained_basis, image_in, Basis};

/// `1_{(F, ε)}`. Bit `i` of `cone` is `ε_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlowupCell {
    pub simplex: Simplex,
    pub cone: u64,
}

impl BlowupCell {
    pub fn eps(&self, i: usize) -> bool {
        self.cone >> i & 1 == 1
    }
}

/// Cells of the blow-up of a filtered complex with their coboundary.
#[derive(Clone, Debug)]
pub struct BlowupComplex<'a> {
    fc: &'a FilteredComplex,
    cofacets: HashMap<Simplex, Vec<u32>>,
    /// Cells by degree `0..=n`.
    pub cells: Vec<Basis<BlowupCell>>,
}

impl<'a> BlowupComplex<'a> {
    pub fn new(fc: &'a FilteredComplex) -> Self {
        let n = fc.dim();
        assert!(n < 64, "at most 63 singular levels");
        let mut cofacets: HashMap<Simplex, Vec<u32>> = HashMap::new();
        for k in 1..=fc.top_dim() {
            for s in fc.simplices(k) {
                if !fc.is_regular(s) {
                    continue;
                }
                for i in 0..s.len() {
                    let mut f = s.clone();
                    let w = f.remove(i);
                    if fc.is_regular(&f) {
                        cofacets.entry(f).or_default().push(w);
                    }
                }
            }
        }
        let mut by_degree: Vec<Vec<BlowupCell>> = vec![Vec::new(); n + 1];
        for k in 0..=fc.top_dim() {
            for s in fc.simplices(k).iter().filter(|s| fc.is_regular(s)) {
                let counts = level_counts(fc, s);
                let free: Vec<usize> = (0..n).filter(|&i| counts[i] > 0).collect();
                let forced: u64 = (0..n).filter(|&i| counts[i] == 0).fold(0, |m, i| m | 1 << i);
                for sub in 0u64..(1 << free.len()) {
                    let mut cone = forced;
                    for (b, &i) in free.iter().enumerate() {
                        if sub >> b & 1 == 1 {
                            cone |= 1 << i;
                        }
                    }
                    let cell = BlowupCell { simplex: s.clone(), cone };
                    by_degree[cell_degree(fc, &cell)].push(cell);
                }
            }
        }
        let cells = by_degree
            .into_iter()
            .map(|mut v| {
                v.sort();
                Basis::new(v)
            })
            .collect();
        BlowupComplex { fc, cofacets, cells }
    }

    pub fn complex(&self) -> &FilteredComplex {
        self.fc
    }

    pub fn degree(&self, c: &BlowupCell) -> usize {
        cell_degree(self.fc, c)
    }

    /// `δ 1_{(F,ε)}` as a list of cells with signs.
    pub fn coboundary(&self, c: &BlowupCell) -> Vec<(BlowupCell, i64)> {
        let fc = self.fc;
        let n = fc.dim();
        let counts = level_counts(fc, &c.simplex);
        // Koszul sign before factor i is (-1)^{prefix[i]}.
        let mut prefix = vec![0i64; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + counts[i] as i64 - 1 + c.eps(i) as i64;
        }
        let sign = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
        let mut out = Vec::new();
        for i in 0..n {
            if counts[i] > 0 && !c.eps(i) {
                out.push((BlowupCell { simplex: c.simplex.clone(), cone: c.cone | 1 << i }, sign(prefix[i])));
            }
        }
        if let Some(ws) = self.cofacets.get(&c.simplex) {
            for &w in ws {
                let l = fc.level(w);
                let pos = c.simplex.iter().filter(|&&u| fc.level(u) == l && u < w).count() as i64;
                let local = if l < n && c.eps(l) { pos + 1 } else { pos };
                let mut s = c.simplex.clone();
                let at = s.partition_point(|&u| u < w);
                s.insert(at, w);
                out.push((BlowupCell { simplex: s, cone: c.cone }, sign(prefix[l] + local)));
            }
        }
        out
    }

    /// `‖1_{(F,ε)}‖` along the singular level `j`: `None` for `-∞`.
    pub fn perverse_degree(&self, c: &BlowupCell, j: usize) -> Option<i64> {
        let counts = level_counts(self.fc, &c.simplex);
        (!c.eps(j)).then(|| upper_degree(self.fc, c, &counts, j))
    }

    /// `‖1_{(F,ε)}‖_S ≤ p̄(S)` for every singular stratum `S` of `F`.
    pub fn is_allowable(&self, c: &BlowupCell, p: &Perversity) -> bool {
        let fc = self.fc;
        let n = fc.dim();
        let counts = level_counts(fc, &c.simplex);
        let mut start = 0;
        for j in 0..n {
            if counts[j] > 0 && !c.eps(j) {
                let stratum = fc.stratum_of_vertex(c.simplex[start]);
                if upper_degree(fc, c, &counts, j) > p.value(stratum) {
                    return false;
                }
            }
            start += counts[j];
        }
        true
    }

    /// Full cochain complex `Ñ*(X)` on the cell basis.
    pub fn full_complex(&self) -> Result<ChainComplex, ChainError> {
        let n = self.fc.dim();
        let mut d = Vec::with_capacity(n + 1);
        for k in 0..=n {
            if k == n {
                d.push(SparseIntMatrix::zeros(0, self.cells[k].len()));
                break;
            }
            let to = self.cells[k + 1].len();
            let cols = self.cells[k]
                .items
                .par_iter()
                .map(|c| {
                    let pairs = self.coboundary(c).into_iter().map(|(f, s)| (self.cells[k + 1].index(&f).expect("coface cell"), s.into()));
                    SparseVec::from_pairs(pairs)
                })
                .collect();
            d.push(SparseIntMatrix::from_columns(to, cols));
        }
        let dims = self.cells.iter().map(|b| b.len()).collect();
        Ok(ChainComplex::cohomological(0, dims, d)?)
    }

    fn presentation(&self, p: &Perversity, modulus: Option<&Int>) -> Result<Presentation, ChainError> {
        let n = self.fc.dim();
        let coords: Vec<Basis<BlowupCell>> =
            self.cells.iter().map(|b| Basis::new(b.items.iter().filter(|c| self.is_allowable(c, p)).cloned().collect())).collect();
        let lattices: Vec<Lattice> = (0..=n)
            .into_par_iter()
            .map(|k| {
                let basis = constrained_basis(&coords[k].items, |c| self.coboundary(c), |f| self.is_allowable(f, p), modulus);
                Lattice::from_echelon(coords[k].len(), basis)
            })
            .collect();
        let mut images = Vec::with_capacity(n + 1);
        for k in 0..=n {
            if k == n {
                images.push(SparseIntMatrix::zeros(0, lattices[k].rank()));
                break;
            }
            let cols = lattices[k]
                .basis()
                .par_iter()
                .map(|v| image_in(v, &coords[k], &coords[k + 1], |c| self.coboundary(c), |_| false, modulus))
                .collect::<Result<Vec<_>, _>>()?;
            images.push(SparseIntMatrix::from_columns(coords[k + 1].len(), cols));
        }
        Ok((coords, lattices, images))
    }

    /// `Ñ*_p̄(X)`: allowable cochains with allowable coboundary.
    pub fn perverse_subcomplex(&self, p: &Perversity) -> Result<PerverseCochains, ChainError> {
        let (coords, lattices, images) = self.presentation(p, None)?;
        let n = self.fc.dim();
        let mut d = Vec::with_capacity(n + 1);
        for k in 0..=n {
            d.push(if k == n { images[k].clone() } else { lattices[k + 1].solve(&images[k])? });
        }
        let dims = lattices.iter().map(|l| l.rank()).collect();
        let complex = ChainComplex::cohomological(0, dims, d)?;
        Ok(PerverseCochains { coords, lattices, complex })
    }

    /// `Ñ*_p̄(X; ℤ/m)` built from `ℤ/m`-valued cochains, with the cell
    /// coordinates of each degree.
    pub fn modular_subcomplex(&self, p: &Perversity, m: u64) -> Result<(Vec<Basis<BlowupCell>>, ModularComplex), ChainError> {
        let (coords, lattices, images) = self.presentation(p, Some(&Int::from(m as i64)))?;
        let spans = lattices.iter().map(|l| l.to_matrix()).collect();
        Ok((coords, ModularComplex::new(m, 0, true, spans, images)?))
    }
}

type Presentation = (Vec<Basis<BlowupCell>>, Vec<Lattice>, Vec<SparseIntMatrix>);

fn level_counts(fc: &FilteredComplex, s: &[u32]) -> Vec<usize> {
    let mut counts = vec![0; fc.dim() + 1];
    for &v in s {
        counts[fc.level(v)] += 1;
    }
    counts
}

fn cell_degree(fc: &FilteredComplex, c: &BlowupCell) -> usize {
    let n = fc.dim();
    let counts = level_counts(fc, &c.simplex);
    let d: i64 = (0..n).map(|i| counts[i] as i64 - 1 + c.eps(i) as i64).sum::<i64>() + counts[n] as i64 - 1;
    d as usize
}

// |(F, ε)|_{>j}
fn upper_degree(fc: &FilteredComplex, c: &BlowupCell, counts: &[usize], j: usize) -> i64 {
    let n = fc.dim();
    ((j + 1)..n).map(|i| counts[i] as i64 - 1 + c.eps(i) as i64).sum::<i64>() + counts[n] as i64 - 1
}

/// `Ñ*_p̄(X)`: in degree `k` the cochains live on `coords[k]` (allowable
/// cells) and form `lattices[k]`.
#[derive(Clone, Debug)]
pub struct PerverseCochains {
    pub coords: Vec<Basis<BlowupCell>>,
    pub lattices: Vec<Lattice>,
    pub complex: ChainComplex,
}

impl PerverseCochains {
    /// Cohomology of this integral complex by universal coefficients; see
    /// [`blowup_cohomology`] for `ℤ/m`-cochains.
    pub fn cohomology(&self, ring: CoefficientRing) -> Vec<AbelianGroup> {
        self.complex.homology_all(ring).into_iter().map(|(_, g)| g).collect()
    }

    /// Cochain in cell coordinates of a lattice-coordinate vector.
    pub fn cochain(&self, k: usize, x: &SparseVec) -> SparseVec {
        self.lattices[k].to_matrix().mul_vec(x)
    }
}

/// `Ñ*(Δ)` for a single simplex whose join factors `Δ_0, ..., Δ_n` have the
/// given numbers of vertices. The last factor must be nonempty.
pub fn local_blowup_complex(sizes: &[usize]) -> Result<ChainComplex, ChainError> {
    let n = sizes.len().saturating_sub(1);
    // Empty extra levels only contribute cone points, so the formal dimension
    // can grow to fit the simplex.
    let top = n.max(sizes.iter().sum::<usize>().saturating_sub(1));
    let mut verts = Vec::new();
    for (level, &m) in sizes.iter().enumerate() {
        let l = if level == n { top } else { level };
        for j in 0..m {
            verts.push((format!("{level}.{j}"), l as i64));
        }
    }
    let ids = verts.iter().map(|(id, _)| id.clone()).collect();
    let fc = FilteredComplex::new("simplex", top, verts, vec![ids])?;
    BlowupComplex::new(&fc).full_complex()
}

/// `ℋ*_p̄(X; R)` in degrees `0..=n`.
pub fn blowup_cohomology(fc: &FilteredComplex, p: &Perversity, ring: CoefficientRing) -> Result<Vec<AbelianGroup>, ChainError> {
    let blow = BlowupComplex::new(fc);
    Ok(match ring {
        CoefficientRing::Mod(m) => blow.modular_subcomplex(p, m)?.1.homology_all().into_iter().map(|(_, g)| g).collect(),
        _ => blow.perverse_subcomplex(p)?.cohomology(ring),
    })
}

/// `𝕳*_p̄(X; R)`: cohomology of `Hom_R(C^p̄_*(X; R), R)`.
///
/// Over `ℤ/m` the ring is self-injective, so this is the dual of
/// `𝕳^p̄_*(X; ℤ/m)` and has the same groups degree by degree.
pub fn dual_complex_cohomology(fc: &FilteredComplex, p: &Perversity, ring: CoefficientRing) -> Result<Vec<AbelianGroup>, ChainError> {
    if let CoefficientRing::Mod(_) = ring {
        return intersection_homology(fc, p, ring);
    }
    let c = intersection_complex(fc, p)?;
    Ok(c.complex.dual().homology_all(ring).into_iter().map(|(_, g)| g).collect())
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
    fn local_ranks() {
        assert_eq!(local_blowup_complex(&[1, 1]).unwrap().dims(), &[2, 1]);
        assert_eq!(local_blowup_complex(&[2, 1]).unwrap().dims(), &[3, 3, 1]);
        assert_eq!(local_blowup_complex(&[0, 3]).unwrap().dims(), &[3, 3, 1]);
        let c = local_blowup_complex(&[2, 0, 2]).unwrap();
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn local_complexes_are_acyclic() {
        for sizes in [vec![1, 1], vec![2, 1], vec![1, 2], vec![2, 2], vec![1, 0, 1], vec![1, 1, 1], vec![0, 2, 2]] {
            let h = local_blowup_complex(&sizes).unwrap().homology_all(CoefficientRing::Integers);
            let want: Vec<AbelianGroup> = (0..h.len()).map(|k| if k == 0 { AbelianGroup::free(1) } else { AbelianGroup::zero() }).collect();
            assert_eq!(h.into_iter().map(|(_, g)| g).collect::<Vec<_>>(), want, "{sizes:?}");
        }
    }

    #[test]
    fn perverse_degree_of_cells() {
        let c = cone_two_points();
        let b = BlowupComplex::new(&c);
        let v = c.vertex("v").unwrap();
        let a = c.vertex("a").unwrap();
        let cell = BlowupCell { simplex: vec![v, a], cone: 0 };
        assert_eq!(b.perverse_degree(&cell, 0), Some(0));
        let cell = BlowupCell { simplex: vec![v, a], cone: 1 };
        assert_eq!(b.perverse_degree(&cell, 0), None);
    }

    #[test]
    fn cone_on_two_points() {
        let c = cone_two_points();
        for (pv, want) in [(-1, vec![0, 0]), (0, vec![2, 0]), (1, vec![2, 0])] {
            let p = c.make_perversity(&PerversitySpec::Constant(pv)).unwrap();
            let h = blowup_cohomology(&c, &p, CoefficientRing::Integers).unwrap();
            assert_eq!(h.iter().map(|g| g.rank).collect::<Vec<_>>(), want, "p = {pv}");
        }
    }
}
