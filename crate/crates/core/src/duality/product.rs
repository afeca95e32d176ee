//! Products on (co)homology over a field: the cup product on `ℋ*` and the
//! intersection product `a ⋔ b = 𝒟(𝒟⁻¹a ⌣ 𝒟⁻¹b)` on Borel–Moore classes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{cup, CapWithGamma, DualityError};
use crate::blowup::{BlowupCell, BlowupComplex};
use crate::chains::{modular_intersection_complex, OpenModel, SimplexBasis};
use crate::complex::{FilteredComplex, Perversity};
use crate::linalg::field::{reduce, FpHomologyBasis};
use crate::linalg::{ChainComplex, CoefficientRing, HomologyBasis, Int, Lattice, LinalgError, ModularComplex, SparseVec};
use crate::perverse::Basis;

pub type Scalar = BigRational;

/// Arithmetic in `ℚ` (`p = 0`) or `𝔽_p`, on rationals kept reduced mod `p`.
#[derive(Clone, Copy, Debug)]
struct Field {
    p: u64,
}

impl Field {
    fn of(ring: CoefficientRing) -> Result<Field, DualityError> {
        if !ring.is_field() {
            return Err(DualityError::NotAField(ring.to_string()));
        }
        Ok(Field { p: ring.characteristic() })
    }

    fn norm(&self, x: Scalar) -> Scalar {
        if self.p == 0 {
            return x;
        }
        let p = BigInt::from(self.p);
        let num = ((x.numer() % &p) + &p) % &p;
        let den = ((x.denom() % &p) + &p) % &p;
        let inv = den.modpow(&(&p - 2u32), &p);
        Scalar::from_integer((num * inv) % &p)
    }

    fn int(&self, x: &Int) -> Scalar {
        self.norm(Scalar::from_integer(x.to_big()))
    }

    fn inverse(&self, m: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, usize> {
        let r = m.len();
        let mut a: Vec<Vec<Scalar>> = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut v = row.clone();
                v.extend((0..r).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
                v
            })
            .collect();
        for c in 0..r {
            let piv = (c..r).find(|&i| !a[i][c].is_zero()).ok_or(c)?;
            a.swap(c, piv);
            let inv = self.norm(a[c][c].recip());
            for x in a[c].iter_mut() {
                *x = self.norm(&*x * &inv);
            }
            for i in 0..r {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..2 * r {
                        let t = &a[i][j] - &f * &a[c][j];
                        a[i][j] = self.norm(t);
                    }
                }
            }
        }
        Ok(a.into_iter().map(|row| row[r..].to_vec()).collect())
    }
}

/// Basis of `H_k` over `F` in ambient (cell or simplex) coordinates.
enum Classes {
    Rational { basis: HomologyBasis, free: Vec<usize>, lattice: Lattice },
    Modular(FpHomologyBasis),
}

impl Classes {
    fn rational(c: &ChainComplex, lattice: &Lattice, k: usize) -> Classes {
        let basis = c.homology_basis(k as i64);
        let free = (0..basis.len()).filter(|&i| basis.orders[i].is_zero()).collect();
        Classes::Rational { basis, free, lattice: lattice.clone() }
    }

    fn modular(c: &ModularComplex, k: usize) -> Classes {
        Classes::Modular(c.fp_homology_basis(k as i64).expect("prime modulus"))
    }

    fn len(&self) -> usize {
        match self {
            Classes::Rational { free, .. } => free.len(),
            Classes::Modular(b) => b.len(),
        }
    }

    fn rep(&self, i: usize) -> SparseVec {
        match self {
            Classes::Rational { basis, free, lattice } => lattice.to_matrix().mul_vec(&basis.generators[free[i]]),
            Classes::Modular(b) => SparseVec::from_pairs(b.generators[i].iter().map(|&(j, x)| (j, Int::from(x as i64)))),
        }
    }

    fn class_of(&self, cycle: &SparseVec, f: Field) -> Result<Vec<Scalar>, DualityError> {
        match self {
            Classes::Rational { basis, free, lattice } => {
                let c = basis.class_of(&lattice.coordinates(cycle)?)?;
                Ok(free.iter().map(|&i| f.int(&c[i])).collect())
            }
            Classes::Modular(b) => {
                let c = b.class_of(&reduce(cycle, f.p)).ok_or(DualityError::Linalg(LinalgError::NotInLattice))?;
                Ok(c.into_iter().map(|x| Scalar::from_integer(BigInt::from(x))).collect())
            }
        }
    }
}

fn nonzero(classes: &Classes, coeffs: &[Scalar]) -> Vec<(usize, Scalar)> {
    (0..classes.len()).filter(|&i| !coeffs[i].is_zero()).map(|i| (i, coeffs[i].clone())).collect()
}

/// Cohomology classes of `Ñ*_p̄` over `F` with their cell coordinates.
struct Cochains {
    cells: Vec<Basis<BlowupCell>>,
    classes: Vec<Classes>,
}

impl Cochains {
    fn new(fc: &FilteredComplex, p: &Perversity, f: Field) -> Result<Cochains, DualityError> {
        let blow = BlowupComplex::new(fc);
        let n = fc.dim();
        if f.p == 0 {
            let c = blow.perverse_subcomplex(p)?;
            let classes = (0..=n).map(|k| Classes::rational(&c.complex, &c.lattices[k], k)).collect();
            Ok(Cochains { cells: c.coords, classes })
        } else {
            let (cells, c) = blow.modular_subcomplex(p, f.p)?;
            let classes = (0..=n).map(|k| Classes::modular(&c, k)).collect();
            Ok(Cochains { cells, classes })
        }
    }

    fn terms(&self, k: usize, x: &SparseVec) -> Vec<(BlowupCell, Int)> {
        x.iter().map(|(i, a)| (self.cells[k].items[i].clone(), a.clone())).collect()
    }

    /// Ambient vector of a cochain; terms off the allowable cells must vanish.
    fn ambient(&self, k: usize, terms: &[(BlowupCell, Int)], f: Field) -> Result<SparseVec, DualityError> {
        let mut pairs = Vec::with_capacity(terms.len());
        for (cell, a) in terms {
            match self.cells[k].index(cell) {
                Some(i) => pairs.push((i, a.clone())),
                None if f.int(a).is_zero() => {}
                None => return Err(DualityError::Linalg(LinalgError::NotInLattice)),
            }
        }
        Ok(SparseVec::from_pairs(pairs))
    }
}

/// Duality data over a field for one perversity.
struct FieldDuality {
    coh: Cochains,
    hom: Vec<Classes>,
    /// `matrix[k][r][c]`: class in `H_{n-k}` of `𝒟` applied to generator `c` of `H^k`.
    matrix: Vec<Vec<Vec<Scalar>>>,
}

impl FieldDuality {
    fn new(model: &OpenModel, ring: CoefficientRing, f: Field) -> Result<FieldDuality, DualityError> {
        let fc = &model.core;
        let n = fc.dim();
        let cap = CapWithGamma::new(model, ring)?;
        let coh = Cochains::new(fc, &model.perversity, f)?;
        let (simplices, hom): (Vec<SimplexBasis>, Vec<Classes>) = if f.p == 0 {
            let c = model.complex()?;
            let hom = (0..=n).map(|k| Classes::rational(&c.complex, &c.lattices[k], k)).collect();
            (c.coords, hom)
        } else {
            let (coords, c) = modular_intersection_complex(fc, &model.perversity, &model.frontier, f.p)?;
            (coords, (0..=n).map(|k| Classes::modular(&c, k)).collect())
        };
        let modulus = (f.p > 0).then(|| Int::from(f.p as i64));
        let mut matrix = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let cols = (0..coh.classes[k].len())
                .map(|c| {
                    let v = cap.apply(&coh.cells[k], &simplices[n - k], &coh.classes[k].rep(c), modulus.as_ref())?;
                    hom[n - k].class_of(&v, f)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let rows = hom[n - k].len();
            matrix.push((0..rows).map(|r| cols.iter().map(|col| col[r].clone()).collect()).collect());
        }
        Ok(FieldDuality { coh, hom, matrix })
    }
}

/// Matrix of `𝒟` from `ℋ^k_p̄(U; F)` to `𝕳^{∞,p̄}_{n-k}(U; F)` in computed
/// bases, for each `k`.
pub fn duality_on_homology(
    fc: &FilteredComplex,
    removed: &BTreeSet<u32>,
    p: &Perversity,
    ring: CoefficientRing,
) -> Result<Vec<Vec<Vec<Scalar>>>, DualityError> {
    let f = Field::of(ring)?;
    let model = OpenModel::new(fc, removed, p, 1)?;
    Ok(FieldDuality::new(&model, ring, f)?.matrix)
}

/// `cup[s][t]`: class in `ℋ^{k+l}_{p̄+q̄}` of `g_s ⌣ h_t` for the computed
/// generators `g_s` of `ℋ^k_p̄` and `h_t` of `ℋ^l_q̄`.
fn cup_structure(
    fc: &FilteredComplex,
    (a, b, c): (&Cochains, &Cochains, &Cochains),
    (k, l): (usize, usize),
    f: Field,
) -> Result<Vec<Vec<Vec<Scalar>>>, DualityError> {
    (0..a.classes[k].len())
        .map(|s| {
            let x = a.terms(k, &a.classes[k].rep(s));
            (0..b.classes[l].len())
                .map(|t| {
                    let y = b.terms(l, &b.classes[l].rep(t));
                    let z = c.ambient(k + l, &cup(fc, &x, &y), f)?;
                    c.classes[k + l].class_of(&z, f)
                })
                .collect()
        })
        .collect()
}

fn sum_perversities(p: &Perversity, q: &Perversity) -> Perversity {
    Perversity { name: format!("{}+{}", p.name, q.name), values: p.values.iter().zip(&q.values).map(|(a, b)| a + b).collect() }
}

/// Cup product table on `ℋ^k_p̄ ⊗ ℋ^l_q̄ → ℋ^{k+l}_{p̄+q̄}` over a field, in
/// computed bases. Entry `[s][t]` is the class of `g_s ⌣ h_t`.
pub fn cohomology_cup_matrix(
    fc: &FilteredComplex,
    p: &Perversity,
    q: &Perversity,
    (k, l): (usize, usize),
    ring: CoefficientRing,
) -> Result<Vec<Vec<Vec<Scalar>>>, DualityError> {
    let f = Field::of(ring)?;
    if k + l > fc.dim() {
        return Ok(Vec::new());
    }
    let a = Cochains::new(fc, p, f)?;
    let b = Cochains::new(fc, q, f)?;
    let c = Cochains::new(fc, &sum_perversities(p, q), f)?;
    cup_structure(fc, (&a, &b, &c), (k, l), f)
}

/// A Borel–Moore class: degree and coordinates in the computed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionProduct {
    pub degree: usize,
    pub coords: Vec<Scalar>,
}

/// `a ⋔ b ∈ 𝕳^{∞,p̄+q̄}_{i+j-n}` for `a ∈ 𝕳^{∞,p̄}_i` and `b ∈ 𝕳^{∞,q̄}_j`
/// over a field. Degrees below zero give `None`.
pub fn intersection_product(
    fc: &FilteredComplex,
    removed: &BTreeSet<u32>,
    (p, i, a): (&Perversity, usize, &[Scalar]),
    (q, j, b): (&Perversity, usize, &[Scalar]),
    ring: CoefficientRing,
) -> Result<Option<IntersectionProduct>, DualityError> {
    let f = Field::of(ring)?;
    let n = fc.dim();
    if i + j < n {
        return Ok(None);
    }
    let (k, l) = (n - i, n - j);
    let pq = sum_perversities(p, q);
    let dp = FieldDuality::new(&OpenModel::new(fc, removed, p, 1)?, ring, f)?;
    let dq = FieldDuality::new(&OpenModel::new(fc, removed, q, 1)?, ring, f)?;
    let dpq = FieldDuality::new(&OpenModel::new(fc, removed, &pq, 1)?, ring, f)?;
    let solve = |d: &FieldDuality, k: usize, x: &[Scalar]| -> Result<Vec<Scalar>, DualityError> {
        let inv = f.inverse(&d.matrix[k]).map_err(|_| DualityError::NotInvertible(k))?;
        if inv.len() != x.len() {
            return Err(DualityError::NotInvertible(k));
        }
        Ok(inv.iter().map(|row| f.norm(row.iter().zip(x).map(|(m, v)| m * v).sum())).collect())
    };
    let alpha = solve(&dp, k, a)?;
    let beta = solve(&dq, l, b)?;
    let core = &OpenModel::new(fc, removed, p, 1)?.core;
    let table = cup_structure(core, (&dp.coh, &dq.coh, &dpq.coh), (k, l), f)?;
    let mut gamma = vec![Scalar::zero(); dpq.coh.classes[k + l].len()];
    for (s, x) in nonzero(&dp.coh.classes[k], &alpha) {
        for (t, y) in nonzero(&dq.coh.classes[l], &beta) {
            for (g, z) in gamma.iter_mut().zip(&table[s][t]) {
                *g = f.norm(&*g + &(&x * &y * z));
            }
        }
    }
    let m = &dpq.matrix[k + l];
    let coords = (0..dpq.hom[n - k - l].len()).map(|r| f.norm(m[r].iter().zip(&gamma).map(|(a, b)| a * b).sum())).collect();
    Ok(Some(IntersectionProduct { degree: n - k - l, coords }))
}
