//! Chain complexes of finitely generated free abelian groups and their
//! homology with coefficients.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::echelon::{integer_kernel, Lattice};
use super::int::Int;
use super::snf::{elementary_divisors, normalize_divisors, smith_with_inverse};
use super::sparse::{SparseIntMatrix, SparseVec};
use super::LinalgError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientRing {
    Integers,
    Rationals,
    Mod(u64),
}

impl CoefficientRing {
    pub fn is_field(&self) -> bool {
        match self {
            CoefficientRing::Integers => false,
            CoefficientRing::Rationals => true,
            CoefficientRing::Mod(m) => is_prime(*m),
        }
    }

    /// Characteristic, with 0 for ℤ and ℚ.
    pub fn characteristic(&self) -> u64 {
        match self {
            CoefficientRing::Mod(m) => *m,
            _ => 0,
        }
    }
}

fn is_prime(m: u64) -> bool {
    m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::Rationals => write!(f, "Q"),
            CoefficientRing::Mod(m) => write!(f, "Z/{m}"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = LinalgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Z" | "ZZ" | "ℤ" => Ok(CoefficientRing::Integers),
            "Q" | "QQ" | "ℚ" => Ok(CoefficientRing::Rationals),
            t => {
                let m = t.strip_prefix("Z/").or_else(|| t.strip_prefix("ℤ/")).and_then(|m| m.parse::<u64>().ok()).filter(|m| *m >= 2);
                m.map(CoefficientRing::Mod).ok_or_else(|| LinalgError::InvalidRing(s.to_string()))
            }
        }
    }
}

/// Isomorphism type of a finitely generated module: free rank over the
/// coefficient ring plus torsion divisors `t_1 | t_2 | ...`, each at least 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<Int>,
}

impl AbelianGroup {
    pub fn zero() -> Self {
        AbelianGroup::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { rank, torsion: Vec::new() }
    }

    pub fn new(rank: usize, torsion: Vec<Int>) -> Self {
        let torsion = normalize_divisors(torsion).into_iter().filter(|t| !t.is_unit()).collect();
        AbelianGroup { rank, torsion }
    }

    pub fn cyclic(order: i64) -> Self {
        AbelianGroup::new(0, vec![Int::from(order)])
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        AbelianGroup::new(self.rank + other.rank, t)
    }

    /// Integral group tensored with `R`, reported in `R`'s module category.
    pub fn tensor(&self, ring: CoefficientRing) -> AbelianGroup {
        match ring {
            CoefficientRing::Integers => self.clone(),
            CoefficientRing::Rationals => AbelianGroup::free(self.rank),
            CoefficientRing::Mod(m) => {
                let m = Int::from(m as i64);
                let mut orders = vec![m.clone(); self.rank];
                orders.extend(self.torsion.iter().map(|t| t.gcd(&m)));
                from_mod_orders(orders, &m)
            }
        }
    }

    /// `Tor(G, ℤ/m)`; zero over ℤ and ℚ.
    pub fn tor(&self, ring: CoefficientRing) -> AbelianGroup {
        match ring {
            CoefficientRing::Mod(m) => {
                let m = Int::from(m as i64);
                from_mod_orders(self.torsion.iter().map(|t| t.gcd(&m)).collect(), &m)
            }
            _ => AbelianGroup::zero(),
        }
    }

    /// Human readable form such as `Z^2 + Z/2`, with the free part written
    /// over `ring`.
    pub fn display_over(&self, ring: CoefficientRing) -> String {
        let mut parts = Vec::new();
        if self.rank == 1 {
            parts.push(ring.to_string());
        } else if self.rank > 1 {
            parts.push(format!("{}^{}", ring, self.rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Inverse of [`display_over`](Self::display_over).
    pub fn parse(s: &str) -> Option<AbelianGroup> {
        let s = s.trim();
        if s == "0" {
            return Some(AbelianGroup::zero());
        }
        let mut rank = 0;
        let mut torsion = Vec::new();
        for part in s.split('+').map(str::trim) {
            let (base, exp) = match part.split_once('^') {
                Some((b, e)) => (b, e.parse::<usize>().ok()?),
                None => (part, 1),
            };
            match base {
                "Z" | "Q" => rank += exp,
                b => {
                    let t: i64 = b.strip_prefix("Z/")?.parse().ok()?;
                    torsion.extend(std::iter::repeat_n(Int::from(t), exp));
                }
            }
        }
        Some(AbelianGroup::new(rank, torsion))
    }

    /// Like [`parse`](Self::parse), treating a free `Z/m` summand over
    /// `Z/m` as rank.
    pub fn parse_over(s: &str, ring: CoefficientRing) -> Option<AbelianGroup> {
        let g = AbelianGroup::parse(s)?;
        match ring {
            CoefficientRing::Mod(m) => {
                let m = Int::from(m as i64);
                let mut orders = vec![m.clone(); g.rank];
                orders.extend(g.torsion.iter().cloned());
                Some(from_mod_orders(orders, &m))
            }
            _ => Some(g),
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_over(CoefficientRing::Integers))
    }
}

// Cyclic summands of orders dividing m; summands of order m are free.
pub(crate) fn from_mod_orders(orders: Vec<Int>, m: &Int) -> AbelianGroup {
    let chain = normalize_divisors(orders);
    let rank = chain.iter().filter(|t| *t == m).count();
    let torsion = chain.into_iter().filter(|t| !t.is_unit() && t != m).collect();
    AbelianGroup { rank, torsion }
}

/// A bounded complex of free abelian groups in degrees `lo..lo+dims.len()`.
///
/// `out[i]` is the differential leaving degree `lo + i`; it lowers the degree
/// by one for chain complexes and raises it for cochain complexes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainComplex {
    lo: i64,
    dims: Vec<usize>,
    out: Vec<SparseIntMatrix>,
    cohomological: bool,
    #[serde(skip)]
    divisors: OnceLock<Vec<Vec<Int>>>,
}

impl ChainComplex {
    pub fn new(cohomological: bool, lo: i64, dims: Vec<usize>, out: Vec<SparseIntMatrix>) -> Result<Self, LinalgError> {
        let c = ChainComplex { lo, dims, out, cohomological, divisors: OnceLock::new() };
        c.validate()?;
        Ok(c)
    }

    /// Chain complex from boundary maps `d[k]: C_{lo+k} → C_{lo+k-1}`.
    pub fn homological(lo: i64, dims: Vec<usize>, d: Vec<SparseIntMatrix>) -> Result<Self, LinalgError> {
        ChainComplex::new(false, lo, dims, d)
    }

    /// Cochain complex from coboundaries `d[k]: C^{lo+k} → C^{lo+k+1}`.
    pub fn cohomological(lo: i64, dims: Vec<usize>, d: Vec<SparseIntMatrix>) -> Result<Self, LinalgError> {
        ChainComplex::new(true, lo, dims, d)
    }

    fn validate(&self) -> Result<(), LinalgError> {
        if self.out.len() != self.dims.len() {
            return Err(LinalgError::DimensionMismatch {
                context: "chain complex",
                left: (self.dims.len(), 0),
                right: (self.out.len(), 0),
            });
        }
        for k in self.degrees() {
            let d = self.out(k);
            let target = self.target(k);
            if d.ncols() != self.dim(k) || d.nrows() != self.dim(target) {
                return Err(LinalgError::DimensionMismatch {
                    context: "differential shape",
                    left: (d.nrows(), d.ncols()),
                    right: (self.dim(target), self.dim(k)),
                });
            }
        }
        for k in self.degrees() {
            let t = self.target(k);
            if self.dim(t) == 0 || self.dim(self.target(t)) == 0 {
                continue;
            }
            let dd = self.out(t).mul(self.out(k))?;
            if !dd.is_zero() {
                return Err(LinalgError::NotAComplex { degree: k });
            }
        }
        Ok(())
    }

    pub fn is_cohomological(&self) -> bool {
        self.cohomological
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    fn index(&self, k: i64) -> Option<usize> {
        (k >= self.lo && k <= self.hi()).then(|| (k - self.lo) as usize)
    }

    pub fn dim(&self, k: i64) -> usize {
        self.index(k).map_or(0, |i| self.dims[i])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Degree reached by the differential leaving `k`.
    pub fn target(&self, k: i64) -> i64 {
        if self.cohomological {
            k + 1
        } else {
            k - 1
        }
    }

    fn source_into(&self, k: i64) -> i64 {
        if self.cohomological {
            k - 1
        } else {
            k + 1
        }
    }

    /// Differential leaving degree `k` (a zero matrix outside the range).
    pub fn out(&self, k: i64) -> &SparseIntMatrix {
        static EMPTY: OnceLock<SparseIntMatrix> = OnceLock::new();
        match self.index(k) {
            Some(i) => &self.out[i],
            None => EMPTY.get_or_init(|| SparseIntMatrix::zeros(0, 0)),
        }
    }

    /// Differential arriving in degree `k`, as an owned matrix with the right shape.
    pub fn incoming(&self, k: i64) -> SparseIntMatrix {
        let s = self.source_into(k);
        match self.index(s) {
            Some(i) => self.out[i].clone(),
            None => SparseIntMatrix::zeros(self.dim(k), 0),
        }
    }

    fn all_divisors(&self) -> &Vec<Vec<Int>> {
        self.divisors.get_or_init(|| self.out.par_iter().map(elementary_divisors).collect())
    }

    fn divisors_out(&self, k: i64) -> &[Int] {
        match self.index(k) {
            Some(i) => &self.all_divisors()[i],
            None => &[],
        }
    }

    /// Integral homology in degree `k`.
    pub fn integral_homology(&self, k: i64) -> AbelianGroup {
        let outgoing = self.divisors_out(k).len();
        let incoming = self.divisors_out(self.source_into(k));
        let rank = self.dim(k) - outgoing - incoming.len();
        AbelianGroup::new(rank, incoming.iter().filter(|d| !d.is_unit()).cloned().collect())
    }

    /// Homology with coefficients, by universal coefficients.
    pub fn homology(&self, k: i64, ring: CoefficientRing) -> AbelianGroup {
        let h = self.integral_homology(k);
        match ring {
            CoefficientRing::Integers => h,
            _ => {
                let t = self.integral_homology(self.target(k));
                h.tensor(ring).direct_sum(&t.tor(ring))
            }
        }
    }

    /// `(degree, group)` for every degree of the complex.
    pub fn homology_all(&self, ring: CoefficientRing) -> Vec<(i64, AbelianGroup)> {
        self.all_divisors();
        self.degrees().map(|k| (k, self.homology(k, ring))).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|k| if k.rem_euclid(2) == 0 { self.dim(k) as i64 } else { -(self.dim(k) as i64) }).sum()
    }

    /// `Hom(C, ℤ)` with transposed differentials; chain and cochain swap.
    pub fn dual(&self) -> ChainComplex {
        let out = self.degrees().map(|k| self.incoming(k).transpose()).collect();
        ChainComplex { lo: self.lo, dims: self.dims.clone(), out, cohomological: !self.cohomological, divisors: OnceLock::new() }
    }

    /// Integral homology basis in degree `k`.
    pub fn homology_basis(&self, k: i64) -> HomologyBasis {
        HomologyBasis::new(self, k)
    }
}

/// Generators of `H_k` together with a way to read off the class of a cycle.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: i64,
    /// Order of each generator; zero for free generators.
    pub orders: Vec<Int>,
    /// Cycle representatives in chain coordinates.
    pub generators: Vec<SparseVec>,
    cycles: Lattice,
    u: SparseIntMatrix,
    kept: Vec<usize>,
}

impl HomologyBasis {
    fn new(c: &ChainComplex, k: i64) -> Self {
        let z = integer_kernel(c.out(k));
        let z = if c.index(k).is_none() { SparseIntMatrix::zeros(0, 0) } else { z };
        let cycles = Lattice::from_generators(c.dim(k), z.columns().iter().cloned());
        let incoming = c.incoming(k);
        let b = cycles.solve(&incoming).expect("boundaries are cycles");
        let (u, u_inv, d, _) = smith_with_inverse(&b, true);
        let u_inv = u_inv.unwrap();
        let r = (0..d.nrows().min(d.ncols())).take_while(|&i| !d.get(i, i).is_zero()).count();
        let zm = cycles.to_matrix();
        let mut orders = Vec::new();
        let mut generators = Vec::new();
        let mut kept = Vec::new();
        for i in 0..cycles.rank() {
            let order = if i < r { d.get(i, i) } else { Int::ZERO };
            if order.is_unit() {
                continue;
            }
            generators.push(zm.mul_vec(u_inv.col(i)));
            orders.push(order);
            kept.push(i);
        }
        HomologyBasis { degree: k, orders, generators, cycles, u, kept }
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn group(&self) -> AbelianGroup {
        AbelianGroup::new(
            self.orders.iter().filter(|o| o.is_zero()).count(),
            self.orders.iter().filter(|o| !o.is_zero()).cloned().collect(),
        )
    }

    /// Class of a cycle in generator coordinates (torsion coordinates reduced).
    pub fn class_of(&self, cycle: &SparseVec) -> Result<Vec<Int>, LinalgError> {
        let y = self.cycles.coordinates(cycle)?;
        let w = self.u.mul_vec(&y);
        Ok(self.kept.iter().zip(&self.orders).map(|(&i, o)| if o.is_zero() { w.get(i) } else { w.get(i).mod_floor(o) }).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hollow_triangle() -> ChainComplex {
        let d1 = SparseIntMatrix::from_dense(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        ChainComplex::homological(0, vec![3, 3], vec![SparseIntMatrix::zeros(0, 3), d1]).unwrap()
    }

    #[test]
    fn circle() {
        let c = hollow_triangle();
        assert_eq!(c.homology(1, CoefficientRing::Integers), AbelianGroup::free(1));
        assert_eq!(c.homology(0, CoefficientRing::Integers), AbelianGroup::free(1));
        let b = c.homology_basis(1);
        assert_eq!(b.len(), 1);
        assert_eq!(b.class_of(&b.generators[0]).unwrap(), vec![Int::ONE]);
    }

    #[test]
    fn mod_coefficients() {
        // Z --2--> Z in degrees 1 -> 0
        let d = SparseIntMatrix::from_dense(&[vec![2]]);
        let c = ChainComplex::homological(0, vec![1, 1], vec![SparseIntMatrix::zeros(0, 1), d]).unwrap();
        assert_eq!(c.homology(0, CoefficientRing::Integers), AbelianGroup::cyclic(2));
        assert_eq!(c.homology(1, CoefficientRing::Integers), AbelianGroup::zero());
        assert_eq!(c.homology(0, CoefficientRing::Mod(2)), AbelianGroup::free(1));
        assert_eq!(c.homology(1, CoefficientRing::Mod(2)), AbelianGroup::free(1));
        assert_eq!(c.homology(0, CoefficientRing::Mod(3)), AbelianGroup::zero());
        assert_eq!(c.homology(0, CoefficientRing::Mod(4)), AbelianGroup::cyclic(2));
        assert_eq!(c.homology(0, CoefficientRing::Rationals), AbelianGroup::zero());
        let b = c.homology_basis(0);
        assert_eq!(b.orders, vec![Int::from(2)]);
    }

    #[test]
    fn not_a_complex() {
        let d1 = SparseIntMatrix::from_dense(&[vec![1]]);
        let d2 = SparseIntMatrix::from_dense(&[vec![1]]);
        let r = ChainComplex::homological(0, vec![1, 1, 1], vec![SparseIntMatrix::zeros(0, 1), d1, d2]);
        assert!(matches!(r, Err(LinalgError::NotAComplex { .. })));
    }

    #[test]
    fn group_text_roundtrip() {
        let g = AbelianGroup::new(2, vec![Int::from(2), Int::from(3)]);
        assert_eq!(g.to_string(), "Z^2 + Z/6");
        assert_eq!(AbelianGroup::parse(&g.to_string()), Some(g));
        assert_eq!(AbelianGroup::parse_over("Z/2", CoefficientRing::Mod(2)), Some(AbelianGroup::free(1)));
        assert_eq!("Z/4".parse::<CoefficientRing>().unwrap(), CoefficientRing::Mod(4));
        assert!("Z/1".parse::<CoefficientRing>().is_err());
    }
}
