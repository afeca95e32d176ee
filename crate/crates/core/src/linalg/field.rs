//! Linear algebra over prime fields 𝔽_p.

use std::collections::BTreeMap;

use super::homology::ChainComplex;
use super::sparse::{SparseIntMatrix, SparseVec};

pub type FpVec = Vec<(usize, u64)>;

fn inv(a: u64, p: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

/// Reduces an integer vector mod p.
pub fn reduce(v: &SparseVec, p: u64) -> FpVec {
    let pi = super::Int::from(p as i64);
    v.iter()
        .filter_map(|(i, x)| {
            let r = x.mod_floor(&pi).to_i64().unwrap() as u64;
            (r != 0).then_some((i, r))
        })
        .collect()
}

// a + f*b
fn axpy(a: &FpVec, f: u64, b: &FpVec, p: u64) -> FpVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map_or(usize::MAX, |x| x.0);
        let kb = b.get(j).map_or(usize::MAX, |x| x.0);
        if ka < kb {
            out.push(a[i]);
            i += 1;
        } else {
            let fb = ((f as u128 * b[j].1 as u128) % p as u128) as u64;
            let s = if ka == kb {
                let s = (a[i].1 + fb) % p;
                i += 1;
                s
            } else {
                fb
            };
            if s != 0 {
                out.push((kb, s));
            }
            j += 1;
        }
    }
    out
}

/// Gaussian elimination over 𝔽_p, one vector at a time, with pivots
/// normalized to 1. Tracks combinations of the inserted vectors.
#[derive(Clone, Debug)]
pub struct FpEchelon {
    p: u64,
    pivots: BTreeMap<usize, (FpVec, FpVec)>,
    inserted: usize,
    kernel: Vec<FpVec>,
}

impl FpEchelon {
    pub fn new(p: u64) -> Self {
        FpEchelon { p, pivots: BTreeMap::new(), inserted: 0, kernel: Vec::new() }
    }

    /// Reduces `v` against the pivots; returns the residue and its combination.
    fn reduce(&self, mut v: FpVec, mut t: FpVec) -> (FpVec, FpVec) {
        let p = self.p;
        let mut k = 0;
        while k < v.len() {
            let (i, a) = v[k];
            match self.pivots.get(&i) {
                Some((pv, pt)) => {
                    v = axpy(&v, p - a, pv, p);
                    t = axpy(&t, p - a, pt, p);
                }
                None => k += 1,
            }
        }
        (v, t)
    }

    pub fn insert(&mut self, v: FpVec) -> bool {
        let tag = vec![(self.inserted, 1)];
        self.inserted += 1;
        let (v, t) = self.reduce(v, tag);
        match v.first() {
            None => {
                self.kernel.push(t);
                false
            }
            Some(&(i, a)) => {
                let s = inv(a, self.p);
                let v = axpy(&Vec::new(), s, &v, self.p);
                let t = axpy(&Vec::new(), s, &t, self.p);
                self.pivots.insert(i, (v, t));
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn kernel(&self) -> &[FpVec] {
        &self.kernel
    }

    /// Expresses `v` as a combination of inserted vectors, if it lies in their span.
    pub fn solve(&self, v: FpVec) -> Option<FpVec> {
        let (r, t) = self.reduce(v, Vec::new());
        r.is_empty().then(|| t.into_iter().map(|(i, x)| (i, (self.p - x) % self.p)).filter(|x| x.1 != 0).collect())
    }
}

pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    let mut e = FpEchelon::new(p);
    for c in m.columns() {
        e.insert(reduce(c, p));
    }
    e.rank()
}

/// Rank over `ℚ` (`p = 0`) or `𝔽_p` of integer vectors.
pub fn rank_over<'a>(vecs: impl IntoIterator<Item = &'a SparseVec>, p: u64) -> usize {
    if p == 0 {
        let mut e = super::echelon::Echelon::new(false);
        for v in vecs {
            e.insert(v.clone());
        }
        e.rank()
    } else {
        let mut e = FpEchelon::new(p);
        for v in vecs {
            e.insert(reduce(v, p));
        }
        e.rank()
    }
}

/// Integral lifts of a basis of the kernel of `m` over `ℚ` (`p = 0`) or `𝔽_p`.
pub fn kernel_over(m: &SparseIntMatrix, p: u64) -> Vec<SparseVec> {
    if p == 0 {
        return super::echelon::integer_kernel(m).columns().to_vec();
    }
    let mut e = FpEchelon::new(p);
    for c in m.columns() {
        e.insert(reduce(c, p));
    }
    e.kernel().iter().map(|t| SparseVec::from_pairs(t.iter().map(|&(i, x)| (i, super::Int::from(x as i64))))).collect()
}

/// Basis of `H_k(C ⊗ 𝔽_p)` with coordinates of cycle classes.
#[derive(Clone, Debug)]
pub struct FpHomologyBasis {
    pub p: u64,
    pub generators: Vec<FpVec>,
    // boundaries first, then generators
    span: FpEchelon,
    boundaries: usize,
}

impl FpHomologyBasis {
    pub fn new(c: &ChainComplex, k: i64, p: u64) -> Self {
        let mut cyc = FpEchelon::new(p);
        for col in c.out(k).columns() {
            cyc.insert(reduce(col, p));
        }
        let cycles: Vec<FpVec> =
            if c.out(k).ncols() == c.dim(k) { cyc.kernel().to_vec() } else { (0..c.dim(k)).map(|i| vec![(i, 1)]).collect() };
        let boundaries = c.incoming(k).columns().iter().map(|col| reduce(col, p)).collect();
        Self::from_parts(p, cycles, boundaries)
    }

    /// Basis of `span(cycles) / span(boundaries)`; the boundaries must lie in
    /// the span of the cycles.
    pub fn from_parts(p: u64, cycles: Vec<FpVec>, boundaries: Vec<FpVec>) -> Self {
        let mut span = FpEchelon::new(p);
        let count = boundaries.len();
        for b in boundaries {
            span.insert(b);
        }
        let mut generators = Vec::new();
        for z in cycles {
            if span.solve(z.clone()).is_none() {
                span.insert(z.clone());
                generators.push(z);
            }
        }
        FpHomologyBasis { p, generators, span, boundaries: count }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Coordinates of the class of a cycle in terms of `generators`.
    pub fn class_of(&self, cycle: &FpVec) -> Option<Vec<u64>> {
        let t = self.span.solve(cycle.clone())?;
        let mut out = vec![0; self.generators.len()];
        // generator j is insertion number boundaries + j
        for (i, x) in t {
            if i >= self.boundaries {
                out[i - self.boundaries] = x;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_depends_on_p() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank_mod_p(&m, 2), 1);
        assert_eq!(rank_mod_p(&m, 3), 1);
        assert_eq!(rank_mod_p(&m, 5), 2);
    }

    #[test]
    fn solve_combination() {
        let mut e = FpEchelon::new(5);
        e.insert(vec![(0, 1), (1, 2)]);
        e.insert(vec![(1, 1)]);
        let t = e.solve(vec![(0, 2), (1, 1)]).unwrap();
        // 2*(1,2) + 2*(0,1) = (2, 6) = (2, 1) mod 5
        assert_eq!(t, vec![(0, 2), (1, 2)]);
    }
}
