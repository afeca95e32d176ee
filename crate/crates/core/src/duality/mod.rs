//! Orientation, fundamental cycle, cup and cap products on blown-up cochains
//! and the duality map `𝒟 = - ⌢ Γ`.

mod product;

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::blowup::{blowup_cohomology, BlowupCell, BlowupComplex, PerverseCochains};
use crate::chains::{
    borel_moore_ih, faces_closure, modular_intersection_complex, tame_boundary, ChainError, IntersectionComplex, OpenModel, SimplexBasis,
};
use crate::complex::{FilteredComplex, Perversity, Simplex};
use crate::linalg::{AbelianGroup, ChainComplex, CoefficientRing, Int, LinalgError, ModularComplex, SparseIntMatrix, SparseVec};
use crate::perverse::Basis;

pub use product::{cohomology_cup_matrix, duality_on_homology, intersection_product, IntersectionProduct, Scalar};

#[derive(Debug, Error)]
pub enum DualityError {
    #[error("not orientable over {ring}: the regular face {face} cannot be cooriented")]
    NonOrientable { ring: String, face: String },
    #[error("the fundamental chain has nonzero boundary at {0}")]
    NotACycle(String),
    #[error("{0} is not a field")]
    NotAField(String),
    #[error("duality map is not invertible in degree {0}")]
    NotInvertible(usize),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Signs on the `n`-simplices. `integral` is false for the all-ones
/// orientation used in characteristic 2 when no integral one exists.
#[derive(Clone, Debug)]
pub struct Orientation {
    pub signs: HashMap<Simplex, i64>,
    pub integral: bool,
}

/// Coherent signs on the `n`-simplices, propagated across regular
/// `(n-1)`-faces, one spanning tree per component of the regular part.
pub fn orient(fc: &FilteredComplex, ring: CoefficientRing) -> Result<Orientation, DualityError> {
    match orient_integral(fc) {
        Ok(signs) => Ok(Orientation { signs, integral: true }),
        Err(_) if ring.characteristic() == 2 => {
            let signs = fc.simplices(fc.dim()).iter().map(|s| (s.clone(), 1)).collect();
            Ok(Orientation { signs, integral: false })
        }
        Err(face) => Err(DualityError::NonOrientable { ring: ring.to_string(), face }),
    }
}

fn orient_integral(fc: &FilteredComplex) -> Result<HashMap<Simplex, i64>, String> {
    let n = fc.dim();
    let tops = fc.simplices(n);
    let mut by_face: HashMap<Simplex, Vec<(usize, i64)>> = HashMap::new();
    for (t, s) in tops.iter().enumerate() {
        for (f, sign) in tame_boundary(fc, s) {
            by_face.entry(f).or_default().push((t, sign));
        }
    }
    let mut sign: Vec<i64> = vec![0; tops.len()];
    for start in 0..tops.len() {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for (f, inc) in tame_boundary(fc, &tops[t]) {
                let here = sign[t] * inc;
                for &(u, inc_u) in &by_face[&f] {
                    if u == t {
                        continue;
                    }
                    let want = -here * inc_u;
                    if sign[u] == 0 {
                        sign[u] = want;
                        queue.push_back(u);
                    } else if sign[u] != want {
                        return Err(fc.describe(&f));
                    }
                }
            }
        }
    }
    Ok(tops.iter().cloned().zip(sign).collect())
}

/// `Γ = Σ sign(σ) σ` over the `n`-simplices.
#[derive(Clone, Debug)]
pub struct FundamentalCycle {
    pub chain: Vec<(Simplex, Int)>,
    pub integral: bool,
}

/// The fundamental chain, checked to be a cycle relative to `frontier` (over
/// ℤ, or mod 2 for a characteristic-2 orientation) and `0̄`-allowable.
pub fn fundamental_cycle(fc: &FilteredComplex, orientation: &Orientation, frontier: &[Simplex]) -> Result<FundamentalCycle, DualityError> {
    let n = fc.dim();
    let zero = fc.make_perversity(&crate::complex::PerversitySpec::Zero).map_err(ChainError::from)?;
    let mut chain = Vec::new();
    let mut boundary: HashMap<Simplex, i64> = HashMap::new();
    for s in fc.simplices(n) {
        let sign = orientation.signs[s];
        if !crate::chains::is_allowable(fc, s, &zero) {
            return Err(DualityError::NotACycle(format!("{} is not 0-allowable", fc.describe(s))));
        }
        for (f, inc) in tame_boundary(fc, s) {
            *boundary.entry(f).or_insert(0) += sign * inc;
        }
        chain.push((s.clone(), Int::from(sign)));
    }
    let in_frontier = faces_closure(frontier);
    for (f, c) in boundary {
        let bad = if orientation.integral { c != 0 } else { c % 2 != 0 };
        if bad && !in_frontier.contains(&f) {
            return Err(DualityError::NotACycle(fc.describe(&f)));
        }
    }
    Ok(FundamentalCycle { chain, integral: orientation.integral })
}

fn parity(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Runs of `s` by level: `runs[i]` is the slice of level-`i` vertices.
fn runs<'a>(fc: &FilteredComplex, s: &'a [u32]) -> Vec<&'a [u32]> {
    let n = fc.dim();
    let mut out = Vec::with_capacity(n + 1);
    let mut start = 0;
    for i in 0..=n {
        let mut end = start;
        while end < s.len() && fc.level(s[end]) == i {
            end += 1;
        }
        out.push(&s[start..end]);
        start = end;
    }
    out
}

/// `1_e ⌢ σ` for a regular simplex `σ`: factorwise back-face
/// Alexander–Whitney on `cσ_0 × ... × cσ_{n-1} × σ_n`, pushed to `σ`.
pub fn cap_cell(fc: &FilteredComplex, e: &BlowupCell, sigma: &[u32]) -> Option<(Simplex, i64)> {
    let n = fc.dim();
    let fs = runs(fc, &e.simplex);
    let ss = runs(fc, sigma);
    let mut front = Vec::new();
    // (k_i, m_i): cochain degree and cell dimension of each factor.
    let mut km = Vec::with_capacity(n + 1);
    let mut exp = 0i64;
    for i in 0..=n {
        let (f, s) = (fs[i], ss[i]);
        let a = s.len();
        if i < n && e.eps(i) {
            if f != s {
                return None;
            }
            km.push((a as i64, a as i64));
            exp += a as i64;
        } else {
            if f.is_empty() || f.len() > a || f != &s[a - f.len()..] {
                return None;
            }
            let r = &s[..=a - f.len()];
            front.extend_from_slice(r);
            let m = if i < n { a } else { a - 1 } as i64;
            km.push((f.len() as i64 - 1, m));
            if i < n {
                exp += (a + r.len()) as i64;
            }
        }
    }
    let mut shift = 0i64;
    for &(k, m) in &km {
        exp += k * shift + k * m + k * (k - 1) / 2;
        shift += m;
    }
    Some((front, parity(exp)))
}

/// `1_e ⌣ 1_f`: factorwise front/back Alexander–Whitney, when the result is a
/// cell of `X`.
pub fn cup_cell(fc: &FilteredComplex, e: &BlowupCell, f: &BlowupCell) -> Option<(BlowupCell, i64)> {
    let n = fc.dim();
    let es = runs(fc, &e.simplex);
    let fs = runs(fc, &f.simplex);
    let mut simplex = Vec::new();
    let mut cone = 0u64;
    let mut de = Vec::with_capacity(n + 1);
    let mut df = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (a, b) = (es[i], fs[i]);
        let (ea, eb) = (i < n && e.eps(i), i < n && f.eps(i));
        de.push(a.len() as i64 - 1 + ea as i64);
        df.push(b.len() as i64 - 1 + eb as i64);
        if eb {
            if !(a.is_empty() && ea) {
                return None;
            }
            simplex.extend_from_slice(b);
            cone |= 1 << i;
        } else {
            if a.is_empty() || b.is_empty() || a.last() != b.first() {
                return None;
            }
            simplex.extend_from_slice(a);
            simplex.extend_from_slice(&b[1..]);
            if ea {
                cone |= 1 << i;
            }
        }
    }
    if !fc.contains(&simplex) {
        return None;
    }
    let mut exp = 0i64;
    for j in 0..=n {
        for i in 0..j {
            exp += de[j] * df[i];
        }
    }
    Some((BlowupCell { simplex, cone }, parity(exp)))
}

/// `ω ⌢ ξ` for a cochain and a chain given as lists of terms.
pub fn cap(fc: &FilteredComplex, omega: &[(BlowupCell, Int)], xi: &[(Simplex, Int)]) -> Vec<(Simplex, Int)> {
    let mut acc: HashMap<Simplex, Int> = HashMap::new();
    for (e, a) in omega {
        for (s, b) in xi {
            if let Some((r, sign)) = cap_cell(fc, e, s) {
                let t = acc.entry(r).or_insert_with(|| Int::from(0));
                *t = &*t + &(&(a * b) * &Int::from(sign));
            }
        }
    }
    sorted_terms(acc)
}

/// `ω ⌣ η` for cochains given as lists of terms.
pub fn cup(fc: &FilteredComplex, omega: &[(BlowupCell, Int)], eta: &[(BlowupCell, Int)]) -> Vec<(BlowupCell, Int)> {
    let mut acc: HashMap<BlowupCell, Int> = HashMap::new();
    for (e, a) in omega {
        for (f, b) in eta {
            if let Some((c, sign)) = cup_cell(fc, e, f) {
                let t = acc.entry(c).or_insert_with(|| Int::from(0));
                *t = &*t + &(&(a * b) * &Int::from(sign));
            }
        }
    }
    sorted_terms(acc)
}

fn sorted_terms<K: Ord>(acc: HashMap<K, Int>) -> Vec<(K, Int)> {
    let mut v: Vec<(K, Int)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// Every cell `e` with `1_e ⌢ ξ ≠ 0`, with that cap, for a chain `ξ` of
/// top-dimensional simplices.
fn cap_table(fc: &FilteredComplex, xi: &[(Simplex, Int)]) -> HashMap<BlowupCell, Vec<(Simplex, Int)>> {
    let n = fc.dim();
    let mut table: HashMap<BlowupCell, HashMap<Simplex, Int>> = HashMap::new();
    for (s, c) in xi {
        let ss = runs(fc, s);
        // Choices per level: Some(len) takes the back face of that length
        // with ε = 0, None takes the whole part with ε = 1.
        let mut choices: Vec<Vec<Option<usize>>> = Vec::with_capacity(n + 1);
        for (i, part) in ss.iter().enumerate() {
            let mut opts: Vec<Option<usize>> = (1..=part.len()).map(Some).collect();
            if i < n {
                opts.push(None);
            }
            choices.push(opts);
        }
        let mut idx = vec![0usize; n + 1];
        'outer: loop {
            let mut simplex = Vec::new();
            let mut cone = 0u64;
            for i in 0..=n {
                match choices[i][idx[i]] {
                    Some(len) => simplex.extend_from_slice(&ss[i][ss[i].len() - len..]),
                    None => {
                        simplex.extend_from_slice(ss[i]);
                        cone |= 1 << i;
                    }
                }
            }
            let e = BlowupCell { simplex, cone };
            if let Some((r, sign)) = cap_cell(fc, &e, s) {
                let t = table.entry(e).or_default().entry(r).or_insert_with(|| Int::from(0));
                *t = &*t + &(c * &Int::from(sign));
            }
            for i in 0..=n {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
    }
    table.into_iter().map(|(e, m)| (e, sorted_terms(m))).collect()
}

/// `- ⌢ Γ` as a lookup from cells, with the frontier of an open model.
pub struct CapWithGamma {
    table: HashMap<BlowupCell, Vec<(Simplex, Int)>>,
    frontier: HashSet<Simplex>,
}

impl CapWithGamma {
    pub fn new(model: &OpenModel, ring: CoefficientRing) -> Result<CapWithGamma, DualityError> {
        let orientation = orient(&model.core, ring)?;
        let gamma = fundamental_cycle(&model.core, &orientation, &model.frontier)?;
        Ok(CapWithGamma { table: cap_table(&model.core, &gamma.chain), frontier: faces_closure(&model.frontier) })
    }

    /// `ω ⌢ Γ` for `ω` in the cell coordinates `cells`, written in the
    /// coordinates `simplices` modulo the frontier. Terms on other simplices
    /// must vanish (mod `modulus` if given).
    pub fn apply(
        &self,
        cells: &Basis<BlowupCell>,
        simplices: &SimplexBasis,
        omega: &SparseVec,
        modulus: Option<&Int>,
    ) -> Result<SparseVec, LinalgError> {
        let mut acc: HashMap<usize, Int> = HashMap::new();
        let mut stray: HashMap<&Simplex, Int> = HashMap::new();
        for (i, a) in omega.iter() {
            let Some(terms) = self.table.get(&cells.items[i]) else { continue };
            for (s, b) in terms {
                if self.frontier.contains(s) {
                    continue;
                }
                let t = match simplices.index(s) {
                    Some(idx) => acc.entry(idx).or_insert(Int::ZERO),
                    None => stray.entry(s).or_insert(Int::ZERO),
                };
                *t = &*t + &(a * b);
            }
        }
        let vanishes = |c: &Int| modulus.map_or(c.is_zero(), |m| m.divides(c));
        if !stray.values().all(vanishes) {
            return Err(LinalgError::NotInLattice);
        }
        Ok(SparseVec::from_pairs(acc))
    }
}

/// Chain-level duality map between a perverse cochain complex and the
/// matching intersection chain complex, both in lattice coordinates.
#[derive(Clone, Debug)]
pub struct DualityMap {
    pub n: usize,
    pub cochains: PerverseCochains,
    pub chains: IntersectionComplex,
    /// `maps[k]`: `Ñ^k_p̄ → C^p̄_{n-k}` (relative to the frontier).
    pub maps: Vec<SparseIntMatrix>,
}

/// `𝒟 = - ⌢ Γ` on an open model (a compact space when the frontier is
/// empty) over `ℤ`. `ring` only selects the orientation; see
/// [`modular_duality_cone`] for `ℤ/m`-chains.
pub fn duality_map(model: &OpenModel, ring: CoefficientRing) -> Result<DualityMap, DualityError> {
    let fc = &model.core;
    let n = fc.dim();
    let cap = CapWithGamma::new(model, ring)?;
    let cochains = BlowupComplex::new(fc).perverse_subcomplex(&model.perversity)?;
    let chains = model.complex()?;
    let mut maps = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let j = n - k;
        let cols = cochains.lattices[k]
            .basis()
            .par_iter()
            .map(|v| chains.lattices[j].coordinates(&cap.apply(&cochains.coords[k], &chains.coords[j], v, None)?))
            .collect::<Result<Vec<_>, _>>()?;
        maps.push(SparseIntMatrix::from_columns(chains.lattices[j].rank(), cols));
    }
    Ok(DualityMap { n, cochains, chains, maps })
}

impl DualityMap {
    /// Mapping cone of `𝒟`, graded by chain degree `0..=n+1`: degree `j` is
    /// `Ñ^{n-j+1} ⊕ C_j`.
    pub fn cone(&self) -> (Vec<usize>, Vec<SparseIntMatrix>) {
        let n = self.n as i64;
        let a_dim = |j: i64| if (0..=n).contains(&j) { self.cochains.complex.dim(n - j) } else { 0 };
        let c_dim = |j: i64| self.chains.complex.dim(j);
        let dims: Vec<usize> = (0..=n + 1).map(|j| a_dim(j - 1) + c_dim(j)).collect();
        let mut mats = Vec::with_capacity(dims.len());
        for j in 0..=n + 1 {
            let rows = if j == 0 { 0 } else { dims[j as usize - 1] };
            let off = a_dim(j - 2);
            let mut cols = Vec::with_capacity(dims[j as usize]);
            for col in 0..a_dim(j - 1) {
                let k = n - j + 1;
                let mut pairs: Vec<(usize, Int)> = Vec::new();
                if j >= 2 {
                    for (r, x) in self.cochains.complex.out(k).col(col).iter() {
                        pairs.push((r, -x));
                    }
                }
                if j >= 1 {
                    for (r, x) in self.maps[k as usize].col(col).iter() {
                        pairs.push((off + r, x.clone()));
                    }
                }
                cols.push(SparseVec::from_pairs(pairs));
            }
            for col in 0..c_dim(j) {
                let v = if j >= 1 { self.chains.complex.out(j).col(col).remap(|r| Some(off + r)) } else { SparseVec::new() };
                cols.push(v);
            }
            mats.push(SparseIntMatrix::from_columns(rows, cols));
        }
        (dims, mats)
    }

    /// True when `𝒟 ⊗ R` is a quasi-isomorphism for `R = ℤ` or `ℚ`, i.e.
    /// its cone is acyclic.
    pub fn is_quasi_iso(&self, ring: CoefficientRing) -> Result<bool, DualityError> {
        let (dims, mats) = self.cone();
        let c = ChainComplex::homological(0, dims, mats)?;
        Ok(c.homology_all(ring).iter().all(|(_, g)| g.is_zero()))
    }
}

/// Mapping cone of `𝒟` on the `ℤ/m` complexes of an open model, graded as in
/// [`DualityMap::cone`].
pub fn modular_duality_cone(model: &OpenModel, m: u64) -> Result<ModularComplex, DualityError> {
    let fc = &model.core;
    let n = fc.dim();
    let cap = CapWithGamma::new(model, CoefficientRing::Mod(m))?;
    let modulus = Int::from(m as i64);
    let (cells, coch) = BlowupComplex::new(fc).modular_subcomplex(&model.perversity, m)?;
    let (simplices, chains) = modular_intersection_complex(fc, &model.perversity, &model.frontier, m)?;
    // maps[k]: 𝒟 on the spanning columns of degree k, in simplex coordinates of degree n - k.
    let mut maps = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let cols = coch.spans[k]
            .columns()
            .par_iter()
            .map(|v| cap.apply(&cells[k], &simplices[n - k], v, Some(&modulus)))
            .collect::<Result<Vec<_>, _>>()?;
        maps.push(SparseIntMatrix::from_columns(simplices[n - k].len(), cols));
    }
    let n = n as i64;
    let a_amb = |j: i64| if (0..=n).contains(&j) { cells[(n - j) as usize].len() } else { 0 };
    let c_amb = |j: i64| if (0..=n).contains(&j) { simplices[j as usize].len() } else { 0 };
    let mut spans = Vec::new();
    let mut images = Vec::new();
    for j in 0..=n + 1 {
        let off = a_amb(j - 1);
        let mut span_cols = Vec::new();
        let mut image_cols = Vec::new();
        let target_off = a_amb(j - 2);
        if (0..=n).contains(&(j - 1)) {
            let k = (n - j + 1) as usize;
            for (col, v) in coch.spans[k].columns().iter().enumerate() {
                span_cols.push(v.clone());
                let mut pairs: Vec<(usize, Int)> = Vec::new();
                if j >= 2 {
                    pairs.extend(coch.images[k].col(col).iter().map(|(r, x)| (r, -x)));
                }
                if j >= 1 {
                    pairs.extend(maps[k].col(col).iter().map(|(r, x)| (target_off + r, x.clone())));
                }
                image_cols.push(SparseVec::from_pairs(pairs));
            }
        }
        if (0..=n).contains(&j) {
            let ju = j as usize;
            for (col, v) in chains.spans[ju].columns().iter().enumerate() {
                span_cols.push(v.remap(|r| Some(off + r)));
                image_cols.push(chains.images[ju].col(col).remap(|r| Some(target_off + r)));
            }
        }
        let target_rows = if j == 0 { 0 } else { a_amb(j - 2) + c_amb(j - 1) };
        spans.push(SparseIntMatrix::from_columns(off + c_amb(j), span_cols));
        images.push(SparseIntMatrix::from_columns(target_rows, image_cols));
    }
    Ok(ModularComplex::new(m, 0, false, spans, images)?)
}

/// Chain-level verdict: `𝒟` induces an isomorphism on homology with
/// coefficients in `R`.
pub fn chain_level_duality(model: &OpenModel, ring: CoefficientRing) -> Result<bool, DualityError> {
    match ring {
        CoefficientRing::Mod(m) => Ok(modular_duality_cone(model, m)?.homology_all().iter().all(|(_, g)| g.is_zero())),
        _ => duality_map(model, ring)?.is_quasi_iso(ring),
    }
}

/// One degree of a duality comparison.
#[derive(Clone, Debug, Serialize)]
pub struct DualityDegree {
    pub k: usize,
    pub cohomology: AbelianGroup,
    pub homology: AbelianGroup,
    pub iso: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub degrees: Vec<DualityDegree>,
    /// `Some(verdict)` when the chain-level map was built.
    pub chain_level: Option<bool>,
    pub stable: bool,
}

impl DualityReport {
    pub fn groups_match(&self) -> bool {
        self.degrees.iter().all(|d| d.iso)
    }

    pub fn passed(&self) -> bool {
        self.groups_match() && self.chain_level.unwrap_or(true) && self.stable
    }
}

/// Compares `ℋ^k_p̄(U; R)` with `𝕳^{∞,p̄}_{n-k}(U; R)` for `U = |X| \ |A|`,
/// and optionally checks that `- ⌢ Γ` is a quasi-isomorphism.
pub fn verify_duality(
    fc: &FilteredComplex,
    removed: &std::collections::BTreeSet<u32>,
    p: &Perversity,
    ring: CoefficientRing,
    chain_level: bool,
) -> Result<DualityReport, DualityError> {
    let n = fc.dim();
    let bm = borel_moore_ih(fc, removed, p, ring)?;
    let model = OpenModel::new(fc, removed, p, bm.depths.1.max(1))?;
    let cohomology = blowup_cohomology(&model.core, &model.perversity, ring)?;
    let degrees = (0..=n)
        .map(|k| {
            let h = bm.groups[n - k].clone();
            DualityDegree { k, iso: cohomology[k] == h, cohomology: cohomology[k].clone(), homology: h }
        })
        .collect();
    let chain_level = if chain_level { Some(chain_level_duality(&model, ring)?) } else { None };
    Ok(DualityReport { degrees, chain_level, stable: bm.stable })
}

/// Same comparison for the dual-complex cohomology `H(Hom(C^p̄_*, ℤ)) ⊗ R`.
pub fn verify_dual_complex(
    fc: &FilteredComplex,
    removed: &std::collections::BTreeSet<u32>,
    p: &Perversity,
    ring: CoefficientRing,
) -> Result<DualityReport, DualityError> {
    let n = fc.dim();
    let bm = borel_moore_ih(fc, removed, p, ring)?;
    let model = OpenModel::new(fc, removed, p, bm.depths.1.max(1))?;
    let cohomology = crate::blowup::dual_complex_cohomology(&model.core, &model.perversity, ring)?;
    let degrees = (0..=n)
        .map(|k| {
            let h = bm.groups[n - k].clone();
            DualityDegree { k, iso: cohomology[k] == h, cohomology: cohomology[k].clone(), homology: h }
        })
        .collect();
    Ok(DualityReport { degrees, chain_level: None, stable: bm.stable })
}
