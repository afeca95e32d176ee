use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{perverse_homology, relative_intersection_complex, ChainError, IntersectionComplex};
use crate::complex::{FilteredComplex, Perversity, Simplex};
use crate::linalg::{AbelianGroup, CoefficientRing};

/// Default cap on the number of radial subdivisions tried.
pub const DEFAULT_MAX_SUBDIV: usize = 3;

/// `STRATA_MAX_SUBDIV`, or the default; never below 2.
pub fn max_subdivision_depth() -> usize {
    std::env::var("STRATA_MAX_SUBDIV").ok().and_then(|s| s.trim().parse::<usize>().ok()).unwrap_or(DEFAULT_MAX_SUBDIV).max(2)
}

/// Compact model of `U = |X| \ |A|`: the complement `K` of the open star of
/// `A` after `depth` radial subdivisions, with the frontier `F` where `K`
/// meets the closed star. `𝕳^∞(U) = 𝕳(K, F)`.
#[derive(Clone, Debug)]
pub struct OpenModel {
    pub core: FilteredComplex,
    pub frontier: Vec<Simplex>,
    pub perversity: Perversity,
    pub depth: usize,
}

impl OpenModel {
    pub fn new(fc: &FilteredComplex, a: &BTreeSet<u32>, p: &Perversity, depth: usize) -> Result<OpenModel, ChainError> {
        if a.is_empty() {
            return Ok(OpenModel { core: fc.clone(), frontier: Vec::new(), perversity: p.clone(), depth: 0 });
        }
        let (cur, origin) = subdivide_around(fc, a, depth)?;
        let a_ids: Vec<&str> = a.iter().map(|&v| fc.vertex_id(v)).collect();
        let a_cur = cur.vertex_set(&a_ids)?;
        let core = cur.open_star_complement(&a_cur)?;
        let mut gens = BTreeSet::new();
        for f in cur.facets().iter().filter(|f| f.iter().any(|v| a_cur.contains(v))) {
            let g: Vec<u32> = f.iter().copied().filter(|v| !a_cur.contains(v)).collect();
            if !g.is_empty() {
                gens.insert(g);
            }
        }
        let frontier = gens.into_iter().map(|g| core.embed(&cur, &g).expect("frontier lies in the core")).collect();
        let core_origin = |v: u32| origin[cur.vertex(core.vertex_id(v)).expect("core vertex") as usize];
        let perversity = pull_back(p, fc, &core, core_origin);
        Ok(OpenModel { core, frontier, perversity, depth })
    }

    pub fn complex(&self) -> Result<IntersectionComplex, ChainError> {
        relative_intersection_complex(&self.core, &self.perversity, &self.frontier)
    }

    /// `𝕳(K, F; R)` at this depth.
    pub fn homology(&self, ring: CoefficientRing) -> Result<Vec<AbelianGroup>, ChainError> {
        perverse_homology(&self.core, &self.perversity, &self.frontier, ring)
    }
}

/// `depth` radial subdivisions of `fc` around `a`, with the vertex of `fc`
/// each new vertex takes its stratum from.
pub fn subdivide_around(fc: &FilteredComplex, a: &BTreeSet<u32>, depth: usize) -> Result<(FilteredComplex, Vec<u32>), ChainError> {
    let a_ids: Vec<&str> = a.iter().map(|&v| fc.vertex_id(v)).collect();
    let mut cur = fc.clone();
    let mut origin: Vec<u32> = (0..fc.num_vertices() as u32).collect();
    for _ in 0..depth {
        let a_cur = cur.vertex_set(&a_ids)?;
        let next = cur.radial_subdivision(&a_cur)?;
        let mut next_origin = Vec::with_capacity(next.num_vertices());
        for v in 0..next.num_vertices() as u32 {
            let id = next.vertex_id(v);
            let o = match cur.vertex(id) {
                Some(w) => origin[w as usize],
                None => {
                    let (x, y) = split_midpoint(&cur, id).expect("radial midpoint id");
                    let (inner, outer) = if a_cur.contains(&x) { (x, y) } else { (y, x) };
                    let w = if cur.level(inner) > cur.level(outer) { inner } else { outer };
                    origin[w as usize]
                }
            };
            next_origin.push(o);
        }
        cur = next;
        origin = next_origin;
    }
    Ok((cur, origin))
}

fn split_midpoint(cur: &FilteredComplex, id: &str) -> Option<(u32, u32)> {
    // Primes are appended only to dodge collisions, so try the full id first.
    let mut id = id;
    loop {
        let hit = id.match_indices('~').find_map(|(i, _)| Some((cur.vertex(&id[..i])?, cur.vertex(&id[i + 1..])?)));
        if hit.is_some() {
            return hit;
        }
        id = id.strip_suffix('\'')?;
    }
}

/// Transfers `p` on `src` to `dst`, where `origin` sends each vertex of `dst`
/// to a vertex of `src` in the stratum it comes from.
pub fn pull_back(p: &Perversity, src: &FilteredComplex, dst: &FilteredComplex, origin: impl Fn(u32) -> u32) -> Perversity {
    let values =
        dst.strata().iter().map(|s| if s.is_regular() { 0 } else { p.value(src.stratum_of_vertex(origin(s.vertices[0]))) }).collect();
    Perversity { name: p.name.clone(), values }
}

/// Vertex map `dst → src` by id, for complexes built by `cone`, `suspension`,
/// `product_with_interval`, `barycentric_subdivision` and
/// `radial_subdivision`, falling back to the highest-level vertex named in a
/// composite id.
pub fn origin_by_id(src: &FilteredComplex, dst: &FilteredComplex) -> HashMap<u32, u32> {
    let mut out = HashMap::new();
    for v in 0..dst.num_vertices() as u32 {
        let id = dst.vertex_id(v);
        if let Some(w) = resolve(src, id) {
            out.insert(v, w);
        }
    }
    out
}

fn resolve(src: &FilteredComplex, id: &str) -> Option<u32> {
    if let Some(w) = src.vertex(id) {
        return Some(w);
    }
    let parsed = if let Some(inner) = id.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        best(src, split_top(inner, ',').into_iter().filter_map(|p| resolve(src, p)))
    } else if let Some((base, _)) = id.rsplit_once('#') {
        resolve(src, base)
    } else if id.contains('~') {
        best(src, split_top(id, '~').into_iter().filter_map(|p| resolve(src, p)))
    } else {
        None
    };
    parsed.or_else(|| resolve(src, id.strip_suffix('\'')?))
}

fn best(src: &FilteredComplex, it: impl Iterator<Item = u32>) -> Option<u32> {
    it.max_by_key(|&w| src.level(w))
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Borel–Moore groups at the first depth where two consecutive depths agree.
#[derive(Clone, Debug, Serialize)]
pub struct BorelMooreResult {
    pub groups: Vec<AbelianGroup>,
    pub depths: (usize, usize),
    pub stable: bool,
}

/// `𝕳^{∞,p̄}_*(|X| \ |A|; R)`, checking depth `d` against `d + 1` starting from
/// `d = 1` up to [`max_subdivision_depth`].
pub fn borel_moore_ih(
    fc: &FilteredComplex,
    a: &BTreeSet<u32>,
    p: &Perversity,
    ring: CoefficientRing,
) -> Result<BorelMooreResult, ChainError> {
    let build = |d: usize| OpenModel::new(fc, a, p, d)?.homology(ring);
    let max = max_subdivision_depth();
    let mut prev = build(1)?;
    let mut d = 1;
    let mut stable = a.is_empty();
    while !stable && d < max {
        let next = build(d + 1)?;
        stable = next == prev;
        prev = next;
        d += 1;
    }
    let groups = prev;
    let depths = if a.is_empty() { (0, 0) } else { (d - 1, d) };
    Ok(BorelMooreResult { groups, depths, stable })
}
