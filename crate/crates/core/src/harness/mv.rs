//! Mayer–Vietoris checks for Borel–Moore intersection homology over a field.
//!
//! For a cover `U = X \ |A|`, `V = X \ |B|` with `A ∩ B = ∅`, every open set
//! `X \ |S|` is modeled on one subdivision `Y` as `C^p̄(Y, St S)`, so the
//! restrictions are coordinate projections. `|S|` is the full subcomplex on
//! `S`. Connecting maps are not built:
//! the checks are exactness at `𝕳(U) ⊕ 𝕳(V)`, agreement of the two ranks the
//! connecting map must have, surjectivity onto `𝕳_0(U ∩ V)` and the
//! alternating-rank identity.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;

use super::checks::resolve_space;
use super::{CheckOptions, CheckReport, HarnessError};
use crate::chains::{pull_back, subdivide_around, FieldChains, SimplexBasis};
use crate::complex::{FilteredComplex, PerversitySpec, Simplex};
use crate::corpus::{self, Space};
use crate::linalg::field::rank_over;
use crate::linalg::{CoefficientRing, SparseVec};

/// Two vertex sets, by id, of the depth-one model of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

/// The space with its removed set radially subdivided once, and the map to
/// the original vertices.
fn first_model(space: &Space) -> Result<(FilteredComplex, Vec<u32>), HarnessError> {
    if space.removed.is_empty() {
        return Ok((space.complex.clone(), (0..space.complex.num_vertices() as u32).collect()));
    }
    Ok(subdivide_around(&space.complex, &space.removed, 1)?)
}

fn ids(fc: &FilteredComplex, set: &BTreeSet<u32>) -> Vec<String> {
    set.iter().map(|&v| fc.vertex_id(v).to_string()).collect()
}

/// Two covers: the two lowest-level vertices, then the highest against the
/// two lowest.
pub fn default_covers(space: &Space) -> Result<Vec<Cover>, HarnessError> {
    let (y0, _) = first_model(space)?;
    let removed: BTreeSet<String> = ids(&space.complex, &space.removed).into_iter().collect();
    let mut cand: Vec<u32> = (0..y0.num_vertices() as u32).filter(|&v| !removed.contains(y0.vertex_id(v))).collect();
    cand.sort_by_key(|&v| (y0.level(v), v));
    let id = |v: u32| y0.vertex_id(v).to_string();
    let mut covers = Vec::new();
    if cand.len() >= 2 {
        covers.push(Cover { a: vec![id(cand[0])], b: vec![id(cand[1])] });
    }
    if cand.len() >= 3 {
        let last = *cand.last().unwrap();
        covers.push(Cover { a: vec![id(last)], b: vec![id(cand[0]), id(cand[1])] });
    }
    Ok(covers)
}

fn project(v: &SparseVec, from: &SimplexBasis, to: &SimplexBasis, offset: usize) -> SparseVec {
    v.remap(|i| to.index(&from.items[i]).map(|j| j + offset))
}

fn shifted(vs: &[SparseVec], offset: usize) -> Vec<SparseVec> {
    vs.iter().map(|v| v.remap(|i| Some(i + offset))).collect()
}

/// Rank of the span of `vs` modulo the span of `base`.
fn rank_mod(vs: &[SparseVec], base: &[SparseVec], p: u64) -> usize {
    rank_over(vs.iter().chain(base), p) - rank_over(base, p)
}

pub fn mv_report(
    name: &str,
    space: &Space,
    cover: &Cover,
    spec: &PerversitySpec,
    ring: CoefficientRing,
) -> Result<CheckReport, HarnessError> {
    let start = Instant::now();
    if !ring.is_field() {
        return Err(HarnessError::Invalid(format!("Mayer-Vietoris checks need a field, not {ring}")));
    }
    let fc = &space.complex;
    let p = fc.make_perversity(spec)?;
    let (y0, o0) = first_model(space)?;
    let r0 = y0.vertex_set(&ids(fc, &space.removed).iter().map(String::as_str).collect::<Vec<_>>())?;
    let set = |names: &[String]| -> Result<BTreeSet<u32>, HarnessError> {
        let s = y0.vertex_set(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
        if s.is_empty() || !s.is_disjoint(&r0) {
            return Err(HarnessError::Invalid(format!("cover set {names:?} is empty or meets the removed set")));
        }
        Ok(s)
    };
    let (a0, b0) = (set(&cover.a)?, set(&cover.b)?);
    if !a0.is_disjoint(&b0) {
        return Err(HarnessError::Invalid("the two open sets do not cover the space".into()));
    }
    // Splitting the edges at A first keeps A and B apart, so that the full
    // subcomplex on R, A and B is the union of those on R, A and on R, B.
    let (ya, oa) = subdivide_around(&y0, &a0, 1)?;
    let names: Vec<String> = [&r0, &a0, &b0].iter().flat_map(|s| ids(&y0, s)).collect();
    let all = ya.vertex_set(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
    let (y, o1) = subdivide_around(&ya, &all, 1)?;
    let py = pull_back(&p, fc, &y, |v| o0[oa[o1[v as usize] as usize] as usize]);
    let star = |parts: &[&BTreeSet<u32>]| -> Result<Vec<Simplex>, HarnessError> {
        let names: Vec<String> = parts.iter().flat_map(|s| ids(&y0, s)).collect();
        let s = y.vertex_set(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
        Ok(if s.is_empty() { Vec::new() } else { y.closed_star(&s) })
    };
    let stars = [star(&[&r0])?, star(&[&r0, &a0])?, star(&[&r0, &b0])?, star(&[&r0, &a0, &b0])?];
    let chains = stars.par_iter().map(|n| FieldChains::new(&y, &py, n, ring)).collect::<Result<Vec<_>, _>>()?;
    let [x, u, v, w] = [&chains[0], &chains[1], &chains[2], &chains[3]];
    let q = x.p;
    let n = y.dim();

    let mut report = CheckReport::new("mv")
        .input("space", name)
        .input("a", cover.a.join(","))
        .input("b", cover.b.join(","))
        .input("perversity", spec)
        .input("ring", ring);
    let dims: Vec<[usize; 4]> = (0..=n).map(|k| [x.dim(k), u.dim(k), v.dim(k), w.dim(k)]).collect();
    let mut rank_alpha = Vec::new();
    let mut rank_beta = Vec::new();
    for k in 0..=n {
        let off = u.coords[k].len();
        let alpha: Vec<SparseVec> = x.cycles[k]
            .iter()
            .map(|z| {
                let mut pairs = project(z, &x.coords[k], &u.coords[k], 0).into_entries();
                pairs.extend(project(z, &x.coords[k], &v.coords[k], off).into_entries());
                SparseVec::from_pairs(pairs)
            })
            .collect();
        let sum_bounds: Vec<SparseVec> = u.boundaries[k].iter().cloned().chain(shifted(&v.boundaries[k], off)).collect();
        let ra = rank_mod(&alpha, &sum_bounds, q);
        let beta: Vec<SparseVec> = u.cycles[k]
            .iter()
            .map(|z| project(z, &u.coords[k], &w.coords[k], 0))
            .chain(v.cycles[k].iter().map(|z| project(z, &v.coords[k], &w.coords[k], 0)))
            .collect();
        let rb = rank_mod(&beta, &w.boundaries[k], q);
        let composite: Vec<SparseVec> = x.cycles[k]
            .iter()
            .map(|z| {
                let through_u = project(&project(z, &x.coords[k], &u.coords[k], 0), &u.coords[k], &w.coords[k], 0);
                let through_v = project(&project(z, &x.coords[k], &v.coords[k], 0), &v.coords[k], &w.coords[k], 0);
                through_u.combine(&1.into(), &(-1).into(), &through_v)
            })
            .collect();
        let contained = rank_mod(&composite, &w.boundaries[k], q) == 0;
        let [_, du, dv, _] = dims[k];
        report.labelled(k, "dim im = dim ker at H(U)+H(V)", (du + dv - rb).to_string(), ra.to_string(), "derived");
        report.condition(&format!("im in ker at H_{k}(U)+H_{k}(V)"), contained, "");
        rank_alpha.push(ra);
        rank_beta.push(rb);
    }
    for k in 0..=n {
        let coker = if k < n { dims[k + 1][3] - rank_beta[k + 1] } else { 0 };
        let ker = dims[k][0] - rank_alpha[k];
        report.labelled(k, "rank of the connecting map into H(X)", coker.to_string(), ker.to_string(), "derived");
    }
    report.labelled(0, "H_0(U)+H_0(V) onto H_0(U and V)", dims[0][3].to_string(), rank_beta[0].to_string(), "derived");
    let euler: i64 = dims
        .iter()
        .enumerate()
        .map(|(k, d)| (if k % 2 == 0 { 1 } else { -1 }) * (d[0] as i64 - d[1] as i64 - d[2] as i64 + d[3] as i64))
        .sum();
    report.condition("alternating-rank identity", euler == 0, format!("sum = {euler}"));
    let table = dims.iter().map(|d| format!("{}/{}/{}/{}", d[0], d[1], d[2], d[3])).collect::<Vec<_>>().join(" ");
    report.condition("dimensions X/U/V/UnV by degree", true, table);
    Ok(report.finish(start))
}

/// Two covers per space over `ℚ` and `ℤ/2` unless overridden.
pub fn check_mv(opts: &CheckOptions) -> Result<Vec<CheckReport>, HarnessError> {
    let ids: Vec<String> =
        if opts.spaces.is_empty() { corpus::entries().iter().map(|e| e.id.clone()).collect() } else { opts.spaces.clone() };
    let mut cases = Vec::new();
    for id in ids {
        let space = resolve_space(&id, &[])?;
        for cover in default_covers(&space)? {
            for spec in opts.perversities_or(&["0", "t"]) {
                for ring in opts.rings_or(&[CoefficientRing::Rationals, CoefficientRing::Mod(2)]) {
                    cases.push((id.clone(), cover.clone(), spec.clone(), ring));
                }
            }
        }
    }
    cases.par_iter().map(|(id, cover, spec, ring)| mv_report(id, &resolve_space(id, &[])?, cover, spec, *ring)).collect()
}
