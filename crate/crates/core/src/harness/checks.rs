use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::oracle::{simplicial_cohomology, simplicial_homology};
use super::{CheckOptions, CheckReport, HarnessError};
use crate::blowup::{blowup_cohomology, dual_complex_cohomology};
use crate::chains::{borel_moore_ih, intersection_homology, BorelMooreResult};
use crate::complex::{FilteredComplex, Perversity, PerversitySpec};
use crate::corpus::{self, Space};
use crate::duality::{orient, verify_duality};
use crate::linalg::{AbelianGroup, CoefficientRing};

const Z: CoefficientRing = CoefficientRing::Integers;
const Q: CoefficientRing = CoefficientRing::Rationals;
const F2: CoefficientRing = CoefficientRing::Mod(2);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theory {
    Ih,
    Bm,
    Blowup,
    DualComplex,
}

impl FromStr for Theory {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ih" => Theory::Ih,
            "bm" => Theory::Bm,
            "blowup" => Theory::Blowup,
            "dual-complex" => Theory::DualComplex,
            _ => return Err(HarnessError::Invalid(format!("unknown theory `{s}`"))),
        })
    }
}

impl Theory {
    pub fn name(self) -> &'static str {
        match self {
            Theory::Ih => "ih",
            Theory::Bm => "bm",
            Theory::Blowup => "blowup",
            Theory::DualComplex => "dual-complex",
        }
    }
}

/// A corpus id or a recipe, with extra vertices (by id) removed.
pub fn resolve_space(name: &str, remove: &[String]) -> Result<Space, HarnessError> {
    let mut space = match corpus::entry(name) {
        Ok(e) => e.build()?,
        Err(_) => corpus::build_recipe(name)?,
    };
    for id in remove {
        let v = space.complex.vertex(id).ok_or_else(|| HarnessError::Invalid(format!("no vertex `{id}` in `{name}`")))?;
        space.removed.insert(v);
    }
    Ok(space)
}

fn groups_of(
    space: &Space,
    theory: Theory,
    p: &Perversity,
    ring: CoefficientRing,
) -> Result<(Vec<AbelianGroup>, Option<BorelMooreResult>), HarnessError> {
    if theory == Theory::Bm {
        let r = borel_moore_ih(&space.complex, &space.removed, p, ring)?;
        return Ok((r.groups.clone(), Some(r)));
    }
    let m = space.model(p, 1)?;
    let g = match theory {
        Theory::Ih => intersection_homology(&m.core, &m.perversity, ring)?,
        Theory::Blowup => blowup_cohomology(&m.core, &m.perversity, ring)?,
        _ => dual_complex_cohomology(&m.core, &m.perversity, ring)?,
    };
    Ok((g, None))
}

fn stabilization(report: &mut CheckReport, bm: &BorelMooreResult) {
    let detail = format!("depth {} vs {}", bm.depths.0, bm.depths.1);
    report.condition("bm stabilization", bm.stable, detail);
}

#[derive(Clone, Debug)]
pub struct ComputeRequest {
    pub space: String,
    pub theory: Theory,
    pub perversity: PerversitySpec,
    pub ring: CoefficientRing,
    pub remove: Vec<String>,
}

/// Groups of one theory, without expectations.
pub fn compute(req: &ComputeRequest) -> Result<CheckReport, HarnessError> {
    let start = Instant::now();
    let space = resolve_space(&req.space, &req.remove)?;
    let p = space.complex.make_perversity(&req.perversity)?;
    let mut report = CheckReport::new("compute")
        .input("space", &req.space)
        .input("theory", req.theory.name())
        .input("perversity", &req.perversity)
        .input("ring", req.ring);
    if !req.remove.is_empty() {
        report = report.input("remove", req.remove.join(","));
    }
    let (groups, bm) = groups_of(&space, req.theory, &p, req.ring)?;
    report.groups(None, &groups, req.ring, "");
    if let Some(bm) = &bm {
        stabilization(&mut report, bm);
    }
    Ok(report.finish(start))
}

/// Runs independent cases in parallel, keeping their order.
fn run_all<T: Sync>(
    cases: &[T],
    f: impl Fn(&T) -> Result<CheckReport, HarnessError> + Sync + Send,
) -> Result<Vec<CheckReport>, HarnessError> {
    cases.par_iter().map(f).collect()
}

fn base_of(name: &str) -> Result<FilteredComplex, HarnessError> {
    let s = resolve_space(name, &[])?;
    if !s.is_compact() {
        return Err(HarnessError::Invalid(format!("`{name}` is not compact")));
    }
    Ok(s.complex)
}

/// `ℋ^k(c̊L) = ℋ^k(L)` for `k ≤ p̄(v)` and `0` above, scanning `p̄(v)`.
pub fn check_cone(opts: &CheckOptions) -> Result<Vec<CheckReport>, HarnessError> {
    let mut cases = Vec::new();
    for l in opts.spaces_or(&["s2", "rp2", "rp3"]) {
        let dim = base_of(&l)?.dim() as i64;
        for v in opts.scan_or(-1, dim + 1) {
            for ring in opts.rings_or(&[Z, Q, F2]) {
                cases.push((l.clone(), v, ring));
            }
        }
    }
    run_all(&cases, |(l, v, ring)| {
        let start = Instant::now();
        let link = base_of(l)?;
        let space = corpus::build_recipe(&format!("open_cone({l})"))?;
        let spec = PerversitySpec::Constant(*v);
        let p = space.complex.make_perversity(&spec)?;
        let (computed, _) = groups_of(&space, Theory::Blowup, &p, *ring)?;
        let hl = simplicial_cohomology(&link, *ring);
        let expected: Vec<AbelianGroup> = (0..computed.len())
            .map(|k| if (k as i64) <= *v { hl.get(k).cloned().unwrap_or_default() } else { AbelianGroup::zero() })
            .collect();
        let mut report = CheckReport::new("cone").input("link", l).input("p(v)", v).input("ring", ring);
        report.groups(Some(&expected), &computed, *ring, "reference");
        Ok(report.finish(start))
    })
}

/// Borel–Moore groups of `ℝ × L` (`ΣL` minus both apices) and of `c̊L`.
pub fn check_products(opts: &CheckOptions) -> Result<Vec<CheckReport>, HarnessError> {
    let rings = opts.rings_or(&[Z]);
    let mut line_cases = Vec::new();
    for l in opts.spaces_or(&["rp3"]) {
        for spec in opts.perversities_or(&["0", "t"]) {
            for &ring in &rings {
                line_cases.push((l.clone(), spec.clone(), ring));
            }
        }
    }
    let mut out = run_all(&line_cases, |(l, spec, ring)| {
        let start = Instant::now();
        let link = base_of(l)?;
        let space = corpus::build_recipe(&format!("line({l})"))?;
        let p = space.complex.make_perversity(spec)?;
        let bm = borel_moore_ih(&space.complex, &space.removed, &p, *ring)?;
        let hl = simplicial_homology(&link, *ring);
        let expected: Vec<AbelianGroup> =
            (0..bm.groups.len()).map(|k| if k == 0 { AbelianGroup::zero() } else { hl.get(k - 1).cloned().unwrap_or_default() }).collect();
        let mut report =
            CheckReport::new("products").input("model", format!("R x {l}")).input("m", 1).input("perversity", spec).input("ring", ring);
        report.groups(Some(&expected), &bm.groups, *ring, "reference");
        stabilization(&mut report, &bm);
        Ok(report.finish(start))
    })?;
    let mut cone_cases = Vec::new();
    for l in opts.spaces_or(&["rp2"]) {
        let dim = base_of(&l)?.dim() as i64;
        for v in opts.scan_or(-1, dim + 1) {
            for &ring in &rings {
                cone_cases.push((l.clone(), v, ring));
            }
        }
    }
    out.extend(run_all(&cone_cases, |(l, v, ring)| {
        let start = Instant::now();
        let link = base_of(l)?;
        let space = corpus::build_recipe(&format!("open_cone({l})"))?;
        let p = space.complex.make_perversity(&PerversitySpec::Constant(*v))?;
        let bm = borel_moore_ih(&space.complex, &space.removed, &p, *ring)?;
        // D p̄(v) = t̄(v) - p̄(v), with t̄(v) = dim L - 1.
        let dp = link.dim() as i64 - 1 - v;
        let hl = simplicial_homology(&link, *ring);
        let expected: Vec<AbelianGroup> = (0..bm.groups.len())
            .map(|k| if (k as i64) <= dp + 1 || k == 0 { AbelianGroup::zero() } else { hl.get(k - 1).cloned().unwrap_or_default() })
            .collect();
        let mut report =
            CheckReport::new("products").input("model", format!("open cone on {l}")).input("m", 0).input("p(v)", v).input("ring", ring);
        report.groups(Some(&expected), &bm.groups, *ring, "reference");
        stabilization(&mut report, &bm);
        Ok(report.finish(start))
    })?);
    Ok(out)
}

/// `ℋ^k_p̄ ≅ 𝕳^{∞,p̄}_{n-k}` degree by degree, with the chain-level verdict.
/// Cases over rings where the space has no orientation are skipped.
pub fn check_duality(opts: &CheckOptions) -> Result<Vec<CheckReport>, HarnessError> {
    let mut cases = Vec::new();
    for id in opts.spaces_or(&["s2", "s4", "susp_rp3", "open_cone_s2", "open_cone_rp2", "open_cone_rp3"]) {
        let space = resolve_space(&id, &[])?;
        let p0 = space.complex.make_perversity(&PerversitySpec::Zero)?;
        let core = space.model(&p0, 1)?.core;
        for ring in opts.rings_or(&[Z, Q, F2]) {
            if orient(&core, ring).is_err() {
                continue;
            }
            for spec in opts.perversities_or(&["0", "1", "t", "D(0)", "D(1)", "D(t)"]) {
                cases.push((id.clone(), spec, ring));
            }
        }
    }
    run_all(&cases, |(id, spec, ring)| {
        let start = Instant::now();
        let space = resolve_space(id, &[])?;
        let p = space.complex.make_perversity(spec)?;
        let r = verify_duality(&space.complex, &space.removed, &p, *ring, true)?;
        let mut report = CheckReport::new("duality").input("space", id).input("perversity", spec).input("ring", ring);
        let n = r.degrees.len().saturating_sub(1);
        for d in &r.degrees {
            report.labelled(
                d.k,
                &format!("H^{} vs BM H_{}", d.k, n - d.k),
                d.homology.display_over(*ring),
                d.cohomology.display_over(*ring),
                "reference",
            );
        }
        if let Some(iso) = r.chain_level {
            report.condition("chain-level duality map is a quasi-isomorphism", iso, "mapping cone acyclic");
        }
        report.condition("bm stabilization", r.stable, "");
        Ok(report.finish(start))
    })
}

fn parse_groups(list: &[&str], ring: CoefficientRing) -> Vec<AbelianGroup> {
    list.iter().map(|s| AbelianGroup::parse_over(s, ring).expect("group literal")).collect()
}

/// The published table for `ΣℝP³ \ {*}` with `p̄ = 1̄` over `ℤ`, one report per
/// theory, and the flagged non-isomorphism `𝕳¹ ≇ 𝕳^∞_3`.
pub fn check_example38() -> Result<Vec<CheckReport>, HarnessError> {
    let id = "susp_rp3_punctured";
    let space = resolve_space(id, &[])?;
    let spec = PerversitySpec::Constant(1);
    let p = space.complex.make_perversity(&spec)?;
    let entry = corpus::entry(id)?;
    let table =
        |theory: &str| entry.expected.iter().find(|x| x.theory == theory && x.perversity == "1" && x.ring == "Z").expect("corpus row");
    let mut reports = Vec::new();
    let mut computed = BTreeMap::new();
    for theory in [Theory::Blowup, Theory::Bm, Theory::DualComplex] {
        let start = Instant::now();
        let row = table(theory.name());
        let expected = parse_groups(&row.groups.iter().map(String::as_str).collect::<Vec<_>>(), Z);
        let (groups, bm) = groups_of(&space, theory, &p, Z)?;
        let mut report =
            CheckReport::new("example38").input("space", id).input("theory", theory.name()).input("perversity", &spec).input("ring", Z);
        report.groups(Some(&expected), &groups, Z, &row.provenance);
        if let Some(bm) = &bm {
            stabilization(&mut report, bm);
        }
        computed.insert(theory.name(), groups);
        reports.push(report.finish(start));
    }
    let start = Instant::now();
    let dual = &computed["dual-complex"];
    let bm = &computed["bm"];
    let n = bm.len() - 1;
    let mut report =
        CheckReport::new("example38").input("space", id).input("theory", "dual-complex vs bm").input("perversity", &spec).input("ring", Z);
    for k in 0..=n {
        let label = format!("dual-complex H^{k} = {}, BM H_{}", dual[k].display_over(Z), n - k);
        report.info(k, &label, bm[n - k].display_over(Z));
    }
    let flagged = dual[1] != bm[n - 1];
    report.condition(
        "dual-complex H^1 is not isomorphic to BM H_3",
        flagged && dual[1] == AbelianGroup::parse("Z/2").unwrap(),
        format!("H^1 = {}, BM H_3 = {}", dual[1].display_over(Z), bm[n - 1].display_over(Z)),
    );
    let where_ = (0..=n).filter(|&k| dual[k] != bm[n - k]).map(|k| k.to_string()).collect::<Vec<_>>().join(",");
    report.condition("dual-complex and BM groups differ somewhere", !where_.is_empty(), format!("degrees {where_}"));
    reports.push(report.finish(start));
    Ok(reports)
}

/// Two perversities outside the Goresky–MacPherson range: `-1` and `t̄ + 1`
/// alternating over the singular strata, and the dual of that.
pub fn non_gm_perversities(fc: &FilteredComplex) -> [PerversitySpec; 2] {
    let values: BTreeMap<String, i64> =
        fc.singular_strata().enumerate().map(|(i, (_, s))| (s.id.clone(), if i % 2 == 0 { -1 } else { s.codim as i64 - 1 })).collect();
    let q = PerversitySpec::Explicit(values);
    [q.clone(), q.dual()]
}

fn corpus_ids(opts: &CheckOptions) -> Vec<String> {
    if opts.spaces.is_empty() {
        corpus::entries().iter().map(|e| e.id.clone()).collect()
    } else {
        opts.spaces.clone()
    }
}

/// Perversities for invariance checks: the requested ones, or `0̄`, `t̄` and
/// two non-GM ones.
fn invariance_specs(opts: &CheckOptions, fc: &FilteredComplex) -> Vec<PerversitySpec> {
    if !opts.perversities.is_empty() {
        return opts.perversities.clone();
    }
    let [a, b] = non_gm_perversities(fc);
    vec![PerversitySpec::Zero, PerversitySpec::Top, a, b]
}

/// `ℋ*_p̄(X × I) ≅ ℋ*_p̄(X)`; open spaces are replaced by their compact core.
pub fn check_r_invariance(opts: &CheckOptions) -> Result<Vec<CheckReport>, HarnessError> {
    let mut cases = Vec::new();
    for id in corpus_ids(opts) {
        let space = resolve_space(&id, &[])?;
        let core = space.model(&space.complex.make_perversity(&PerversitySpec::Zero)?, 1)?.core;
        for spec in invariance_specs(opts, &core) {
            for ring in opts.rings_or(&[Z]) {
                cases.push((id.clone(), spec.clone(), ring));
            }
        }
    }
    run_all(&cases, |(id, spec, ring)| {
        let start = Instant::now();
        let space = resolve_space(id, &[])?;
        let x = space.model(&space.complex.make_perversity(&PerversitySpec::Zero)?, 1)?.core;
        let y = x.product_with_interval(1)?;
        let hx = blowup_cohomology(&x, &x.make_perversity(spec)?, *ring)?;
        let hy = blowup_cohomology(&y, &y.make_perversity(spec)?, *ring)?;
        let mut report = CheckReport::new("r-invariance").input("space", id).input("perversity", spec).input("ring", ring);
        let mut expected = hx.clone();
        expected.resize(hy.len(), AbelianGroup::zero());
        report.groups(Some(&expected), &hy, *ring, "reference");
        Ok(report.finish(start))
    })
}

/// Spaces left out of the default subdivision check: their barycentric
/// subdivisions are too large to reduce in reasonable time.
const TOO_LARGE_TO_SUBDIVIDE: &[&str] = &["susp_rp3_punctured", "line_rp3", "susp_rp3_x_i"];

/// `𝕳^p̄_*(X) ≅ 𝕳^p̄_*(sd X)`; open spaces are replaced by their compact core.
pub fn check_subdivision(opts: &CheckOptions) -> Result<Vec<CheckReport>, HarnessError> {
    let mut ids = corpus_ids(opts);
    if opts.spaces.is_empty() {
        ids.retain(|id| !TOO_LARGE_TO_SUBDIVIDE.contains(&id.as_str()));
    }
    let mut cases = Vec::new();
    for id in ids {
        let space = resolve_space(&id, &[])?;
        let core = space.model(&space.complex.make_perversity(&PerversitySpec::Zero)?, 1)?.core;
        for spec in invariance_specs(opts, &core) {
            for ring in opts.rings_or(&[Z]) {
                cases.push((id.clone(), spec.clone(), ring));
            }
        }
    }
    run_all(&cases, |(id, spec, ring)| {
        let start = Instant::now();
        let space = resolve_space(id, &[])?;
        let x = space.model(&space.complex.make_perversity(&PerversitySpec::Zero)?, 1)?.core;
        let y = x.barycentric_subdivision()?;
        let hx = intersection_homology(&x, &x.make_perversity(spec)?, *ring)?;
        let hy = intersection_homology(&y, &y.make_perversity(spec)?, *ring)?;
        let mut report = CheckReport::new("subdivision").input("space", id).input("perversity", spec).input("ring", ring);
        report.groups(Some(&hx), &hy, *ring, "reference");
        Ok(report.finish(start))
    })
}
