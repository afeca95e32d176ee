//! One line per acceptance criterion, written straight to stderr so that it
//! shows even when the test passes.

use std::collections::HashMap;
use std::io::Write;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use strata::blowup::{BlowupCell, BlowupComplex};
use strata::chains::{intersection_complex, tame_boundary};
use strata::complex::{FilteredComplex, PerversitySpec, Simplex};
use strata::corpus;
use strata::duality::{cap_cell, cup_cell};
use strata::harness::{self, CheckOptions, CheckReport};
use strata::linalg::{elementary_divisors, smith_normal_form, ChainComplex, SparseIntMatrix};

fn line(n: usize, title: &str, failures: &[String]) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(err, "criterion {n} {verdict}: {title}").unwrap();
    for f in failures.iter().take(12) {
        writeln!(err, "    {f}").unwrap();
    }
    if failures.len() > 12 {
        writeln!(err, "    ... {} more", failures.len() - 12).unwrap();
    }
}

fn judge(n: usize, title: &str, failures: Vec<String>) {
    line(n, title, &failures);
    assert!(failures.is_empty(), "criterion {n} failed");
}

fn describe(r: &CheckReport) -> String {
    let rows: Vec<String> = r
        .degrees
        .iter()
        .filter(|d| !d.matches())
        .map(|d| {
            format!(
                "k={} {} expected {} computed {}",
                d.k,
                d.label.as_deref().unwrap_or(""),
                d.expected.as_deref().unwrap_or("-"),
                d.computed
            )
        })
        .collect();
    let conds: Vec<String> = r.conditions.iter().filter(|c| !c.holds).map(|c| format!("{} ({})", c.name, c.detail)).collect();
    format!("{} {:?}: {}", r.check, r.inputs, rows.into_iter().chain(conds).collect::<Vec<_>>().join("; "))
}

fn failures(reports: &[CheckReport]) -> Vec<String> {
    reports.iter().filter(|r| !r.pass).map(describe).collect()
}

fn run(result: Result<Vec<CheckReport>, harness::HarnessError>) -> Vec<CheckReport> {
    result.unwrap_or_else(|e| panic!("check did not run: {e}"))
}

fn example38() -> &'static [CheckReport] {
    static CELL: OnceLock<Vec<CheckReport>> = OnceLock::new();
    CELL.get_or_init(|| run(harness::check_example38()))
}

fn products() -> &'static [CheckReport] {
    static CELL: OnceLock<Vec<CheckReport>> = OnceLock::new();
    CELL.get_or_init(|| run(harness::check_products(&CheckOptions::default())))
}

#[test]
fn criterion_1_example_38() {
    judge(1, "punctured suspension of RP3, p = 1, over Z", failures(example38()));
}

#[test]
fn criterion_2_cone_formula() {
    let reports = run(harness::check_cone(&CheckOptions::default()));
    judge(2, &format!("cone formula, {} cases", reports.len()), failures(&reports));
}

#[test]
fn criterion_3_r_invariance() {
    let reports = run(harness::check_r_invariance(&CheckOptions::default()));
    judge(3, &format!("X x I invariance, {} cases", reports.len()), failures(&reports));
}

#[test]
fn criterion_4_bm_products() {
    judge(4, &format!("Borel-Moore product formulas, {} cases", products().len()), failures(products()));
}

#[test]
fn criterion_5_duality() {
    let reports = run(harness::check_duality(&CheckOptions::default()));
    judge(5, &format!("Poincare duality, {} cases", reports.len()), failures(&reports));
}

fn snf_failures() -> Vec<String> {
    let strategy = (1usize..=30, 1usize..=30).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![2 => Just(0i64), 3 => -3i64..=3, 1 => -40i64..=40], c), r)
    });
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let result = runner.run(&strategy, |rows| {
        let m = SparseIntMatrix::from_dense(&rows);
        let snf = smith_normal_form(&m);
        let umv = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        prop_assert_eq!(umv.to_dense(), snf.d.to_dense());
        prop_assert!(snf.d.triplets().all(|(i, j, _)| i == j));
        let divisors = snf.divisors();
        prop_assert!(divisors.windows(2).all(|w| w[0].divides(&w[1])));
        prop_assert_eq!(elementary_divisors(&m), divisors);
        Ok(())
    });
    match result {
        Ok(()) => vec![],
        Err(e) => vec![format!("smith normal form: {e}")],
    }
}

fn squares_to_zero(c: &ChainComplex) -> bool {
    c.degrees().all(|k| {
        let t = c.target(k);
        c.dim(t) == 0 || c.dim(c.target(t)) == 0 || c.out(t).mul(c.out(k)).unwrap().is_zero()
    })
}

fn corpus_cores() -> Vec<(String, FilteredComplex)> {
    corpus::entries()
        .iter()
        .map(|e| {
            let space = e.build().unwrap();
            let p = space.complex.make_perversity(&PerversitySpec::Zero).unwrap();
            (e.id.clone(), space.model(&p, 1).unwrap().core)
        })
        .collect()
}

fn invariance_specs(fc: &FilteredComplex) -> Vec<PerversitySpec> {
    let mut v = vec![PerversitySpec::Zero, PerversitySpec::Top];
    v.extend(harness::non_gm_perversities(fc));
    v
}

fn differential_failures(cores: &[(String, FilteredComplex)]) -> Vec<String> {
    let mut out = vec![];
    for (id, fc) in cores {
        let blowup = BlowupComplex::new(fc);
        for spec in invariance_specs(fc) {
            let p = fc.make_perversity(&spec).unwrap();
            if !squares_to_zero(&intersection_complex(fc, &p).unwrap().complex) {
                out.push(format!("{id} {spec:?}: intersection chains d∘d ≠ 0"));
            }
            if !squares_to_zero(&blowup.perverse_subcomplex(&p).unwrap().complex) {
                out.push(format!("{id} {spec:?}: blown-up cochains d∘d ≠ 0"));
            }
        }
    }
    out
}

fn add<K: std::hash::Hash + Eq>(acc: &mut HashMap<K, i64>, terms: impl IntoIterator<Item = (K, i64)>) {
    for (s, c) in terms {
        *acc.entry(s).or_insert(0) += c;
    }
}

fn clean<K: Ord>(acc: HashMap<K, i64>) -> Vec<(K, i64)> {
    let mut v: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    v.sort();
    v
}

// ∂(ω ⌢ σ) = δω ⌢ σ ± ω ⌢ ∂σ and δ(ω ⌣ η) = δω ⌣ η ± ω ⌣ δη on basis cells.
fn leibniz_failures(id: &str, fc: &FilteredComplex) -> Vec<String> {
    let blow = BlowupComplex::new(fc);
    let regular: Vec<Simplex> =
        (0..=fc.dim()).flat_map(|k| fc.simplices(k).iter().filter(|s| fc.is_regular(s)).cloned().collect::<Vec<_>>()).collect();
    let mut out = vec![];
    for (i, cells) in blow.cells.iter().enumerate() {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        for e in &cells.items {
            for s in &regular {
                let mut lhs = HashMap::new();
                if let Some((r, c)) = cap_cell(fc, e, s) {
                    add(&mut lhs, tame_boundary(fc, &r).into_iter().map(|(f, x)| (f, x * c)));
                }
                let mut rhs = HashMap::new();
                for (f, c) in blow.coboundary(e) {
                    add(&mut rhs, cap_cell(fc, &f, s).map(|(r, x)| (r, c * x)));
                }
                for (f, c) in tame_boundary(fc, s) {
                    add(&mut rhs, cap_cell(fc, e, &f).map(|(r, x)| (r, sign * c * x)));
                }
                if clean(lhs) != clean(rhs) {
                    out.push(format!("{id}: cap Leibniz fails for {e:?} and {s:?}"));
                }
            }
        }
    }
    let all: Vec<&BlowupCell> = blow.cells.iter().flat_map(|c| c.items.iter()).collect();
    let cup_terms = |x: &[(BlowupCell, i64)], y: &[(BlowupCell, i64)]| {
        let mut acc = HashMap::new();
        for (a, s) in x {
            for (b, t) in y {
                add(&mut acc, cup_cell(fc, a, b).map(|(c, u)| (c, s * t * u)));
            }
        }
        acc
    };
    for e in &all {
        let sign = if blow.degree(e).is_multiple_of(2) { 1 } else { -1 };
        let de = blow.coboundary(e);
        for f in &all {
            let mut lhs = HashMap::new();
            if let Some((c, u)) = cup_cell(fc, e, f) {
                add(&mut lhs, blow.coboundary(&c).into_iter().map(|(d, x)| (d, u * x)));
            }
            let mut rhs = cup_terms(&de, &[((*f).clone(), 1)]);
            add(&mut rhs, cup_terms(&[((*e).clone(), 1)], &blow.coboundary(f)).into_iter().map(|(c, x)| (c, sign * x)));
            if clean(lhs) != clean(rhs) {
                out.push(format!("{id}: cup Leibniz fails for {e:?} and {f:?}"));
            }
        }
    }
    out
}

// C^p̄ ⊂ C^q̄ and Ñ_p̄ ⊂ Ñ_q̄ for p̄ ≤ q̄.
fn monotonicity_failures(cores: &[(String, FilteredComplex)]) -> Vec<String> {
    let mut out = vec![];
    for (id, fc) in cores {
        let blowup = BlowupComplex::new(fc);
        let mut specs = vec![PerversitySpec::Zero, PerversitySpec::Gm(vec![0, 1]), PerversitySpec::Top];
        specs.extend((-1..=2).map(PerversitySpec::Constant));
        let ps: Vec<_> = specs.iter().map(|s| fc.make_perversity(s).unwrap()).collect();
        let chains: Vec<_> = ps.iter().map(|p| intersection_complex(fc, p).unwrap()).collect();
        let cochains: Vec<_> = ps.iter().map(|p| blowup.perverse_subcomplex(p).unwrap()).collect();
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                if i == j || !ps[i].le(&ps[j]) {
                    continue;
                }
                for k in 0..=fc.dim() {
                    let (a, b) = (&chains[i], &chains[j]);
                    let lost = a.lattices[k].basis().iter().any(|v| {
                        let w = v.remap(|x| b.coords[k].index(&a.coords[k].items[x]));
                        w.nnz() != v.nnz() || !b.lattices[k].contains(&w)
                    });
                    let (c, d) = (&cochains[i], &cochains[j]);
                    let lost_co = c.lattices[k].basis().iter().any(|v| {
                        let w = v.remap(|x| d.coords[k].index(&c.coords[k].items[x]));
                        w.nnz() != v.nnz() || !d.lattices[k].contains(&w)
                    });
                    if lost || lost_co {
                        out.push(format!("{id}: degree {k} not monotone from {:?} to {:?}", specs[i], specs[j]));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn criterion_6_property_suites() {
    let cores = corpus_cores();
    let small: Vec<_> =
        cores.iter().filter(|(id, _)| ["s2", "rp2", "cone_s2", "cone_rp2", "open_cone_s2"].contains(&id.as_str())).collect();
    let mut parts: Vec<(&str, Vec<String>)> = vec![
        ("smith normal form on 1000 random matrices up to 30x30", snf_failures()),
        ("d∘d = 0 on intersection chains and blown-up cochains", differential_failures(&cores)),
        ("cap and cup Leibniz rules", small.iter().flat_map(|(id, fc)| leibniz_failures(id, fc)).collect()),
        ("perversity monotonicity", monotonicity_failures(&cores)),
    ];
    let subdivision = run(harness::check_subdivision(&CheckOptions::default()));
    parts.push(("subdivision invariance", failures(&subdivision)));
    let mv = run(harness::check_mv(&CheckOptions::default()));
    parts.push(("Mayer-Vietoris exactness over Q and Z/2", failures(&mv)));

    let mut all = vec![];
    for (name, f) in &parts {
        let status = if f.is_empty() { "ok" } else { "failed" };
        all.push(format!("{name}: {status}"));
    }
    let bad: Vec<String> = parts.into_iter().flat_map(|(_, f)| f).collect();
    line(6, &format!("property suites ({})", all.join(", ")), &bad);
    assert!(bad.is_empty(), "criterion 6 failed");
}

#[test]
fn criterion_7_bm_stabilization() {
    let mut out = vec![];
    let mut seen = 0;
    for r in example38().iter().chain(products()) {
        for c in r.conditions.iter().filter(|c| c.name == "bm stabilization") {
            seen += 1;
            if !c.holds || c.detail != "depth 1 vs 2" {
                out.push(format!("{} {:?}: {}", r.check, r.inputs, c.detail));
            }
        }
    }
    if seen == 0 {
        out.push("no Borel-Moore computations found".into());
    }
    judge(7, &format!("Borel-Moore depth 1 vs 2 agree, {seen} computations"), out);
}
