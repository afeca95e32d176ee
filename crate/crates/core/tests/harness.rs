use strata::complex::PerversitySpec;
use strata::harness::{self, CheckKind, CheckOptions, ComputeRequest, Theory};
use strata::linalg::CoefficientRing;

#[test]
fn compute_serializes_to_the_report_shape() {
    let req = ComputeRequest {
        space: "susp_rp3_punctured".into(),
        theory: Theory::Bm,
        perversity: PerversitySpec::Constant(1),
        ring: CoefficientRing::Integers,
        remove: vec![],
    };
    let report = harness::compute(&req).unwrap();
    let v = serde_json::to_value(&report).unwrap();
    for key in ["check", "inputs", "degrees", "pass", "ms"] {
        assert!(v.get(key).is_some(), "missing `{key}`");
    }
    let computed: Vec<&str> = v["degrees"].as_array().unwrap().iter().map(|d| d["computed"].as_str().unwrap()).collect();
    assert_eq!(computed, ["0", "Z/2", "0", "0", "Z"]);
    assert!(report.pass);
}

#[test]
fn check_names_and_scans_parse() {
    for name in ["cone", "products", "mv", "duality", "example38", "r-invariance", "subdivision"] {
        assert!(name.parse::<CheckKind>().is_ok(), "{name}");
    }
    assert!("nope".parse::<CheckKind>().is_err());
    assert_eq!(harness::parse_scan("-1..3").unwrap(), (-1, 3));
    assert!(harness::parse_scan("3").is_err());
}

#[test]
fn mayer_vietoris_on_the_sphere() {
    let opts = CheckOptions {
        rings: vec![CoefficientRing::Rationals, CoefficientRing::Mod(2)],
        spaces: vec!["s2".into(), "open_cone_rp2".into()],
        ..CheckOptions::default()
    };
    let reports = harness::run_check(CheckKind::Mv, &opts).unwrap();
    assert!(!reports.is_empty());
    assert!(harness::all_pass(&reports));
}

#[test]
fn a_wrong_expectation_fails_the_report() {
    let opts =
        CheckOptions { spaces: vec!["s2".into()], scan: Some((0, 0)), rings: vec![CoefficientRing::Rationals], ..CheckOptions::default() };
    let mut reports = harness::run_check(CheckKind::Cone, &opts).unwrap();
    assert!(harness::all_pass(&reports));
    reports[0].degrees[0].expected = Some("0".into());
    assert!(!reports[0].degrees[0].matches());
}
