use std::time::Instant;

use strata::complex::PerversitySpec;
use strata::corpus;
use strata::duality::verify_duality;
use strata::linalg::CoefficientRing;

fn specs() -> Vec<PerversitySpec> {
    ["0", "1", "t", "D(0)", "D(1)", "D(t)"].iter().map(|s| s.parse().unwrap()).collect()
}

fn sweep(id: &str, rings: &[CoefficientRing], chain_level: bool) {
    let space = corpus::space(id).unwrap();
    for spec in specs() {
        let p = space.complex.make_perversity(&spec).unwrap();
        for &ring in rings {
            let t = Instant::now();
            let r = verify_duality(&space.complex, &space.removed, &p, ring, chain_level).unwrap();
            eprintln!("{id} {spec} {ring}: {:?} {:.2?}", r.chain_level, t.elapsed());
            assert!(r.passed(), "{id} {spec} {ring}: {r:?}");
        }
    }
}

const ALL: [CoefficientRing; 3] = [CoefficientRing::Integers, CoefficientRing::Rationals, CoefficientRing::Mod(2)];

#[test]
fn spheres() {
    sweep("s2", &ALL, true);
    sweep("s4", &ALL, true);
}

#[test]
fn suspension_of_rp3() {
    sweep("susp_rp3", &ALL, true);
}

#[test]
fn cone_models() {
    sweep("open_cone_s2", &ALL, true);
    sweep("open_cone_rp3", &ALL, true);
    sweep("open_cone_rp2", &[CoefficientRing::Mod(2)], true);
}
