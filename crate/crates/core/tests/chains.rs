use strata::blowup::BlowupComplex;
use strata::chains::{intersection_complex, IntersectionComplex};
use strata::complex::{FilteredComplex, PerversitySpec};
use strata::corpus;
use strata::linalg::{ChainComplex, SparseVec};

const SPACES: &[&str] = &["s2", "rp2", "cone_s2", "cone_rp2", "open_cone_rp2", "rp2_x_i"];

fn cores() -> Vec<(&'static str, FilteredComplex)> {
    SPACES
        .iter()
        .map(|id| {
            let space = corpus::space(id).unwrap();
            let p = space.complex.make_perversity(&PerversitySpec::Zero).unwrap();
            (*id, space.model(&p, 1).unwrap().core)
        })
        .collect()
}

fn specs() -> Vec<PerversitySpec> {
    let mut v = vec![PerversitySpec::Zero, PerversitySpec::Gm(vec![0, 1]), PerversitySpec::Top];
    v.extend((-1..=3).map(PerversitySpec::Constant));
    v
}

fn assert_squares_to_zero(c: &ChainComplex, what: &str) {
    for k in c.degrees() {
        let t = c.target(k);
        if c.dim(t) == 0 || c.dim(c.target(t)) == 0 {
            continue;
        }
        let dd = c.out(t).mul(c.out(k)).unwrap();
        assert!(dd.is_zero(), "{what}: d∘d ≠ 0 from degree {k}");
    }
}

// Chains of `small` expressed in the simplex coordinates of `big`.
fn lift(small: &IntersectionComplex, big: &IntersectionComplex, k: usize, v: &SparseVec) -> SparseVec {
    v.remap(|i| big.coords[k].index(&small.coords[k].items[i]))
}

#[test]
fn differentials_square_to_zero() {
    for (id, fc) in cores() {
        assert_squares_to_zero(&BlowupComplex::new(&fc).full_complex().unwrap(), &format!("{id} full blow-up"));
        for spec in specs() {
            let p = fc.make_perversity(&spec).unwrap();
            let ic = intersection_complex(&fc, &p).unwrap();
            assert_squares_to_zero(&ic.complex, &format!("{id} intersection chains {spec:?}"));
            let bc = BlowupComplex::new(&fc).perverse_subcomplex(&p).unwrap();
            assert_squares_to_zero(&bc.complex, &format!("{id} blown-up cochains {spec:?}"));
        }
    }
}

#[test]
fn intersection_chains_grow_with_the_perversity() {
    for (id, fc) in cores() {
        let perversities: Vec<_> = specs().iter().map(|s| fc.make_perversity(s).unwrap()).collect();
        let complexes: Vec<_> = perversities.iter().map(|p| intersection_complex(&fc, p).unwrap()).collect();
        for (i, p) in perversities.iter().enumerate() {
            for (j, q) in perversities.iter().enumerate() {
                if i == j || !p.le(q) {
                    continue;
                }
                let (small, big) = (&complexes[i], &complexes[j]);
                for k in 0..=fc.dim() {
                    for b in small.lattices[k].basis() {
                        let v = lift(small, big, k, b);
                        assert_eq!(v.nnz(), b.nnz(), "{id}: allowable simplex lost from {i} to {j} in degree {k}");
                        assert!(big.lattices[k].contains(&v), "{id}: chain of {i} not a chain of {j} in degree {k}");
                    }
                }
            }
        }
    }
}

#[test]
fn blown_up_cochains_grow_with_the_perversity() {
    for (id, fc) in cores() {
        let blowup = BlowupComplex::new(&fc);
        let perversities: Vec<_> = specs().iter().map(|s| fc.make_perversity(s).unwrap()).collect();
        let complexes: Vec<_> = perversities.iter().map(|p| blowup.perverse_subcomplex(p).unwrap()).collect();
        for (i, p) in perversities.iter().enumerate() {
            for (j, q) in perversities.iter().enumerate() {
                if i == j || !p.le(q) {
                    continue;
                }
                let (small, big) = (&complexes[i], &complexes[j]);
                for k in 0..=fc.dim() {
                    for b in small.lattices[k].basis() {
                        let v = b.remap(|c| big.coords[k].index(&small.coords[k].items[c]));
                        assert_eq!(v.nnz(), b.nnz(), "{id}: allowable cell lost from {i} to {j} in degree {k}");
                        assert!(big.lattices[k].contains(&v), "{id}: cochain of {i} not a cochain of {j} in degree {k}");
                    }
                }
            }
        }
    }
}
