use num_traits::{One, Zero};
use strata::corpus;
use strata::duality::{cohomology_cup_matrix, duality_on_homology, intersection_product, Scalar};
use strata::linalg::CoefficientRing;

const Q: CoefficientRing = CoefficientRing::Rationals;
const F2: CoefficientRing = CoefficientRing::Mod(2);

fn perversity(id: &str, spec: &str) -> (corpus::Space, strata::complex::Perversity) {
    let s = corpus::space(id).unwrap();
    let p = s.complex.make_perversity(&spec.parse().unwrap()).unwrap();
    (s, p)
}

#[test]
fn sphere_point_meets_fundamental_class() {
    for ring in [Q, F2] {
        let (s, p) = perversity("s2", "0");
        let one = [Scalar::one()];
        let r = intersection_product(&s.complex, &s.removed, (&p, 0, &one), (&p, 2, &one), ring).unwrap().unwrap();
        assert_eq!(r.degree, 0);
        assert_eq!(r.coords.len(), 1);
        assert!(!r.coords[0].is_zero(), "{ring}");
        let none = intersection_product(&s.complex, &s.removed, (&p, 0, &one), (&p, 0, &one), ring).unwrap();
        assert!(none.is_none());
    }
}

#[test]
fn duality_matrices_are_invertible() {
    for (id, ring) in [("s2", Q), ("s2", F2), ("rp2", F2), ("susp_rp3", Q), ("susp_rp3", F2)] {
        let (s, p) = perversity(id, "0");
        for m in duality_on_homology(&s.complex, &s.removed, &p, ring).unwrap() {
            assert_eq!(m.len(), m.first().map_or(m.len(), |r| r.len()), "{id} {ring}");
            let det = determinant(m, ring);
            assert!(!det.is_zero(), "{id} {ring}");
        }
    }
}

fn determinant(mut a: Vec<Vec<Scalar>>, ring: CoefficientRing) -> Scalar {
    let p = ring.characteristic();
    let norm = |x: Scalar| {
        if p == 0 {
            return x;
        }
        let m = num_bigint::BigInt::from(p);
        let inv = x.denom().modpow(&(&m - 2u32), &m);
        Scalar::from_integer(((x.numer() * inv) % &m + &m) % &m)
    };
    let n = a.len();
    let mut det = Scalar::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !norm(a[r][c].clone()).is_zero()) else { return Scalar::zero() };
        a.swap(c, r);
        det = norm(det * &a[c][c]);
        let piv = a[c][c].clone();
        for r in c + 1..n {
            let f = &a[r][c] / &piv;
            for j in c..n {
                let t = &a[r][j] - &f * &a[c][j];
                a[r][j] = norm(t);
            }
        }
    }
    det
}

#[test]
fn unit_cups_to_identity() {
    for ring in [Q, F2] {
        let (s, p) = perversity("s2", "0");
        for l in 0..=2 {
            let t = cohomology_cup_matrix(&s.complex, &p, &p, (0, l), ring).unwrap();
            let u = cohomology_cup_matrix(&s.complex, &p, &p, (l, 0), ring).unwrap();
            if t.is_empty() || t[0].is_empty() {
                continue;
            }
            assert_eq!(t[0].len(), 1);
            assert!(!t[0][0][0].is_zero());
            assert_eq!(t[0][0][0], u[0][0][0], "graded commutativity in degrees (0, {l})");
        }
    }
}

#[test]
fn projective_plane_square_mod_two() {
    let (s, p) = perversity("rp2", "0");
    let t = cohomology_cup_matrix(&s.complex, &p, &p, (1, 1), F2).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0][0], vec![Scalar::one()]);
    let q = cohomology_cup_matrix(&s.complex, &p, &p, (1, 1), Q).unwrap();
    assert!(q.is_empty());
}
