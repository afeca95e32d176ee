use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use strata::linalg::{elementary_divisors, smith_normal_form, Int, SparseIntMatrix};

// Bareiss elimination over BigInt, returns (rank, determinant when square).
fn bareiss(rows: &[Vec<BigInt>]) -> (usize, BigInt) {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let (n, m) = (a.len(), a.first().map_or(0, Vec::len));
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    let mut rank = 0;
    for c in 0..m {
        let Some(p) = (rank..n).find(|&i| !a[i][c].is_zero()) else { continue };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        for i in rank + 1..n {
            for j in c + 1..m {
                a[i][j] = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == n {
            break;
        }
    }
    let det = if n == m && rank == n { sign * prev } else { BigInt::zero() };
    (rank, det)
}

fn big(m: &SparseIntMatrix) -> Vec<Vec<BigInt>> {
    m.to_dense().iter().map(|r| r.iter().map(Int::to_big).collect()).collect()
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=30, 1usize..=30, 0u32..4).prop_flat_map(|(r, c, sparsity)| {
        let entry = prop_oneof![
            sparsity + 1 => Just(0i64),
            3 => -3i64..=3,
            1 => -40i64..=40,
        ];
        prop::collection::vec(prop::collection::vec(entry, c), r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn smith_normal_form_is_a_valid_decomposition(rows in matrix()) {
        let m = SparseIntMatrix::from_dense(&rows);
        let snf = smith_normal_form(&m);
        let umv = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        prop_assert_eq!(umv.to_dense(), snf.d.to_dense());

        for (i, j, _) in snf.d.triplets() {
            prop_assert_eq!(i, j);
        }
        let divisors = snf.divisors();
        prop_assert!(divisors.iter().all(|d| !d.is_negative()));
        prop_assert!(divisors.windows(2).all(|w| w[0].divides(&w[1])));
        prop_assert_eq!(divisors.len(), snf.d.nnz());

        prop_assert!(bareiss(&big(&snf.u)).1.abs().is_one());
        prop_assert!(bareiss(&big(&snf.v)).1.abs().is_one());

        let (rank, det) = bareiss(&big(&m));
        prop_assert_eq!(rank, divisors.len());
        if m.nrows() == m.ncols() {
            let product = divisors.iter().fold(BigInt::one(), |acc, d| acc * d.to_big());
            prop_assert_eq!(det.abs(), if rank == m.nrows() { product } else { BigInt::zero() });
        }

        prop_assert_eq!(elementary_divisors(&m), divisors);
    }
}
