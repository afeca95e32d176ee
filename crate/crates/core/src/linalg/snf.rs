//! Smith normal form over the integers.
//!
//! [`smith_normal_form`] returns the full decomposition `U·M·V = D` and is meant
//! for matrices of moderate size. [`elementary_divisors`] only needs the
//! diagonal: it first eliminates unit pivots sparsely (Markowitz order) and
//! then finishes the small residual densely.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::int::Int;
use super::sparse::{SparseIntMatrix, SparseVec};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnfResult {
    pub u: SparseIntMatrix,
    pub d: SparseIntMatrix,
    pub v: SparseIntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn divisors(&self) -> Vec<Int> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d.get(i, i)).take_while(|v| !v.is_zero()).collect()
    }
}

type Dense = Vec<Vec<Int>>;

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { Int::ONE } else { Int::ZERO }).collect()).collect()
}

fn to_sparse(m: &Dense, rows: usize, cols: usize) -> SparseIntMatrix {
    let columns =
        (0..cols).map(|j| SparseVec::from_pairs((0..rows).filter(|&i| !m[i][j].is_zero()).map(|i| (i, m[i][j].clone())))).collect();
    SparseIntMatrix::from_columns(rows, columns)
}

/// Row/column transforms recorded during dense reduction.
struct Transforms {
    u: Option<Dense>,
    u_inv: Option<Dense>,
    v: Option<Dense>,
}

impl Transforms {
    // row_a += f * row_b
    fn row_add(&mut self, a: usize, b: usize, f: &Int) {
        if let Some(u) = self.u.as_mut() {
            let (ra, rb) = two_rows(u, a, b);
            for (x, y) in ra.iter_mut().zip(rb.iter()) {
                if !y.is_zero() {
                    *x = &*x + &(f * y);
                }
            }
        }
        // inverse: col_b -= f * col_a
        if let Some(ui) = self.u_inv.as_mut() {
            for row in ui.iter_mut() {
                if !row[a].is_zero() {
                    row[b] = &row[b] - &(f * &row[a]);
                }
            }
        }
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        if let Some(u) = self.u.as_mut() {
            u.swap(a, b);
        }
        if let Some(ui) = self.u_inv.as_mut() {
            for row in ui.iter_mut() {
                row.swap(a, b);
            }
        }
    }

    fn row_neg(&mut self, a: usize) {
        if let Some(u) = self.u.as_mut() {
            for x in u[a].iter_mut() {
                *x = -&*x;
            }
        }
        if let Some(ui) = self.u_inv.as_mut() {
            for row in ui.iter_mut() {
                row[a] = -&row[a];
            }
        }
    }

    // rows (a, b) <- [[s, t], [p, q]] (a, b) with determinant 1
    fn row_mix(&mut self, a: usize, b: usize, s: &Int, t: &Int, p: &Int, q: &Int) {
        if let Some(u) = self.u.as_mut() {
            mix_rows(u, a, b, s, t, p, q);
        }
        // inverse matrix [[q, -t], [-p, s]] applied on columns
        if let Some(ui) = self.u_inv.as_mut() {
            for row in ui.iter_mut() {
                let (x, y) = (row[a].clone(), row[b].clone());
                row[a] = &(&x * q) - &(&y * p);
                row[b] = &(&y * s) - &(&x * t);
            }
        }
    }

    fn col_add(&mut self, a: usize, b: usize, f: &Int) {
        if let Some(v) = self.v.as_mut() {
            for row in v.iter_mut() {
                if !row[b].is_zero() {
                    row[a] = &row[a] + &(f * &row[b]);
                }
            }
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if let Some(v) = self.v.as_mut() {
            for row in v.iter_mut() {
                row.swap(a, b);
            }
        }
    }

    fn col_mix(&mut self, a: usize, b: usize, s: &Int, t: &Int, p: &Int, q: &Int) {
        if let Some(v) = self.v.as_mut() {
            for row in v.iter_mut() {
                let (x, y) = (row[a].clone(), row[b].clone());
                row[a] = &(&x * s) + &(&y * t);
                row[b] = &(&x * p) + &(&y * q);
            }
        }
    }
}

fn two_rows(m: &mut Dense, a: usize, b: usize) -> (&mut Vec<Int>, &Vec<Int>) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = m.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

fn mix_rows(m: &mut Dense, a: usize, b: usize, s: &Int, t: &Int, p: &Int, q: &Int) {
    let n = m[a].len();
    for j in 0..n {
        let (x, y) = (m[a][j].clone(), m[b][j].clone());
        if x.is_zero() && y.is_zero() {
            continue;
        }
        m[a][j] = &(&x * s) + &(&y * t);
        m[b][j] = &(&x * p) + &(&y * q);
    }
}

/// In-place dense Smith reduction of `m` (rows × cols). Returns the diagonal.
fn dense_reduce(m: &mut Dense, rows: usize, cols: usize, tr: &mut Transforms) -> Vec<Int> {
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest absolute value, ties broken by sparsity
        let mut best: Option<(Int, usize, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let a = &m[i][j];
                if a.is_zero() {
                    continue;
                }
                let abs = a.abs();
                let better = match &best {
                    None => true,
                    Some((b, _, _, _)) => abs < *b,
                };
                if better {
                    best = Some((abs, i, j, 0));
                    if best.as_ref().unwrap().0.is_unit() {
                        break;
                    }
                }
            }
            if best.as_ref().is_some_and(|b| b.0.is_unit()) {
                break;
            }
        }
        let Some((_, pi, pj, _)) = best else { break };
        if pi != t {
            m.swap(pi, t);
            tr.row_swap(pi, t);
        }
        if pj != t {
            for row in m.iter_mut() {
                row.swap(pj, t);
            }
            tr.col_swap(pj, t);
        }
        loop {
            let mut changed = false;
            // clear column t below the pivot
            for i in (t + 1)..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let p = m[t][t].clone();
                let a = m[i][t].clone();
                if p.divides(&a) {
                    let f = -a.div_exact(&p);
                    let (ri, rt) = two_rows(m, i, t);
                    for (x, y) in ri.iter_mut().zip(rt.iter()) {
                        if !y.is_zero() {
                            *x = &*x + &(&f * y);
                        }
                    }
                    tr.row_add(i, t, &f);
                } else {
                    let (g, s, tt) = p.ext_gcd(&a);
                    let pp = -a.div_exact(&g);
                    let qq = p.div_exact(&g);
                    mix_rows(m, t, i, &s, &tt, &pp, &qq);
                    tr.row_mix(t, i, &s, &tt, &pp, &qq);
                    changed = true;
                }
            }
            // clear row t right of the pivot
            for j in (t + 1)..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let p = m[t][t].clone();
                let a = m[t][j].clone();
                if p.divides(&a) {
                    let f = -a.div_exact(&p);
                    for row in m.iter_mut() {
                        if !row[t].is_zero() {
                            row[j] = &row[j] + &(&f * &row[t]);
                        }
                    }
                    tr.col_add(j, t, &f);
                } else {
                    let (g, s, tt) = p.ext_gcd(&a);
                    let pp = -a.div_exact(&g);
                    let qq = p.div_exact(&g);
                    for row in m.iter_mut() {
                        let (x, y) = (row[t].clone(), row[j].clone());
                        row[t] = &(&x * &s) + &(&y * &tt);
                        row[j] = &(&x * &pp) + &(&y * &qq);
                    }
                    tr.col_mix(t, j, &s, &tt, &pp, &qq);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // divisibility of the remaining block
            let p = m[t][t].clone();
            let mut offender = None;
            'outer: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !p.divides(&m[i][j]) {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            match offender {
                Some(i) => {
                    // row_t += row_i, then the loop clears again
                    let one = Int::ONE;
                    let (rt, ri) = two_rows(m, t, i);
                    for (x, y) in rt.iter_mut().zip(ri.iter()) {
                        if !y.is_zero() {
                            *x = &*x + y;
                        }
                    }
                    tr.row_add(t, i, &one);
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -&*x;
            }
            tr.row_neg(t);
        }
        diag.push(m[t][t].clone());
        t += 1;
    }
    diag
}

/// Full Smith normal form `U·M·V = D` with unimodular `U`, `V`.
pub fn smith_normal_form(m: &SparseIntMatrix) -> SnfResult {
    let (u, _, d, v) = smith_with_inverse(m, false);
    SnfResult { u, d, v }
}

/// Smith form that additionally returns `U⁻¹` when requested.
pub(crate) fn smith_with_inverse(
    m: &SparseIntMatrix,
    want_inverse: bool,
) -> (SparseIntMatrix, Option<SparseIntMatrix>, SparseIntMatrix, SparseIntMatrix) {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut dense = m.to_dense();
    let mut tr = Transforms { u: Some(identity(rows)), u_inv: want_inverse.then(|| identity(rows)), v: Some(identity(cols)) };
    let diag = dense_reduce(&mut dense, rows, cols, &mut tr);
    let mut d = SparseIntMatrix::zeros(rows, cols).into_columns();
    for (i, x) in diag.iter().enumerate() {
        d[i] = SparseVec::from_pairs([(i, x.clone())]);
    }
    (
        to_sparse(tr.u.as_ref().unwrap(), rows, rows),
        tr.u_inv.as_ref().map(|ui| to_sparse(ui, rows, rows)),
        SparseIntMatrix::from_columns(rows, d),
        to_sparse(tr.v.as_ref().unwrap(), cols, cols),
    )
}

/// Nonzero invariant factors of `m`, in divisibility order.
pub fn elementary_divisors(m: &SparseIntMatrix) -> Vec<Int> {
    let rows = m.nrows();
    let mut cols: Vec<Option<SparseVec>> = m.columns().iter().map(|c| Some(c.clone())).collect();
    let mut row_index: Vec<HashSet<usize>> = vec![HashSet::new(); rows];
    for (i, j, _) in m.triplets() {
        row_index[i].insert(j);
    }
    let mut units = 0usize;
    loop {
        let mut order: Vec<usize> = (0..cols.len()).filter(|&j| cols[j].as_ref().is_some_and(|c| !c.is_zero())).collect();
        order.sort_by_key(|&j| (cols[j].as_ref().unwrap().nnz(), j));
        let mut progressed = false;
        for j in order {
            let Some(col) = cols[j].as_ref() else { continue };
            // unit entry with the sparsest row
            let pick = col.iter().filter(|(_, v)| v.is_unit()).min_by_key(|(i, _)| (row_index[*i].len(), *i)).map(|(i, v)| (i, v.clone()));
            let Some((r, u)) = pick else { continue };
            let pivot_col = cols[j].take().unwrap();
            for &i in pivot_col.entries().iter().map(|(i, _)| i) {
                row_index[i].remove(&j);
            }
            let others: Vec<usize> = row_index[r].iter().copied().collect();
            for k in others {
                let old = cols[k].take().unwrap();
                let f = -(&old.get(r) * &u);
                let new = old.axpy(&f, &pivot_col);
                for (i, _) in old.iter() {
                    row_index[i].remove(&k);
                }
                for (i, _) in new.iter() {
                    row_index[i].insert(k);
                }
                cols[k] = Some(new);
            }
            debug_assert!(row_index[r].is_empty());
            units += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    // residual: remaining columns restricted to live rows
    let live_cols: Vec<&SparseVec> = cols.iter().flatten().filter(|c| !c.is_zero()).collect();
    let mut live_rows: Vec<usize> = live_cols.iter().flat_map(|c| c.iter().map(|(i, _)| i)).collect();
    live_rows.sort_unstable();
    live_rows.dedup();
    let mut divisors = vec![Int::ONE; units];
    if !live_cols.is_empty() {
        let pos: std::collections::HashMap<usize, usize> = live_rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let mut dense = vec![vec![Int::ZERO; live_cols.len()]; live_rows.len()];
        for (j, c) in live_cols.iter().enumerate() {
            for (i, v) in c.iter() {
                dense[pos[&i]][j] = v.clone();
            }
        }
        let mut tr = Transforms { u: None, u_inv: None, v: None };
        let (r, c) = (live_rows.len(), live_cols.len());
        divisors.extend(dense_reduce(&mut dense, r, c, &mut tr));
    }
    normalize_divisors(divisors)
}

/// Rewrites a list of nonzero diagonal entries into the divisibility chain
/// of the same diagonal matrix.
pub fn normalize_divisors(mut d: Vec<Int>) -> Vec<Int> {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    d.retain(|x| !x.is_zero());
    let n = d.len();
    // repeated gcd/lcm passes converge to the chain
    for i in 0..n {
        for j in (i + 1)..n {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = (&d[i] * &d[j]).div_exact(&g);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det_abs_one(m: &SparseIntMatrix) -> bool {
        // fraction-free determinant through the Smith form of m
        let r = smith_normal_form(m);
        let d = r.divisors();
        d.len() == m.nrows() && d.iter().all(|x| x.is_unit())
    }

    #[test]
    fn small_example() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 4], vec![0, 6]]);
        let r = smith_normal_form(&m);
        assert_eq!(r.divisors(), vec![Int::from(2), Int::from(6)]);
        let prod = r.u.mul(&m).unwrap().mul(&r.v).unwrap();
        assert_eq!(prod, r.d);
        assert!(det_abs_one(&r.u) && det_abs_one(&r.v));
        assert_eq!(elementary_divisors(&m), vec![Int::from(2), Int::from(6)]);
    }

    #[test]
    fn zero_and_identity() {
        let z = SparseIntMatrix::zeros(2, 3);
        let r = smith_normal_form(&z);
        assert!(r.d.is_zero());
        assert_eq!(r.u, SparseIntMatrix::identity(2));
        assert_eq!(r.v, SparseIntMatrix::identity(3));
        let i = SparseIntMatrix::identity(3);
        assert_eq!(smith_normal_form(&i).d, i);
        assert!(elementary_divisors(&z).is_empty());
    }

    #[test]
    fn inverse_is_tracked() {
        let m = SparseIntMatrix::from_dense(&[vec![3, 5, 7], vec![2, 4, 8], vec![1, 1, 9]]);
        let (u, ui, _, _) = smith_with_inverse(&m, true);
        assert_eq!(u.mul(&ui.unwrap()).unwrap(), SparseIntMatrix::identity(3));
    }

    #[test]
    fn divisor_chain_normalization() {
        let d = normalize_divisors(vec![Int::from(6), Int::from(4), Int::from(1)]);
        assert_eq!(d, vec![Int::from(1), Int::from(2), Int::from(12)]);
    }
}
