//! Shared construction of perverse subcomplexes: the submodule of allowable
//! cells whose differential is allowable too.
//!
//! With a modulus `m` the condition is read in `ℤ/m`: the differential may
//! leave the allowable cells by multiples of `m`. The result is then a lattice
//! containing `m·ℤ^here` whose image in `(ℤ/m)^here` is the `ℤ/m` complex.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::hash::Hash;

use crate::linalg::{integer_kernel, relative_kernel, Int, LinalgError, SparseIntMatrix, SparseVec};

/// An ordered list of cells with reverse lookup.
#[derive(Clone, Debug)]
pub struct Basis<C> {
    pub items: Vec<C>,
    pos: HashMap<C, usize>,
}

impl<C: Clone + Eq + Hash> Basis<C> {
    pub fn new(items: Vec<C>) -> Self {
        let pos = items.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Basis { items, pos }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn index<Q: ?Sized + Hash + Eq>(&self, c: &Q) -> Option<usize>
    where
        C: Borrow<Q>,
    {
        self.pos.get(c).copied()
    }
}

impl<C> Default for Basis<C> {
    fn default() -> Self {
        Basis { items: Vec::new(), pos: HashMap::new() }
    }
}

/// Basis of `{x ∈ ℤ^here : d x is supported on cells accepted by ok}`, or of
/// `{x : d x ≡ 0 mod m off those cells}`. Columns whose differential is
/// already allowable become unit vectors; the rest go through a kernel.
/// Leading indices are distinct.
pub(crate) fn constrained_basis<C: Clone + Eq + Hash>(
    here: &[C],
    faces: impl Fn(&C) -> Vec<(C, i64)>,
    ok: impl Fn(&C) -> bool,
    modulus: Option<&Int>,
) -> Vec<SparseVec> {
    let mut bad_rows: HashMap<C, usize> = HashMap::new();
    let mut good = Vec::new();
    let mut bad_cols: Vec<(usize, SparseVec)> = Vec::new();
    for (i, s) in here.iter().enumerate() {
        let mut entries = Vec::new();
        for (f, sign) in faces(s) {
            if !ok(&f) {
                let n = bad_rows.len();
                let r = *bad_rows.entry(f).or_insert(n);
                entries.push((r, Int::from(sign)));
            }
        }
        let col = SparseVec::from_pairs(entries);
        if col.is_zero() {
            good.push(SparseVec::unit(i));
        } else {
            bad_cols.push((i, col));
        }
    }
    if !bad_cols.is_empty() {
        let m = SparseIntMatrix::from_columns(bad_rows.len(), bad_cols.iter().map(|(_, c)| c.clone()).collect());
        let ker = match modulus {
            None => integer_kernel(&m),
            Some(q) => {
                let rows = m.nrows();
                let scalar = SparseIntMatrix::from_columns(rows, (0..rows).map(|i| SparseVec::from_pairs([(i, q.clone())])).collect());
                relative_kernel(&m, &scalar).expect("shapes agree")
            }
        };
        for v in ker.columns() {
            good.push(v.remap(|j| Some(bad_cols[j].0)));
        }
    }
    good
}

/// Differential of a chain in `from` coordinates, expressed in `to`
/// coordinates. Cells outside `to` are dropped when `drop` accepts them and
/// must cancel (mod `modulus` if given) otherwise.
pub(crate) fn image_in<C: Clone + Eq + Hash>(
    chain: &SparseVec,
    from: &Basis<C>,
    to: &Basis<C>,
    faces: impl Fn(&C) -> Vec<(C, i64)>,
    drop: impl Fn(&C) -> bool,
    modulus: Option<&Int>,
) -> Result<SparseVec, LinalgError> {
    let mut pairs = Vec::new();
    let mut outside: HashMap<C, Int> = HashMap::new();
    for (i, c) in chain.iter() {
        for (f, sign) in faces(&from.items[i]) {
            let c = if sign > 0 { c.clone() } else { -c };
            match to.index(&f) {
                Some(j) => pairs.push((j, c)),
                None if drop(&f) => {}
                None => {
                    let e = outside.entry(f).or_insert_with(|| Int::from(0));
                    *e = &*e + &c;
                }
            }
        }
    }
    let vanishes = |c: &Int| match modulus {
        None => c.is_zero(),
        Some(q) => q.divides(c),
    };
    if !outside.values().all(vanishes) {
        return Err(LinalgError::NotInLattice);
    }
    Ok(SparseVec::from_pairs(pairs))
}
