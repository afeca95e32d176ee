//! Filtered simplicial complexes.
//!
//! A filtration is given by vertex levels `0..=n`; `X_i` is the full
//! subcomplex on the vertices of level at most `i`. Vertices are stored sorted
//! by level, so every simplex (a sorted list of vertex indices) lists its
//! vertices level by level, and its join decomposition `Δ_0 * ... * Δ_n` is a
//! sequence of consecutive runs.

mod json;
mod ops;
mod perversity;
mod pseudo;
mod strata;

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use thiserror::Error;

pub use json::{ComplexFile, OrientationEntry, PerversityEntry, VertexEntry};
pub use ops::VertexLink;
pub use perversity::{base_id, Perversity, PerversitySpec};
pub use pseudo::PseudomanifoldReport;
pub use strata::Stratum;

pub type Simplex = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("vertex `{id}` has level {level} outside 0..={dim}")]
    LevelOutOfRange { id: String, level: i64, dim: usize },
    #[error("simplex {0:?} has no vertices")]
    EmptySimplex(Vec<String>),
    #[error("simplex {simplex:?} has dimension above the formal dimension {dim}")]
    SimplexTooLarge { simplex: Vec<String>, dim: usize },
    #[error("complex is empty")]
    Empty,
    #[error("invalid filtered complex: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("perversity: {0}")]
    Perversity(String),
    #[error("not a subcomplex: {0}")]
    NotSubcomplex(String),
    #[error("json: {0}")]
    Json(String),
}

/// Outcome of [`FilteredComplex::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

#[derive(Debug, Default)]
struct SimplexTable {
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

#[derive(Debug)]
pub struct FilteredComplex {
    name: String,
    dim: usize,
    ids: Vec<String>,
    levels: Vec<usize>,
    facets: Vec<Simplex>,
    id_index: HashMap<String, u32>,
    table: OnceLock<SimplexTable>,
    strata: OnceLock<strata::StrataData>,
}

impl Clone for FilteredComplex {
    fn clone(&self) -> Self {
        FilteredComplex {
            name: self.name.clone(),
            dim: self.dim,
            ids: self.ids.clone(),
            levels: self.levels.clone(),
            facets: self.facets.clone(),
            id_index: self.id_index.clone(),
            table: OnceLock::new(),
            strata: OnceLock::new(),
        }
    }
}

impl PartialEq for FilteredComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.ids == other.ids && self.levels == other.levels && self.facets == other.facets
    }
}

impl FilteredComplex {
    /// Builds a complex from vertex `(id, level)` pairs and simplices given by
    /// vertex ids. Faces are implied; declared vertices that lie in no simplex
    /// become isolated points.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        vertices: Vec<(String, i64)>,
        simplices: Vec<Vec<String>>,
    ) -> Result<Self, ComplexError> {
        let mut seen = HashMap::new();
        for (k, (id, level)) in vertices.iter().enumerate() {
            if *level < 0 || *level as usize > dim {
                return Err(ComplexError::LevelOutOfRange { id: id.clone(), level: *level, dim });
            }
            if seen.insert(id.clone(), k).is_some() {
                return Err(ComplexError::DuplicateVertex(id.clone()));
            }
        }
        let mut idx = Vec::with_capacity(simplices.len());
        for s in &simplices {
            if s.is_empty() {
                return Err(ComplexError::EmptySimplex(s.clone()));
            }
            let mut v = Vec::with_capacity(s.len());
            for id in s {
                v.push(*seen.get(id).ok_or_else(|| ComplexError::UnknownVertex(id.clone()))? as u32);
            }
            v.sort_unstable();
            v.dedup();
            if v.len() > dim + 1 {
                return Err(ComplexError::SimplexTooLarge { simplex: s.clone(), dim });
            }
            idx.push(v);
        }
        let ids = vertices.iter().map(|(i, _)| i.clone()).collect();
        let levels = vertices.iter().map(|(_, l)| *l as usize).collect();
        Self::from_indexed(name.into(), dim, ids, levels, idx)
    }

    /// Internal constructor: vertices in any order, simplices as indices into
    /// them. Reorders vertices by level and keeps only maximal simplices.
    pub(crate) fn from_indexed(
        name: String,
        dim: usize,
        ids: Vec<String>,
        levels: Vec<usize>,
        simplices: Vec<Vec<u32>>,
    ) -> Result<Self, ComplexError> {
        if ids.is_empty() {
            return Err(ComplexError::Empty);
        }
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by_key(|&i| levels[i]);
        let mut new_of_old = vec![0u32; ids.len()];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new as u32;
        }
        let ids: Vec<String> = order.iter().map(|&i| ids[i].clone()).collect();
        let levels: Vec<usize> = order.iter().map(|&i| levels[i]).collect();
        let mut all: BTreeSet<Simplex> = simplices
            .into_iter()
            .map(|s| {
                let mut t: Simplex = s.into_iter().map(|v| new_of_old[v as usize]).collect();
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        for v in 0..ids.len() as u32 {
            all.insert(vec![v]);
        }
        let facets = maximal(all);
        let mut id_index = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if id_index.insert(id.clone(), i as u32).is_some() {
                return Err(ComplexError::DuplicateVertex(id.clone()));
            }
        }
        Ok(FilteredComplex { name, dim, ids, levels, facets, id_index, table: OnceLock::new(), strata: OnceLock::new() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Formal dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn vertex_id(&self, v: u32) -> &str {
        &self.ids[v as usize]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn level(&self, v: u32) -> usize {
        self.levels[v as usize]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn vertex(&self, id: &str) -> Option<u32> {
        self.id_index.get(id).copied()
    }

    pub fn vertices_by_id(&self, ids: &[&str]) -> Result<Vec<u32>, ComplexError> {
        ids.iter().map(|id| self.vertex(id).ok_or_else(|| ComplexError::UnknownVertex(id.to_string()))).collect()
    }

    /// Maximal simplices.
    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    fn table(&self) -> &SimplexTable {
        self.table.get_or_init(|| {
            let top = self.facets.iter().map(|f| f.len()).max().unwrap_or(0);
            let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); top];
            for f in &self.facets {
                let m = f.len();
                for mask in 1u32..(1u32 << m) {
                    let s: Simplex = (0..m).filter(|&i| mask & (1 << i) != 0).map(|i| f[i]).collect();
                    sets[s.len() - 1].insert(s);
                }
            }
            let by_dim: Vec<Vec<Simplex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
            let index = by_dim.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
            SimplexTable { by_dim, index }
        })
    }

    /// All `k`-simplices, in lexicographic order.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.table().by_dim.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn simplex_index(&self, s: &[u32]) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        self.table().index.get(s.len() - 1)?.get(s).copied()
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        self.simplex_index(s).is_some()
    }

    /// Dimension of the underlying simplicial complex.
    pub fn top_dim(&self) -> usize {
        self.table().by_dim.len().saturating_sub(1)
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.table().by_dim.iter().map(|v| v.len()).collect()
    }

    pub fn num_simplices(&self) -> usize {
        self.f_vector().iter().sum()
    }

    /// True iff the simplex has a vertex of level `n`.
    pub fn is_regular(&self, s: &[u32]) -> bool {
        s.last().is_some_and(|&v| self.level(v) == self.dim)
    }

    /// Vertices of `s` with level `i`.
    pub fn part(&self, s: &[u32], i: usize) -> Vec<u32> {
        s.iter().copied().filter(|&v| self.level(v) == i).collect()
    }

    /// Number of vertices of `s` with level at most `i`.
    pub fn count_up_to(&self, s: &[u32], i: usize) -> usize {
        s.iter().take_while(|&&v| self.level(v) <= i).count()
    }

    /// Regular `k`-simplices.
    pub fn regular_simplices(&self, k: usize) -> Vec<Simplex> {
        self.simplices(k).iter().filter(|s| self.is_regular(s)).cloned().collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if !self.levels.contains(&self.dim) {
            issues.push(format!("no vertex has level {}", self.dim));
        }
        for f in &self.facets {
            if !self.is_regular(f) {
                issues.push(format!("maximal simplex {} has no vertex of level {}", self.describe(f), self.dim));
            }
        }
        ValidationReport { issues }
    }

    pub fn ensure_valid(&self) -> Result<(), ComplexError> {
        let r = self.validate();
        if r.is_valid() {
            Ok(())
        } else {
            Err(ComplexError::Invalid(r.issues))
        }
    }

    /// Vertex ids of a simplex, joined for messages.
    pub fn describe(&self, s: &[u32]) -> String {
        let ids: Vec<&str> = s.iter().map(|&v| self.vertex_id(v)).collect();
        format!("[{}]", ids.join(","))
    }

    pub fn simplex_ids(&self, s: &[u32]) -> Vec<String> {
        s.iter().map(|&v| self.vertex_id(v).to_string()).collect()
    }

    /// Subcomplex generated by the given simplices, with the same vertex set
    /// restricted to the vertices that occur.
    pub fn subcomplex(&self, name: impl Into<String>, simplices: Vec<Simplex>) -> Result<Self, ComplexError> {
        let used: BTreeSet<u32> = simplices.iter().flatten().copied().collect();
        if used.is_empty() {
            return Err(ComplexError::Empty);
        }
        let remap: HashMap<u32, u32> = used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let ids = used.iter().map(|&v| self.ids[v as usize].clone()).collect();
        let levels = used.iter().map(|&v| self.levels[v as usize]).collect();
        let simplices = simplices.into_iter().map(|s| s.iter().map(|v| remap[v]).collect()).collect();
        Self::from_indexed(name.into(), self.dim, ids, levels, simplices)
    }

    /// Full subcomplex on a vertex set.
    pub fn full_subcomplex(&self, vertices: &BTreeSet<u32>) -> Vec<Simplex> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            let s: Simplex = f.iter().copied().filter(|v| vertices.contains(v)).collect();
            if !s.is_empty() {
                out.insert(s);
            }
        }
        maximal(out)
    }

    /// Every simplex containing a vertex of `a`, together with all faces,
    /// as a list of generating simplices.
    pub fn closed_star(&self, a: &BTreeSet<u32>) -> Vec<Simplex> {
        maximal(self.facets.iter().filter(|f| f.iter().any(|v| a.contains(v))).cloned().collect())
    }

    /// Maps every simplex of `other` (a complex on a subset of this vertex
    /// set, matched by id) into this complex.
    pub fn embed(&self, other: &FilteredComplex, s: &[u32]) -> Option<Simplex> {
        let mut t: Simplex = s.iter().map(|&v| self.vertex(other.vertex_id(v))).collect::<Option<_>>()?;
        t.sort_unstable();
        Some(t)
    }
}

/// Keeps the maximal simplices of a face-closed-or-not collection.
pub(crate) fn maximal(all: BTreeSet<Simplex>) -> Vec<Simplex> {
    let mut by_size: Vec<Simplex> = all.into_iter().collect();
    by_size.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Simplex> = Vec::new();
    let mut covered: std::collections::HashSet<Simplex> = std::collections::HashSet::new();
    for s in by_size {
        if covered.contains(&s) {
            continue;
        }
        let m = s.len();
        for mask in 1u32..(1u32 << m) {
            if mask == (1u32 << m) - 1 {
                continue;
            }
            let f: Simplex = (0..m).filter(|&i| mask & (1 << i) != 0).map(|i| s[i]).collect();
            covered.insert(f);
        }
        kept.push(s);
    }
    kept.sort();
    kept
}

/// Faces of `s` obtained by deleting one vertex, with the deleted position.
pub fn facets_of(s: &[u32]) -> impl Iterator<Item = (usize, Simplex)> + '_ {
    (0..s.len()).filter(move |_| s.len() > 1).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (i, f)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cone_two_points() -> FilteredComplex {
        FilteredComplex::new(
            "c2",
            1,
            vec![("a".into(), 1), ("v".into(), 0), ("b".into(), 1)],
            vec![vec!["v".into(), "a".into()], vec!["v".into(), "b".into()]],
        )
        .unwrap()
    }

    #[test]
    fn vertices_sorted_by_level() {
        let c = cone_two_points();
        assert_eq!(c.vertex_id(0), "v");
        assert_eq!(c.f_vector(), vec![3, 2]);
        assert!(c.validate().is_valid());
        assert!(c.is_regular(&[0, 1]));
        assert!(!c.is_regular(&[0]));
    }

    #[test]
    fn invalid_without_top_vertex() {
        let c = FilteredComplex::new(
            "bad",
            1,
            vec![("a".into(), 0), ("v".into(), 0), ("b".into(), 0)],
            vec![vec!["v".into(), "a".into()], vec!["v".into(), "b".into()]],
        )
        .unwrap();
        assert!(!c.validate().is_valid());
    }

    #[test]
    fn isolated_edge_is_flagged() {
        let verts = vec![("a".into(), 2), ("b".into(), 2), ("c".into(), 2), ("x".into(), 1), ("y".into(), 1)];
        let simp = vec![vec!["a".into(), "b".into(), "c".into()], vec!["x".into(), "y".into()]];
        let c = FilteredComplex::new("e", 2, verts, simp).unwrap();
        let r = c.validate();
        assert_eq!(r.issues.len(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        let r = FilteredComplex::new("x", 1, vec![("a".into(), 3)], vec![]);
        assert!(matches!(r, Err(ComplexError::LevelOutOfRange { .. })));
        let r = FilteredComplex::new("x", 1, vec![("a".into(), 1)], vec![vec!["q".into()]]);
        assert!(matches!(r, Err(ComplexError::UnknownVertex(_))));
    }
}
