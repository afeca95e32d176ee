use std::collections::BTreeMap;

use serde::Serialize;

use super::FilteredComplex;

/// A connected component of `X_i \ X_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratum {
    /// `"level:vertex"`, named after the first vertex of the component.
    pub id: String,
    pub level: usize,
    pub codim: usize,
    pub vertices: Vec<u32>,
}

impl Stratum {
    pub fn dim(&self) -> usize {
        self.level
    }

    pub fn is_regular(&self) -> bool {
        self.codim == 0
    }
}

#[derive(Debug)]
pub(super) struct StrataData {
    pub strata: Vec<Stratum>,
    pub of_vertex: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl FilteredComplex {
    fn strata_data(&self) -> &StrataData {
        self.strata.get_or_init(|| {
            let n = self.num_vertices();
            let mut parent: Vec<usize> = (0..n).collect();
            for e in self.simplices(1) {
                let (a, b) = (e[0] as usize, e[1] as usize);
                if self.levels[a] == self.levels[b] {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
            let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
            for v in 0..n {
                let r = find(&mut parent, v);
                groups.entry(r).or_default().push(v as u32);
            }
            let mut of_vertex = vec![0; n];
            let mut strata = Vec::new();
            for (root, vertices) in groups {
                let level = self.levels[root];
                for &v in &vertices {
                    of_vertex[v as usize] = strata.len();
                }
                strata.push(Stratum { id: format!("{}:{}", level, self.ids[root]), level, codim: self.dim - level, vertices });
            }
            StrataData { strata, of_vertex }
        })
    }

    /// Strata ordered by their first vertex (hence by level).
    pub fn strata(&self) -> &[Stratum] {
        &self.strata_data().strata
    }

    /// Index of the stratum containing vertex `v`.
    pub fn stratum_of_vertex(&self, v: u32) -> usize {
        self.strata_data().of_vertex[v as usize]
    }

    /// Stratum containing the open simplex `s` (that of its top-level vertices).
    pub fn stratum_of_simplex(&self, s: &[u32]) -> usize {
        self.stratum_of_vertex(*s.last().expect("nonempty simplex"))
    }

    /// Stratum of level `i` met by `s`, if any.
    pub fn stratum_met(&self, s: &[u32], i: usize) -> Option<usize> {
        s.iter().find(|&&v| self.level(v) == i).map(|&v| self.stratum_of_vertex(v))
    }

    pub fn stratum_index(&self, id: &str) -> Option<usize> {
        self.strata().iter().position(|s| s.id == id)
    }

    pub fn singular_strata(&self) -> impl Iterator<Item = (usize, &Stratum)> {
        self.strata().iter().enumerate().filter(|(_, s)| !s.is_regular())
    }
}
