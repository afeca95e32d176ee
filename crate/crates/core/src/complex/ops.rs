use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{maximal, ComplexError, FilteredComplex, Simplex};

/// Result of [`FilteredComplex::vertex_link`].
#[derive(Clone, Debug)]
pub struct VertexLink {
    pub complex: Option<FilteredComplex>,
    /// Link vertices whose level is not above the level of the vertex.
    pub anomalies: Vec<String>,
}

impl FilteredComplex {
    fn fresh_id(&self, base: &str) -> String {
        let mut id = base.to_string();
        while self.vertex(&id).is_some() {
            id.push('\'');
        }
        id
    }

    fn shifted_vertices(&self, shift: usize) -> (Vec<String>, Vec<usize>) {
        (self.ids.clone(), self.levels.iter().map(|l| l + shift).collect())
    }

    /// Closed cone with apex at level 0; other levels shift up by one.
    pub fn cone(&self) -> Result<FilteredComplex, ComplexError> {
        self.cone_named(&self.fresh_id("c"))
    }

    fn cone_named(&self, apex: &str) -> Result<FilteredComplex, ComplexError> {
        if self.num_vertices() == 0 {
            return Err(ComplexError::Empty);
        }
        let (mut ids, mut levels) = self.shifted_vertices(1);
        let a = ids.len() as u32;
        ids.push(apex.to_string());
        levels.push(0);
        let facets = self.facets.iter().map(|f| f.iter().copied().chain([a]).collect()).collect();
        FilteredComplex::from_indexed(format!("cone({})", self.name), self.dim + 1, ids, levels, facets)
    }

    /// Suspension with two apices at level 0.
    pub fn suspension(&self) -> Result<FilteredComplex, ComplexError> {
        if self.num_vertices() == 0 {
            return Err(ComplexError::Empty);
        }
        let n_id = self.fresh_id("N");
        let s_id = self.fresh_id("S");
        let (mut ids, mut levels) = self.shifted_vertices(1);
        let (a, b) = (ids.len() as u32, ids.len() as u32 + 1);
        ids.push(n_id);
        ids.push(s_id);
        levels.extend([0, 0]);
        let mut facets: Vec<Vec<u32>> = Vec::new();
        for f in &self.facets {
            facets.push(f.iter().copied().chain([a]).collect());
            facets.push(f.iter().copied().chain([b]).collect());
        }
        FilteredComplex::from_indexed(format!("susp({})", self.name), self.dim + 1, ids, levels, facets)
    }

    /// Staircase triangulation of `X × [0, 1]` with `s` interval cells.
    /// Vertex `(v, t)` is named `v#t` and gets level `level(v) + 1`.
    pub fn product_with_interval(&self, s: usize) -> Result<FilteredComplex, ComplexError> {
        let s = s.max(1);
        let nv = self.num_vertices();
        let mut ids = Vec::with_capacity(nv * (s + 1));
        let mut levels = Vec::with_capacity(nv * (s + 1));
        for t in 0..=s {
            for v in 0..nv {
                ids.push(format!("{}#{}", self.ids[v], t));
                levels.push(self.levels[v] + 1);
            }
        }
        let at = |v: u32, t: usize| (t * nv) as u32 + v;
        let mut facets = Vec::new();
        for f in &self.facets {
            for t in 0..s {
                for j in 0..f.len() {
                    let mut cell: Vec<u32> = f[..=j].iter().map(|&v| at(v, t)).collect();
                    cell.extend(f[j..].iter().map(|&v| at(v, t + 1)));
                    facets.push(cell);
                }
            }
        }
        FilteredComplex::from_indexed(format!("{}xI", self.name), self.dim + 1, ids, levels, facets)
    }

    /// Barycentric subdivision. The barycenter of `σ` is named `[ids]`
    /// (a vertex keeps its own id) and gets the maximal level of `σ`.
    pub fn barycentric_subdivision(&self) -> Result<FilteredComplex, ComplexError> {
        let mut ids = Vec::new();
        let mut levels = Vec::new();
        let mut index: HashMap<Simplex, u32> = HashMap::new();
        for k in 0..=self.top_dim() {
            for s in self.simplices(k) {
                index.insert(s.clone(), ids.len() as u32);
                ids.push(if k == 0 { self.ids[s[0] as usize].clone() } else { self.describe(s) });
                levels.push(self.level(*s.last().unwrap()));
            }
        }
        let mut facets = Vec::new();
        for f in &self.facets {
            let mut perm: Vec<u32> = f.clone();
            permutations(&mut perm, 0, &mut |p| {
                let mut chain = Vec::with_capacity(p.len());
                for j in 1..=p.len() {
                    let mut face = p[..j].to_vec();
                    face.sort_unstable();
                    chain.push(index[&face]);
                }
                facets.push(chain);
            });
        }
        FilteredComplex::from_indexed(format!("sd({})", self.name), self.dim, ids, levels, facets)
    }

    /// Stellar subdivision of every edge joining `a` to a vertex outside
    /// `a`. The new vertex on edge `{x, y}` is named `x~y` and gets the larger
    /// of the two levels. Afterwards no vertex of `a` is adjacent to a vertex
    /// outside `a` except through these midpoints.
    pub fn radial_subdivision(&self, a: &BTreeSet<u32>) -> Result<FilteredComplex, ComplexError> {
        let mut ids = self.ids.clone();
        let mut levels = self.levels.clone();
        let mut facets: BTreeSet<Simplex> = self.facets.iter().cloned().collect();
        let edges: Vec<(u32, u32)> =
            self.simplices(1).iter().filter(|e| a.contains(&e[0]) != a.contains(&e[1])).map(|e| (e[0], e[1])).collect();
        for (x, y) in edges {
            let (inner, outer) = if a.contains(&x) { (x, y) } else { (y, x) };
            let base = format!("{}~{}", ids[inner as usize], ids[outer as usize]);
            let mut id = base;
            while self.vertex(&id).is_some() || ids.contains(&id) {
                id.push('\'');
            }
            let m = ids.len() as u32;
            ids.push(id);
            levels.push(levels[x as usize].max(levels[y as usize]));
            let touched: Vec<Simplex> = facets.iter().filter(|f| f.contains(&x) && f.contains(&y)).cloned().collect();
            for f in touched {
                facets.remove(&f);
                for drop in [x, y] {
                    let mut g: Simplex = f.iter().copied().filter(|&v| v != drop).chain([m]).collect();
                    g.sort_unstable();
                    facets.insert(g);
                }
            }
        }
        let facets = facets.into_iter().collect();
        FilteredComplex::from_indexed(format!("rad({})", self.name), self.dim, ids, levels, facets)
    }

    /// Subcomplex of simplices with no vertex in `a`.
    pub fn open_star_complement(&self, a: &BTreeSet<u32>) -> Result<FilteredComplex, ComplexError> {
        let keep: BTreeSet<u32> = (0..self.num_vertices() as u32).filter(|v| !a.contains(v)).collect();
        let simplices = self.full_subcomplex(&keep);
        if simplices.is_empty() {
            return Err(ComplexError::Empty);
        }
        self.subcomplex(format!("{}-st", self.name), simplices)
    }

    /// Simplicial link of `v`. A link vertex of level `j > level(v)` gets level
    /// `j - level(v) - 1` in a complex of formal dimension
    /// `n - level(v) - 1`; the link of a regular vertex keeps the trivial
    /// filtration in dimension `n - 1`.
    pub fn vertex_link(&self, v: u32) -> VertexLink {
        let lv = self.level(v);
        let mut simplices: BTreeSet<Simplex> = BTreeSet::new();
        for f in self.facets.iter().filter(|f| f.contains(&v)) {
            let s: Simplex = f.iter().copied().filter(|&w| w != v).collect();
            if !s.is_empty() {
                simplices.insert(s);
            }
        }
        let used: BTreeSet<u32> = simplices.iter().flatten().copied().collect();
        if used.is_empty() {
            return VertexLink { complex: None, anomalies: Vec::new() };
        }
        let regular = lv == self.dim;
        let (dim, shift) = if regular { (self.dim - 1, 1) } else { (self.dim - lv - 1, lv + 1) };
        let mut anomalies = Vec::new();
        let mut ids = Vec::new();
        let mut levels = Vec::new();
        let mut remap = HashMap::new();
        for &w in &used {
            let l = self.level(w);
            if (regular && l < lv) || (!regular && l <= lv) {
                anomalies.push(self.ids[w as usize].clone());
            }
            remap.insert(w, ids.len() as u32);
            ids.push(self.ids[w as usize].clone());
            levels.push(l.saturating_sub(shift).min(dim));
        }
        let facets = maximal(simplices).into_iter().map(|s| s.iter().map(|w| remap[w]).collect()).collect();
        let complex = FilteredComplex::from_indexed(format!("lk({})", self.ids[v as usize]), dim, ids, levels, facets).ok();
        VertexLink { complex, anomalies }
    }

    /// Vertex set from ids.
    pub fn vertex_set(&self, ids: &[&str]) -> Result<BTreeSet<u32>, ComplexError> {
        Ok(self.vertices_by_id(ids)?.into_iter().collect())
    }

    /// Checks that `other` is a subcomplex of `self` (by vertex ids) and
    /// returns the corresponding simplices of `self`.
    pub fn subcomplex_simplices(&self, other: &FilteredComplex) -> Result<Vec<Simplex>, ComplexError> {
        let mut out = BTreeSet::new();
        for f in other.facets() {
            let s = self.embed(other, f).ok_or_else(|| ComplexError::NotSubcomplex(other.describe(f)))?;
            if !self.contains(&s) {
                return Err(ComplexError::NotSubcomplex(other.describe(f)));
            }
            out.insert(s);
        }
        Ok(out.into_iter().collect())
    }

    /// Number of vertices of each level.
    pub fn level_counts(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &l in &self.levels {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    }
}

fn permutations(v: &mut Vec<u32>, k: usize, f: &mut dyn FnMut(&[u32])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::cone_two_points;
    use super::*;

    fn circle() -> FilteredComplex {
        let v = |s: &str| (s.to_string(), 1i64);
        let e = |a: &str, b: &str| vec![a.to_string(), b.to_string()];
        FilteredComplex::new("S1", 1, vec![v("0"), v("1"), v("2")], vec![e("0", "1"), e("1", "2"), e("0", "2")]).unwrap()
    }

    #[test]
    fn cone_of_two_points() {
        let pts = FilteredComplex::new("S0", 0, vec![("a".into(), 0), ("b".into(), 0)], vec![]).unwrap();
        let c = pts.cone().unwrap();
        assert_eq!(c.f_vector(), vec![3, 2]);
        assert_eq!(c.strata().len(), 3);
        assert_eq!(c.f_vector(), cone_two_points().f_vector());
    }

    #[test]
    fn annulus_counts() {
        let a = circle().product_with_interval(2).unwrap();
        assert_eq!(a.f_vector()[2], 2 * 2 * 3);
        assert!(a.validate().is_valid());
        let p = FilteredComplex::new("pt", 0, vec![("p".into(), 0)], vec![]).unwrap();
        assert_eq!(p.product_with_interval(1).unwrap().f_vector(), vec![2, 1]);
        assert_eq!(cone_two_points().product_with_interval(1).unwrap().strata().len(), 3);
    }

    #[test]
    fn subdivision_keeps_strata() {
        let c = cone_two_points();
        let sd = c.barycentric_subdivision().unwrap();
        assert_eq!(sd.f_vector(), vec![5, 4]);
        assert_eq!(sd.strata().len(), 3);
        let r = c.radial_subdivision(&c.vertex_set(&["v"]).unwrap()).unwrap();
        assert_eq!(r.f_vector(), vec![5, 4]);
        assert_eq!(r.strata().len(), 3);
        assert!(r.validate().is_valid());
    }

    #[test]
    fn links() {
        let c = circle().cone().unwrap();
        let apex = c.vertex("c").unwrap();
        let l = c.vertex_link(apex);
        assert!(l.anomalies.is_empty());
        let lk = l.complex.unwrap();
        assert_eq!(lk.dim(), 1);
        assert_eq!(lk.f_vector(), vec![3, 3]);
        let reg = circle().vertex_link(0).complex.unwrap();
        assert_eq!(reg.f_vector(), vec![2]);
        assert_eq!(reg.dim(), 0);
    }

    #[test]
    fn star_complement() {
        let s = circle().suspension().unwrap();
        let n = s.vertex_set(&["N"]).unwrap();
        let u = s.open_star_complement(&n).unwrap();
        assert_eq!(u.f_vector(), circle().cone().unwrap().f_vector());
    }
}
