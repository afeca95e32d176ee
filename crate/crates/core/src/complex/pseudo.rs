use std::collections::HashMap;

use serde::Serialize;

use super::{FilteredComplex, Simplex};

/// Advisory combinatorial pseudomanifold check.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PseudomanifoldReport {
    pub pure: bool,
    pub regular_faces_ok: bool,
    pub links_ok: bool,
    pub messages: Vec<String>,
}

impl PseudomanifoldReport {
    pub fn passed(&self) -> bool {
        self.pure && self.regular_faces_ok && self.links_ok
    }
}

impl FilteredComplex {
    /// Checks purity, that every regular `(n-1)`-simplex lies in exactly two
    /// `n`-simplices, and recursively the same for vertex links without
    /// stratification anomalies.
    pub fn pseudomanifold_check(&self) -> PseudomanifoldReport {
        let mut report = PseudomanifoldReport { pure: true, regular_faces_ok: true, links_ok: true, messages: Vec::new() };
        self.check_into(&mut report, 0);
        report
    }

    fn check_into(&self, report: &mut PseudomanifoldReport, depth: usize) {
        let n = self.dim;
        let prefix = if depth == 0 { String::new() } else { format!("{}: ", self.name) };
        for f in &self.facets {
            if f.len() != n + 1 {
                report.pure = false;
                report.messages.push(format!("{prefix}{} is not a face of an {n}-simplex", self.describe(f)));
            }
        }
        if n >= 1 {
            let mut count: HashMap<Simplex, usize> = HashMap::new();
            for s in self.simplices(n) {
                for (_, face) in super::facets_of(s) {
                    *count.entry(face).or_insert(0) += 1;
                }
            }
            for face in self.simplices(n - 1) {
                if !self.is_regular(face) {
                    continue;
                }
                let c = count.get(face).copied().unwrap_or(0);
                if c != 2 {
                    report.regular_faces_ok = false;
                    report.messages.push(format!("{prefix}regular face {} lies in {c} top simplices", self.describe(face)));
                }
            }
        }
        if n == 0 {
            return;
        }
        for v in 0..self.num_vertices() as u32 {
            let link = self.vertex_link(v);
            if !link.anomalies.is_empty() {
                continue;
            }
            let Some(lk) = link.complex else { continue };
            let mut sub = PseudomanifoldReport { pure: true, regular_faces_ok: true, links_ok: true, messages: Vec::new() };
            lk.check_into(&mut sub, depth + 1);
            if !sub.passed() {
                report.links_ok = false;
                report.messages.extend(sub.messages.into_iter().map(|m| format!("{prefix}{m}")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(dim: usize, verts: &[(&str, i64)], simp: &[&[&str]]) -> FilteredComplex {
        FilteredComplex::new(
            "t",
            dim,
            verts.iter().map(|(a, b)| (a.to_string(), *b)).collect(),
            simp.iter().map(|s| s.iter().map(|x| x.to_string()).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn tetrahedron_boundary_passes() {
        let v: Vec<(&str, i64)> = vec![("0", 2), ("1", 2), ("2", 2), ("3", 2)];
        let c = complex(2, &v, &[&["0", "1", "2"], &["0", "1", "3"], &["0", "2", "3"], &["1", "2", "3"]]);
        assert!(c.pseudomanifold_check().passed());
    }

    #[test]
    fn wedge_of_spheres_passes() {
        let v: Vec<(&str, i64)> = vec![("w", 0), ("a", 2), ("b", 2), ("c", 2), ("d", 2), ("e", 2), ("f", 2)];
        let c = complex(
            2,
            &v,
            &[
                &["w", "a", "b"],
                &["w", "b", "c"],
                &["w", "a", "c"],
                &["a", "b", "c"],
                &["w", "d", "e"],
                &["w", "e", "f"],
                &["w", "d", "f"],
                &["d", "e", "f"],
            ],
        );
        assert!(c.pseudomanifold_check().passed());
    }

    #[test]
    fn free_edge_fails() {
        let v: Vec<(&str, i64)> = vec![("0", 2), ("1", 2), ("2", 2)];
        let c = complex(2, &v, &[&["0", "1", "2"]]);
        let r = c.pseudomanifold_check();
        assert!(!r.regular_faces_ok);
    }
}
