//! Built-in spaces. Each entry is a recipe over four base triangulations
//! together with a table of known groups.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chains::{ChainError, OpenModel};
use crate::complex::{ComplexError, ComplexFile, FilteredComplex, Perversity};

const BASES: [(&str, &str); 4] = [
    ("s2", include_str!("../corpus/s2.json")),
    ("s4", include_str!("../corpus/s4.json")),
    ("rp2", include_str!("../corpus/rp2.json")),
    ("rp3", include_str!("../corpus/rp3.json")),
];

const ENTRIES: &str = include_str!("../corpus/corpus.json");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
    #[error("bad recipe `{0}`")]
    BadRecipe(String),
    #[error("`{0}` needs a compact argument")]
    NotCompact(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One row of an expected-results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub theory: String,
    pub perversity: String,
    pub ring: String,
    pub groups: Vec<String>,
    pub provenance: String,
    /// Set when the engine is known to disagree with a published value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_mismatch: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub recipe: String,
    pub description: String,
    #[serde(default)]
    pub expected: Vec<Expectation>,
}

impl CorpusEntry {
    pub fn build(&self) -> Result<Space, CorpusError> {
        build_recipe(&self.recipe)
    }
}

/// A compact filtered complex with the open star of `removed` taken out.
#[derive(Clone, Debug)]
pub struct Space {
    pub complex: FilteredComplex,
    pub removed: BTreeSet<u32>,
}

impl Space {
    pub fn compact(complex: FilteredComplex) -> Space {
        Space { complex, removed: BTreeSet::new() }
    }

    pub fn is_compact(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    /// The open model at subdivision depth `depth` (the space itself when
    /// compact).
    pub fn model(&self, p: &Perversity, depth: usize) -> Result<OpenModel, ChainError> {
        OpenModel::new(&self.complex, &self.removed, p, depth)
    }
}

pub fn entries() -> &'static [CorpusEntry] {
    static CELL: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(ENTRIES).expect("corpus.json is well formed"))
}

pub fn entry(id: &str) -> Result<&'static CorpusEntry, CorpusError> {
    entries().iter().find(|e| e.id == id).ok_or_else(|| CorpusError::UnknownSpace(id.to_string()))
}

/// Builds a corpus space by id.
pub fn space(id: &str) -> Result<Space, CorpusError> {
    entry(id)?.build()
}

pub fn base(name: &str) -> Result<FilteredComplex, CorpusError> {
    let text = BASES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| CorpusError::UnknownSpace(name.to_string()))?;
    Ok(ComplexFile::from_json(text)?.build()?.0)
}

/// Evaluates a recipe such as `puncture(suspension(rp3))`.
///
/// `cone`, `suspension`, `product` (with `[0,1]`) and `sd` (barycentric
/// subdivision) take compact spaces. `open_cone(L)` removes the base of the
/// cone, `line(L)` removes both apices of the suspension and `puncture(X)`
/// removes the first regular vertex.
pub fn build_recipe(recipe: &str) -> Result<Space, CorpusError> {
    let r = recipe.trim();
    let bad = || CorpusError::BadRecipe(recipe.to_string());
    let Some(open) = r.find('(') else {
        return Ok(Space::compact(base(r)?));
    };
    if !r.ends_with(')') {
        return Err(bad());
    }
    let op = &r[..open];
    let inner = build_recipe(&r[open + 1..r.len() - 1])?;
    if !inner.is_compact() {
        return Err(CorpusError::NotCompact(op.to_string()));
    }
    let x = inner.complex;
    Ok(match op {
        "cone" => Space::compact(x.cone()?),
        "suspension" => Space::compact(x.suspension()?),
        "product" => Space::compact(x.product_with_interval(1)?),
        "sd" => Space::compact(x.barycentric_subdivision()?),
        "open_cone" => {
            let c = x.cone()?;
            let removed = (0..c.num_vertices() as u32).filter(|&v| c.level(v) > 0).collect();
            Space { complex: c, removed }
        }
        "line" => {
            let s = x.suspension()?;
            let removed = (0..s.num_vertices() as u32).filter(|&v| s.level(v) == 0).collect();
            Space { complex: s, removed }
        }
        "puncture" => {
            let n = x.dim();
            let v = (0..x.num_vertices() as u32).find(|&v| x.level(v) == n).ok_or_else(bad)?;
            Space { complex: x, removed: [v].into() }
        }
        _ => return Err(bad()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for e in entries() {
            let s = e.build().unwrap();
            assert!(s.complex.validate().is_valid(), "{}", e.id);
            if ["s2", "s4", "rp2", "rp3", "susp_rp3"].contains(&e.id.as_str()) {
                assert!(s.complex.pseudomanifold_check().passed(), "{}", e.id);
            }
        }
    }

    #[test]
    fn homology_tables() {
        use crate::linalg::{AbelianGroup, CoefficientRing};
        for e in entries() {
            for x in e.expected.iter().filter(|x| x.known_mismatch.is_none()) {
                let s = e.build().unwrap();
                let ring: CoefficientRing = x.ring.parse().unwrap();
                let p = s.complex.make_perversity(&x.perversity.parse().unwrap()).unwrap();
                let m = s.model(&p, 1).unwrap();
                let got = match x.theory.as_str() {
                    "ih" => crate::chains::intersection_homology(&m.core, &m.perversity, ring).unwrap(),
                    "bm" => crate::chains::borel_moore_ih(&s.complex, &s.removed, &p, ring).unwrap().groups,
                    "blowup" => crate::blowup::blowup_cohomology(&m.core, &m.perversity, ring).unwrap(),
                    _ => crate::blowup::dual_complex_cohomology(&m.core, &m.perversity, ring).unwrap(),
                };
                let want: Vec<AbelianGroup> = x.groups.iter().map(|g| AbelianGroup::parse_over(g, ring).unwrap()).collect();
                assert_eq!(got, want, "{} {} {}", e.id, x.theory, x.perversity);
            }
        }
    }

    #[test]
    fn base_f_vectors() {
        assert_eq!(base("rp2").unwrap().f_vector(), vec![6, 15, 10]);
        assert_eq!(base("rp3").unwrap().f_vector(), vec![11, 51, 80, 40]);
        assert_eq!(base("s4").unwrap().f_vector(), vec![6, 15, 20, 15, 6]);
    }
}
