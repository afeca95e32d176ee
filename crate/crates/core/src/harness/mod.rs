//! Formula checkers over the corpus and the reports they produce.

mod checks;
mod mv;
mod oracle;

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::chains::ChainError;
use crate::complex::{ComplexError, PerversitySpec};
use crate::corpus::CorpusError;
use crate::duality::DualityError;
use crate::linalg::{AbelianGroup, CoefficientRing};

pub use checks::{
    check_cone, check_duality, check_example38, check_products, check_r_invariance, check_subdivision, compute, non_gm_perversities,
    resolve_space, ComputeRequest, Theory,
};
pub use mv::{check_mv, default_covers, mv_report, Cover};
pub use oracle::{simplicial_cohomology, simplicial_homology};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Duality(#[from] DualityError),
}

/// One compared value. `expected` is absent for plain computations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeRow {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub expected: Option<String>,
    pub computed: String,
    pub provenance: Option<String>,
}

impl DegreeRow {
    pub fn matches(&self) -> bool {
        self.expected.as_ref().is_none_or(|e| *e == self.computed)
    }
}

/// A yes/no side condition such as stabilization or chain-level duality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs: BTreeMap<String, String>,
    pub degrees: Vec<DegreeRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<Condition>,
    pub pass: bool,
    pub ms: u64,
}

impl CheckReport {
    pub fn new(check: &str) -> CheckReport {
        CheckReport { check: check.to_string(), inputs: BTreeMap::new(), degrees: Vec::new(), conditions: Vec::new(), pass: false, ms: 0 }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> CheckReport {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn row(&mut self, k: usize, expected: Option<String>, computed: String, provenance: Option<&str>) {
        self.degrees.push(DegreeRow { k, label: None, expected, computed, provenance: provenance.map(str::to_string) });
    }

    pub fn labelled(&mut self, k: usize, label: &str, expected: String, computed: String, provenance: &str) {
        self.degrees.push(DegreeRow {
            k,
            label: Some(label.to_string()),
            expected: Some(expected),
            computed,
            provenance: Some(provenance.to_string()),
        });
    }

    pub fn info(&mut self, k: usize, label: &str, computed: String) {
        self.degrees.push(DegreeRow { k, label: Some(label.to_string()), expected: None, computed, provenance: None });
    }

    pub fn condition(&mut self, name: &str, holds: bool, detail: impl ToString) {
        self.conditions.push(Condition { name: name.to_string(), holds, detail: detail.to_string() });
    }

    /// Rows comparing expected and computed groups degree by degree.
    pub fn groups(&mut self, expected: Option<&[AbelianGroup]>, computed: &[AbelianGroup], ring: CoefficientRing, provenance: &str) {
        for (k, g) in computed.iter().enumerate() {
            let e = expected.map(|e| e.get(k).cloned().unwrap_or_default().display_over(ring));
            self.row(k, e, g.display_over(ring), expected.map(|_| provenance));
        }
    }

    pub fn finish(mut self, start: Instant) -> CheckReport {
        self.pass = self.degrees.iter().all(DegreeRow::matches) && self.conditions.iter().all(|c| c.holds);
        self.ms = start.elapsed().as_millis() as u64;
        self
    }
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

/// Which check to run, as named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Cone,
    Products,
    Mv,
    Duality,
    Example38,
    RInvariance,
    Subdivision,
}

impl FromStr for CheckKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "cone" => CheckKind::Cone,
            "products" => CheckKind::Products,
            "mv" => CheckKind::Mv,
            "duality" => CheckKind::Duality,
            "example38" => CheckKind::Example38,
            "r-invariance" => CheckKind::RInvariance,
            "subdivision" => CheckKind::Subdivision,
            _ => return Err(HarnessError::Invalid(format!("unknown check `{s}`"))),
        })
    }
}

/// Overrides for a check; empty fields select the defaults of each check.
#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub rings: Vec<CoefficientRing>,
    pub spaces: Vec<String>,
    pub perversities: Vec<PerversitySpec>,
    pub scan: Option<(i64, i64)>,
}

impl CheckOptions {
    fn rings_or(&self, default: &[CoefficientRing]) -> Vec<CoefficientRing> {
        if self.rings.is_empty() {
            default.to_vec()
        } else {
            self.rings.clone()
        }
    }

    fn spaces_or(&self, default: &[&str]) -> Vec<String> {
        if self.spaces.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.spaces.clone()
        }
    }

    fn perversities_or(&self, default: &[&str]) -> Vec<PerversitySpec> {
        if self.perversities.is_empty() {
            default.iter().map(|s| s.parse().expect("default perversity")).collect()
        } else {
            self.perversities.clone()
        }
    }

    fn scan_or(&self, lo: i64, hi: i64) -> std::ops::RangeInclusive<i64> {
        let (a, b) = self.scan.unwrap_or((lo, hi));
        a..=b
    }
}

/// Parses `a..b` (inclusive) as used by `--scan-perversity`.
pub fn parse_scan(s: &str) -> Result<(i64, i64), HarnessError> {
    let bad = || HarnessError::Invalid(format!("bad range `{s}`, expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn run_check(kind: CheckKind, opts: &CheckOptions) -> Result<Vec<CheckReport>, HarnessError> {
    match kind {
        CheckKind::Cone => check_cone(opts),
        CheckKind::Products => check_products(opts),
        CheckKind::Mv => check_mv(opts),
        CheckKind::Duality => check_duality(opts),
        CheckKind::Example38 => check_example38(),
        CheckKind::RInvariance => check_r_invariance(opts),
        CheckKind::Subdivision => check_subdivision(opts),
    }
}
