//! Python bindings. Reports come back as the same dictionaries the command
//! line prints as JSON.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use strata::complex::PerversitySpec;
use strata::harness::{self, CheckKind, CheckOptions, ComputeRequest, Theory};
use strata::linalg::CoefficientRing;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn ring(s: &str) -> PyResult<CoefficientRing> {
    s.parse().map_err(err)
}

fn spec(s: &str) -> PyResult<PerversitySpec> {
    s.parse().map_err(err)
}

/// Groups of one theory (`ih`, `bm`, `blowup`, `dual-complex`) on a corpus
/// space or recipe, as a report dictionary.
#[pyfunction]
#[pyo3(signature = (space, theory, perversity = "0", ring = "Z", remove = Vec::new()))]
fn compute<'py>(
    py: Python<'py>,
    space: &str,
    theory: &str,
    perversity: &str,
    ring: &str,
    remove: Vec<String>,
) -> PyResult<Bound<'py, PyAny>> {
    let req = ComputeRequest {
        space: space.to_string(),
        theory: theory.parse::<Theory>().map_err(err)?,
        perversity: spec(perversity)?,
        ring: self::ring(ring)?,
        remove,
    };
    let report = py.detach(|| harness::compute(&req)).map_err(err)?;
    to_python(py, &report)
}

/// Runs a named check and returns its reports.
#[pyfunction]
#[pyo3(signature = (name, rings = Vec::new(), spaces = Vec::new(), perversities = Vec::new(), scan = None))]
fn check<'py>(
    py: Python<'py>,
    name: &str,
    rings: Vec<String>,
    spaces: Vec<String>,
    perversities: Vec<String>,
    scan: Option<(i64, i64)>,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: CheckKind = name.parse().map_err(err)?;
    let opts = CheckOptions {
        rings: rings.iter().map(|r| ring(r)).collect::<PyResult<_>>()?,
        spaces,
        perversities: perversities.iter().map(|p| spec(p)).collect::<PyResult<_>>()?,
        scan,
    };
    let reports = py.detach(|| harness::run_check(kind, &opts)).map_err(err)?;
    to_python(py, &reports)
}

/// Ids, recipes and descriptions of the built-in spaces.
#[pyfunction]
fn corpus<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_python(py, &strata::corpus::entries())
}

#[pymodule]
fn pystrata(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(compute, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    Ok(())
}
