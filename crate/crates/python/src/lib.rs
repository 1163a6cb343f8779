//! Python bindings. Reports come back as plain dicts.

use dlad_core::centralizer::{component_group, fiber_report, semidirect_report, standard_cosets};
use dlad_core::matmodel::{verify_graph_auto, verify_prop21};
use dlad_core::rational::{
    class_rep, cor32_check, enumerate_geom_classes, rational_classes, scenario_search, theorem_b_check,
};
use dlad_core::{DlGroup, Error, ExtElem, QzVector, SignedPerm};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(dlad, HypothesisError, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::HypothesisViolated(_) | Error::NotStable(_) => HypothesisError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn frobenius_power(p: u64, q: u64) -> PyResult<u32> {
    let (mut r, mut a) = (q, 0);
    while r % p == 0 && r > 1 {
        r /= p;
        a += 1;
    }
    if r != 1 || a == 0 {
        return Err(PyValueError::new_err(format!("q = {q} is not a power of p = {p}")));
    }
    Ok(a)
}

/// `D_l` adjoint group data in characteristic `p`.
#[pyclass(frozen)]
struct Group {
    inner: DlGroup,
}

impl Group {
    fn frobenius(&self, q: u64, twist: Option<&str>, gamma: bool) -> PyResult<ExtElem> {
        let a = frobenius_power(self.inner.p(), q)?;
        let l = self.inner.rank();
        let mut v = match twist {
            Some(s) => s.parse::<SignedPerm>().map_err(py_err)?,
            None => SignedPerm::identity(l),
        };
        if v.rank() != l {
            return Err(py_err(Error::RankMismatch(v.rank(), l)));
        }
        if gamma {
            v = v * SignedPerm::gamma(l);
        }
        Ok(ExtElem::new(v, a))
    }
}

#[pymethods]
impl Group {
    #[new]
    fn new(rank: usize, p: u64) -> PyResult<Self> {
        Ok(Group { inner: DlGroup::new(rank, p).map_err(py_err)? })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    fn __repr__(&self) -> String {
        format!("Group(rank={}, p={})", self.inner.rank(), self.inner.p())
    }

    /// Labels and coordinates of the center of the simply connected cover.
    fn center(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.center())
    }

    /// Canonical form of a torus point, e.g. "0,1/4,1/2,3/4".
    fn canonical(&self, x: &str) -> PyResult<String> {
        Ok(self.inner.parse_ad(x).map_err(py_err)?.to_string())
    }

    /// Representative of the geometric class of `x`.
    fn class_rep(&self, x: &str) -> PyResult<String> {
        let t: QzVector = self.inner.parse_ad(x).map_err(py_err)?.vector().clone();
        Ok(class_rep(&t).to_string())
    }

    /// Geometric classes with denominator dividing `denom`.
    fn classes(&self, py: Python<'_>, denom: u64) -> PyResult<Py<PyAny>> {
        let classes = py.detach(|| enumerate_geom_classes(&self.inner, denom)).map_err(py_err)?;
        to_py(py, &classes)
    }

    /// Semidirect factorization and fiber action for `x`, base Frobenius `F_q`.
    #[pyo3(signature = (x, q=None))]
    fn centralizer(&self, py: Python<'_>, x: &str, q: Option<u64>) -> PyResult<Py<PyAny>> {
        let g = &self.inner;
        let f0 = ExtElem::frobenius(g.rank(), frobenius_power(g.p(), q.unwrap_or(g.p()))?);
        let x = g.parse_ad(x).map_err(py_err)?;
        let d = component_group(g, &x).map_err(py_err)?;
        let cosets = standard_cosets(g, &d, &f0).map_err(py_err)?;
        let semidirect = semidirect_report(&d, &cosets);
        let fiber = fiber_report(g, &d, &cosets).map_err(py_err)?;
        to_py(py, &serde_json::json!({ "semidirect": semidirect, "fiber": fiber }))
    }

    /// Rational classes of `x` for the Frobenius `(twist∘γ^gamma, log_p q)`.
    #[pyo3(signature = (x, q, twist=None, gamma=false))]
    fn rational(&self, py: Python<'_>, x: &str, q: u64, twist: Option<&str>, gamma: bool) -> PyResult<Py<PyAny>> {
        let g = &self.inner;
        let f = self.frobenius(q, twist, gamma)?;
        let base = ExtElem::frobenius(g.rank(), f.a);
        let x = g.parse_ad(x).map_err(py_err)?;
        to_py(py, &rational_classes(g, &x, &f, &base).map_err(py_err)?)
    }

    fn theorem_b(&self, py: Python<'_>, x: &str, q: u64) -> PyResult<Py<PyAny>> {
        let f0 = self.frobenius(q, None, false)?;
        let x = self.inner.parse_ad(x).map_err(py_err)?;
        to_py(py, &theorem_b_check(&self.inner, &x, &f0).map_err(py_err)?)
    }

    #[pyo3(signature = (x, q, k=1))]
    fn cor32(&self, py: Python<'_>, x: &str, q: u64, k: u32) -> PyResult<Py<PyAny>> {
        let f0 = self.frobenius(q, None, false)?;
        let x = self.inner.parse_ad(x).map_err(py_err)?;
        to_py(py, &cor32_check(&self.inner, &x, &f0, k).map_err(py_err)?)
    }

    /// Classes of denominator dividing `denom` (default `2(q²−1)`) stable under
    /// `F_q` and `γ` with no `γ`-stable rational class.
    #[pyo3(signature = (q, denom=None))]
    fn scenario(&self, py: Python<'_>, q: u64, denom: Option<u64>) -> PyResult<Py<PyAny>> {
        let f0 = self.frobenius(q, None, false)?;
        let n = denom.unwrap_or(2 * (q * q - 1));
        let found = py.detach(|| scenario_search(&self.inner, &f0, n)).map_err(py_err)?;
        to_py(py, &found)
    }
}

/// Signed permutation matrices in `SO_2l(q)` against the diagonal torus.
#[pyfunction]
#[pyo3(signature = (rank, q, seed=0))]
fn prop21(py: Python<'_>, rank: usize, q: u64, seed: u64) -> PyResult<Py<PyAny>> {
    to_py(py, &verify_prop21(rank, q, seed).map_err(py_err)?)
}

/// Graph automorphism realized by conjugation.
#[pyfunction]
#[pyo3(signature = (rank, q, samples=20, seed=0))]
fn graph_auto(py: Python<'_>, rank: usize, q: u64, samples: usize, seed: u64) -> PyResult<Py<PyAny>> {
    to_py(py, &verify_graph_auto(rank, q, samples, seed).map_err(py_err)?)
}

#[pymodule]
fn dlad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_function(wrap_pyfunction!(prop21, m)?)?;
    m.add_function(wrap_pyfunction!(graph_auto, m)?)?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    Ok(())
}
