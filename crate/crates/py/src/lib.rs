//! Python bindings: designs, codes, bipartite designs, the planner and the census.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use steiner_core::bbd::{bbd_from_code, bbd_from_factorizations, code_from_bbd, Bbd};
use steiner_core::census;
use steiner_core::io;
use steiner_core::latin::{mols_supply, round_robin_one_factorization};
use steiner_core::mds::{self, MdsCode};
use steiner_core::planner::{self, ExecOptions, PlannerOptions};
use steiner_core::search;
use steiner_core::sqs;
use steiner_core::verify::{self, CoverageOptions, CoverageReport};
use steiner_core::{Design, Error, Kind};

create_exception!(steiner, SteinerError, PyException);
create_exception!(steiner, UnreachableError, SteinerError);
create_exception!(steiner, SearchTimeoutError, SteinerError);
create_exception!(steiner, VerificationError, SteinerError);

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Unreachable { .. } => UnreachableError::new_err(msg),
        Error::SearchTimeout { .. } => SearchTimeoutError::new_err(msg),
        Error::VerificationFailure(_) => VerificationError::new_err(msg),
        _ => SteinerError::new_err(msg),
    }
}

fn kind(s: &str) -> PyResult<Kind> {
    s.parse().map_err(err)
}

/// Exact coverage counts for one design.
#[pyclass(name = "CoverageReport", frozen)]
struct PyReport {
    inner: CoverageReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn total(&self) -> u64 {
        self.inner.total
    }
    #[getter]
    fn once(&self) -> u64 {
        self.inner.once
    }
    #[getter]
    fn uncovered(&self) -> u64 {
        self.inner.uncovered
    }
    #[getter]
    fn multi(&self) -> u64 {
        self.inner.multi
    }
    #[getter]
    fn uncovered_witnesses(&self) -> Vec<[u32; 3]> {
        self.inner.uncovered_witnesses.clone()
    }
    #[getter]
    fn multi_witnesses(&self) -> Vec<[u32; 3]> {
        self.inner.multi_witnesses.clone()
    }
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }
    fn is_packing(&self) -> bool {
        self.inner.is_packing()
    }
    fn __repr__(&self) -> String {
        format!(
            "CoverageReport(total={}, once={}, uncovered={}, multi={})",
            self.inner.total, self.inner.once, self.inner.uncovered, self.inner.multi
        )
    }
}

/// A block set on `0..v` with a declared kind (`sqs`, `s46` or `partial`).
#[pyclass(name = "Design", frozen)]
struct PyDesign {
    inner: Design,
}

#[pymethods]
impl PyDesign {
    #[new]
    fn new(kind_name: &str, v: u32, blocks: Vec<Vec<u32>>) -> PyResult<Self> {
        Ok(PyDesign {
            inner: Design::new(kind(kind_name)?, v, blocks).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyDesign {
            inner: io::read_design(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyDesign {
            inner: io::load_design(&path).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        io::write_design(&self.inner)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::save_design(&path, &self.inner).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    #[getter]
    fn v(&self) -> u32 {
        self.inner.v()
    }

    #[getter]
    fn blocks(&self) -> Vec<Vec<u32>> {
        self.inner.blocks().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[pyo3(signature = (threads=1))]
    fn verify(&self, py: Python<'_>, threads: usize) -> PyResult<PyReport> {
        let d = &self.inner;
        let r = py
            .detach(|| verify::verify_design_with(d, &CoverageOptions::with_threads(threads)))
            .map_err(err)?;
        Ok(PyReport { inner: r })
    }

    fn __eq__(&self, other: &PyDesign) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Design(kind={}, v={}, blocks={})", self.inner.kind(), self.inner.v(), self.inner.len())
    }
}

/// A code over `0..q` of length `d` and minimum distance `dist`.
#[pyclass(name = "MdsCode", frozen)]
struct PyMds {
    inner: MdsCode,
}

#[pymethods]
impl PyMds {
    #[new]
    fn new(d: usize, q: u32, dist: usize, words: Vec<Vec<u32>>) -> PyResult<Self> {
        Ok(PyMds {
            inner: MdsCode::new(d, q, dist, words).map_err(err)?,
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }
    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }
    #[getter]
    fn dist(&self) -> usize {
        self.inner.dist()
    }
    #[getter]
    fn words(&self) -> Vec<Vec<u32>> {
        self.inner.words().map(|w| w.to_vec()).collect()
    }
    fn __len__(&self) -> usize {
        self.inner.len()
    }
    fn to_text(&self) -> String {
        io::write_mds(&self.inner)
    }

    /// True when every face of the right dimension meets the code exactly once.
    fn verify(&self) -> PyResult<bool> {
        Ok(verify::verify_mds(&self.inner).map_err(err)?.valid)
    }

    fn project(&self, coords: Vec<usize>) -> PyResult<PyMds> {
        Ok(PyMds {
            inner: mds::project(&self.inner, &coords).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "MdsCode(d={}, q={}, dist={}, words={})",
            self.inner.d(),
            self.inner.q(),
            self.inner.dist(),
            self.inner.len()
        )
    }
}

/// Bipartite 3-wise balanced design with groups `0..m` and `m..2m`.
#[pyclass(name = "Bbd", frozen)]
struct PyBbd {
    inner: Bbd,
}

#[pymethods]
impl PyBbd {
    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }
    #[getter]
    fn blocks(&self) -> Vec<[u32; 4]> {
        self.inner.blocks().to_vec()
    }
    fn __len__(&self) -> usize {
        self.inner.len()
    }
    fn to_text(&self) -> String {
        io::write_bbd(&self.inner)
    }
    fn verify(&self) -> PyResult<bool> {
        Ok(verify::verify_bbd(&self.inner).map_err(err)?.valid)
    }
    fn to_code(&self) -> PyResult<PyMds> {
        Ok(PyMds {
            inner: code_from_bbd(&self.inner).map_err(err)?,
        })
    }
    fn __repr__(&self) -> String {
        format!("Bbd(m={}, blocks={})", self.inner.m(), self.inner.len())
    }
}

#[pyfunction]
fn sqs_block_count(v: u64) -> PyResult<u64> {
    steiner_core::sqs_block_count(v).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (v, kind_name="sqs"))]
fn is_admissible(v: u32, kind_name: &str) -> PyResult<bool> {
    Ok(steiner_core::is_admissible(v, kind(kind_name)?))
}

#[pyfunction]
fn boolean_sqs8() -> PyDesign {
    PyDesign {
        inner: sqs::boolean_sqs8(),
    }
}

#[pyfunction]
#[pyo3(signature = (v, seed=0, budget=search::DEFAULT_SEARCH_BUDGET))]
fn search_small_sqs(py: Python<'_>, v: u32, seed: u64, budget: u64) -> PyResult<PyDesign> {
    let d = py.detach(|| search::search_small_sqs(v, seed, budget)).map_err(err)?;
    Ok(PyDesign { inner: d })
}

#[pyfunction]
fn double(a: &PyDesign, b: &PyDesign, bbd: &PyBbd) -> PyResult<PyDesign> {
    Ok(PyDesign {
        inner: sqs::double(&a.inner, &b.inner, &bbd.inner).map_err(err)?,
    })
}

/// The bipartite design from two copies of the round-robin 1-factorization of `K_m`.
#[pyfunction]
#[pyo3(signature = (m, shift=0))]
fn round_robin_bbd(m: u32, shift: usize) -> PyResult<PyBbd> {
    let f = round_robin_one_factorization(m).map_err(err)?;
    let r = m as usize - 1;
    let pairing: Vec<usize> = (0..r).map(|i| (i + shift) % r).collect();
    Ok(PyBbd {
        inner: bbd_from_factorizations(&f, &f, &pairing).map_err(err)?,
    })
}

#[pyfunction]
fn bbd_from_mds(code: &PyMds) -> PyResult<PyBbd> {
    Ok(PyBbd {
        inner: bbd_from_code(&code.inner).map_err(err)?,
    })
}

/// MDS(count+1, count+2, n) code from `count` mutually orthogonal Latin squares.
#[pyfunction]
fn mds_from_mols(n: u32, count: usize) -> PyResult<PyMds> {
    let fam = mols_supply(n, count).map_err(err)?;
    Ok(PyMds {
        inner: mds::mds_from_mols(&fam).map_err(err)?,
    })
}

#[pyfunction]
fn rs_mds_code(q: u32, d: usize, dist: usize) -> PyResult<PyMds> {
    Ok(PyMds {
        inner: mds::rs_mds_code(q, d, dist).map_err(err)?,
    })
}

fn planner_options(inputs: Vec<PathBuf>) -> PyResult<PlannerOptions> {
    let mut files = BTreeMap::new();
    for p in inputs {
        let d = io::load_design(&p).map_err(err)?;
        files.insert((d.kind(), d.v()), p);
    }
    Ok(PlannerOptions {
        search_cap: None,
        files,
    })
}

/// The derivation plan for `(v, kind)` rendered as an indented tree.
#[pyfunction]
#[pyo3(signature = (v, kind_name="sqs", inputs=Vec::new()))]
fn plan(v: u32, kind_name: &str, inputs: Vec<PathBuf>) -> PyResult<String> {
    let opts = planner_options(inputs)?;
    Ok(planner::plan(v, kind(kind_name)?, &opts).map_err(err)?.to_string())
}

#[pyfunction]
#[pyo3(signature = (v, kind_name="sqs", seed=0, inputs=Vec::new(), threads=1, budget=search::DEFAULT_SEARCH_BUDGET))]
fn construct(
    py: Python<'_>,
    v: u32,
    kind_name: &str,
    seed: u64,
    inputs: Vec<PathBuf>,
    threads: usize,
    budget: u64,
) -> PyResult<PyDesign> {
    let opts = planner_options(inputs)?;
    let p = planner::plan(v, kind(kind_name)?, &opts).map_err(err)?;
    let eo = ExecOptions {
        search_budget: budget,
        coverage: CoverageOptions::with_threads(threads),
    };
    let d = py.detach(|| planner::execute(&p, seed, &eo)).map_err(err)?;
    Ok(PyDesign { inner: d })
}

/// The `8n+2` assembly with its four holes left open: `(design, holes)`,
/// each hole a point list.
#[pyfunction]
#[pyo3(signature = (v, seed=0))]
fn construct_holes(py: Python<'_>, v: u32, seed: u64) -> PyResult<(PyDesign, Vec<Vec<u32>>)> {
    let out = py
        .detach(|| planner::execute_holes(v, seed, &ExecOptions::default()))
        .map_err(err)?;
    let holes = out.holes.into_iter().map(|h| h.points).collect();
    Ok((PyDesign { inner: out.design }, holes))
}

#[pyfunction]
#[pyo3(signature = (v, threads=1))]
fn enumerate_sqs(py: Python<'_>, v: u32, threads: usize) -> PyResult<u64> {
    py.detach(|| census::count_sqs(v, census::Order::Forward, threads)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, threads=1))]
fn enumerate_quasigroups3(py: Python<'_>, k: u32, threads: usize) -> PyResult<u64> {
    py.detach(|| census::count_quasigroups3(k, census::Order::Forward, threads)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, threads=1))]
fn enumerate_bbd(py: Python<'_>, m: u32, threads: usize) -> PyResult<u64> {
    py.detach(|| census::count_bbd(m, census::Order::Forward, threads)).map_err(err)
}

#[pymodule]
fn steiner(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("SteinerError", py.get_type::<SteinerError>())?;
    m.add("UnreachableError", py.get_type::<UnreachableError>())?;
    m.add("SearchTimeoutError", py.get_type::<SearchTimeoutError>())?;
    m.add("VerificationError", py.get_type::<VerificationError>())?;
    m.add_class::<PyDesign>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyMds>()?;
    m.add_class::<PyBbd>()?;
    m.add_function(wrap_pyfunction!(sqs_block_count, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(boolean_sqs8, m)?)?;
    m.add_function(wrap_pyfunction!(search_small_sqs, m)?)?;
    m.add_function(wrap_pyfunction!(double, m)?)?;
    m.add_function(wrap_pyfunction!(round_robin_bbd, m)?)?;
    m.add_function(wrap_pyfunction!(bbd_from_mds, m)?)?;
    m.add_function(wrap_pyfunction!(mds_from_mols, m)?)?;
    m.add_function(wrap_pyfunction!(rs_mds_code, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(construct_holes, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_sqs, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_quasigroups3, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_bbd, m)?)?;
    Ok(())
}
