//! Python bindings: towers, their cohomology rings, triviality tests and the
//! isomorphism search.

use bott_core::census::{run_census, EnumerationConfig, Filter};
use bott_core::cohomring::{build_ring, poincare_ranks};
use bott_core::isosearch::{
    check_hom, is_iso, relation_residues, search_iso, Degree2Map, SearchMode,
};
use bott_core::triviality::{self, StageDiagnostic};
use bott_core::{CohomRing, Permutation, Polynomial, TowerSpec};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: bott_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn resolve_names(count: usize, names: Option<Vec<String>>) -> PyResult<Vec<String>> {
    match names {
        None => Ok(Polynomial::default_names(count)),
        Some(n) if n.len() == count => Ok(n),
        Some(n) => Err(PyValueError::new_err(format!(
            "expected {count} variable names, got {}",
            n.len()
        ))),
    }
}

fn to_map(rows: Vec<Vec<BigInt>>) -> PyResult<Degree2Map> {
    let rows = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(bott_core::Rational::from_integer)
                .collect()
        })
        .collect();
    Degree2Map::new(rows).map_err(value_error)
}

fn integer_rows(m: &Degree2Map) -> Vec<Vec<BigInt>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|c| c.to_integer()).collect())
        .collect()
}

/// A generalized Bott tower. `coeffs[i]` lists the `n_{i+1}` rows of stage
/// `i + 1`, each with one integer per earlier stage.
#[pyclass(name = "Tower", module = "bott", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyTower {
    inner: TowerSpec,
}

#[pymethods]
impl PyTower {
    #[new]
    fn new(dims: Vec<usize>, coeffs: Vec<Vec<Vec<BigInt>>>) -> PyResult<Self> {
        if dims.len() != coeffs.len() {
            return Err(PyValueError::new_err("dims and coeffs differ in length"));
        }
        let stages = dims
            .into_iter()
            .zip(coeffs)
            .map(|(n, rows)| bott_core::StageSpec::new(n, rows))
            .collect();
        let inner = TowerSpec::new(stages).map_err(value_error)?;
        Ok(PyTower { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = TowerSpec::parse(text).map_err(value_error)?;
        Ok(PyTower { inner })
    }

    #[staticmethod]
    fn product(dims: Vec<usize>) -> PyResult<Self> {
        let inner = TowerSpec::product(&dims).map_err(value_error)?;
        Ok(PyTower { inner })
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn fiber_dims(&self) -> Vec<usize> {
        self.inner.fiber_dims()
    }

    #[getter]
    fn coeffs(&self) -> Vec<Vec<Vec<BigInt>>> {
        self.inner
            .stages()
            .iter()
            .map(|s| s.coeffs.clone())
            .collect()
    }

    fn is_bott(&self) -> bool {
        self.inner.is_bott()
    }

    fn vector_matrix_transpose(&self) -> Vec<Vec<BigInt>> {
        self.inner.vector_matrix_transpose()
    }

    fn reduced_characteristic_matrix(&self) -> Vec<Vec<BigInt>> {
        self.inner.reduced_characteristic_matrix()
    }

    /// Relabels stages: old stage `i` moves to `images[i-1]`.
    fn permute(&self, images: Vec<usize>) -> PyResult<Self> {
        let perm = Permutation::new(images).map_err(value_error)?;
        let inner = self.inner.permute(&perm).map_err(value_error)?;
        Ok(PyTower { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Tower(dims={:?}, coeffs={:?})",
            self.inner.fiber_dims(),
            self.coeffs()
        )
    }
}

/// Cohomology ring of a tower, with exact normal forms.
#[pyclass(name = "Ring", module = "bott", frozen)]
struct PyRing {
    inner: CohomRing,
}

#[pymethods]
impl PyRing {
    #[new]
    fn new(tower: &PyTower) -> Self {
        PyRing {
            inner: build_ring(&tower.inner),
        }
    }

    #[getter]
    fn tower(&self) -> PyTower {
        PyTower {
            inner: self.inner.tower().clone(),
        }
    }

    #[pyo3(signature = (names=None))]
    fn relations(&self, names: Option<Vec<String>>) -> PyResult<Vec<String>> {
        let names = resolve_names(self.inner.generator_count(), names)?;
        Ok(self
            .inner
            .relations()
            .iter()
            .map(|r| r.to_string_with(&names))
            .collect())
    }

    /// Chern classes `c_1..c_n` of the bundle at a 1-based stage.
    #[pyo3(signature = (stage, names=None))]
    fn chern(&self, stage: usize, names: Option<Vec<String>>) -> PyResult<Vec<String>> {
        let names = resolve_names(self.inner.generator_count(), names)?;
        let data = self.inner.chern(stage).map_err(value_error)?;
        Ok((1..=data.rank())
            .map(|k| data.class(k).to_string_with(&names))
            .collect())
    }

    #[pyo3(signature = (poly, names=None))]
    fn normal_form(&self, poly: &str, names: Option<Vec<String>>) -> PyResult<String> {
        let names = resolve_names(self.inner.generator_count(), names)?;
        let p = Polynomial::parse(poly, &names).map_err(value_error)?;
        let nf = self.inner.normal_form(&p).map_err(value_error)?;
        Ok(nf.to_string_with(&names))
    }

    #[pyo3(signature = (poly, names=None, over_integers=false))]
    fn is_zero(
        &self,
        poly: &str,
        names: Option<Vec<String>>,
        over_integers: bool,
    ) -> PyResult<bool> {
        let names = resolve_names(self.inner.generator_count(), names)?;
        let p = Polynomial::parse(poly, &names).map_err(value_error)?;
        self.inner
            .is_zero_class(&p, over_integers)
            .map_err(value_error)
    }

    fn poincare_ranks(&self) -> Vec<u64> {
        poincare_ranks(self.inner.tower())
    }

    #[pyo3(signature = (names=None))]
    fn report(&self, names: Option<Vec<String>>) -> PyResult<String> {
        let names = resolve_names(self.inner.generator_count(), names)?;
        Ok(self.inner.report(&names))
    }
}

/// Triviality flags with per-stage diagnostics.
#[pyclass(name = "Report", module = "bott", frozen, get_all)]
struct PyReport {
    q_trivial: bool,
    z_trivial: bool,
    total_chern_trivial: bool,
    /// `(stage, k)` of the first failing relation, if any.
    first_violation: Option<(usize, usize)>,
    /// `(stage, scale, vector)` for every stage passing its relations.
    candidates: Vec<(usize, BigInt, Vec<BigInt>)>,
    /// Permutation images and reordered tower, for Q-trivial towers.
    decomposition: Option<(Vec<usize>, PyTower)>,
    text: String,
}

#[pymethods]
impl PyReport {
    fn __str__(&self) -> String {
        self.text.clone()
    }
}

#[pyfunction]
fn full_report(tower: &PyTower) -> PyResult<PyReport> {
    let r = triviality::full_report(&tower.inner).map_err(value_error)?;
    let candidates = r
        .per_stage
        .iter()
        .filter_map(|d| match d {
            StageDiagnostic::Candidate(c) => {
                Some((c.stage, c.scale.clone(), c.vector.coeffs.clone()))
            }
            StageDiagnostic::Violated { .. } => None,
        })
        .collect();
    Ok(PyReport {
        q_trivial: r.q_trivial,
        z_trivial: r.z_trivial,
        total_chern_trivial: r.total_chern_trivial,
        first_violation: r.first_violation(),
        candidates,
        decomposition: r.decomposition.as_ref().map(|d| {
            (
                d.permutation.images().to_vec(),
                PyTower {
                    inner: d.reordered.clone(),
                },
            )
        }),
        text: r.to_text(),
    })
}

#[pyfunction]
fn is_q_trivial(tower: &PyTower) -> bool {
    triviality::is_q_trivial(&tower.inner)
}

#[pyfunction]
fn is_z_trivial(tower: &PyTower) -> bool {
    triviality::is_z_trivial(&tower.inner)
}

#[pyfunction]
fn is_total_chern_trivial(tower: &PyTower) -> bool {
    triviality::is_total_chern_trivial(&tower.inner)
}

/// Returns `(permutation images, reordered tower)`; raises for towers that
/// are not Q-trivial.
#[pyfunction]
fn decompose(tower: &PyTower) -> PyResult<(Vec<usize>, PyTower)> {
    let d = triviality::decompose(&tower.inner).map_err(value_error)?;
    Ok((
        d.permutation.images().to_vec(),
        PyTower { inner: d.reordered },
    ))
}

/// Integer matrix (row `j` = image of source generator `j`) of the first
/// isomorphism found with entries in `[-bound, bound]`, or `None`.
#[pyfunction]
#[pyo3(signature = (source, target, over_integers=false, bound=2, parallel=true))]
fn search_isomorphism(
    py: Python<'_>,
    source: &PyTower,
    target: &PyTower,
    over_integers: bool,
    bound: u32,
    parallel: bool,
) -> Option<Vec<Vec<BigInt>>> {
    let src = build_ring(&source.inner);
    let tgt = build_ring(&target.inner);
    let mode = if parallel {
        SearchMode::Parallel
    } else {
        SearchMode::Sequential
    };
    py.detach(|| search_iso(&src, &tgt, over_integers, bound, mode))
        .map(|m| integer_rows(&m))
}

#[pyfunction]
#[pyo3(signature = (matrix, source, target, over_integers=false))]
fn is_homomorphism(
    matrix: Vec<Vec<BigInt>>,
    source: &PyTower,
    target: &PyTower,
    over_integers: bool,
) -> PyResult<bool> {
    let m = to_map(matrix)?;
    check_hom(
        &m,
        &build_ring(&source.inner),
        &build_ring(&target.inner),
        over_integers,
    )
    .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (matrix, source, target, over_integers=false))]
fn is_isomorphism(
    matrix: Vec<Vec<BigInt>>,
    source: &PyTower,
    target: &PyTower,
    over_integers: bool,
) -> PyResult<bool> {
    let m = to_map(matrix)?;
    is_iso(
        &m,
        &build_ring(&source.inner),
        &build_ring(&target.inner),
        over_integers,
    )
    .map_err(value_error)
}

/// Normal forms in the target of the source relations pushed through `matrix`.
#[pyfunction]
fn residues(matrix: Vec<Vec<BigInt>>, source: &PyTower, target: &PyTower) -> PyResult<Vec<String>> {
    let m = to_map(matrix)?;
    let tgt = build_ring(&target.inner);
    let res = relation_residues(&m, &build_ring(&source.inner), &tgt).map_err(value_error)?;
    Ok(res.iter().map(ToString::to_string).collect())
}

/// Classifies every tower with the given height, allowed fiber dimensions
/// and coefficient bound. Returns `(tower, q, z, chern)` per passing tower.
#[pyfunction]
#[pyo3(signature = (height, dims, bound, filters=Vec::new()))]
fn census(
    py: Python<'_>,
    height: usize,
    dims: Vec<usize>,
    bound: u32,
    filters: Vec<String>,
) -> PyResult<Vec<(PyTower, bool, bool, bool)>> {
    let mut config = EnumerationConfig::new(height, dims, bound);
    config.filters = filters
        .iter()
        .map(|f| f.parse::<Filter>())
        .collect::<bott_core::Result<_>>()
        .map_err(value_error)?;
    let result = py
        .detach(|| run_census(&config, SearchMode::Parallel))
        .map_err(value_error)?;
    Ok(result
        .records
        .into_iter()
        .map(|r| {
            (
                PyTower { inner: r.tower },
                r.q_trivial,
                r.z_trivial,
                r.chern_trivial,
            )
        })
        .collect())
}

#[pymodule]
fn bott(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTower>()?;
    m.add_class::<PyRing>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(full_report, m)?)?;
    m.add_function(wrap_pyfunction!(is_q_trivial, m)?)?;
    m.add_function(wrap_pyfunction!(is_z_trivial, m)?)?;
    m.add_function(wrap_pyfunction!(is_total_chern_trivial, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(search_isomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(is_homomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(is_isomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(residues, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    Ok(())
}
