//! Python bindings for the dyadic oscillation laboratory.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use oscillab::constants::{laplace_bound, theorem_constant, Bijection, JNParams};
use oscillab::functionals::{fujii_wilson, CubeFunctional};
use oscillab::grid::{CellFunction, CellMeasure, DyadicCube, Grid};
use oscillab::norms::{LocalNormSpec, NormFamily};
use oscillab::oscillation::{bmo_norm, cz_decompose, oscillation, sparse_dominate};
use oscillab::testfns;
use oscillab::verify::run_suites;
use oscillab::young::YoungFunction;

fn err(e: oscillab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cube_from(level: u32, morton: u64, grid: &Grid) -> PyResult<DyadicCube> {
    let cube = DyadicCube::from_morton(level, morton, grid.dim());
    grid.check_cube(&cube).map_err(err)?;
    Ok(cube)
}

/// Dyadic grid on the unit cube.
#[pyclass(name = "Grid", frozen)]
struct PyGrid {
    inner: Arc<Grid>,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(dim: u32, depth: u32) -> Self {
        PyGrid { inner: Grid::unit(dim, depth) }
    }

    #[getter]
    fn dim(&self) -> u32 {
        self.inner.dim()
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.inner.depth()
    }

    #[getter]
    fn cell_count(&self) -> usize {
        self.inner.cell_count()
    }

    fn __repr__(&self) -> String {
        format!("Grid(dim={}, depth={})", self.inner.dim(), self.inner.depth())
    }
}

/// Cell-constant function on a grid.
#[pyclass(name = "Function", frozen)]
struct PyFunction {
    inner: CellFunction,
}

#[pymethods]
impl PyFunction {
    /// Builds from row-major cell values.
    #[new]
    fn new(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyFunction {
            inner: CellFunction::from_row_major(grid.inner.clone(), values).map_err(err)?,
        })
    }

    /// Built-in examples: "log-reciprocal", "indicator:theta", "random-step:seed".
    #[staticmethod]
    fn named(grid: &PyGrid, name: &str) -> PyResult<Self> {
        Ok(PyFunction { inner: testfns::from_name(grid.inner.clone(), name).map_err(err)? })
    }

    /// Row-major cell values.
    fn values(&self) -> Vec<f64> {
        self.inner.grid().morton_to_row_major(self.inner.values())
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }
}

/// Positive measure given by cell masses.
#[pyclass(name = "Measure", frozen)]
struct PyMeasure {
    inner: Arc<CellMeasure>,
}

#[pymethods]
impl PyMeasure {
    /// Builds from row-major cell masses.
    #[new]
    fn new(grid: &PyGrid, masses: Vec<f64>) -> PyResult<Self> {
        Ok(PyMeasure {
            inner: Arc::new(
                CellMeasure::from_row_major(grid.inner.clone(), masses).map_err(err)?,
            ),
        })
    }

    #[staticmethod]
    fn lebesgue(grid: &PyGrid) -> Self {
        PyMeasure { inner: Arc::new(CellMeasure::lebesgue(grid.inner.clone())) }
    }

    /// dν = w dμ.
    fn weighted(&self, w: &PyFunction) -> PyResult<Self> {
        Ok(PyMeasure { inner: Arc::new(self.inner.weighted(&w.inner).map_err(err)?) })
    }

    fn total_mass(&self) -> f64 {
        self.inner.total_mass()
    }

    fn cube_mass(&self, level: u32, morton: u64) -> PyResult<f64> {
        let cube = cube_from(level, morton, self.inner.grid())?;
        self.inner.cube_mass(&cube).map_err(err)
    }

    fn cube_average(&self, f: &PyFunction, level: u32, morton: u64) -> PyResult<f64> {
        let cube = cube_from(level, morton, self.inner.grid())?;
        self.inner.cube_average(&f.inner, &cube).map_err(err)
    }

    /// Doubling data (c, n) of the measure.
    fn doubling(&self) -> PyResult<(f64, f64)> {
        self.inner.doubling().map_err(err)
    }
}

fn parse_family(family: &str, param: &str) -> PyResult<NormFamily> {
    match family {
        "lp" => Ok(NormFamily::Lp(param.parse().map_err(|_| {
            PyValueError::new_err("lp parameter must be a number")
        })?)),
        "weak-lp" => Ok(NormFamily::WeakLp(param.parse().map_err(|_| {
            PyValueError::new_err("weak-lp parameter must be a number")
        })?)),
        "orlicz" => Ok(NormFamily::Orlicz(YoungFunction::from_name(param).map_err(err)?)),
        "weak-orlicz" => Ok(NormFamily::WeakOrlicz(YoungFunction::from_name(param).map_err(err)?)),
        other => Err(PyValueError::new_err(format!(
            "unknown family {other:?}; try lp, weak-lp, orlicz, weak-orlicz"
        ))),
    }
}

/// Localized norm of f on the cube (level, morton), normalized by the measure.
#[pyfunction]
#[pyo3(signature = (f, measure, family="lp", param="2", level=0, morton=0))]
fn local_norm(
    f: &PyFunction,
    measure: &PyMeasure,
    family: &str,
    param: &str,
    level: u32,
    morton: u64,
) -> PyResult<f64> {
    let cube = cube_from(level, morton, measure.inner.grid())?;
    let spec =
        LocalNormSpec::with_measure_functional(parse_family(family, param)?, measure.inner.clone());
    spec.norm(&f.inner, &cube).map_err(err)
}

/// Mean oscillation of f over one cube.
#[pyfunction]
fn cube_oscillation(
    f: &PyFunction,
    measure: &PyMeasure,
    level: u32,
    morton: u64,
) -> PyResult<f64> {
    let cube = cube_from(level, morton, measure.inner.grid())?;
    oscillation(&f.inner, &cube, &measure.inner).map_err(err)
}

/// Dyadic BMO norm and its argmax cube.
#[pyfunction]
#[pyo3(signature = (f, measure, min_level=1))]
fn bmo(f: &PyFunction, measure: &PyMeasure, min_level: u32) -> PyResult<(f64, (u32, u64))> {
    let (value, cube) = bmo_norm(&f.inner, &measure.inner, min_level).map_err(err)?;
    Ok((value, (cube.level, cube.morton())))
}

/// Stopping-time decomposition: list of (level, morton, average).
#[pyfunction]
#[pyo3(signature = (g, measure, threshold, level=0, morton=0))]
fn stopping_cubes(
    g: &PyFunction,
    measure: &PyMeasure,
    threshold: f64,
    level: u32,
    morton: u64,
) -> PyResult<Vec<(u32, u64, f64)>> {
    let parent = cube_from(level, morton, measure.inner.grid())?;
    let cz = cz_decompose(&g.inner, &parent, &measure.inner, threshold).map_err(err)?;
    Ok(cz
        .selected
        .members
        .iter()
        .zip(&cz.averages)
        .map(|(q, avg)| (q.level, q.morton(), *avg))
        .collect())
}

/// Sparse family (level, morton, major-set mass) and the domination constant.
#[pyfunction]
#[pyo3(signature = (f, measure, stopping_factor=2.0, max_generations=64))]
fn sparse_family(
    f: &PyFunction,
    measure: &PyMeasure,
    stopping_factor: f64,
    max_generations: u32,
) -> PyResult<(Vec<(u32, u64, f64)>, f64)> {
    let root = measure.inner.grid().root();
    let fam = sparse_dominate(&f.inner, &root, &measure.inner, stopping_factor, max_generations)
        .map_err(err)?;
    let members = fam
        .members
        .iter()
        .zip(&fam.major_sets)
        .map(|(q, e)| (q.level, q.morton(), measure.inner.cell_set_mass(e)))
        .collect();
    Ok((members, fam.c_dom))
}

/// Maximal-function characteristic of a weight against the base measure.
#[pyfunction]
fn fujii_wilson_characteristic(
    w: &PyFunction,
    measure: &PyMeasure,
) -> PyResult<(f64, (u32, u64))> {
    let y = CubeFunctional::measure(measure.inner.clone());
    let (value, cube) = fujii_wilson(&w.inner, &y, &measure.inner, 0).map_err(err)?;
    Ok((value, (cube.level, cube.morton())))
}

/// Optimized stopping-level constant; psi is "identity", "power:p" or "orlicz:name".
#[pyfunction]
#[pyo3(signature = (psi="identity", cy=1.0, k=1.0, cmu=1.0, nmu=1.0))]
fn optimizer_constant(psi: &str, cy: f64, k: f64, cmu: f64, nmu: f64) -> PyResult<(f64, f64)> {
    let bijection = if psi == "identity" {
        Bijection::identity()
    } else if let Some(p) = psi.strip_prefix("power:") {
        Bijection::power(p.parse().map_err(|_| PyValueError::new_err("bad power exponent"))?)
            .map_err(err)?
    } else if let Some(name) = psi.strip_prefix("orlicz:") {
        Bijection::orlicz(YoungFunction::from_name(name).map_err(err)?)
    } else {
        return Err(PyValueError::new_err(format!("unknown bijection {psi:?}")));
    };
    theorem_constant(&bijection, cy, k, cmu, nmu).map_err(err)
}

/// Transform-based exponential-integrability constant for a growth function.
#[pyfunction]
#[pyo3(signature = (phi="power:2", c1=2.0, c2=2.0))]
fn transform_constant(phi: &str, c1: f64, c2: f64) -> PyResult<f64> {
    let phi = YoungFunction::from_name(phi).map_err(err)?;
    let jn = JNParams::new(c1, c2).map_err(err)?;
    laplace_bound(&phi, &jn).map_err(err)
}

/// Runs verification suites; returns (all_passed, json_report).
#[pyfunction]
#[pyo3(signature = (suites=vec![], seed=7, quick=false))]
fn verify(suites: Vec<String>, seed: u64, quick: bool) -> PyResult<(bool, String)> {
    let report = run_suites(&suites, seed, quick).map_err(err)?;
    Ok((report.pass, report.to_json()))
}

#[pymodule]
fn oscillab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyMeasure>()?;
    m.add_function(wrap_pyfunction!(local_norm, m)?)?;
    m.add_function(wrap_pyfunction!(cube_oscillation, m)?)?;
    m.add_function(wrap_pyfunction!(bmo, m)?)?;
    m.add_function(wrap_pyfunction!(stopping_cubes, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_family, m)?)?;
    m.add_function(wrap_pyfunction!(fujii_wilson_characteristic, m)?)?;
    m.add_function(wrap_pyfunction!(optimizer_constant, m)?)?;
    m.add_function(wrap_pyfunction!(transform_constant, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
