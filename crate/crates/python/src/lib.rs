//! Python bindings: the group/algebra types and the analysis pipeline,
//! exposed as an in-process extension module.
//!
//! Vectors are plain lists of floats in the generator basis; matrices are
//! row-major lists of lists. Heavier artifacts (CSV traces) are written by
//! the scenario runners exactly as the command-line front end does.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spoofsim::attack as core_attack;
use spoofsim::centralizer as core_centralizer;
use spoofsim::dynamics as core_dynamics;
use spoofsim::lie as core_lie;
use spoofsim::observer as core_observer;
use spoofsim::scenario as core_scenario;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// A matrix Lie group description: generator basis, derived structure
/// constants, and the exp/log/adjoint machinery built on them.
#[pyclass(frozen)]
struct LieGroup {
    spec: Arc<core_lie::LieGroupSpec>,
}

impl LieGroup {
    fn vector(&self, coords: Vec<f64>) -> PyResult<core_lie::AlgebraVector> {
        core_lie::AlgebraVector::new(&self.spec, &coords).map_err(value_err)
    }
}

#[pymethods]
impl LieGroup {
    /// The planar rigid-motion group with (forward, lateral, heading) basis.
    #[staticmethod]
    fn se2() -> Self {
        Self {
            spec: core_lie::LieGroupSpec::se2(),
        }
    }

    /// Load a group description from a JSON file
    /// (`{name, dim_algebra, dim_matrix, generators}`).
    #[staticmethod]
    fn from_json(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            spec: core_lie::LieGroupSpec::from_json_file(path).map_err(value_err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.spec.name().to_string()
    }

    #[getter]
    fn dim_algebra(&self) -> usize {
        self.spec.dim_algebra()
    }

    #[getter]
    fn dim_matrix(&self) -> usize {
        self.spec.dim_matrix()
    }

    fn identity(&self) -> GroupElement {
        GroupElement {
            inner: core_lie::GroupElement::identity(&self.spec),
        }
    }

    /// Exponential of an algebra vector.
    fn exp(&self, coords: Vec<f64>) -> PyResult<GroupElement> {
        Ok(GroupElement {
            inner: self.vector(coords)?.exp(),
        })
    }

    /// SE(2) element from planar pose coordinates.
    #[allow(clippy::wrong_self_convention)] // python-facing factory name
    fn from_pose(&self, x: f64, y: f64, theta: f64) -> PyResult<GroupElement> {
        if !self.spec.is_se2() {
            return Err(value_err("from_pose requires the SE(2) basis"));
        }
        Ok(GroupElement {
            inner: core_lie::GroupElement::se2_from_pose(&self.spec, x, y, theta),
        })
    }

    /// Matrix representative of an algebra vector (row-major).
    fn hat(&self, coords: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(matrix_rows(&self.vector(coords)?.hat()))
    }

    /// Coordinates of a matrix in the generator basis.
    fn vee(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        let m = self.spec.dim_matrix();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        if flat.len() != m * m {
            return Err(value_err(format!("expected a {m}x{m} matrix")));
        }
        let matrix = nalgebra::DMatrix::from_row_slice(m, m, &flat);
        Ok(self.spec.vee(&matrix).map_err(value_err)?.as_slice().to_vec())
    }

    /// Lie bracket of two algebra vectors.
    fn bracket(&self, a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self
            .vector(a)?
            .bracket(&self.vector(b)?)
            .as_slice()
            .to_vec())
    }

    fn __repr__(&self) -> String {
        format!(
            "LieGroup(name='{}', dim_algebra={}, dim_matrix={})",
            self.spec.name(),
            self.spec.dim_algebra(),
            self.spec.dim_matrix()
        )
    }
}

/// A group element (square matrix constrained to the group's variety).
#[pyclass(frozen)]
struct GroupElement {
    inner: core_lie::GroupElement,
}

#[pymethods]
impl GroupElement {
    /// Logarithm back to algebra coordinates.
    fn log(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.log().map_err(value_err)?.as_slice().to_vec())
    }

    fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            inner: self.inner.compose(&other.inner),
        }
    }

    fn inverse(&self) -> GroupElement {
        GroupElement {
            inner: self.inner.inverse(),
        }
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        matrix_rows(self.inner.matrix())
    }

    /// Planar pose (x, y, heading); SE(2) only.
    fn pose(&self) -> PyResult<(f64, f64, f64)> {
        if !self.inner.spec().is_se2() {
            return Err(value_err("pose chart requires the SE(2) basis"));
        }
        Ok(self.inner.pose())
    }

    /// Matrix of the conjugation action on algebra coordinates (row-major):
    /// `exp(adjoint(g) @ v) == g * exp(v) * g^-1`.
    fn adjoint(&self) -> Vec<Vec<f64>> {
        matrix_rows(self.inner.adjoint_right().matrix())
    }

    /// Apply the conjugation action to algebra coordinates.
    fn adjoint_apply(&self, coords: Vec<f64>) -> PyResult<Vec<f64>> {
        let v = core_lie::AlgebraVector::new(self.inner.spec(), &coords).map_err(value_err)?;
        Ok(self.inner.adjoint_right().apply(&v).as_slice().to_vec())
    }

    /// Largest singular value of the conjugation action.
    fn adjoint_norm(&self) -> f64 {
        self.inner.adjoint_operator_norm()
    }

    fn __repr__(&self) -> String {
        if self.inner.spec().is_se2() {
            let (x, y, theta) = self.inner.pose();
            format!("GroupElement(x={x:.6}, y={y:.6}, theta={theta:.6})")
        } else {
            format!("GroupElement(group='{}')", self.inner.spec().name())
        }
    }
}

/// Orthonormal basis of the displacements commuting with a fixed motion
/// generator.
#[pyclass(frozen)]
struct Subspace {
    inner: core_centralizer::SubspaceBasis,
}

#[pymethods]
impl Subspace {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Basis columns as coordinate lists.
    fn basis(&self) -> Vec<Vec<f64>> {
        (0..self.inner.dim())
            .map(|j| self.inner.column(j).as_slice().to_vec())
            .collect()
    }

    /// True when the subspace is closed under the bracket.
    fn jacobi_closed(&self) -> bool {
        core_centralizer::jacobi_closure_check(&self.inner)
    }

    /// Norm of the component of `coords` outside the subspace.
    fn membership_residual(&self, coords: Vec<f64>) -> PyResult<f64> {
        let v = core_lie::AlgebraVector::new(self.inner.generator().spec(), &coords)
            .map_err(value_err)?;
        Ok(self.inner.membership_residual(&v))
    }

    /// Orthogonal split of `coords` into (ideal, residual).
    fn decompose(&self, coords: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let v = core_lie::AlgebraVector::new(self.inner.generator().spec(), &coords)
            .map_err(value_err)?;
        let split = core_centralizer::decompose(&v, &self.inner);
        Ok((
            split.ideal.as_slice().to_vec(),
            split.residual.as_slice().to_vec(),
        ))
    }

    fn __repr__(&self) -> String {
        format!("Subspace(dim={})", self.inner.dim())
    }
}

/// Kernel basis of the bracket map of `generator_coords`.
#[pyfunction]
#[pyo3(signature = (group, generator_coords, tol = 1e-9))]
fn commuting_subspace(
    group: &LieGroup,
    generator_coords: Vec<f64>,
    tol: f64,
) -> PyResult<Subspace> {
    let f = group.vector(generator_coords)?;
    Ok(Subspace {
        inner: core_centralizer::commuting_subspace(&f, tol),
    })
}

/// Commutation test: returns `(transferable, bracket_norm)`.
#[pyfunction]
#[pyo3(signature = (group, displacement, generator_coords, tol = 1e-9))]
fn is_transferable(
    group: &LieGroup,
    displacement: Vec<f64>,
    generator_coords: Vec<f64>,
    tol: f64,
) -> PyResult<(bool, f64)> {
    let report = core_centralizer::is_transferable(
        &group.vector(displacement)?,
        &group.vector(generator_coords)?,
        tol,
    );
    Ok((report.transferable, report.bracket_norm))
}

/// Unicycle zero-order-hold rollout; returns rows of `(t, x, y, theta)`.
#[pyfunction]
fn simulate_unicycle(
    start: &GroupElement,
    inputs: Vec<(f64, f64)>,
    dt: f64,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    if !start.inner.spec().is_se2() {
        return Err(value_err("unicycle simulation requires the SE(2) basis"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(value_err("dt must be positive"));
    }
    let controls: Vec<core_dynamics::ControlInput> = inputs
        .iter()
        .map(|(v, w)| core_dynamics::ControlInput::new(*v, *w))
        .collect();
    let trajectory = core_dynamics::simulate(&start.inner, &controls, dt);
    Ok((0..trajectory.len())
        .map(|k| {
            let (x, y, theta) = trajectory.state(k).pose();
            (trajectory.time(k), x, y, theta)
        })
        .collect())
}

/// Mixed world/body sensor tuple `[x, y, f, l]` of an SE(2) element.
#[pyfunction]
fn observe_se2_mixed(state: &GroupElement) -> PyResult<Vec<f64>> {
    if !state.inner.spec().is_se2() {
        return Err(value_err("the mixed suite requires the SE(2) basis"));
    }
    Ok(core_observer::observe_se2_mixed(&state.inner)
        .as_slice()
        .to_vec())
}

/// Attacker-side tuple manipulation for a displacement `xi`.
#[pyfunction]
fn spoof_measurement(
    group: &LieGroup,
    measurement: Vec<f64>,
    displacement: Vec<f64>,
    heading_estimate: f64,
) -> PyResult<Vec<f64>> {
    let z = nalgebra::DVector::from_row_slice(&measurement);
    let xi = group.vector(displacement)?;
    let out = core_attack::spoof_measurement(
        &z,
        &xi,
        heading_estimate,
        &core_observer::SensorSuite::Se2Mixed,
    )
    .map_err(runtime_err)?;
    Ok(out.as_slice().to_vec())
}

/// Conjugated effect of a displacement under a flow element.
#[pyfunction]
fn dynamical_impact(
    group: &LieGroup,
    displacement: Vec<f64>,
    flow: &GroupElement,
) -> PyResult<GroupElement> {
    Ok(GroupElement {
        inner: core_attack::dynamical_impact(&group.vector(displacement)?, &flow.inner),
    })
}

/// Adjoint-warped residual and its worst-case bound:
/// `(deviation, ||residual|| * adjoint_norm)`.
#[pyfunction]
fn impact_bound(
    group: &LieGroup,
    residual: Vec<f64>,
    flow: &GroupElement,
) -> PyResult<(Vec<f64>, f64)> {
    let (deviation, bound) = core_attack::impact_bound(&group.vector(residual)?, &flow.inner);
    Ok((deviation.as_slice().to_vec(), bound))
}

/// Run a full transfer scenario from a JSON config; writes the CSV/JSON
/// artifacts to `out_dir` and returns the verdict as a dict.
#[pyfunction]
fn run_transfer_scenario(
    py: Python<'_>,
    config_path: PathBuf,
    out_dir: PathBuf,
) -> PyResult<Bound<'_, PyDict>> {
    let cfg = core_scenario::ScenarioConfig::from_path(&config_path).map_err(value_err)?;
    let out = core_scenario::run_transfer_scenario(&cfg, &out_dir).map_err(runtime_err)?;
    let dict = PyDict::new(py);
    dict.set_item("stealthy", out.verdict.stealthy)?;
    dict.set_item("max_innovation", out.verdict.max_innovation)?;
    dict.set_item("max_bound", out.verdict.max_bound)?;
    dict.set_item("learned_epsilon", out.learned_epsilon)?;
    dict.set_item("dataset_rich", out.richness.rich)?;
    dict.set_item("impact_csv", out.impact_csv)?;
    dict.set_item("training_csv", out.training_csv)?;
    dict.set_item("verdict_json", out.verdict_json)?;
    Ok(dict)
}

/// Recompute the built-in reference quantities; returns one dict per row.
#[pyfunction]
fn reproduce_paper(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    let report = core_scenario::reproduce_paper();
    report
        .rows
        .iter()
        .map(|r| {
            let dict = PyDict::new(py);
            dict.set_item("label", &r.label)?;
            dict.set_item("expected", r.expected.clone())?;
            dict.set_item("computed", r.computed.clone())?;
            dict.set_item("abs_diff", r.abs_diff)?;
            dict.set_item("tolerance", r.tolerance)?;
            dict.set_item("pass", r.pass)?;
            Ok(dict)
        })
        .collect()
}

#[pymodule]
fn spoofsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<LieGroup>()?;
    m.add_class::<GroupElement>()?;
    m.add_class::<Subspace>()?;
    m.add_function(wrap_pyfunction!(commuting_subspace, m)?)?;
    m.add_function(wrap_pyfunction!(is_transferable, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_unicycle, m)?)?;
    m.add_function(wrap_pyfunction!(observe_se2_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(spoof_measurement, m)?)?;
    m.add_function(wrap_pyfunction!(dynamical_impact, m)?)?;
    m.add_function(wrap_pyfunction!(impact_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run_transfer_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_paper, m)?)?;
    Ok(())
}
