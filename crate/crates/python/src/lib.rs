// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings. Series come back as dicts of plain lists; complex
//! values map to Python `complex`, matrices to nested lists.

use std::path::PathBuf;

use memorymodes::amplitude::{self, AmplitudeState1, AmplitudeState2, AmplitudeTrajectory};
use memorymodes::config::validate_config;
use memorymodes::density::{self, Basis, DensityMatrix, DensitySeries};
use memorymodes::info;
use memorymodes::linalg::CMatrix;
use memorymodes::model::{self, TimeGrid, Validation};
use memorymodes::rates::{self, MemoryIdentityReport};
use memorymodes::runner::{self, Experiment, RunConfig};
use memorymodes::trajectory::{self, PseudomodeModel};
use memorymodes::Error;
use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        2 | 3 | 6 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn validation(allow_nonphysical: bool) -> Validation {
    if allow_nonphysical {
        Validation::AllowNonphysical
    } else {
        Validation::Strict
    }
}

/// Single Lorentzian reservoir with one pseudomode.
#[pyclass(name = "LorentzianModel", module = "memorymodes", frozen)]
struct PyLorentzian(model::LorentzianModel);

#[pymethods]
impl PyLorentzian {
    #[new]
    fn new(omega0: f64, omega_c: f64, gamma: f64, coupling: f64) -> PyResult<Self> {
        model::LorentzianModel::new(omega0, omega_c, gamma, coupling).map(Self).map_err(to_py)
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0
    }
    #[getter]
    fn omega_c(&self) -> f64 {
        self.0.omega_c
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }
    #[getter]
    fn coupling(&self) -> f64 {
        self.0.coupling
    }

    /// Long-time decay rate of the atom.
    fn markovian_rate(&self) -> f64 {
        self.0.markovian_rate()
    }

    fn __repr__(&self) -> String {
        let m = &self.0;
        format!("LorentzianModel(omega0={}, omega_c={}, gamma={}, coupling={})", m.omega0, m.omega_c, m.gamma, m.coupling)
    }
}

/// Two-Lorentzian band-gap reservoir mapped onto two coupled pseudomodes.
#[pyclass(name = "BandGapModel", module = "memorymodes", frozen)]
struct PyBandGap(model::BandGapModel);

#[pymethods]
impl PyBandGap {
    #[new]
    #[pyo3(signature = (omega0, omega_c, w1, w2, gamma1, gamma2, coupling, allow_nonphysical = false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        omega0: f64,
        omega_c: f64,
        w1: f64,
        w2: f64,
        gamma1: f64,
        gamma2: f64,
        coupling: f64,
        allow_nonphysical: bool,
    ) -> PyResult<Self> {
        model::BandGapModel::new(omega0, omega_c, w1, w2, gamma1, gamma2, coupling, validation(allow_nonphysical))
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0
    }
    #[getter]
    fn coupling(&self) -> f64 {
        self.0.coupling
    }

    fn is_perfect_gap(&self) -> bool {
        self.0.is_perfect_gap()
    }

    /// `gamma_p1`, `gamma_p2` and `v` of the pseudomode network.
    fn constants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = model::TwoPseudomodeConstants::derive_unchecked(&self.0);
        let d = PyDict::new(py);
        d.set_item("gamma_p1", c.gamma_p1)?;
        d.set_item("gamma_p2", c.gamma_p2)?;
        d.set_item("v", c.v)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let m = &self.0;
        format!(
            "BandGapModel(omega0={}, omega_c={}, w1={}, w2={}, gamma1={}, gamma2={}, coupling={})",
            m.omega0, m.omega_c, m.w1, m.w2, m.gamma1, m.gamma2, m.coupling
        )
    }
}

/// Uniform grid of `n_steps + 1` points.
#[pyclass(name = "TimeGrid", module = "memorymodes", frozen)]
struct PyGrid(TimeGrid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(t_start: f64, t_end: f64, n_steps: usize) -> PyResult<Self> {
        TimeGrid::new(t_start, t_end, n_steps).map(Self).map_err(to_py)
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.0.dt()
    }

    fn times(&self) -> Vec<f64> {
        self.0.times()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[derive(FromPyObject)]
enum AnyModel<'py> {
    Single(PyRef<'py, PyLorentzian>),
    Double(PyRef<'py, PyBandGap>),
}

impl AnyModel<'_> {
    fn pseudomode(&self) -> PseudomodeModel {
        match self {
            AnyModel::Single(m) => PseudomodeModel::Single(m.0),
            AnyModel::Double(m) => PseudomodeModel::Double(m.0),
        }
    }

    fn excited_trajectory(&self, grid: &TimeGrid) -> Result<AmplitudeTrajectory, Error> {
        match self {
            AnyModel::Single(m) => amplitude::propagate_single(&m.0, AmplitudeState1::excited(), grid),
            AnyModel::Double(m) => amplitude::propagate_double(&m.0, AmplitudeState2::excited(), grid),
        }
    }
}

fn matrix_rows(m: &DensityMatrix) -> Vec<Vec<C64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
}

fn parse_matrix(rows: Vec<Vec<C64>>) -> PyResult<DensityMatrix> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("density matrix must be square"));
    }
    let basis = Basis::from_dim(d).map_err(to_py)?;
    DensityMatrix::new(basis, CMatrix::from_fn(d, d, |i, j| rows[i][j])).map_err(to_py)
}

fn series_dict<'py>(py: Python<'py>, series: &DensitySeries, lab: bool) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", series.grid.times())?;
    let states: Vec<Vec<Vec<C64>>> = (0..series.len())
        .map(|k| if lab { matrix_rows(&series.lab_state(k)) } else { matrix_rows(&series.states[k]) })
        .collect();
    d.set_item("states", states)?;
    d.set_item("labels", series.states[0].basis().labels().to_vec())?;
    d.set_item("min_eigenvalue", series.invariants.min_eigenvalue)?;
    d.set_item("trace_error", series.invariants.trace_error)?;
    Ok(d)
}

fn identity_dict<'py>(py: Python<'py>, r: &MemoryIdentityReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", r.grid.times())?;
    d.set_item("lhs", r.lhs.clone())?;
    d.set_item("rhs", r.rhs.clone())?;
    d.set_item("residual", r.residual.clone())?;
    d.set_item("valid", r.valid.clone())?;
    d.set_item("max_relative_residual", r.max_relative_residual)?;
    Ok(d)
}

/// Amplitudes from a given initial state: `(c1, b1)` for a Lorentzian
/// model, `(c1, a1, a2)` for a band-gap model. Defaults to the excited atom.
#[pyfunction]
#[pyo3(signature = (model, grid, initial = None, lab_frame = false))]
fn propagate<'py>(
    py: Python<'py>,
    model: AnyModel<'py>,
    grid: PyRef<'py, PyGrid>,
    initial: Option<Vec<C64>>,
    lab_frame: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let traj = match (&model, initial.as_deref()) {
        (_, None) => model.excited_trajectory(&grid.0),
        (AnyModel::Single(m), Some(&[c1, b1])) => amplitude::propagate_single(&m.0, AmplitudeState1 { c1, b1 }, &grid.0),
        (AnyModel::Double(m), Some(&[c1, a1, a2])) => {
            amplitude::propagate_double(&m.0, AmplitudeState2 { c1, a1, a2 }, &grid.0)
        }
        _ => return Err(PyValueError::new_err("initial state has the wrong number of amplitudes")),
    }
    .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t", grid.0.times())?;
    let states: Vec<Vec<C64>> = (0..traj.len())
        .map(|k| if lab_frame { traj.lab_state(k) } else { traj.states[k].clone() }.iter().copied().collect())
        .collect();
    d.set_item("states", states)?;
    Ok(d)
}

/// Time-local shift `S` and decay rate `gamma` for the excited atom.
#[pyfunction]
fn decay_rates<'py>(py: Python<'py>, model: AnyModel<'py>, grid: PyRef<'py, PyGrid>) -> PyResult<Bound<'py, PyDict>> {
    let traj = model.excited_trajectory(&grid.0).map_err(to_py)?;
    let r = rates::rates_from_amplitudes(&traj).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t", grid.0.times())?;
    d.set_item("S", r.s)?;
    d.set_item("gamma", r.gamma)?;
    d.set_item("valid", r.valid)?;
    Ok(d)
}

/// Compensated pseudomode rate against `gamma|c1|^2`.
#[pyfunction]
fn memory_identity<'py>(py: Python<'py>, model: AnyModel<'py>, grid: PyRef<'py, PyGrid>) -> PyResult<Bound<'py, PyDict>> {
    let traj = model.excited_trajectory(&grid.0).map_err(to_py)?;
    let r = rates::rates_from_amplitudes(&traj).map_err(to_py)?;
    let rep = match &model {
        AnyModel::Single(m) => rates::memory_identity_single(&traj, m.0.gamma, &r),
        AnyModel::Double(m) => model::derive_two_pseudomode_constants(&m.0)
            .and_then(|c| rates::memory_identity_double(&traj, &c, &r)),
    }
    .map_err(to_py)?;
    identity_dict(py, &rep)
}

/// Storage-mode balance of the band-gap network.
#[pyfunction]
fn intermode_identity<'py>(
    py: Python<'py>,
    model: PyRef<'py, PyBandGap>,
    grid: PyRef<'py, PyGrid>,
) -> PyResult<Bound<'py, PyDict>> {
    let traj = amplitude::propagate_double(&model.0, AmplitudeState2::excited(), &grid.0).map_err(to_py)?;
    let c = model::derive_two_pseudomode_constants(&model.0).map_err(to_py)?;
    identity_dict(py, &rates::intermode_memory_identity(&traj, &c).map_err(to_py)?)
}

/// Pseudomode Lindblad evolution on the one-excitation space.
#[pyfunction]
#[pyo3(signature = (model, grid, rho0, lab_frame = false))]
fn evolve_lindblad<'py>(
    py: Python<'py>,
    model: AnyModel<'py>,
    grid: PyRef<'py, PyGrid>,
    rho0: Vec<Vec<C64>>,
    lab_frame: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let rho0 = parse_matrix(rho0)?;
    let series = match &model {
        AnyModel::Single(m) => density::evolve_lindblad_single(&m.0, &rho0, &grid.0),
        AnyModel::Double(m) => density::evolve_lindblad_double(&m.0, &rho0, &grid.0),
    }
    .map_err(to_py)?;
    series_dict(py, &series, lab_frame)
}

/// Atom-only time-local master equation driven by the exact rates.
#[pyfunction]
#[pyo3(signature = (model, grid, rho0, lab_frame = false))]
fn evolve_timelocal<'py>(
    py: Python<'py>,
    model: AnyModel<'py>,
    grid: PyRef<'py, PyGrid>,
    rho0: Vec<Vec<C64>>,
    lab_frame: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let rho0 = parse_matrix(rho0)?;
    let traj = model.excited_trajectory(&grid.0).map_err(to_py)?;
    let r = rates::rates_from_amplitudes(&traj).map_err(to_py)?;
    series_dict(py, &density::evolve_atom_timelocal(&r, &rho0, &grid.0).map_err(to_py)?, lab_frame)
}

/// Quantum jumps on the atom with reverse jumps where the rate is negative.
#[pyfunction]
#[pyo3(signature = (model, grid, n, seed = 0, initial = None))]
fn run_nmqj<'py>(
    py: Python<'py>,
    model: AnyModel<'py>,
    grid: PyRef<'py, PyGrid>,
    n: u64,
    seed: u64,
    initial: Option<[C64; 2]>,
) -> PyResult<Bound<'py, PyDict>> {
    let traj = model.excited_trajectory(&grid.0).map_err(to_py)?;
    let r = rates::rates_from_amplitudes(&traj).map_err(to_py)?;
    let init = initial.unwrap_or([C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let g = grid.0;
    let ens = py.detach(|| trajectory::run_nmqj(&r, init, n, seed, &g)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("t", grid.0.times())?;
    d.set_item("n0", ens.records.iter().map(|r| r.n0).collect::<Vec<_>>())?;
    d.set_item("n1", ens.records.iter().map(|r| r.n1).collect::<Vec<_>>())?;
    d.set_item("psi0", ens.records.iter().map(|r| r.psi0.to_vec()).collect::<Vec<_>>())?;
    d.set_item("forward", ens.records.iter().map(|r| r.forward).collect::<Vec<_>>())?;
    d.set_item("reverse", ens.records.iter().map(|r| r.reverse).collect::<Vec<_>>())?;
    d.set_item("ground_population", (0..ens.records.len()).map(|k| ens.ground_population(k)).collect::<Vec<_>>())?;
    Ok(d)
}

/// Markovian jumps on the atom plus pseudomode space.
#[pyfunction]
#[pyo3(signature = (model, grid, n, seed = 0, initial = None))]
fn run_mcwf<'py>(
    py: Python<'py>,
    model: AnyModel<'py>,
    grid: PyRef<'py, PyGrid>,
    n: u64,
    seed: u64,
    initial: Option<Vec<C64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let pm = model.pseudomode();
    let dim = pm.basis().dim();
    let init = initial.unwrap_or_else(|| {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[dim - 1] = C64::new(1.0, 0.0);
        v
    });
    let g = grid.0;
    let ens = py.detach(|| trajectory::run_mcwf_pseudomode(&pm, &init, n, seed, &g)).map_err(to_py)?;
    let traced = trajectory::traced_ensemble_atom_state(&ens);
    let d = PyDict::new(py);
    d.set_item("t", grid.0.times())?;
    d.set_item("labels", ens.basis.labels().to_vec())?;
    d.set_item("n0", ens.records.iter().map(|r| r.n0).collect::<Vec<_>>())?;
    d.set_item("n1", ens.records.iter().map(|r| r.n1).collect::<Vec<_>>())?;
    d.set_item("psi0", ens.records.iter().map(|r| r.psi0.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())?;
    d.set_item("jumps", ens.records.iter().map(|r| r.jumps.clone()).collect::<Vec<_>>())?;
    d.set_item("ground_population", (0..ens.records.len()).map(|k| ens.ground_population(k)).collect::<Vec<_>>())?;
    d.set_item("atom_states", traced.iter().map(matrix_rows).collect::<Vec<_>>())?;
    Ok(d)
}

#[pyfunction]
fn von_neumann_entropy(rho: Vec<Vec<C64>>) -> PyResult<f64> {
    Ok(info::von_neumann_entropy(&parse_matrix(rho)?))
}

/// Atom versus pseudomodes, for a 3- or 4-dimensional joint state.
#[pyfunction]
fn mutual_information(rho: Vec<Vec<C64>>) -> PyResult<f64> {
    info::mutual_information(&parse_matrix(rho)?).map_err(to_py)
}

/// Runs a CLI experiment and returns its manifest entries.
#[pyfunction]
#[pyo3(signature = (experiment, config, out, seed = None, n = None, allow_nonphysical = false))]
fn run_experiment(
    py: Python<'_>,
    experiment: &str,
    config: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
    n: Option<u64>,
    allow_nonphysical: bool,
) -> PyResult<Vec<(String, String)>> {
    let exp: Experiment = experiment.parse().map_err(to_py)?;
    let v = validation(allow_nonphysical);
    let model = validate_config(&config, v).map_err(to_py)?;
    let cfg = RunConfig::new(exp, model, v, out, seed, n).map_err(to_py)?;
    let manifest = py.detach(|| runner::run(&cfg)).map_err(to_py)?;
    Ok(manifest.entries)
}

#[pymodule(name = "memorymodes")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyLorentzian>()?;
    m.add_class::<PyBandGap>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(decay_rates, m)?)?;
    m.add_function(wrap_pyfunction!(memory_identity, m)?)?;
    m.add_function(wrap_pyfunction!(intermode_identity, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_lindblad, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_timelocal, m)?)?;
    m.add_function(wrap_pyfunction!(run_nmqj, m)?)?;
    m.add_function(wrap_pyfunction!(run_mcwf, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
