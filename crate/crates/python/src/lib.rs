use adapt_rdm::adapt::{measurement_cost, run_adapt as run_adapt_rs, AdaptConfig, AnsatzTrace, Variant};
use adapt_rdm::fixtures::{available_geometries, load_fixture};
use adapt_rdm::integrals::{to_spin_hamiltonian, MolecularIntegrals, SpinHamiltonian};
use adapt_rdm::operators::{build_pool, OperatorPool, PoolKind};
use adapt_rdm::spectra::{fci_solve_spin, homo_lumo_references, npe as npe_rs, run_vqd, Reference, Sector, VqdConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Second-quantized Hamiltonian on interleaved spin orbitals.
#[pyclass(frozen)]
struct Hamiltonian {
    inner: SpinHamiltonian,
}

#[pymethods]
impl Hamiltonian {
    #[staticmethod]
    fn from_fcidump(path: &str) -> PyResult<Self> {
        let mi = MolecularIntegrals::from_file(path).map_err(value_err)?;
        Ok(Self { inner: to_spin_hamiltonian(&mi).map_err(value_err)? })
    }

    /// Bundled fixture, e.g. `("h6", 1.5)`.
    #[staticmethod]
    fn from_fixture(system: &str, r: f64) -> PyResult<Self> {
        let mi = load_fixture(system, r).map_err(value_err)?;
        Ok(Self { inner: to_spin_hamiltonian(&mi).map_err(value_err)? })
    }

    #[getter]
    fn n_spin_orbitals(&self) -> usize {
        self.inner.n_spin_orbitals
    }

    #[getter]
    fn n_electrons(&self) -> usize {
        self.inner.n_electrons
    }

    #[getter]
    fn e_core(&self) -> f64 {
        self.inner.e_core
    }

    #[getter]
    fn hf_energy(&self) -> f64 {
        self.inner.determinant_energy(&self.inner.hf_occupation())
    }

    /// Lowest `k` eigenvalues in the neutral S_z = 0 sector with spin `s`.
    #[pyo3(signature = (k=1, s=0.0))]
    fn fci_energies(&self, k: usize, s: f64) -> PyResult<Vec<f64>> {
        let sector = Sector::of_hamiltonian(&self.inner);
        Ok(fci_solve_spin(&self.inner, sector, k, s).map_err(value_err)?.energies)
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(n_spin_orbitals={}, n_electrons={})", self.inner.n_spin_orbitals, self.inner.n_electrons)
    }
}

/// Outcome of one ADAPT run.
#[pyclass(frozen, get_all)]
struct AdaptResult {
    variant: String,
    energy: f64,
    variance: f64,
    n_parameters: usize,
    n_iterations: usize,
    convergence: String,
    converged: bool,
    /// Energy after each growth iteration.
    energies: Vec<f64>,
    operators: Vec<String>,
    parameters: Vec<f64>,
    residual_terms: usize,
    trace: String,
}

#[pymethods]
impl AdaptResult {
    fn __repr__(&self) -> String {
        format!(
            "AdaptResult(variant={}, energy={:.10}, n_parameters={}, n_iterations={}, convergence={})",
            self.variant, self.energy, self.n_parameters, self.n_iterations, self.convergence
        )
    }
}

fn result(cfg: &AdaptConfig, ham: &SpinHamiltonian, pool: &OperatorPool, t: AnsatzTrace) -> AdaptResult {
    let cost = measurement_cost(cfg, ham.n_spin_orbitals, pool.len(), Some(&t));
    AdaptResult {
        variant: t.variant.to_string(),
        energy: t.energy,
        variance: t.variance,
        n_parameters: t.n_parameters(),
        n_iterations: t.n_iterations(),
        convergence: t.convergence.to_string(),
        converged: t.convergence.converged(),
        energies: t.records.iter().map(|r| r.energy).collect(),
        operators: t.operators.iter().map(|&u| pool.elements[u].label.to_string()).collect(),
        parameters: t.parameters.clone(),
        residual_terms: cost.residual_terms,
        trace: t.render(),
    }
}

fn config(variant: &str, n_update: usize, n_aux: Option<usize>, epsilon: f64, pool: &str, max_iterations: usize) -> PyResult<AdaptConfig> {
    let cfg = AdaptConfig {
        variant: variant.parse::<Variant>().map_err(value_err)?,
        n_update,
        n_aux,
        epsilon,
        max_iterations,
        pool_kind: pool.parse::<PoolKind>().map_err(value_err)?,
        ..Default::default()
    };
    cfg.validate().map_err(value_err)?;
    Ok(cfg)
}

/// Ground-state ADAPT run. `variant` is one of adapt, adapt_rdm, adapt_v, adapt_vx.
#[pyfunction]
#[pyo3(signature = (ham, variant="adapt", n_update=1, n_aux=None, epsilon=1e-4, pool="spin-adapted", max_iterations=300))]
fn run_adapt(
    py: Python<'_>,
    ham: &Hamiltonian,
    variant: &str,
    n_update: usize,
    n_aux: Option<usize>,
    epsilon: f64,
    pool: &str,
    max_iterations: usize,
) -> PyResult<AdaptResult> {
    let cfg = config(variant, n_update, n_aux, epsilon, pool, max_iterations)?;
    let ham = &ham.inner;
    let pool = build_pool(ham.n_spin_orbitals / 2, cfg.pool_kind);
    let trace = py.detach(|| run_adapt_rs(&cfg, ham, &pool)).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(result(&cfg, ham, &pool, trace))
}

/// First excited singlet by VQD, deflating the exact ground state.
/// `references` are strings such as `"2->3"`; default HOMO->LUMO and HOMO->LUMO+1.
#[pyfunction]
#[pyo3(signature = (ham, variant="adapt", n_update=1, n_aux=None, epsilon=1e-4, references=None))]
fn first_excited(
    py: Python<'_>,
    ham: &Hamiltonian,
    variant: &str,
    n_update: usize,
    n_aux: Option<usize>,
    epsilon: f64,
    references: Option<Vec<String>>,
) -> PyResult<AdaptResult> {
    let cfg = config(variant, n_update, n_aux, 1e-4, "spin-adapted", 300)?;
    let ham = &ham.inner;
    let refs = match references {
        Some(v) => v.iter().map(|s| s.parse::<Reference>()).collect::<Result<Vec<_>, _>>().map_err(value_err)?,
        None => homo_lumo_references(ham, 1),
    };
    let pool = build_pool(ham.n_spin_orbitals / 2, cfg.pool_kind);
    let res = py
        .detach(|| {
            let fci = fci_solve_spin(ham, Sector::of_hamiltonian(ham), 1, 0.0)?;
            let mut vcfg = VqdConfig::new(fci.states, refs);
            vcfg.epsilon = epsilon;
            run_vqd(&vcfg, &cfg, ham, &pool)
        })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(result(&cfg, ham, &pool, res.best))
}

/// Non-parallelity error of an error curve (max minus min).
#[pyfunction]
fn npe(errors: Vec<f64>) -> PyResult<f64> {
    npe_rs(&errors).map_err(value_err)
}

/// Bond lengths with a bundled fixture for `system`.
#[pyfunction]
fn geometries(system: &str) -> Vec<f64> {
    available_geometries(system)
}

#[pymodule]
fn adapt_rdm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Hamiltonian>()?;
    m.add_class::<AdaptResult>()?;
    m.add_function(wrap_pyfunction!(run_adapt, m)?)?;
    m.add_function(wrap_pyfunction!(first_excited, m)?)?;
    m.add_function(wrap_pyfunction!(npe, m)?)?;
    m.add_function(wrap_pyfunction!(geometries, m)?)?;
    m.add("HARTREE_TO_KCAL", adapt_rdm::spectra::HARTREE_TO_KCAL)?;
    Ok(())
}
