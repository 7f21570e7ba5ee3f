//! Python bindings: `import multipole`.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use multipole_core::angular::{self, HalfInteger};
use multipole_core::bipartite::{self, Partition};
use multipole_core::scan::{self, KappaSelection, ScanConfig};
use multipole_core::states::{self, NoisyFamily};
use multipole_core::tensors::{self, CMatrix};
use multipole_core::witness;
use multipole_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for multipole_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("density matrix must be square"));
    }
    Ok(CMatrix::from_fn(d, d, |r, c| rows[r][c]))
}

fn half(twice: i64) -> HalfInteger {
    HalfInteger::from_twice(twice)
}

/// Symmetric `N`-qubit density matrix in the Dicke basis.
#[pyclass(name = "SymmetricState", module = "multipole", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: states::SymmetricState,
}

#[pymethods]
impl PyState {
    /// Validates Hermiticity, unit trace and positivity.
    #[new]
    fn new(n: usize, rho: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let inner = states::SymmetricState::new(n, from_rows(rho)?).py()?;
        Ok(PyState { inner })
    }

    #[staticmethod]
    fn maximally_mixed(n: usize) -> PyResult<Self> {
        Ok(PyState {
            inner: states::SymmetricState::maximally_mixed(n).py()?,
        })
    }

    /// `|N/2, M⟩` with `M = twice_m / 2`.
    #[staticmethod]
    fn dicke(n: usize, twice_m: i64) -> PyResult<Self> {
        Ok(PyState {
            inner: states::dicke_state(n, half(twice_m)).py()?,
        })
    }

    #[staticmethod]
    fn coherent(n: usize, theta: f64, phi: f64) -> PyResult<Self> {
        Ok(PyState {
            inner: states::coherent_state(n, theta, phi).py()?,
        })
    }

    #[staticmethod]
    fn noisy_family(family: u8, x: f64, n: usize) -> PyResult<Self> {
        let fam = NoisyFamily::from_index(family).py()?;
        Ok(PyState {
            inner: states::noisy_family_state(fam, x, n).py()?,
        })
    }

    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        Ok(PyState {
            inner: states::random_state(n, seed).py()?,
        })
    }

    #[staticmethod]
    fn read_json(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PyState {
            inner: states::SymmetricState::read_json(&path).py()?,
        })
    }

    fn write_json(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.inner.write_json(&path).py()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows(self.inner.matrix())
    }

    /// `{(K, Q): t^K_Q}`.
    fn moments(&self) -> Vec<((usize, i64), Complex64)> {
        states::moments_of(&self.inner)
            .iter()
            .map(|(k, q, z)| ((k, q), z))
            .collect()
    }

    fn reduced(&self, k: usize) -> PyResult<Self> {
        Ok(PyState {
            inner: bipartite::reduced_state(&self.inner, k).py()?,
        })
    }

    fn cross_correlation(&self, kappa: usize, n1: usize, n2: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let part = Partition::new(n1, n2).py()?;
        Ok(rows(
            witness::cross_correlation(&self.inner, kappa, part).py()?.matrix(),
        ))
    }

    /// `(min_eigenvalue, spectral_norm, entangled)` of the equal-split block.
    fn witness(&self, kappa: usize) -> PyResult<(f64, f64, bool)> {
        let v = witness::witness_verdict(&self.inner, kappa).py()?;
        Ok((v.min_eigenvalue, v.spectral_norm, v.entangled))
    }

    fn ppt_negativity(&self, n1: usize, n2: usize) -> PyResult<f64> {
        witness::ppt_negativity(&self.inner, Partition::new(n1, n2).py()?).py()
    }

    fn spin_squeezing_matrix(&self) -> PyResult<Vec<Vec<f64>>> {
        let m = witness::spin_squeezing_matrix(&self.inner).py()?;
        Ok((0..3).map(|r| (0..3).map(|c| m[(r, c)]).collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!("SymmetricState(n={})", self.inner.n_qubits())
    }
}

/// `C(j1 j2 j; m1 m2 m)` with every argument given as twice its value.
#[pyfunction]
fn clebsch_gordan(tj1: i64, tj2: i64, tj: i64, tm1: i64, tm2: i64, tm: i64) -> PyResult<f64> {
    angular::clebsch_gordan_f64(half(tj1), half(tj2), half(tj), half(tm1), half(tm2), half(tm)).py()
}

/// Six-j symbol with every argument given as twice its value.
#[pyfunction]
fn wigner6j(t: [i64; 6]) -> f64 {
    angular::wigner6j(half(t[0]), half(t[1]), half(t[2]), half(t[3]), half(t[4]), half(t[5])).to_f64()
}

#[pyfunction]
fn tensor_operator(n: usize, rank: usize, component: i64) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(rows(tensors::tensor_operator(n, rank, component).py()?.matrix()))
}

/// `(x_min or None, min_eig_at_x1)` for one scan cell.
#[pyfunction]
#[pyo3(signature = (family, n, kappa, grid_step = scan::DEFAULT_GRID_STEP, tol = scan::DEFAULT_BISECTION_TOL))]
fn threshold_scan(family: u8, n: usize, kappa: usize, grid_step: f64, tol: f64) -> PyResult<(Option<f64>, f64)> {
    let cfg = ScanConfig {
        grid_step,
        bisection_tol: tol,
        ..ScanConfig::default()
    };
    let fam = NoisyFamily::from_index(family).py()?;
    let r = scan::threshold_scan(fam, n, kappa, &cfg).py()?;
    Ok((r.x_min, r.min_eig_at_x1))
}

/// CSV report of the threshold scan; `kappa` is `"highest"` or a list like `"1..5"`.
#[pyfunction]
#[pyo3(signature = (families, n, kappa = "highest"))]
fn scan_report(families: Vec<u8>, n: Vec<usize>, kappa: &str) -> PyResult<String> {
    let cfg = ScanConfig {
        families: families
            .into_iter()
            .map(NoisyFamily::from_index)
            .collect::<Result<_, _>>()
            .py()?,
        n_values: n,
        kappas: kappa.parse::<KappaSelection>().py()?,
        ..ScanConfig::default()
    };
    let records = scan::threshold_report(&cfg).py()?;
    scan::render_report(&records, cfg.format).py()
}

#[pymodule]
fn multipole(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(clebsch_gordan, m)?)?;
    m.add_function(wrap_pyfunction!(wigner6j, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_operator, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_scan, m)?)?;
    m.add_function(wrap_pyfunction!(scan_report, m)?)?;
    m.add("WITNESS_EPS", witness::WITNESS_EPS)?;
    Ok(())
}
