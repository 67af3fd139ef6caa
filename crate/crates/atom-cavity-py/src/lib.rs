//! Python module `atomcavity`: thin bindings over the response library.
//!
//! Conventions match the Rust API: SI units for the geometric types, and
//! dimensionless detunings (in units of gamma) plus explicit gamma/kappa
//! for the narrow-line response functions.

use nalgebra::Vector3;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use atom_cavity::sampler;
use atom_cavity::spectra;
use atom_cavity::{
    AbstractScenario, CavityEnsembleLayout, ComplexCoupling, DetuningGrid, DetuningPair,
    EnsembleLayout, LayoutSpec, NamedEstimator, Preset, ScanMode, ScanScenario, Scenario,
    SpectrumColumn,
};

fn py_err(e: atom_cavity::Error) -> PyErr {
    match &e {
        atom_cavity::Error::Invariant(_) | atom_cavity::Error::Sample { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn detuning(delta_a: f64, delta_c: f64) -> PyResult<DetuningPair> {
    DetuningPair::new(delta_a, delta_c).map_err(py_err)
}

fn vectors(points: Vec<(f64, f64, f64)>) -> Vec<Vector3<f64>> {
    points
        .into_iter()
        .map(|(x, y, z)| Vector3::new(x, y, z))
        .collect()
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None().into_bound(py),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        serde_json::Value::Number(n) => match n.as_f64() {
            Some(f) => f.into_pyobject(py)?.into_any(),
            None => n.to_string().into_pyobject(py)?.into_any(),
        },
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// A two-level transition fixed by wavelength and linewidth.
#[pyclass(frozen)]
struct AtomTransition {
    inner: atom_cavity::AtomTransition,
}

#[pymethods]
impl AtomTransition {
    #[new]
    fn new(wavelength: f64, gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: atom_cavity::AtomTransition::from_wavelength(wavelength, gamma)
                .map_err(py_err)?,
        })
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.inner.wavelength()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn omega_a(&self) -> f64 {
        self.inner.omega_a()
    }

    #[getter]
    fn k0(&self) -> f64 {
        self.inner.k0()
    }

    /// Complex polarizability at the drive frequency, SI units.
    fn polarizability(&self, omega: f64) -> PyResult<Complex64> {
        self.inner.polarizability(omega).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "AtomTransition(wavelength={:.6e}, gamma={:.6e})",
            self.inner.wavelength(),
            self.inner.gamma()
        )
    }
}

/// TEM00 beam geometry: wavelength and waist.
#[pyclass(frozen)]
struct GaussianMode {
    inner: atom_cavity::GaussianMode,
}

#[pymethods]
impl GaussianMode {
    #[new]
    fn new(wavelength: f64, waist: f64) -> PyResult<Self> {
        Ok(Self {
            inner: atom_cavity::GaussianMode::from_wavelength(wavelength, waist)
                .map_err(py_err)?,
        })
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.inner.wavelength()
    }

    #[getter]
    fn waist(&self) -> f64 {
        self.inner.waist()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k()
    }

    #[getter]
    fn rayleigh_range(&self) -> f64 {
        self.inner.rayleigh_range()
    }

    /// Free-space cooperativity 6/(k w)^2 at the mode wavenumber.
    #[getter]
    fn eta_fs(&self) -> f64 {
        self.inner.eta_fs()
    }

    fn __repr__(&self) -> String {
        format!(
            "GaussianMode(wavelength={:.6e}, waist={:.6e})",
            self.inner.wavelength(),
            self.inner.waist()
        )
    }
}

/// Symmetric two-mirror resonator: field transmission squared per mirror
/// and mirror spacing.
#[pyclass(frozen)]
struct CavitySpec {
    inner: atom_cavity::CavitySpec,
}

#[pymethods]
impl CavitySpec {
    #[new]
    fn new(q_sq: f64, length: f64) -> PyResult<Self> {
        Ok(Self {
            inner: atom_cavity::CavitySpec::new(q_sq, length).map_err(py_err)?,
        })
    }

    #[getter]
    fn q_sq(&self) -> f64 {
        self.inner.q_sq()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    #[getter]
    fn finesse(&self) -> f64 {
        self.inner.finesse()
    }

    /// Cavity cooperativity for a mode: finesse-enhanced eta_fs.
    fn eta_c(&self, mode: PyRef<'_, GaussianMode>) -> f64 {
        self.inner.eta_c(&mode.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "CavitySpec(q_sq={:.6e}, length={:.6e})",
            self.inner.q_sq(),
            self.inner.length()
        )
    }
}

/// Mode coupling beta in the narrow-line limit.
#[pyfunction]
#[pyo3(signature = (delta_a, eta_fs, gamma=1.0))]
fn beta_rwa(delta_a: f64, eta_fs: f64, gamma: f64) -> PyResult<Complex64> {
    Ok(atom_cavity::coupling::beta_rwa(delta_a, gamma, eta_fs)
        .map_err(py_err)?
        .beta())
}

/// Mode coupling beta from the full polarizability at drive frequency omega.
#[pyfunction]
fn beta_exact(
    omega: f64,
    atom: PyRef<'_, AtomTransition>,
    mode: PyRef<'_, GaussianMode>,
) -> PyResult<Complex64> {
    Ok(atom_cavity::coupling::beta_exact(omega, &atom.inner, &mode.inner)
        .map_err(py_err)?
        .beta())
}

/// Driven-resonator power transmission with one atom at an antinode.
#[pyfunction]
#[pyo3(signature = (delta_a, delta_c, eta_c, gamma=1.0, kappa=1.0))]
fn transmission(delta_a: f64, delta_c: f64, eta_c: f64, gamma: f64, kappa: f64) -> PyResult<f64> {
    atom_cavity::cavity::transmission_rwa(detuning(delta_a, delta_c)?, eta_c, gamma, kappa)
        .map_err(py_err)
}

/// Free-space scattered fraction of the resonator drive.
#[pyfunction]
#[pyo3(signature = (delta_a, delta_c, eta_c, gamma=1.0, kappa=1.0))]
fn fs_emission(delta_a: f64, delta_c: f64, eta_c: f64, gamma: f64, kappa: f64) -> PyResult<f64> {
    atom_cavity::cavity::fs_emission_driven_cavity_rwa(
        detuning(delta_a, delta_c)?,
        eta_c,
        gamma,
        kappa,
    )
    .map_err(py_err)
}

/// Side-driven atom: power leaving through the mirrors, normalized to the
/// bare free-space scattering of the same drive.
#[pyfunction]
#[pyo3(signature = (delta_a, delta_c, eta_c, gamma=1.0, kappa=1.0))]
fn cavity_emission(
    delta_a: f64,
    delta_c: f64,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> PyResult<f64> {
    atom_cavity::cavity::cavity_emission_rwa(detuning(delta_a, delta_c)?, eta_c, gamma, kappa)
        .map_err(py_err)
}

/// Side-driven atom: free-space emission normalized to its bare value.
#[pyfunction]
#[pyo3(signature = (delta_a, delta_c, eta_c, gamma=1.0, kappa=1.0))]
fn fs_emission_driven_atom(
    delta_a: f64,
    delta_c: f64,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
) -> PyResult<f64> {
    atom_cavity::cavity::fs_emission_driven_atom_rwa(
        detuning(delta_a, delta_c)?,
        eta_c,
        gamma,
        kappa,
    )
    .map_err(py_err)
}

/// Ratio of mirror to free-space emission for a side-driven atom; exact
/// for every coupling strength.
#[pyfunction]
#[pyo3(signature = (delta_c, eta_c, kappa=1.0))]
fn cavity_to_fs_ratio(delta_c: f64, eta_c: f64, kappa: f64) -> PyResult<f64> {
    atom_cavity::cavity::cavity_to_fs_ratio(delta_c, eta_c, kappa).map_err(py_err)
}

/// Sidebeam transmission past the atom with the resonator closing an
/// induced transparency window.
#[pyfunction]
#[pyo3(signature = (delta_a, delta_c, eta_c, gamma=1.0, kappa=1.0, depth0=0.1))]
fn sidebeam_transmission(
    delta_a: f64,
    delta_c: f64,
    eta_c: f64,
    gamma: f64,
    kappa: f64,
    depth0: f64,
) -> PyResult<f64> {
    atom_cavity::cavity::sidebeam_transmission(
        detuning(delta_a, delta_c)?,
        eta_c,
        gamma,
        kappa,
        depth0,
    )
    .map_err(py_err)
}

/// Dispersive resonator line pulling in units of kappa.
#[pyfunction]
#[pyo3(signature = (delta_a, eta_c, gamma=1.0))]
fn cavity_shift(delta_a: f64, eta_c: f64, gamma: f64) -> PyResult<f64> {
    atom_cavity::cavity::cavity_shift_rwa(delta_a, eta_c, gamma).map_err(py_err)
}

/// Normal-mode splitting sqrt(eta_c kappa gamma) of the coupled system.
#[pyfunction]
#[pyo3(signature = (eta_c, kappa=1.0, gamma=1.0))]
fn vacuum_rabi(eta_c: f64, kappa: f64, gamma: f64) -> PyResult<f64> {
    spectra::vacuum_rabi_classical(eta_c, kappa, gamma).map_err(py_err)
}

/// Dipole coupling rate from the quantized-field route; equals
/// vacuum_rabi(...)/2 for the same geometry.
#[pyfunction]
fn g_quantum(
    atom: PyRef<'_, AtomTransition>,
    mode: PyRef<'_, GaussianMode>,
    cavity_length: f64,
) -> PyResult<f64> {
    spectra::g_quantum(&atom.inner, &mode.inner, cavity_length).map_err(py_err)
}

/// Phase-matched free-space sum F over explicit positions.
#[pyfunction]
fn collective_f(
    positions: Vec<(f64, f64, f64)>,
    k_in: (f64, f64, f64),
    k_mode: (f64, f64, f64),
) -> PyResult<Complex64> {
    let layout = EnsembleLayout::new(
        vectors(positions),
        Vector3::new(k_in.0, k_in.1, k_in.2),
        Vector3::new(k_mode.0, k_mode.1, k_mode.2),
    )
    .map_err(py_err)?;
    Ok(atom_cavity::ensemble::collective_f(&layout))
}

/// Phased emission factor G for atoms in a standing wave along z,
/// sidebeam along x.
#[pyfunction]
fn collective_g(positions: Vec<(f64, f64, f64)>, k: f64) -> PyResult<Complex64> {
    let layout = CavityEnsembleLayout::new(vectors(positions), k).map_err(py_err)?;
    Ok(atom_cavity::cavity_ensemble::collective_g(&layout))
}

/// Standing-wave coupling weight H (mean cos^2 kz).
#[pyfunction]
fn collective_h(positions: Vec<(f64, f64, f64)>, k: f64) -> PyResult<f64> {
    let layout = CavityEnsembleLayout::new(vectors(positions), k).map_err(py_err)?;
    Ok(atom_cavity::cavity_ensemble::collective_h(&layout))
}

/// Resonant column transmission exp(-2 N Im beta).
#[pyfunction]
fn beer_transmission(n_atoms: usize, beta: Complex64) -> PyResult<f64> {
    let coupling = ComplexCoupling::new(beta).map_err(py_err)?;
    atom_cavity::ensemble::beer_transmission(n_atoms, &coupling).map_err(py_err)
}

/// Seeded Monte-Carlo average of a named collective estimator
/// (F, F2, H, G or G2) over random layouts.
#[pyfunction]
#[pyo3(signature = (kind, n_atoms, estimator, samples, seed, extent=10.0, wavelength=780e-9))]
#[allow(clippy::too_many_arguments)]
fn monte_carlo(
    py: Python<'_>,
    kind: &str,
    n_atoms: usize,
    estimator: &str,
    samples: usize,
    seed: u64,
    extent: f64,
    wavelength: f64,
) -> PyResult<Py<PyDict>> {
    let kind: atom_cavity::LayoutKind = kind.parse().map_err(py_err)?;
    let estimator: NamedEstimator = estimator.parse().map_err(py_err)?;
    let spec = LayoutSpec {
        kind,
        n_atoms,
        extent_wavelengths: extent,
        seed,
    };
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let estimate = sampler::monte_carlo_named(&spec, k, samples, estimator).map_err(py_err)?;

    let out = PyDict::new(py);
    out.set_item("mean", estimate.mean)?;
    out.set_item("second_moment", estimate.second_moment)?;
    out.set_item("std_error", estimate.std_error)?;
    out.set_item("n_samples", estimate.n_samples)?;
    Ok(out.into())
}

/// Detuning scan of a canned scenario (fig3, fig4, fig5, fig6). Returns
/// {"scenario": ..., "rows": {column: list}} with None in unfilled cells.
#[pyfunction]
#[pyo3(signature = (name, dmin=-4.0, dmax=4.0, dstep=0.01))]
fn scan_preset(
    py: Python<'_>,
    name: &str,
    dmin: f64,
    dmax: f64,
    dstep: f64,
) -> PyResult<Py<PyDict>> {
    let preset: Preset = name.parse().map_err(py_err)?;
    let grid = DetuningGrid::new(dmin, dmax, dstep).map_err(py_err)?;
    let table = spectra::scan(&preset.scan_scenario(), &grid).map_err(py_err)?;

    let scenario = serde_json::to_value(&table.scenario)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;

    let rows = PyDict::new(py);
    rows.set_item(
        "delta_over_gamma",
        table.rows.iter().map(|r| r.delta_over_gamma).collect::<Vec<_>>(),
    )?;
    rows.set_item(
        "delta_c_over_kappa",
        table.rows.iter().map(|r| r.delta_c_over_kappa).collect::<Vec<_>>(),
    )?;
    rows.set_item(
        "transmission",
        table.rows.iter().map(|r| r.transmission).collect::<Vec<_>>(),
    )?;
    rows.set_item(
        "fs_emission",
        table.rows.iter().map(|r| r.fs_emission).collect::<Vec<_>>(),
    )?;
    rows.set_item(
        "cavity_emission",
        table.rows.iter().map(|r| r.cavity_emission).collect::<Vec<_>>(),
    )?;
    rows.set_item(
        "fs_emission_ratio",
        table.rows.iter().map(|r| r.fs_emission_ratio).collect::<Vec<_>>(),
    )?;
    rows.set_item(
        "sidebeam_T",
        table.rows.iter().map(|r| r.sidebeam_t).collect::<Vec<_>>(),
    )?;

    let out = PyDict::new(py);
    out.set_item("scenario", json_to_py(py, &scenario)?)?;
    out.set_item("rows", rows)?;
    Ok(out.into())
}

/// Peak separation of the driven-resonator transmission for a
/// dimensionless scenario; None when the scan shows fewer than two peaks.
#[pyfunction]
#[pyo3(signature = (eta_c, kappa_over_gamma=1.0, dmin=-4.0, dmax=4.0, dstep=0.01))]
fn transmission_splitting(
    eta_c: f64,
    kappa_over_gamma: f64,
    dmin: f64,
    dmax: f64,
    dstep: f64,
) -> PyResult<Option<f64>> {
    let scenario = ScanScenario::new(
        ScanMode::DrivenCavity,
        Scenario::Abstract(AbstractScenario::new(eta_c, kappa_over_gamma).map_err(py_err)?),
    );
    let grid = DetuningGrid::new(dmin, dmax, dstep).map_err(py_err)?;
    let table = spectra::scan(&scenario, &grid).map_err(py_err)?;
    let peaks = spectra::find_peaks(&table, SpectrumColumn::Transmission).map_err(py_err)?;
    Ok(peaks.splitting)
}

#[pymodule]
fn atomcavity(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<AtomTransition>()?;
    m.add_class::<GaussianMode>()?;
    m.add_class::<CavitySpec>()?;
    m.add_function(wrap_pyfunction!(beta_rwa, m)?)?;
    m.add_function(wrap_pyfunction!(beta_exact, m)?)?;
    m.add_function(wrap_pyfunction!(transmission, m)?)?;
    m.add_function(wrap_pyfunction!(fs_emission, m)?)?;
    m.add_function(wrap_pyfunction!(cavity_emission, m)?)?;
    m.add_function(wrap_pyfunction!(fs_emission_driven_atom, m)?)?;
    m.add_function(wrap_pyfunction!(cavity_to_fs_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(sidebeam_transmission, m)?)?;
    m.add_function(wrap_pyfunction!(cavity_shift, m)?)?;
    m.add_function(wrap_pyfunction!(vacuum_rabi, m)?)?;
    m.add_function(wrap_pyfunction!(g_quantum, m)?)?;
    m.add_function(wrap_pyfunction!(collective_f, m)?)?;
    m.add_function(wrap_pyfunction!(collective_g, m)?)?;
    m.add_function(wrap_pyfunction!(collective_h, m)?)?;
    m.add_function(wrap_pyfunction!(beer_transmission, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(scan_preset, m)?)?;
    m.add_function(wrap_pyfunction!(transmission_splitting, m)?)?;
    Ok(())
}
