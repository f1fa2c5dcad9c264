//! Python bindings: configuration types and the headline operations of each
//! model, with complex numbers as Python `complex` and matrices as nested
//! lists.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use thermolimit::ensemble::{self, EnsembleConfig, ProductSpinState, Site, SiteSampler};
use thermolimit::numerics::{self, ComplexMatrix, StateVector};
use thermolimit::regularization::{self, RegularizationSchedule, Signal, TrigKind};
use thermolimit::spin_boson::{
    self, IntegrandForm, QuadratureSpec, SpinBosonConfig, SpinBosonSystem,
};
use thermolimit::zurek::{self, BathConfig, BathSize, QubitDensityMatrix};
use thermolimit::C64;

create_exception!(thermolimit, ThermolimitError, PyValueError);

fn err(e: thermolimit::Error) -> PyErr {
    ThermolimitError::new_err(format!("{}: {}", e.name(), e))
}

fn to_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn from_rows(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(err)
}

fn trig_kind(kind: &str) -> PyResult<TrigKind> {
    match kind {
        "cos" => Ok(TrigKind::Cos),
        "sin" => Ok(TrigKind::Sin),
        other => Err(PyValueError::new_err(format!(
            "kind must be 'cos' or 'sin', got {other:?}"
        ))),
    }
}

fn integrand_form(form: &str) -> PyResult<IntegrandForm> {
    match form {
        "derived" => Ok(IntegrandForm::Derived),
        "unit_shift" => Ok(IntegrandForm::UnitShift),
        other => Err(PyValueError::new_err(format!(
            "form must be 'derived' or 'unit_shift', got {other:?}"
        ))),
    }
}

#[pyclass(name = "SpinBosonConfig", frozen)]
struct PySpinBosonConfig {
    inner: SpinBosonConfig,
}

#[pymethods]
impl PySpinBosonConfig {
    /// `fock_dim=None` sizes the truncation from the largest coherent amplitude.
    #[new]
    #[pyo3(signature = (n_spins, delta, omega, g, fock_dim=None))]
    fn new(
        n_spins: usize,
        delta: f64,
        omega: f64,
        g: f64,
        fock_dim: Option<usize>,
    ) -> PyResult<Self> {
        let inner = match fock_dim {
            Some(m) => SpinBosonConfig::new(n_spins, delta, omega, g, m),
            None => SpinBosonConfig::with_auto_fock(n_spins, delta, omega, g),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }
    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }
    #[getter]
    fn fock_dim(&self) -> usize {
        self.inner.fock_dim
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SpinBosonConfig(n_spins={}, delta={}, omega={}, g={}, fock_dim={})",
            c.n_spins, c.delta, c.omega, c.g, c.fock_dim
        )
    }
}

#[derive(FromPyObject)]
enum BathArg {
    Count(usize),
    Word(String),
}

#[pyclass(name = "BathConfig", frozen)]
struct PyBathConfig {
    inner: BathConfig,
}

#[pymethods]
impl PyBathConfig {
    /// `n_spins` is a count or the string "infinite".
    #[new]
    fn new(n_spins: BathArg, lam: f64) -> PyResult<Self> {
        let inner = match n_spins {
            BathArg::Count(n) => BathConfig::new(n, lam),
            BathArg::Word(w) if w == "infinite" => BathConfig::thermodynamic_limit(lam),
            BathArg::Word(w) => {
                return Err(PyValueError::new_err(format!(
                    "n_spins must be a count or 'infinite', got {w:?}"
                )))
            }
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    /// Spin count, or None for an infinite bath.
    #[getter]
    fn n_spins(&self) -> Option<usize> {
        match self.inner.n_spins {
            BathSize::Finite(n) => Some(n),
            BathSize::Infinite => None,
        }
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    fn __repr__(&self) -> String {
        match self.inner.n_spins {
            BathSize::Finite(n) => format!("BathConfig(n_spins={n}, lam={})", self.inner.lambda),
            BathSize::Infinite => {
                format!("BathConfig(n_spins='infinite', lam={})", self.inner.lambda)
            }
        }
    }
}

#[pyclass(name = "QubitDensityMatrix", frozen)]
struct PyQubitDensityMatrix {
    inner: QubitDensityMatrix,
}

#[pymethods]
impl PyQubitDensityMatrix {
    #[getter]
    fn uu(&self) -> C64 {
        self.inner.uu
    }
    #[getter]
    fn ud(&self) -> C64 {
        self.inner.ud
    }
    #[getter]
    fn du(&self) -> C64 {
        self.inner.du
    }
    #[getter]
    fn dd(&self) -> C64 {
        self.inner.dd
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn offdiag_magnitude(&self) -> f64 {
        self.inner.offdiag_magnitude()
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        to_rows(&self.inner.to_matrix())
    }

    fn __repr__(&self) -> String {
        self.inner.to_string()
    }
}

impl From<QubitDensityMatrix> for PyQubitDensityMatrix {
    fn from(inner: QubitDensityMatrix) -> Self {
        Self { inner }
    }
}

/// exp(−iht) for a Hermitian matrix given as nested lists.
#[pyfunction]
fn matexp_hermitian_prop(h: Vec<Vec<C64>>, t: f64) -> PyResult<Vec<Vec<C64>>> {
    let u = numerics::matexp_hermitian_prop(&from_rows(h)?, t).map_err(err)?;
    Ok(to_rows(&u))
}

#[pyfunction]
fn kron(a: Vec<Vec<C64>>, b: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
    Ok(to_rows(
        &numerics::kron(&from_rows(a)?, &from_rows(b)?).map_err(err)?,
    ))
}

/// Reduced density matrix of a normalized state over the `keep` factors.
#[pyfunction]
fn partial_trace(
    amplitudes: Vec<C64>,
    factor_dims: Vec<usize>,
    keep: Vec<usize>,
) -> PyResult<Vec<Vec<C64>>> {
    let psi = StateVector::new(amplitudes).map_err(err)?;
    Ok(to_rows(
        &numerics::partial_trace(&psi, &factor_dims, &keep).map_err(err)?,
    ))
}

#[pyfunction]
fn trace_distance(a: Vec<Vec<C64>>, b: Vec<Vec<C64>>) -> PyResult<f64> {
    numerics::trace_distance(&from_rows(a)?, &from_rows(b)?).map_err(err)
}

fn product_state(sites: Vec<(C64, C64)>) -> PyResult<ProductSpinState> {
    let sites = sites
        .into_iter()
        .map(|(alpha, beta)| Site::new(alpha, beta))
        .collect::<thermolimit::Result<Vec<_>>>()
        .map_err(err)?;
    ProductSpinState::new(sites).map_err(err)
}

/// (⟨H⟩, ΔH, ΔH/⟨H⟩) for a product state given as (alpha, beta) pairs,
/// alpha multiplying |↓⟩.
#[pyfunction]
#[pyo3(name = "energy_statistics")]
fn energy_statistics(sites: Vec<(C64, C64)>, lam: f64) -> PyResult<(f64, f64, f64)> {
    let state = product_state(sites)?;
    let cfg = EnsembleConfig::new(state.n_sites(), lam).map_err(err)?;
    Ok((
        ensemble::mean_energy(&state, &cfg).map_err(err)?,
        ensemble::energy_spread(&state, &cfg).map_err(err)?,
        ensemble::relative_fluctuation(&state, &cfg).map_err(err)?,
    ))
}

/// Fluctuation scaling with magnetizations uniform on [m_min, m_max].
/// Returns (rows of (n, mean_energy, delta_h, ratio), slope, intercept).
#[pyfunction]
#[pyo3(signature = (n_list, seed, m_min=0.3, m_max=0.9))]
#[allow(clippy::type_complexity)]
fn scaling_experiment(
    n_list: Vec<usize>,
    seed: u64,
    m_min: f64,
    m_max: f64,
) -> PyResult<(Vec<(usize, f64, f64, f64)>, f64, f64)> {
    let sampler = SiteSampler::UniformMagnetization { m_min, m_max };
    let t = ensemble::scaling_experiment(&sampler, &n_list, seed).map_err(err)?;
    let rows = t
        .rows
        .iter()
        .map(|r| (r.n, r.mean_energy, r.delta_h, r.ratio))
        .collect();
    Ok((rows, t.slope, t.intercept))
}

/// Closed-form leading order in bath sector S: (phase, alpha).
#[pyfunction]
fn uf_apply(cfg: PyRef<'_, PySpinBosonConfig>, bath_sector: i64, t: f64) -> PyResult<(f64, C64)> {
    let lo = spin_boson::uf_apply(&cfg.inner, bath_sector, t).map_err(err)?;
    Ok((lo.phase, lo.alpha.value()))
}

/// |α(t)⟩⟨α(t)| as nested lists.
#[pyfunction]
fn leading_order_field_density(
    cfg: PyRef<'_, PySpinBosonConfig>,
    t: f64,
) -> PyResult<Vec<Vec<C64>>> {
    let fs = spin_boson::leading_order_field_density(&cfg.inner, t).map_err(err)?;
    Ok(to_rows(&fs.density))
}

/// Field density matrix from exact evolution of |0⟩ ⊗ Π|−1⟩_x.
#[pyfunction]
fn exact_field_density(cfg: PyRef<'_, PySpinBosonConfig>, t: f64) -> PyResult<Vec<Vec<C64>>> {
    let c = &cfg.inner;
    let psi = SpinBosonSystem::new(*c)
        .and_then(|s| s.evolve(&spin_boson::initial_state(c)?, t))
        .map_err(err)?;
    Ok(to_rows(&spin_boson::field_density(&psi, c).map_err(err)?))
}

/// (‖exact − leading‖ / ‖correction‖, ‖correction‖, traced cross term).
#[pyfunction]
#[pyo3(signature = (cfg, t, form="derived"))]
fn first_order_check(
    cfg: PyRef<'_, PySpinBosonConfig>,
    t: f64,
    form: &str,
) -> PyResult<(f64, f64, f64)> {
    let c = &cfg.inner;
    let form = integrand_form(form)?;
    let run = || -> thermolimit::Result<(f64, f64, f64)> {
        let exact = SpinBosonSystem::new(*c)?.evolve(&spin_boson::initial_state(c)?, t)?;
        let lead = spin_boson::leading_order_state(c, t)?;
        let quad = QuadratureSpec::for_config(c, t, form);
        let corr = spin_boson::first_order_correction(c, t, &quad, form)?;
        let cross = spin_boson::traced_correction_contribution(c, t, &quad, form)?;
        Ok((exact.distance(&lead)? / corr.norm, corr.norm, cross))
    };
    run().map_err(err)
}

/// [(N, |integral|)] for the first-order time integral.
#[pyfunction]
#[pyo3(signature = (omega, g, t, n_list, form="derived"))]
fn riemann_decay_scan(
    omega: f64,
    g: f64,
    t: f64,
    n_list: Vec<usize>,
    form: &str,
) -> PyResult<Vec<(usize, f64)>> {
    let scan =
        spin_boson::riemann_decay_scan(omega, g, t, &n_list, integrand_form(form)?).map_err(err)?;
    Ok(scan.points.iter().map(|p| (p.n, p.magnitude)).collect())
}

#[pyfunction]
fn reduced_density(cfg: PyRef<'_, PyBathConfig>, t: f64) -> PyResult<PyQubitDensityMatrix> {
    Ok(zurek::reduced_density(&cfg.inner, t).map_err(err)?.into())
}

#[pyfunction]
fn time_averaged_density(
    cfg: PyRef<'_, PyBathConfig>,
    window: f64,
) -> PyResult<PyQubitDensityMatrix> {
    Ok(zurek::time_averaged_density(&cfg.inner, window)
        .map_err(err)?
        .into())
}

#[pyfunction]
fn offdiag_bound(cfg: PyRef<'_, PyBathConfig>, window: f64) -> PyResult<f64> {
    zurek::offdiag_bound(&cfg.inner, window).map_err(err)
}

/// ∫₀^∞ e^{−εy} trig(y) dy.
#[pyfunction]
fn abel_integral(kind: &str, epsilon: f64) -> PyResult<f64> {
    regularization::abel_integral(trig_kind(kind)?, epsilon).map_err(err)
}

/// Regularized lim_{N→∞} of cos(Nx) or sin(Nx) over the standard schedule.
#[pyfunction]
fn regularized_trig_limit(kind: &str) -> PyResult<f64> {
    let sched = RegularizationSchedule::standard();
    Ok(
        regularization::regularized_trig_limit(trig_kind(kind)?, &sched)
            .map_err(err)?
            .value,
    )
}

/// (1/T)∫₀ᵀ trig(Ωt) dt for each window T.
#[pyfunction]
fn time_average(kind: &str, omega: f64, windows: Vec<f64>) -> PyResult<Vec<f64>> {
    let signal = match trig_kind(kind)? {
        TrigKind::Cos => Signal::Cos {
            amplitude: 1.0,
            omega,
        },
        TrigKind::Sin => Signal::Sin {
            amplitude: 1.0,
            omega,
        },
    };
    regularization::time_average(&signal, &windows).map_err(err)
}

#[pymodule(name = "thermolimit")]
fn thermolimit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ThermolimitError", m.py().get_type::<ThermolimitError>())?;
    m.add_class::<PySpinBosonConfig>()?;
    m.add_class::<PyBathConfig>()?;
    m.add_class::<PyQubitDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(matexp_hermitian_prop, m)?)?;
    m.add_function(wrap_pyfunction!(kron, m)?)?;
    m.add_function(wrap_pyfunction!(partial_trace, m)?)?;
    m.add_function(wrap_pyfunction!(trace_distance, m)?)?;
    m.add_function(wrap_pyfunction!(energy_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(uf_apply, m)?)?;
    m.add_function(wrap_pyfunction!(leading_order_field_density, m)?)?;
    m.add_function(wrap_pyfunction!(exact_field_density, m)?)?;
    m.add_function(wrap_pyfunction!(first_order_check, m)?)?;
    m.add_function(wrap_pyfunction!(riemann_decay_scan, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_density, m)?)?;
    m.add_function(wrap_pyfunction!(time_averaged_density, m)?)?;
    m.add_function(wrap_pyfunction!(offdiag_bound, m)?)?;
    m.add_function(wrap_pyfunction!(abel_integral, m)?)?;
    m.add_function(wrap_pyfunction!(regularized_trig_limit, m)?)?;
    m.add_function(wrap_pyfunction!(time_average, m)?)?;
    Ok(())
}
