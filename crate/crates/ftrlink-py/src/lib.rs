//! Python bindings: the main fading-law, link, and metric operations.
//!
//! Build with `cargo build -p ftrlink-py --release`; the resulting
//! `libftrlink.so` imports as the `ftrlink` module once renamed or linked
//! to `ftrlink.so` on `sys.path` (see `python/smoke_test.py`).

use ftrlink_core::af::{self, AfLink, AfMode, HardwareProfile};
use ftrlink_core::ftr::{self, FtrParams, SeriesControl};
use ftrlink_core::mc::{self, HardwareMode, McConfig, PhaseMode, PowerMode};
use ftrlink_core::ris::{self, ExactMeasurementOracle, PhaseOptimizerConfig, RisElement, RisLink};
use ftrlink_core::stats::{ChainBank, HopChain};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One hop's FTR fading law.
#[pyclass(name = "FtrParams")]
#[derive(Clone)]
struct PyFtrParams {
    inner: FtrParams,
}

#[pymethods]
impl PyFtrParams {
    #[new]
    fn new(m: f64, k: f64, delta: f64, sigma2: f64) -> PyResult<Self> {
        Ok(Self { inner: FtrParams::new(m, k, delta, sigma2).map_err(err)? })
    }

    #[staticmethod]
    fn from_avg_power(m: f64, k: f64, delta: f64, avg_power: f64) -> PyResult<Self> {
        Ok(Self { inner: FtrParams::from_avg_power(m, k, delta, avg_power).map_err(err)? })
    }

    #[getter]
    fn avg_power(&self) -> f64 {
        self.inner.avg_power()
    }

    /// Density of the squared envelope.
    #[pyo3(signature = (x, max_terms = 80))]
    fn pdf_squared(&self, x: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ftr::pdf_squared(&self.inner, x, &ctrl).map_err(err)
    }

    /// Distribution of the squared envelope.
    #[pyo3(signature = (x, max_terms = 80))]
    fn cdf_squared(&self, x: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ftr::cdf_squared(&self.inner, x, &ctrl).map_err(err)
    }

    /// Envelope distribution.
    #[pyo3(signature = (r, max_terms = 80))]
    fn envelope_cdf(&self, r: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ftr::envelope_cdf(&self.inner, r, &ctrl).map_err(err)
    }

    /// Raw envelope moment E[R^s].
    #[pyo3(signature = (s, max_terms = 80))]
    fn envelope_moment(&self, s: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ftr::envelope_moment(&self.inner, s, &ctrl).map_err(err)
    }

    /// Reproducible i.i.d. envelope draws.
    fn sample_envelope(&self, count: usize, seed: u64) -> PyResult<Vec<f64>> {
        ftr::sample_envelope(&self.inner, count, seed).map_err(err)
    }

    /// Mixture coefficient d_n.
    fn coefficient_d(&self, n: usize) -> PyResult<f64> {
        ftr::coefficient_d(n, &self.inner).map_err(err)
    }
}

/// Reflecting surface with uniform per-element channel laws.
#[pyclass(name = "RisLink")]
#[derive(Clone)]
struct PyRisLink {
    inner: RisLink,
}

#[pymethods]
impl PyRisLink {
    /// Uniform surface: `elements` copies of the (hop1, hop2) pair.
    #[new]
    #[pyo3(signature = (hop1, hop2, elements, power, noise, theta_sums = None))]
    fn new(
        hop1: PyFtrParams,
        hop2: PyFtrParams,
        elements: usize,
        power: f64,
        noise: f64,
        theta_sums: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let els = (0..elements)
            .map(|i| RisElement {
                hop1: hop1.inner,
                hop2: hop2.inner,
                theta1: theta_sums.as_ref().map_or(0.0, |t| t[i % t.len()]),
                theta2: 0.0,
                phi: 0.0,
            })
            .collect();
        Ok(Self { inner: RisLink::new(els, power, noise).map_err(err)? })
    }

    /// Co-phased SNR distribution at `z` (up to four elements).
    #[pyo3(signature = (z, max_terms = 80))]
    fn snr_cdf(&self, z: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ris::ris_snr_cdf(&self.inner, z, &ctrl).map_err(err)
    }

    /// Outage probability at the threshold (up to four elements).
    #[pyo3(signature = (gamma_th, max_terms = 80))]
    fn outage(&self, gamma_th: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ris::ris_outage(&self.inner, gamma_th, &ctrl).map_err(err)
    }

    /// Closed-form average bit-error probability (up to four elements).
    #[pyo3(signature = (p, q, max_terms = 80))]
    fn abep(&self, p: f64, q: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ris::ris_abep(&self.inner, p, q, &ctrl).map_err(err)
    }

    /// Per-element expected amplitude products and their sum.
    #[pyo3(signature = (max_terms = 80))]
    fn expectation_opt(&self, max_terms: usize) -> PyResult<(f64, Vec<f64>)> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        ris::expectation_opt(&self.inner, &ctrl).map_err(err)
    }

    /// Binary-search phase alignment with the noise-free oracle; returns
    /// the per-element shifts and the measured-amplitude trace.
    #[pyo3(signature = (inner_iters = 12, sweeps = 4, max_terms = 80))]
    fn optimize_phases(
        &self,
        inner_iters: usize,
        sweeps: usize,
        max_terms: usize,
    ) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        let oracle = ExactMeasurementOracle::new(&self.inner, &ctrl).map_err(err)?;
        ris::optimize_phases(&self.inner, &PhaseOptimizerConfig { inner_iters, sweeps }, &oracle)
            .map_err(err)
    }

    /// Monte-Carlo SNR samples under co-phased operation.
    #[pyo3(signature = (trials, seed))]
    fn simulate_snr(&self, trials: usize, seed: u64) -> PyResult<Vec<f64>> {
        let cfg = McConfig::new(trials, seed).map_err(err)?;
        Ok(mc::simulate_ris_snr(&self.inner, PhaseMode::Optimal, &cfg))
    }
}

/// Two-hop amplify-and-forward relay link.
#[pyclass(name = "AfLink")]
#[derive(Clone)]
struct PyAfLink {
    inner: AfLink,
}

#[pymethods]
impl PyAfLink {
    #[new]
    #[pyo3(signature = (hop1, hop2, p1, p2, noise, kappa1 = 0.0, kappa2 = 0.0))]
    fn new(
        hop1: PyFtrParams,
        hop2: PyFtrParams,
        p1: f64,
        p2: f64,
        noise: f64,
        kappa1: f64,
        kappa2: f64,
    ) -> PyResult<Self> {
        let hw = HardwareProfile::new(kappa1, kappa2).map_err(err)?;
        Ok(Self { inner: AfLink::new(hop1.inner, hop2.inner, p1, p2, noise, hw).map_err(err)? })
    }

    /// CDF of the normalized impaired SNR variable Z.
    #[pyo3(signature = (z, max_terms = 80))]
    fn z_cdf(&self, z: f64, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        af::z_cdf(&self.inner, z, &ctrl).map_err(err)
    }

    /// Outage probability; `optimal_power` switches to the per-realization
    /// optimal split under the budget `p1 + p2`.
    #[pyo3(signature = (gamma_th, optimal_power = false, max_terms = 80))]
    fn outage(&self, gamma_th: f64, optimal_power: bool, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        let mode = if optimal_power { AfMode::OptimalPower } else { AfMode::Configured };
        af::af_outage(&self.inner, gamma_th, mode, &ctrl).map_err(err)
    }

    /// Closed-form average bit-error probability.
    #[pyo3(signature = (p, q, optimal_power = false, max_terms = 80))]
    fn abep(&self, p: f64, q: f64, optimal_power: bool, max_terms: usize) -> PyResult<f64> {
        let ctrl = SeriesControl::new(max_terms, 1e-11).map_err(err)?;
        let mode = if optimal_power { AfMode::OptimalPower } else { AfMode::Configured };
        af::af_abep(&self.inner, p, q, mode, &ctrl).map_err(err)
    }

    /// Monte-Carlo end-to-end SNR samples.
    #[pyo3(signature = (trials, seed, optimal_power = false, impaired = false))]
    fn simulate_snr(
        &self,
        trials: usize,
        seed: u64,
        optimal_power: bool,
        impaired: bool,
    ) -> PyResult<Vec<f64>> {
        let cfg = McConfig::new(trials, seed).map_err(err)?;
        let pm = if optimal_power { PowerMode::Optimal } else { PowerMode::Fixed };
        let hm = if impaired { HardwareMode::Impaired } else { HardwareMode::Ideal };
        Ok(mc::simulate_af_snr(&self.inner, pm, hm, &cfg))
    }
}

/// Instantaneous two-hop SNR with hardware impairments.
#[pyfunction]
fn af_snr_exact(gamma1: f64, gamma2: f64, kappa1: f64, kappa2: f64) -> PyResult<f64> {
    let hw = HardwareProfile::new(kappa1, kappa2).map_err(err)?;
    Ok(af::af_snr_exact(gamma1, gamma2, &hw))
}

/// Power split maximizing the ideal relay SNR under `p1 + p2 = 2 * budget`.
#[pyfunction]
fn optimal_power_split(q1_mag: f64, q2_mag: f64, budget: f64) -> PyResult<(f64, f64)> {
    let s = af::optimal_power_split(q1_mag, q2_mag, budget).map_err(err)?;
    Ok((s.p1, s.p2))
}

/// Series truncation error for `branches` x `hops_per_branch` identical hops.
#[pyfunction]
fn truncation_error(
    hop: PyFtrParams,
    branches: usize,
    hops_per_branch: usize,
    m_terms: usize,
) -> PyResult<f64> {
    let chain = HopChain::new(vec![hop.inner; hops_per_branch]).map_err(err)?;
    let bank = ChainBank::new(vec![chain; branches]).map_err(err)?;
    ftrlink_core::stats::truncation_error(&bank, m_terms).map_err(err)
}

/// Consensus phase of the alignment recurrence.
#[pyfunction]
fn phase_fixed_point(alpha: Vec<f64>) -> PyResult<f64> {
    ris::phase_fixed_point(&alpha).map_err(err)
}

/// Empirical outage of an SNR sample set: (mean, standard error).
#[pyfunction]
fn empirical_outage(samples: Vec<f64>, gamma_th: f64) -> PyResult<(f64, f64)> {
    let e = mc::empirical_outage(&samples, gamma_th, 0).map_err(err)?;
    Ok((e.mean, e.std_error))
}

/// Empirical conditional-error ABEP of an SNR sample set: (mean, SE).
#[pyfunction]
fn empirical_abep(samples: Vec<f64>, p: f64, q: f64) -> PyResult<(f64, f64)> {
    let e = mc::empirical_abep(&samples, p, q, 0).map_err(err)?;
    Ok((e.mean, e.std_error))
}

#[pymodule]
fn ftrlink(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFtrParams>()?;
    m.add_class::<PyRisLink>()?;
    m.add_class::<PyAfLink>()?;
    m.add_function(wrap_pyfunction!(af_snr_exact, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_power_split, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_error, m)?)?;
    m.add_function(wrap_pyfunction!(phase_fixed_point, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_outage, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_abep, m)?)?;
    Ok(())
}
