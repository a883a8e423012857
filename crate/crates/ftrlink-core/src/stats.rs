//! Statistics of products of independent FTR envelopes and sums of such
//! products.
//!
//! With the per-hop reduced Mellin transform
//!
//! ```text
//! T(s) = sum_j [w_j / Gamma(1+j)] Gamma(1+j+s) = E[(gamma/(2 sigma^2))^s]
//! ```
//!
//! the product and sum laws are single Mellin–Barnes integrals whose
//! integrands are products of `T`-series and plain gamma factors — the
//! truncated fading series folds into the integrand instead of multiplying
//! the number of contour evaluations:
//!
//! ```text
//! pdf_X(x)  = (2/x) (2 pi i)^{-1} ∮ prod_l T_l(t) z^{-t} dt,  z = x^2/prod(2 sigma_l^2)
//! cdf_X(x)  = (2 pi i)^{-1} ∮ prod_l T_l(t) G(-t)/G(1-t) z^{-t} dt
//! mgf_X(s)  = (2 pi i)^{-1} ∮ G(u) prod_l T_l(-u/2) z^{-u} du,  z = s prod(sqrt2 sigma_l)
//! cdf_Y(y)  = (2 pi i)^{-L} ∮..∮ prod_i [G(s_i) prod_l T_il(-s_i/2)] / G(1+Σs)
//!             prod_i z_i^{-s_i} ds,  z_i = prod_l(sqrt2 sigma_il)/y
//! ```
//!
//! Per-variable grids are memoized so parameter sweeps pay the gamma-series
//! cost once per contour, not once per evaluation point.

use crate::error::{Error, Result};
use crate::ftr::{weights, FtrParams, SeriesControl};
use crate::special::contour::{
    ContourSettings, GammaFactor, GammaSeries, MellinBarnes, SharedFactor, VarBlock, MAX_DIM,
};
use crate::special::gamma::ln_gamma;

/// A cascade of independent FTR hops whose envelopes multiply.
#[derive(Debug, Clone)]
pub struct HopChain {
    hops: Vec<FtrParams>,
}

impl HopChain {
    pub fn new(hops: Vec<FtrParams>) -> Result<Self> {
        if hops.is_empty() {
            return Err(Error::InvalidParameter("a hop chain needs at least one hop".into()));
        }
        Ok(Self { hops })
    }

    pub fn hops(&self) -> &[FtrParams] {
        &self.hops
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    fn ensure_closed_form(&self) -> Result<()> {
        if self.hops.len() > MAX_DIM {
            return Err(Error::DimensionCap(format!(
                "chains of {} hops exceed the closed-form cap of {MAX_DIM}; use Monte-Carlo",
                self.hops.len()
            )));
        }
        Ok(())
    }

    /// Product of the diffuse scales `2 sigma_l^2` over the chain.
    fn scale_product(&self) -> f64 {
        self.hops.iter().map(|h| 2.0 * h.sigma2()).product()
    }
}

/// A bank of chains whose products add (one chain per combining branch).
#[derive(Debug, Clone)]
pub struct ChainBank {
    chains: Vec<HopChain>,
}

impl ChainBank {
    pub fn new(chains: Vec<HopChain>) -> Result<Self> {
        if chains.is_empty() {
            return Err(Error::InvalidParameter("a chain bank needs at least one chain".into()));
        }
        let n = chains[0].len();
        if chains.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter(
                "all chains in a bank must have the same hop count".into(),
            ));
        }
        Ok(Self { chains })
    }

    pub fn chains(&self) -> &[HopChain] {
        &self.chains
    }

    pub fn branches(&self) -> usize {
        self.chains.len()
    }

    fn ensure_closed_form(&self) -> Result<()> {
        if self.chains.len() > MAX_DIM {
            return Err(Error::DimensionCap(format!(
                "{} combining branches exceed the closed-form cap of {MAX_DIM}; use Monte-Carlo",
                self.chains.len()
            )));
        }
        Ok(())
    }
}

/// `T(s)` series for one hop: amplitudes `w_j / Gamma(1+j)` against
/// `Gamma(1+j+slope*s)`.
fn hop_series(hop: &FtrParams, slope: f64, ctrl: &SeriesControl) -> Result<GammaSeries> {
    let ws = weights(hop, ctrl)?;
    let amps = ws
        .iter()
        .enumerate()
        .map(|(j, w)| w * (-ln_gamma(1.0 + j as f64)).exp())
        .collect();
    Ok(GammaSeries { amps, shift: 1.0, step: 1.0, slope })
}

/// Raw moment `E[X^s]` of the chain product.
pub fn product_moment(chain: &HopChain, s: f64, ctrl: &SeriesControl) -> Result<f64> {
    if s <= -2.0 {
        return Err(Error::Domain(format!("product moment diverges for s <= -2 (got {s})")));
    }
    let mut acc = 1.0;
    for hop in chain.hops() {
        acc *= crate::ftr::envelope_moment(hop, s, ctrl)?;
    }
    Ok(acc)
}

/// Density of the product `X = prod R_l` at `x > 0`.
pub fn product_pdf(chain: &HopChain, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    product_pdf_with(chain, x, ctrl, &ContourSettings::default())
}

pub fn product_pdf_with(
    chain: &HopChain,
    x: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("product_pdf requires x > 0, got {x}")));
    }
    chain.ensure_closed_form()?;
    let mut series = Vec::with_capacity(chain.len());
    for hop in chain.hops() {
        series.push(hop_series(hop, 1.0, ctrl)?);
    }
    let mb = MellinBarnes {
        vars: vec![VarBlock { gammas: vec![], series, abscissa: Some(0.5) }],
        shared: vec![],
    };
    let z = x * x / chain.scale_product();
    Ok((2.0 / x * mb.eval(&[z], settings)?).max(0.0))
}

/// Distribution of the product at `x >= 0`.
pub fn product_cdf(chain: &HopChain, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    product_cdf_with(chain, x, ctrl, &ContourSettings::default())
}

pub fn product_cdf_with(
    chain: &HopChain,
    x: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("product_cdf requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    chain.ensure_closed_form()?;
    let mut series = Vec::with_capacity(chain.len());
    for hop in chain.hops() {
        series.push(hop_series(hop, 1.0, ctrl)?);
    }
    let mb = MellinBarnes {
        vars: vec![VarBlock {
            gammas: vec![
                GammaFactor { shift: 0.0, slope: -1.0, inverse: false },
                GammaFactor { shift: 1.0, slope: -1.0, inverse: true },
            ],
            series,
            abscissa: Some(-0.5),
        }],
        shared: vec![],
    };
    let z = x * x / chain.scale_product();
    clamp_unit(mb.eval(&[z], settings)?, "product_cdf")
}

/// Laplace transform `E[e^{-sX}]` of the product at `s > 0`.
pub fn product_mgf(chain: &HopChain, s: f64, ctrl: &SeriesControl) -> Result<f64> {
    product_mgf_with(chain, s, ctrl, &ContourSettings::default())
}

pub fn product_mgf_with(
    chain: &HopChain,
    s: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("product_mgf requires s > 0, got {s}")));
    }
    chain.ensure_closed_form()?;
    let mut series = Vec::with_capacity(chain.len());
    for hop in chain.hops() {
        series.push(hop_series(hop, -0.5, ctrl)?);
    }
    let mb = MellinBarnes {
        vars: vec![VarBlock {
            gammas: vec![GammaFactor { shift: 0.0, slope: 1.0, inverse: false }],
            series,
            abscissa: Some(1.0),
        }],
        shared: vec![],
    };
    let z = s * chain.scale_product().sqrt();
    clamp_unit(mb.eval(&[z], settings)?, "product_mgf")
}

/// Sum-of-products integrand shared by the PDF/CDF routes.
fn bank_integrand(bank: &ChainBank, ctrl: &SeriesControl, cdf: bool) -> Result<MellinBarnes> {
    let mut vars = Vec::with_capacity(bank.branches());
    for chain in bank.chains() {
        let mut series = Vec::with_capacity(chain.len());
        for hop in chain.hops() {
            series.push(hop_series(hop, -0.5, ctrl)?);
        }
        vars.push(VarBlock {
            gammas: vec![GammaFactor { shift: 0.0, slope: 1.0, inverse: false }],
            series,
            abscissa: Some(1.0),
        });
    }
    Ok(MellinBarnes {
        vars,
        shared: vec![SharedFactor {
            shift: if cdf { 1.0 } else { 0.0 },
            slope: 1.0,
            inverse: true,
        }],
    })
}

/// Density of `Y = sum_i X_i` at `y > 0`.
pub fn sum_product_pdf(bank: &ChainBank, y: f64, ctrl: &SeriesControl) -> Result<f64> {
    sum_product_pdf_with(bank, y, ctrl, &ContourSettings::default())
}

pub fn sum_product_pdf_with(
    bank: &ChainBank,
    y: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("sum_product_pdf requires y > 0, got {y}")));
    }
    bank.ensure_closed_form()?;
    let mb = bank_integrand(bank, ctrl, false)?;
    let args: Vec<f64> = bank
        .chains()
        .iter()
        .map(|c| c.scale_product().sqrt() / y)
        .collect();
    Ok((mb.eval(&args, settings)? / y).max(0.0))
}

/// Distribution of `Y = sum_i X_i` at `y >= 0`.
pub fn sum_product_cdf(bank: &ChainBank, y: f64, ctrl: &SeriesControl) -> Result<f64> {
    sum_product_cdf_with(bank, y, ctrl, &ContourSettings::default())
}

pub fn sum_product_cdf_with(
    bank: &ChainBank,
    y: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::Domain(format!("sum_product_cdf requires y >= 0, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    bank.ensure_closed_form()?;
    let mb = bank_integrand(bank, ctrl, true)?;
    let args: Vec<f64> = bank
        .chains()
        .iter()
        .map(|c| c.scale_product().sqrt() / y)
        .collect();
    clamp_unit(mb.eval(&args, settings)?, "sum_product_cdf")
}

/// Truncation error of the bank's series at `M` terms per index:
/// `eps(M) = 1 - prod_{i,l} sum_{j<=M} w_j^{(i,l)}`.
pub fn truncation_error(bank: &ChainBank, m_terms: usize) -> Result<f64> {
    if m_terms == 0 {
        return Err(Error::InvalidParameter("truncation order must be >= 1".into()));
    }
    let ctrl = SeriesControl { max_terms: m_terms + 1, target_epsilon: f64::MIN_POSITIVE };
    let mut prod = 1.0;
    for chain in bank.chains() {
        for hop in chain.hops() {
            let ws = weights(hop, &ctrl)?;
            let mass: f64 = ws.iter().take(m_terms + 1).sum();
            prod *= mass;
        }
    }
    Ok((1.0 - prod).clamp(0.0, 1.0))
}

fn clamp_unit(v: f64, what: &str) -> Result<f64> {
    if !(-1e-6..=1.0 + 1e-6).contains(&v) {
        log::warn!("{what}: value {v:.6e} strays outside [0,1] beyond tolerance");
    }
    Ok(v.clamp(0.0, 1.0))
}
