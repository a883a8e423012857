//! RIS-assisted link: end-to-end SNR, the per-element binary-search phase
//! optimizer with its consensus fixed point, and outage / bit-error metrics.

use crate::error::{Error, Result};
use crate::ftr::{FtrParams, SeriesControl};
use crate::quad::adaptive_simpson;
use crate::special::contour::{ContourSettings, GammaFactor, GammaSeries, MellinBarnes, SharedFactor, VarBlock};
use crate::special::gamma::{gamma, ln_gamma};
use crate::stats::{ChainBank, HopChain};
use std::f64::consts::PI;

/// One reflecting element: its two hops, their channel phases, and the
/// controllable shift.
#[derive(Debug, Clone, Copy)]
pub struct RisElement {
    pub hop1: FtrParams,
    pub hop2: FtrParams,
    /// Input-side channel phase.
    pub theta1: f64,
    /// Output-side channel phase.
    pub theta2: f64,
    /// Controllable shift applied by the element.
    pub phi: f64,
}

/// The reflecting surface plus transmit and noise powers. The reflection
/// amplitude is fixed at one.
#[derive(Debug, Clone)]
pub struct RisLink {
    elements: Vec<RisElement>,
    pub power: f64,
    pub noise: f64,
}

impl RisLink {
    pub fn new(elements: Vec<RisElement>, power: f64, noise: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("a RIS needs at least one element".into()));
        }
        if !(power > 0.0) || !(noise > 0.0) {
            return Err(Error::InvalidParameter("powers must be positive".into()));
        }
        Ok(Self { elements, power, noise })
    }

    pub fn elements(&self) -> &[RisElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn set_phi(&mut self, idx: usize, phi: f64) {
        self.elements[idx].phi = phi.rem_euclid(2.0 * PI);
    }

    /// Total per-element phase `theta1 + theta2 + phi`.
    pub fn total_phase(&self, idx: usize) -> f64 {
        let el = &self.elements[idx];
        el.theta1 + el.theta2 + el.phi
    }

    /// The element channels as a bank of two-hop chains.
    pub fn chain_bank(&self) -> Result<ChainBank> {
        let chains = self
            .elements
            .iter()
            .map(|el| HopChain::new(vec![el.hop1, el.hop2]))
            .collect::<Result<Vec<_>>>()?;
        ChainBank::new(chains)
    }
}

/// Instantaneous SNR for given element amplitudes under the configured
/// phases: `|sum_l h_l g_l e^{i(theta1+theta2+phi)}|^2 P / o^2`.
pub fn snr_instant(link: &RisLink, h: &[f64], g: &[f64]) -> Result<f64> {
    if h.len() != link.len() || g.len() != link.len() {
        return Err(Error::InvalidParameter(format!(
            "amplitude lists must have length {} (got {} and {})",
            link.len(),
            h.len(),
            g.len()
        )));
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (idx, (hv, gv)) in h.iter().zip(g).enumerate() {
        let total = link.total_phase(idx);
        re += hv * gv * total.cos();
        im += hv * gv * total.sin();
    }
    Ok((re * re + im * im) * link.power / link.noise)
}

/// Co-phased upper bound `(sum_l h_l g_l)^2 P / o^2`.
pub fn snr_max(link: &RisLink, h: &[f64], g: &[f64]) -> Result<f64> {
    if h.len() != link.len() || g.len() != link.len() {
        return Err(Error::InvalidParameter(format!(
            "amplitude lists must have length {} (got {} and {})",
            link.len(),
            h.len(),
            g.len()
        )));
    }
    let amp: f64 = h.iter().zip(g).map(|(a, b)| a * b).sum();
    Ok(amp * amp * link.power / link.noise)
}

/// CDF of the co-phased end-to-end SNR: the sum-of-products law evaluated at
/// `y = sqrt(z o^2 / P)`.
pub fn ris_snr_cdf(link: &RisLink, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    if z < 0.0 {
        return Err(Error::Domain(format!("ris_snr_cdf requires z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let bank = link.chain_bank()?;
    crate::stats::sum_product_cdf(&bank, (z * link.noise / link.power).sqrt(), ctrl)
}

/// Density of the co-phased end-to-end SNR.
pub fn ris_snr_pdf(link: &RisLink, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("ris_snr_pdf requires z > 0, got {z}")));
    }
    let bank = link.chain_bank()?;
    let y = (z * link.noise / link.power).sqrt();
    let dy_dz = 0.5 * y / z;
    Ok(crate::stats::sum_product_pdf(&bank, y, ctrl)? * dy_dz)
}

/// Outage probability at threshold `gamma_th`.
pub fn ris_outage(link: &RisLink, gamma_th: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(gamma_th > 0.0) {
        return Err(Error::Domain(format!("threshold must be positive, got {gamma_th}")));
    }
    ris_snr_cdf(link, gamma_th, ctrl)
}

/// Per-element expected products `E[h g]` and their sum, the co-phased
/// received-amplitude ceiling.
pub fn expectation_opt(link: &RisLink, ctrl: &SeriesControl) -> Result<(f64, Vec<f64>)> {
    let mut per_element = Vec::with_capacity(link.len());
    for el in link.elements() {
        let chain = HopChain::new(vec![el.hop1, el.hop2])?;
        per_element.push(crate::stats::product_moment(&chain, 1.0, ctrl)?);
    }
    Ok((per_element.iter().sum(), per_element))
}

/// Anything that can report the expected received amplitude for a full probe
/// phase vector. Implementations must be deterministic per `(seed, phi)`.
pub trait MeasurementOracle {
    fn measure(&self, phi: &[f64]) -> f64;
}

/// Noise-free oracle: the modulus of the expected phasor sum, built from
/// per-element first moments.
pub struct ExactMeasurementOracle {
    amplitudes: Vec<f64>,
    theta_sums: Vec<f64>,
}

impl ExactMeasurementOracle {
    pub fn new(link: &RisLink, ctrl: &SeriesControl) -> Result<Self> {
        let (_, amplitudes) = expectation_opt(link, ctrl)?;
        let theta_sums = link.elements().iter().map(|el| el.theta1 + el.theta2).collect();
        Ok(Self { amplitudes, theta_sums })
    }
}

impl MeasurementOracle for ExactMeasurementOracle {
    fn measure(&self, phi: &[f64]) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for ((a, th), p) in self.amplitudes.iter().zip(&self.theta_sums).zip(phi) {
            re += a * (th + p).cos();
            im += a * (th + p).sin();
        }
        re.hypot(im)
    }
}

/// Search depth per element, outer sweep count.
#[derive(Debug, Clone, Copy)]
pub struct PhaseOptimizerConfig {
    /// Halving iterations per element (each probing two candidates).
    pub inner_iters: usize,
    /// Full passes over the elements.
    pub sweeps: usize,
}

impl Default for PhaseOptimizerConfig {
    fn default() -> Self {
        Self { inner_iters: 14, sweeps: 4 }
    }
}

/// Binary-search phase alignment.
///
/// For each element in turn the two candidates start a half-turn apart; each
/// iteration keeps the better probe and halves the spacing around it, all
/// modulo `2 pi`. After the configured sweeps the element shifts are the
/// final winners. Returns the shifts and the measured-amplitude trace (one
/// entry per element visit).
pub fn optimize_phases(
    link: &RisLink,
    cfg: &PhaseOptimizerConfig,
    oracle: &dyn MeasurementOracle,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if cfg.inner_iters == 0 || cfg.sweeps == 0 {
        return Err(Error::InvalidParameter("optimizer iteration counts must be positive".into()));
    }
    let l = link.len();
    let mut phi: Vec<f64> = link.elements().iter().map(|el| el.phi).collect();
    let mut trace = Vec::with_capacity(cfg.sweeps * l);
    let tau = 2.0 * PI;
    for _ in 0..cfg.sweeps {
        for idx in 0..l {
            let mut lo = 0.0f64;
            let mut hi = PI;
            let mut best = phi[idx];
            let mut best_val = f64::NEG_INFINITY;
            for t in 1..=cfg.inner_iters {
                let probe = |cand: f64, phi: &mut Vec<f64>| {
                    let prev = phi[idx];
                    phi[idx] = cand.rem_euclid(tau);
                    let v = oracle.measure(phi);
                    phi[idx] = prev;
                    v
                };
                let e_lo = probe(lo, &mut phi);
                let e_hi = probe(hi, &mut phi);
                let (winner, val) = if e_lo > e_hi { (lo, e_lo) } else { (hi, e_hi) };
                if val > best_val {
                    best_val = val;
                    best = winner;
                }
                let step = PI / (1u64 << (t + 1)) as f64;
                lo = (winner + step).rem_euclid(tau);
                hi = (winner - step).rem_euclid(tau);
            }
            phi[idx] = best.rem_euclid(tau);
            trace.push(best_val);
        }
    }
    Ok((phi, trace))
}

/// Consensus phase of the alignment recurrence:
/// `phi = 2/(L^2 - L) * sum_{l=2..L} (l-1) alpha_l`.
pub fn phase_fixed_point(alpha: &[f64]) -> Result<f64> {
    let l = alpha.len();
    if l < 2 {
        return Err(Error::InvalidParameter(
            "the consensus fixed point needs at least two elements".into(),
        ));
    }
    let weighted: f64 = alpha
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| i as f64 * a)
        .sum();
    Ok(2.0 / (l as f64 * l as f64 - l as f64) * weighted)
}

/// Closed-form average bit-error probability for binary modulation `(p, q)`
/// under co-phased operation:
///
/// ```text
/// Pe = (2 G(p))^{-1} (2 pi i)^{-L} ∮..∮ G(p + Σs/2)/G(1+Σs)
///      prod_i [G(s_i) T_i1(-s_i/2) T_i2(-s_i/2)] prod_i z_i^{-s_i} ds
/// ```
///
/// with `z_i = sqrt(q P / o^2) * sqrt(2 s_i1^2) sqrt(2 s_i2^2)`.
pub fn ris_abep(link: &RisLink, p: f64, q: f64, ctrl: &SeriesControl) -> Result<f64> {
    ris_abep_with(link, p, q, ctrl, &ContourSettings::default())
}

pub fn ris_abep_with(
    link: &RisLink,
    p: f64,
    q: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::Domain("modulation parameters must be positive".into()));
    }
    if link.len() > crate::special::contour::MAX_DIM {
        return Err(Error::DimensionCap(format!(
            "closed-form ABEP supports up to {} elements (got {}); \
             use the Eq-style quadrature over the Monte-Carlo CDF instead",
            crate::special::contour::MAX_DIM,
            link.len()
        )));
    }
    let mut vars = Vec::with_capacity(link.len());
    let mut args = Vec::with_capacity(link.len());
    for el in link.elements() {
        let mut series = Vec::with_capacity(2);
        for hop in [&el.hop1, &el.hop2] {
            let ws = crate::ftr::weights(hop, ctrl)?;
            let amps = ws
                .iter()
                .enumerate()
                .map(|(j, w)| w * (-ln_gamma(1.0 + j as f64)).exp())
                .collect();
            series.push(GammaSeries { amps, shift: 1.0, step: 1.0, slope: -0.5 });
        }
        vars.push(VarBlock {
            gammas: vec![GammaFactor { shift: 0.0, slope: 1.0, inverse: false }],
            series,
            abscissa: Some(1.0),
        });
        args.push(
            (q * link.power / link.noise).sqrt()
                * (2.0 * el.hop1.sigma2()).sqrt()
                * (2.0 * el.hop2.sigma2()).sqrt(),
        );
    }
    let mb = MellinBarnes {
        vars,
        shared: vec![
            SharedFactor { shift: p, slope: 0.5, inverse: false },
            SharedFactor { shift: 1.0, slope: 1.0, inverse: true },
        ],
    };
    let v = mb.eval(&args, settings)? / (2.0 * gamma(p));
    Ok(v.clamp(0.0, 0.5))
}

/// Quadrature route for the ABEP:
/// `q^p/(2 G(p)) int z^{p-1} e^{-qz} F(z) dz` with the co-phased SNR CDF
/// under the integral. Exact counterpart and oracle of [`ris_abep`].
pub fn ris_abep_quadrature(link: &RisLink, p: f64, q: f64, ctrl: &SeriesControl) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::Domain("modulation parameters must be positive".into()));
    }
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let z = u * u;
        2.0 * u * z.powf(p - 1.0) * (-q * z).exp() * ris_snr_cdf(link, z, ctrl).unwrap_or(1.0)
    };
    let span = (30.0 / q).sqrt().max(3.0);
    let (v, _) = adaptive_simpson(&integrand, 0.0, span, 1e-8)?;
    Ok(v * q.powf(p) / (2.0 * gamma(p)))
}
