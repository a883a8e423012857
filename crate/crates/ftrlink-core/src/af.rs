//! Amplify-and-forward relay link: end-to-end SNR with transceiver hardware
//! impairments, its distribution, the optimal power split, and outage / ABEP.
//!
//! The two-hop SNR is
//!
//! ```text
//! snr = g1 g2 / (d_h g1 g2 + c_h1 g1 + c_h2 g2 + 1)
//! ```
//!
//! and its `+1`-dropped approximation factors through
//! `Z = q1^2 q2^2 / (d q1^2 q2^2 + c1 q1^2 + c2 q2^2)` with `c_i = P_i c_hi`,
//! `d = P1 P2 d_h`. The distribution of `Z` follows from a generic
//! unit-interval integral (the quadrature route) or, for FTR hops, from a
//! two-dimensional Mellin–Barnes form (the closed-form route); the pair is
//! this module's strongest cross-check.

use crate::error::{Error, Result};
use crate::ftr::{weights, FtrParams, SeriesControl};
use crate::quad::adaptive_simpson;
use crate::special::contour::{ContourSettings, GammaFactor, GammaSeries, MellinBarnes, SharedFactor, VarBlock};
use crate::special::gamma::{ln_gamma, reg_lower_gamma, reg_upper_gamma};

/// Residual transceiver distortion levels of the two transmit stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardwareProfile {
    kappa1: f64,
    kappa2: f64,
}

impl HardwareProfile {
    pub fn new(kappa1: f64, kappa2: f64) -> Result<Self> {
        if !(kappa1 >= 0.0) || !(kappa2 >= 0.0) {
            return Err(Error::InvalidParameter(
                "impairment levels must be non-negative".into(),
            ));
        }
        Ok(Self { kappa1, kappa2 })
    }

    pub fn ideal() -> Self {
        Self { kappa1: 0.0, kappa2: 0.0 }
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }
    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    /// `c_h1 = 1 + kappa1^2`
    pub fn c_h1(&self) -> f64 {
        1.0 + self.kappa1 * self.kappa1
    }
    /// `c_h2 = 1 + kappa2^2`
    pub fn c_h2(&self) -> f64 {
        1.0 + self.kappa2 * self.kappa2
    }
    /// `d_h = kappa1^2 kappa2^2 + kappa1^2 + kappa2^2`
    pub fn d_h(&self) -> f64 {
        let (a, b) = (self.kappa1 * self.kappa1, self.kappa2 * self.kappa2);
        a * b + a + b
    }

    pub fn is_ideal(&self) -> bool {
        self.kappa1 == 0.0 && self.kappa2 == 0.0
    }
}

/// Two-hop relay link with per-hop fading laws, powers, and impairments.
#[derive(Debug, Clone)]
pub struct AfLink {
    pub hop1: FtrParams,
    pub hop2: FtrParams,
    /// Source transmit power (watts).
    pub p1: f64,
    /// Relay transmit power (watts).
    pub p2: f64,
    /// Receiver noise power (watts).
    pub noise: f64,
    pub hardware: HardwareProfile,
}

impl AfLink {
    pub fn new(
        hop1: FtrParams,
        hop2: FtrParams,
        p1: f64,
        p2: f64,
        noise: f64,
        hardware: HardwareProfile,
    ) -> Result<Self> {
        if !(p1 > 0.0) || !(p2 > 0.0) || !(noise > 0.0) {
            return Err(Error::InvalidParameter("powers and noise must be positive".into()));
        }
        Ok(Self { hop1, hop2, p1, p2, noise, hardware })
    }

    /// `c_i = P_i c_hi`
    pub fn c1(&self) -> f64 {
        self.p1 * self.hardware.c_h1()
    }
    pub fn c2(&self) -> f64 {
        self.p2 * self.hardware.c_h2()
    }
    /// `d = P1 P2 d_h`
    pub fn d(&self) -> f64 {
        self.p1 * self.p2 * self.hardware.d_h()
    }
}

/// Requested power allocation across the two phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub p1: f64,
    pub p2: f64,
}

/// Exact two-hop SNR `g1 g2 / (d_h g1 g2 + c_h1 g1 + c_h2 g2 + 1)`.
pub fn af_snr_exact(gamma1: f64, gamma2: f64, hw: &HardwareProfile) -> f64 {
    let num = gamma1 * gamma2;
    if num == 0.0 {
        return 0.0;
    }
    num / (hw.d_h() * num + hw.c_h1() * gamma1 + hw.c_h2() * gamma2 + 1.0)
}

/// `+1`-dropped approximation; reduces to the half-harmonic mean for ideal
/// hardware and upper-bounds [`af_snr_exact`] everywhere.
pub fn af_snr_approx(gamma1: f64, gamma2: f64, hw: &HardwareProfile) -> f64 {
    let num = gamma1 * gamma2;
    if num == 0.0 {
        return 0.0;
    }
    num / (hw.d_h() * num + hw.c_h1() * gamma1 + hw.c_h2() * gamma2)
}

/// Generic CDF of the approximate AF SNR at `gamma`, by quadrature of the
/// unit-interval representation
///
/// ```text
/// F(g) = 1 - pref * int_0^1 f2(g c1/(s t)) dt/t^2
///          + pref * int_0^1 F1(g c2/(s(1-t))) f2(g c1/(s t)) dt/t^2
/// ```
///
/// with `s = 1 - g d`, `pref = g c1 / s`, for arbitrary hop laws given by the
/// CDF of the first hop and the density of the second. Endpoint spikes are
/// tamed with the substitution `t = u^2` in the first integral.
pub fn af_cdf_generic(
    hop1_cdf: &dyn Fn(f64) -> f64,
    hop2_pdf: &dyn Fn(f64) -> f64,
    c1: f64,
    c2: f64,
    d: f64,
    gamma: f64,
) -> Result<f64> {
    if gamma < 0.0 {
        return Ok(0.0);
    }
    if d > 0.0 && gamma >= 1.0 / d {
        return Ok(1.0);
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let s = 1.0 - gamma * d;
    let pref = gamma * c1 / s;
    // t = u^2 softens the 1/t^2 spike against the exponentially-small density
    let i1 = adaptive_simpson(
        &|u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let t = u * u;
            hop2_pdf(pref / t) / (t * t) * 2.0 * u
        },
        0.0,
        1.0,
        1e-10,
    )?
    .0;
    let i2 = adaptive_simpson(
        &|u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let t = u * u;
            // 1-t via (1-u)(1+u) keeps the endpoint accurate; F1 -> 1 there
            let omt = (1.0 - u) * (1.0 + u);
            let f1 = if omt <= 0.0 { 1.0 } else { hop1_cdf(gamma * c2 / (s * omt)) };
            f1 * hop2_pdf(pref / t) / (t * t) * 2.0 * u
        },
        0.0,
        1.0,
        1e-10,
    )?
    .0;
    Ok((1.0 - pref * i1 + pref * i2).clamp(0.0, 1.0))
}

/// CDF of the first hop's squared envelope under the link's series control.
pub fn hop_cdf(hop: &FtrParams, ctrl: &SeriesControl) -> Result<impl Fn(f64) -> f64> {
    let ws = weights(hop, ctrl)?;
    let two_s2 = 2.0 * hop.sigma2();
    Ok(move |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let arg = x / two_s2;
        let mut acc = 0.0;
        for (j, w) in ws.iter().enumerate() {
            if *w != 0.0 {
                acc += w * reg_lower_gamma(j as f64 + 1.0, arg).unwrap_or(1.0);
            }
        }
        acc
    })
}

/// Density of a hop's squared envelope, evaluated term-wise in log space so
/// huge arguments underflow cleanly instead of overflowing.
pub fn hop_pdf(hop: &FtrParams, ctrl: &SeriesControl) -> Result<impl Fn(f64) -> f64> {
    let ws = weights(hop, ctrl)?;
    let two_s2 = 2.0 * hop.sigma2();
    Ok(move |x: f64| {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return ws[0] / two_s2;
        }
        let lx = x.ln();
        let mut acc = 0.0;
        for (j, w) in ws.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let jf = j as f64;
            let ln_t = jf * lx - x / two_s2 - ln_gamma(jf + 1.0) - (jf + 1.0) * two_s2.ln();
            if ln_t > -745.0 {
                acc += w * ln_t.exp();
            }
        }
        acc.max(0.0)
    })
}

fn hop_t_series(hop: &FtrParams, ctrl: &SeriesControl) -> Result<GammaSeries> {
    let ws = weights(hop, ctrl)?;
    let amps = ws
        .iter()
        .enumerate()
        .map(|(j, w)| w * (-ln_gamma(1.0 + j as f64)).exp())
        .collect();
    Ok(GammaSeries { amps, shift: 1.0, step: 1.0, slope: 1.0 })
}

/// Closed-form CDF of `Z` (impaired normalized SNR) at `0 <= z < 1/d`:
///
/// ```text
/// F_Z(z) = 1 - F1(A2) + F2,
/// F1     = sum_j w_j Q(1+j, A2)
/// F2     = (2 pi i)^{-2} ∮∮ T1(s) G(1+s) G(-s)/G(1-s) * T2(u) G(u)
///          / G(1+s+u) * A1^{-s} A2^{-u} ds du
/// ```
///
/// with `A1 = c2 z/(2 s1^2 (1-zd))`, `A2 = c1 z/(2 s2^2 (1-zd))`.
pub fn z_cdf(link: &AfLink, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    z_cdf_with(link, z, ctrl, &ContourSettings::default())
}

pub fn z_cdf_with(
    link: &AfLink,
    z: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    let d = link.d();
    if z < 0.0 {
        return Err(Error::Domain(format!("z_cdf requires z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if d > 0.0 && z >= 1.0 / d {
        return Ok(1.0);
    }
    let denom = 1.0 - z * d;
    let a1 = link.c2() * z / (2.0 * link.hop1.sigma2() * denom);
    let a2 = link.c1() * z / (2.0 * link.hop2.sigma2() * denom);

    let ws2 = weights(&link.hop2, ctrl)?;
    let mut f1 = 0.0;
    for (j, w) in ws2.iter().enumerate() {
        if *w != 0.0 {
            f1 += w * reg_upper_gamma(j as f64 + 1.0, a2)?;
        }
    }

    let mb = MellinBarnes {
        vars: vec![
            VarBlock {
                gammas: vec![
                    GammaFactor { shift: 1.0, slope: 1.0, inverse: false },
                    GammaFactor { shift: 0.0, slope: -1.0, inverse: false },
                    GammaFactor { shift: 1.0, slope: -1.0, inverse: true },
                ],
                series: vec![hop_t_series(&link.hop1, ctrl)?],
                abscissa: Some(-0.5),
            },
            VarBlock {
                gammas: vec![GammaFactor { shift: 0.0, slope: 1.0, inverse: false }],
                series: vec![hop_t_series(&link.hop2, ctrl)?],
                abscissa: Some(1.0),
            },
        ],
        shared: vec![SharedFactor { shift: 1.0, slope: 1.0, inverse: true }],
    };
    let f2 = mb.eval(&[a1, a2], settings)?;
    clamp_cdf(1.0 - f1 + f2, "z_cdf")
}

/// Closed-form density of `Z` at `0 < z < 1/d`:
///
/// ```text
/// f_Z(z) = 1/(z (1-zd)) * (2 pi i)^{-2} ∮∮ T1(s) G(s) T2(u) G(u) / G(s+u)
///          A1^{-s} A2^{-u} ds du
/// ```
pub fn z_pdf(link: &AfLink, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    z_pdf_with(link, z, ctrl, &ContourSettings::default())
}

pub fn z_pdf_with(
    link: &AfLink,
    z: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    let d = link.d();
    if !(z > 0.0) {
        return Err(Error::Domain(format!("z_pdf requires z > 0, got {z}")));
    }
    if d > 0.0 && z >= 1.0 / d {
        return Ok(0.0);
    }
    let denom = 1.0 - z * d;
    let a1 = link.c2() * z / (2.0 * link.hop1.sigma2() * denom);
    let a2 = link.c1() * z / (2.0 * link.hop2.sigma2() * denom);
    let var = |hop: &FtrParams| -> Result<VarBlock> {
        Ok(VarBlock {
            gammas: vec![GammaFactor { shift: 0.0, slope: 1.0, inverse: false }],
            series: vec![hop_t_series(hop, ctrl)?],
            abscissa: Some(1.0),
        })
    };
    let mb = MellinBarnes {
        vars: vec![var(&link.hop1)?, var(&link.hop2)?],
        shared: vec![SharedFactor { shift: 0.0, slope: 1.0, inverse: true }],
    };
    Ok((mb.eval(&[a1, a2], settings)? / (z * denom)).max(0.0))
}

/// Ideal-hardware end-to-end SNR CDF (`c_i = P_i`, `d = 0`), parameterized
/// directly in the SNR `gamma_af = (P1 P2 / o^2) Z`.
pub fn af_ideal_cdf(link: &AfLink, snr: f64, ctrl: &SeriesControl) -> Result<f64> {
    let ideal = AfLink { hardware: HardwareProfile::ideal(), ..link.clone() };
    if snr < 0.0 {
        return Err(Error::Domain(format!("af_ideal_cdf requires snr >= 0, got {snr}")));
    }
    z_cdf(&ideal, snr * ideal.noise / (ideal.p1 * ideal.p2), ctrl)
}

/// Ideal-hardware end-to-end SNR density.
pub fn af_ideal_pdf(link: &AfLink, snr: f64, ctrl: &SeriesControl) -> Result<f64> {
    let ideal = AfLink { hardware: HardwareProfile::ideal(), ..link.clone() };
    if !(snr > 0.0) {
        return Err(Error::Domain(format!("af_ideal_pdf requires snr > 0, got {snr}")));
    }
    let scale = ideal.noise / (ideal.p1 * ideal.p2);
    Ok(z_pdf(&ideal, snr * scale, ctrl)? * scale)
}

/// Power split maximizing the ideal approximate SNR under `P1 + P2 = 2P`:
/// `P1 = 2P |q2|/(|q1|+|q2|)`, `P2 = 2P |q1|/(|q1|+|q2|)`.
pub fn optimal_power_split(q1_mag: f64, q2_mag: f64, budget: f64) -> Result<PowerSplit> {
    if !(q1_mag > 0.0) || !(q2_mag > 0.0) {
        return Err(Error::Domain("optimal_power_split requires positive magnitudes".into()));
    }
    if !(budget > 0.0) {
        return Err(Error::InvalidParameter("power budget must be positive".into()));
    }
    let denom = q1_mag + q2_mag;
    Ok(PowerSplit {
        p1: 2.0 * budget * q2_mag / denom,
        p2: 2.0 * budget * q1_mag / denom,
    })
}

/// CDF of the power-optimized SNR `(2P/o^2) (q1 q2/(q1+q2))^2` where the
/// budget is `2P = p1 + p2`:
///
/// ```text
/// F(z) = 1 - sum_j w_j Q(1+j, B2)
///        + 2 (2 pi i)^{-2} ∮∮ T1(s) G(1+2s) G(-s)/G(1-s) * T2(u) G(2u)
///          / G(1+2s+2u) * B1^{-s} B2^{-u} ds du
/// ```
///
/// with `B_i = z o^2 / (4 P sigma_i^2)` (the doubled weights come from the
/// envelope-domain change of variables).
pub fn af_max_snr_cdf(link: &AfLink, snr: f64, ctrl: &SeriesControl) -> Result<f64> {
    af_max_snr_cdf_with(link, snr, ctrl, &ContourSettings::default())
}

pub fn af_max_snr_cdf_with(
    link: &AfLink,
    snr: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if snr < 0.0 {
        return Err(Error::Domain(format!("af_max_snr_cdf requires snr >= 0, got {snr}")));
    }
    if snr == 0.0 {
        return Ok(0.0);
    }
    let p_avg = 0.5 * (link.p1 + link.p2);
    let b1 = snr * link.noise / (4.0 * p_avg * link.hop1.sigma2());
    let b2 = snr * link.noise / (4.0 * p_avg * link.hop2.sigma2());

    let ws2 = weights(&link.hop2, ctrl)?;
    let mut f1 = 0.0;
    for (j, w) in ws2.iter().enumerate() {
        if *w != 0.0 {
            f1 += w * reg_upper_gamma(j as f64 + 1.0, b2)?;
        }
    }

    let mb = MellinBarnes {
        vars: vec![
            VarBlock {
                gammas: vec![
                    GammaFactor { shift: 1.0, slope: 2.0, inverse: false },
                    GammaFactor { shift: 0.0, slope: -1.0, inverse: false },
                    GammaFactor { shift: 1.0, slope: -1.0, inverse: true },
                ],
                series: vec![hop_t_series(&link.hop1, ctrl)?],
                abscissa: Some(-0.25),
            },
            VarBlock {
                gammas: vec![GammaFactor { shift: 0.0, slope: 2.0, inverse: false }],
                series: vec![hop_t_series(&link.hop2, ctrl)?],
                abscissa: Some(1.0),
            },
        ],
        shared: vec![SharedFactor { shift: 1.0, slope: 2.0, inverse: true }],
    };
    let f2 = 2.0 * mb.eval(&[b1, b2], settings)?;
    clamp_cdf(1.0 - f1 + f2, "af_max_snr_cdf")
}

/// Density of the power-optimized SNR:
///
/// ```text
/// f(z) = (2/z) (2 pi i)^{-2} ∮∮ T1(s) G(2s) T2(u) G(2u) / G(2s+2u)
///        B1^{-s} B2^{-u} ds du
/// ```
pub fn af_max_snr_pdf(link: &AfLink, snr: f64, ctrl: &SeriesControl) -> Result<f64> {
    af_max_snr_pdf_with(link, snr, ctrl, &ContourSettings::default())
}

pub fn af_max_snr_pdf_with(
    link: &AfLink,
    snr: f64,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(Error::Domain(format!("af_max_snr_pdf requires snr > 0, got {snr}")));
    }
    let p_avg = 0.5 * (link.p1 + link.p2);
    let b1 = snr * link.noise / (4.0 * p_avg * link.hop1.sigma2());
    let b2 = snr * link.noise / (4.0 * p_avg * link.hop2.sigma2());
    let var = |hop: &FtrParams| -> Result<VarBlock> {
        Ok(VarBlock {
            gammas: vec![GammaFactor { shift: 0.0, slope: 2.0, inverse: false }],
            series: vec![hop_t_series(hop, ctrl)?],
            abscissa: Some(1.0),
        })
    };
    let mb = MellinBarnes {
        vars: vec![var(&link.hop1)?, var(&link.hop2)?],
        shared: vec![SharedFactor { shift: 0.0, slope: 2.0, inverse: true }],
    };
    Ok((2.0 / snr * mb.eval(&[b1, b2], settings)?).max(0.0))
}

/// How the AF link is operated when computing outage or error metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfMode {
    /// Fixed `P1`, `P2` as configured on the link, impairments as configured.
    Configured,
    /// Per-realization optimal split under the budget `P1 + P2`, ideal
    /// hardware (the fair-comparison operating point).
    OptimalPower,
}

/// Outage probability: the CDF of the selected SNR at `gamma_th`.
pub fn af_outage(link: &AfLink, gamma_th: f64, mode: AfMode, ctrl: &SeriesControl) -> Result<f64> {
    if !(gamma_th > 0.0) {
        return Err(Error::Domain(format!("threshold must be positive, got {gamma_th}")));
    }
    match mode {
        AfMode::Configured => {
            if link.hardware.is_ideal() {
                af_ideal_cdf(link, gamma_th, ctrl)
            } else {
                z_cdf(link, gamma_th * link.noise / (link.p1 * link.p2), ctrl)
            }
        }
        AfMode::OptimalPower => af_max_snr_cdf(link, gamma_th, ctrl),
    }
}

/// Closed-form average bit-error probability for binary modulation `(p, q)`.
///
/// ```text
/// Pe = 1/2 - (2F1 hop-2 term) + (two-dimensional Mellin–Barnes term)
/// ```
///
/// Both terms integrate the selected SNR CDF against the conditional error
/// kernel `q^p z^{p-1} e^{-qz} / (2 Gamma(p))`. Near-unit hypergeometric
/// arguments switch to direct quadrature of the hop-2 integral.
pub fn af_abep(link: &AfLink, p: f64, q: f64, mode: AfMode, ctrl: &SeriesControl) -> Result<f64> {
    af_abep_with(link, p, q, mode, ctrl, &ContourSettings::default())
}

pub fn af_abep_with(
    link: &AfLink,
    p: f64,
    q: f64,
    mode: AfMode,
    ctrl: &SeriesControl,
    settings: &ContourSettings,
) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::Domain("modulation parameters must be positive".into()));
    }
    if !matches!(mode, AfMode::OptimalPower) && !link.hardware.is_ideal() {
        return Err(Error::InvalidParameter(
            "closed-form ABEP covers ideal-hardware operation; use the Monte-Carlo path \
             for impaired links"
                .into(),
        ));
    }
    // effective per-hop power scales: configured (2 sigma_i^2 P_i / o^2) or
    // the optimal-split doubled budget (4 sigma_i^2 P / o^2)
    let (x1, x2, front) = match mode {
        AfMode::Configured => (
            2.0 * link.hop1.sigma2() * link.p1 * q / link.noise,
            2.0 * link.hop2.sigma2() * link.p2 * q / link.noise,
            1.0,
        ),
        AfMode::OptimalPower => {
            let p_avg = 0.5 * (link.p1 + link.p2);
            (
                4.0 * link.hop1.sigma2() * p_avg * q / link.noise,
                4.0 * link.hop2.sigma2() * p_avg * q / link.noise,
                2.0,
            )
        }
    };
    // weight doubling in the contour kernel for the optimal-power law
    let wmul = match mode {
        AfMode::Configured => 1.0,
        AfMode::OptimalPower => 2.0,
    };

    // hop-2 term: sum_j w_j * q^p/(2 G(p)) * int z^{p-1} e^{-qz} Q(1+j, z/x2*q) dz
    let ws2 = weights(&link.hop2, ctrl)?;
    let zarg = x2 / (1.0 + x2);
    let mut term2 = 0.0;
    if zarg <= 0.995 {
        for (j, w) in ws2.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let jf = j as f64;
            let f21 = crate::special::gauss_2f1(1.0, p + 1.0 + jf, p + 1.0, zarg)?;
            let ln_coef = ln_gamma(p + 1.0 + jf) - ln_gamma(1.0 + jf) + p * zarg.ln()
                - (1.0 + jf) * (1.0 + x2).ln();
            term2 += w * ln_coef.exp() * f21;
        }
        term2 /= 2.0 * crate::special::gamma::gamma(p) * p;
    } else {
        // high-power regime: evaluate the defining integral directly
        let alpha = q / x2;
        for (j, w) in ws2.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let a = 1.0 + j as f64;
            let integrand = |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let z = u * u;
                2.0 * u * z.powf(p - 1.0)
                    * (-q * z).exp()
                    * reg_upper_gamma(a, alpha * z).unwrap_or(0.0)
            };
            let span = (20.0 / q).sqrt().max(2.0);
            let (v, _) = adaptive_simpson(&integrand, 0.0, span, 1e-12)?;
            term2 += w * v;
        }
        term2 *= q.powf(p) / (2.0 * crate::special::gamma::gamma(p));
    }

    // contour term: shared Gamma(p - s - u)/Gamma(1 + wmul(s + u)) with the
    // hop kernels of the selected SNR law, arguments x_i^{-1}. The shared
    // right-pole family demands c1 + c2 < p, so the hop-2 abscissa sits at
    // the window midpoint rather than its default.
    let c1a = if wmul > 1.0 { -0.35 } else { -0.75 };
    let c2a = (0.5 * (p - c1a)).clamp(0.05, 1.0);
    let mb = MellinBarnes {
        vars: vec![
            VarBlock {
                gammas: vec![
                    GammaFactor { shift: 1.0, slope: wmul, inverse: false },
                    GammaFactor { shift: 0.0, slope: -1.0, inverse: false },
                    GammaFactor { shift: 1.0, slope: -1.0, inverse: true },
                ],
                series: vec![hop_t_series(&link.hop1, ctrl)?],
                abscissa: Some(c1a),
            },
            VarBlock {
                gammas: vec![GammaFactor { shift: 0.0, slope: wmul, inverse: false }],
                series: vec![hop_t_series(&link.hop2, ctrl)?],
                abscissa: Some(c2a),
            },
        ],
        shared: vec![
            SharedFactor { shift: p, slope: -1.0, inverse: false },
            SharedFactor { shift: 1.0, slope: wmul, inverse: true },
        ],
    };
    let term3 = front * mb.eval(&[1.0 / x1, 1.0 / x2], settings)?
        / (2.0 * crate::special::gamma::gamma(p));

    Ok((0.5 - term2 + term3).clamp(0.0, 0.5))
}

/// Quadrature route for the ABEP: `q^p/(2 G(p)) int z^{p-1} e^{-qz} F(z) dz`
/// with the selected SNR CDF under the integral (the closed form's oracle).
pub fn af_abep_quadrature(
    link: &AfLink,
    p: f64,
    q: f64,
    mode: AfMode,
    ctrl: &SeriesControl,
) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::Domain("modulation parameters must be positive".into()));
    }
    let cdf = |z: f64| -> Result<f64> {
        match mode {
            AfMode::Configured => af_ideal_cdf(link, z, ctrl),
            AfMode::OptimalPower => af_max_snr_cdf(link, z, ctrl),
        }
    };
    // z = u^2 removes the z^{p-1} endpoint spike for p = 1/2-type kernels
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let z = u * u;
        2.0 * u * z.powf(p - 1.0) * (-q * z).exp() * cdf(z).unwrap_or(1.0)
    };
    let span = (30.0 / q).sqrt().max(3.0);
    let (v, _) = adaptive_simpson(&integrand, 0.0, span, 1e-9)?;
    Ok(v * q.powf(p) / (2.0 * crate::special::gamma::gamma(p)))
}

fn clamp_cdf(v: f64, what: &str) -> Result<f64> {
    if !(-1e-6..=1.0 + 1e-6).contains(&v) {
        log::warn!("{what}: value {v:.6e} strays outside [0,1] beyond tolerance");
    }
    Ok(v.clamp(0.0, 1.0))
}
