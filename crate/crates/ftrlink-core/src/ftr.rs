//! The fluctuating two-ray (FTR) fading law.
//!
//! The squared envelope follows a gamma mixture
//!
//! ```text
//! f(x) = sum_j w_j * x^j e^{-x/(2 sigma^2)} / (Gamma(j+1) (2 sigma^2)^{j+1})
//! w_j  = m^m K^j d_j / (Gamma(m) j!)
//! ```
//!
//! with mixture coefficients `d_j` built from binomials, gamma values and
//! Legendre functions of the first kind. The weights sum to one, so every
//! distribution-level quantity reduces to weighted gamma-family terms.

use crate::error::{Error, Result};
use crate::special::gamma::{ln_gamma, reg_lower_gamma};
use crate::special::legendre::legendre_p;
use dashmap::DashMap;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma as GammaDist, StandardNormal};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock};

/// One hop's FTR fading law.
///
/// - `m`: severity of the specular fluctuation (gamma shape),
/// - `k`: specular-to-diffuse power ratio,
/// - `delta`: similarity of the two specular rays, in `[0, 1]`,
/// - `sigma2`: variance of each diffuse quadrature component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtrParams {
    m: f64,
    k: f64,
    delta: f64,
    sigma2: f64,
}

impl FtrParams {
    pub fn new(m: f64, k: f64, delta: f64, sigma2: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!("K must be non-negative, got {k}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!("delta must lie in [0,1], got {delta}")));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma^2 must be positive, got {sigma2}")));
        }
        Ok(Self { m, k, delta, sigma2 })
    }

    /// Construct from the mean squared envelope `ups = 2 sigma^2 (1+K)`.
    pub fn from_avg_power(m: f64, k: f64, delta: f64, avg_power: f64) -> Result<Self> {
        if !(avg_power > 0.0) || !avg_power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "average power must be positive, got {avg_power}"
            )));
        }
        Self::new(m, k, delta, avg_power / (2.0 * (1.0 + k)))
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Mean of the squared envelope, `2 sigma^2 (1+K)`.
    pub fn avg_power(&self) -> f64 {
        2.0 * self.sigma2 * (1.0 + self.k)
    }

    /// Specular amplitudes solved from (K, delta):
    /// `V_{1,2} = sigma sqrt(K (1 ± sqrt(1-delta^2)))`, the unique
    /// non-negative pair with `V1^2+V2^2 = 2 sigma^2 K` and
    /// `2 V1 V2/(V1^2+V2^2) = delta`.
    pub fn specular_amplitudes(&self) -> (f64, f64) {
        let s = (1.0 - self.delta * self.delta).sqrt();
        let sig = self.sigma2.sqrt();
        (sig * (self.k * (1.0 + s)).sqrt(), sig * (self.k * (1.0 - s)).sqrt())
    }

    pub(crate) fn shape_key(&self) -> (u64, u64, u64) {
        (self.m.to_bits(), self.k.to_bits(), self.delta.to_bits())
    }
}

/// Truncation control for the fading series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Hard cap on the number of series terms per index.
    pub max_terms: usize,
    /// Stop early once the residual mass falls below this target.
    pub target_epsilon: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { max_terms: 200, target_epsilon: 1e-12 }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, target_epsilon: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be >= 1".into()));
        }
        if !(target_epsilon > 0.0) {
            return Err(Error::InvalidParameter("target_epsilon must be positive".into()));
        }
        Ok(Self { max_terms, target_epsilon })
    }

    fn cache_key(&self) -> (usize, u64) {
        (self.max_terms, self.target_epsilon.to_bits())
    }
}

/// Mixture coefficient `d_n`.
///
/// The double binomial sum carries the ray phase `e^{i pi (2l-k)/2}` and the
/// branch factor `e^{i pi (2l-k)/2}` of the on-cut Legendre convention
/// continued to `x > 1`; their product multiplies the real hyperboloidal
/// `legendre_p`. The imaginary part of the accumulated complex sum must
/// cancel and is asserted negligible before being discarded.
pub fn coefficient_d(n: usize, params: &FtrParams) -> Result<f64> {
    let (m, big_k, delta) = (params.m, params.k, params.delta);
    let base = (m + big_k).powi(2) - (big_k * delta).powi(2);
    let x0 = (m + big_k) / base.sqrt();
    let ln_base_pow = -0.5 * (n as f64 + m) * base.ln();

    let mut acc = Complex64::new(0.0, 0.0);
    let mut ln_binom_n = 0.0; // ln C(n, k), updated incrementally
    for kk in 0..=n {
        if kk > 0 {
            ln_binom_n += ((n - kk + 1) as f64).ln() - (kk as f64).ln();
        }
        let ln_half_delta_pow = if kk == 0 {
            0.0
        } else if delta == 0.0 {
            continue;
        } else {
            kk as f64 * (0.5 * delta).ln()
        };
        let mut ln_binom_k = 0.0; // ln C(k, l)
        for ll in 0..=kk {
            if ll > 0 {
                ln_binom_k += ((kk - ll + 1) as f64).ln() - (ll as f64).ln();
            }
            let order = kk as i64 - 2 * ll as i64;
            let gamma_arg = n as f64 + m + 2.0 * ll as f64 - kk as f64;
            let legendre = legendre_p(n as f64 + m - 1.0, order as i32, x0)?;
            let magnitude_ln =
                ln_binom_n + ln_half_delta_pow + ln_binom_k + ln_gamma(gamma_arg) + ln_base_pow;
            let half_turns = (2 * ll as i64 - kk as i64) as f64;
            let ray_phase = Complex64::from_polar(1.0, FRAC_PI_2 * half_turns);
            let branch_phase = Complex64::from_polar(1.0, FRAC_PI_2 * half_turns);
            acc += ray_phase * branch_phase * magnitude_ln.exp() * legendre;
        }
    }
    if acc.im.abs() > 1e-10 * (1.0 + acc.re.abs()) {
        return Err(Error::Convergence(format!(
            "coefficient_d({n}): imaginary residue {:.3e} did not cancel",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Mixture weight `w_j = m^m K^j d_j / (Gamma(m) j!)`.
pub fn weight(j: usize, params: &FtrParams) -> Result<f64> {
    if j > 0 && params.k == 0.0 {
        return Ok(0.0);
    }
    let d = coefficient_d(j, params)?;
    let mut ln_pref = params.m * params.m.ln() - ln_gamma(params.m);
    if j > 0 {
        ln_pref += j as f64 * params.k.ln() - ln_gamma(j as f64 + 1.0);
    }
    Ok(d * ln_pref.exp())
}

type WeightsKey = ((u64, u64, u64), (usize, u64));
static WEIGHT_CACHE: OnceLock<DashMap<WeightsKey, Arc<Vec<f64>>>> = OnceLock::new();

/// Weight table under the stop rule: stop at `ctrl.max_terms`, or as soon as
/// the residual mass falls below `ctrl.target_epsilon`, or after three
/// consecutive terms each contributing below 1e-14 relative mass.
///
/// Tables are memoized per `(params shape, ctrl)`; concurrent readers share
/// the cached slice, the first writer fills it.
pub fn weights(params: &FtrParams, ctrl: &SeriesControl) -> Result<Arc<Vec<f64>>> {
    let cache = WEIGHT_CACHE.get_or_init(DashMap::new);
    let key = (params.shape_key(), ctrl.cache_key());
    if let Some(hit) = cache.get(&key) {
        return Ok(hit.clone());
    }
    let mut out = Vec::new();
    let mut mass = 0.0;
    let mut tiny_run = 0u32;
    for j in 0..ctrl.max_terms {
        let w = weight(j, params)?;
        out.push(w);
        mass += w;
        if params.k == 0.0 {
            break; // only j = 0 survives
        }
        if 1.0 - mass < ctrl.target_epsilon {
            break;
        }
        if w.abs() < 1e-14 * mass.abs().max(1e-300) {
            tiny_run += 1;
            if tiny_run >= 3 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    let deficit = 1.0 - out.iter().sum::<f64>();
    if deficit > ctrl.target_epsilon {
        log::warn!(
            "FTR series truncated at {} terms with residual mass {:.3e} (target {:.1e})",
            out.len(),
            deficit,
            ctrl.target_epsilon
        );
    }
    let arc = Arc::new(out);
    cache.insert(key, arc.clone());
    Ok(arc)
}

/// Density of the squared envelope at `x >= 0`.
pub fn pdf_squared(params: &FtrParams, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("pdf_squared requires x >= 0, got {x}")));
    }
    let ws = weights(params, ctrl)?;
    let two_s2 = 2.0 * params.sigma2;
    if x == 0.0 {
        return Ok(ws[0] / two_s2); // only the j = 0 term survives at the origin
    }
    let lx = x.ln();
    let mut total = 0.0;
    for (j, w) in ws.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let jf = j as f64;
        let ln_term = jf * lx - x / two_s2 - ln_gamma(jf + 1.0) - (jf + 1.0) * two_s2.ln();
        if ln_term > -745.0 {
            total += w * ln_term.exp();
        }
    }
    Ok(total.max(0.0))
}

/// Distribution of the squared envelope at `x >= 0`.
pub fn cdf_squared(params: &FtrParams, x: f64, ctrl: &SeriesControl) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("cdf_squared requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ws = weights(params, ctrl)?;
    let arg = x / (2.0 * params.sigma2);
    let mut total = 0.0;
    for (j, w) in ws.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        total += w * reg_lower_gamma(j as f64 + 1.0, arg)?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Envelope density: `2 r * pdf_squared(r^2)`.
pub fn envelope_pdf(params: &FtrParams, r: f64, ctrl: &SeriesControl) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::Domain(format!("envelope_pdf requires r >= 0, got {r}")));
    }
    Ok(2.0 * r * pdf_squared(params, r * r, ctrl)?)
}

/// Envelope distribution: `cdf_squared(r^2)`.
pub fn envelope_cdf(params: &FtrParams, r: f64, ctrl: &SeriesControl) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::Domain(format!("envelope_cdf requires r >= 0, got {r}")));
    }
    cdf_squared(params, r * r, ctrl)
}

/// Raw envelope moment `E[R^s]`, `s` may be fractional.
pub fn envelope_moment(params: &FtrParams, s: f64, ctrl: &SeriesControl) -> Result<f64> {
    let ws = weights(params, ctrl)?;
    let two_s2 = 2.0 * params.sigma2;
    let mut total = 0.0;
    for (j, w) in ws.iter().enumerate() {
        let jf = j as f64;
        total +=
            w * (0.5 * s * two_s2.ln() + ln_gamma(1.0 + jf + 0.5 * s) - ln_gamma(1.0 + jf)).exp();
    }
    Ok(total)
}

/// Draw one FTR envelope using the caller's RNG:
/// `R = |sqrt(zeta) (V1 e^{i phi1} + V2 e^{i phi2}) + X + iY|` with
/// `zeta ~ Gamma(m, 1/m)` (unit mean), uniform independent ray phases, and
/// `X, Y ~ N(0, sigma^2)`.
pub fn draw_envelope<R: Rng + ?Sized>(params: &FtrParams, rng: &mut R) -> f64 {
    let (v1, v2) = params.specular_amplitudes();
    let sqrt_zeta = if params.k == 0.0 {
        0.0
    } else {
        GammaDist::new(params.m, 1.0 / params.m)
            .expect("shape validated at construction")
            .sample(rng)
            .sqrt()
    };
    let phi1 = rng.gen::<f64>() * 2.0 * PI;
    let phi2 = rng.gen::<f64>() * 2.0 * PI;
    let sig = params.sigma2.sqrt();
    let x: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng) * sig;
    let y: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng) * sig;
    let re = sqrt_zeta * (v1 * phi1.cos() + v2 * phi2.cos()) + x;
    let im = sqrt_zeta * (v1 * phi1.sin() + v2 * phi2.sin()) + y;
    re.hypot(im)
}

/// I.i.d. envelope draws, reproducible from the seed.
pub fn sample_envelope(params: &FtrParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| draw_envelope(params, &mut rng)).collect())
}

/// Exact integral form of `d_n` from the generative model,
/// `d_n = Gamma(m+n)/pi * int_0^pi (1+delta cos t)^n (m+K+K delta cos t)^{-(n+m)} dt`,
/// used by the validation suite as an independent route to the coefficients.
pub fn coefficient_d_integral(n: usize, params: &FtrParams) -> Result<f64> {
    let (m, k, delta) = (params.m, params.k, params.delta);
    let nf = n as f64;
    // normalize by the peak (t = 0) so the quadrature tolerance is relative
    let ln_peak = nf * (1.0 + delta).ln() - (nf + m) * (m + k + k * delta).ln();
    let f = move |t: f64| {
        let c = t.cos();
        (nf * (1.0 + delta * c).ln() - (nf + m) * (m + k + k * delta * c).ln() - ln_peak).exp()
    };
    // the peak sharpens with n; resolve its panel separately
    let split = (1.0 / (nf + 1.0)).min(0.5);
    let (head, _) = crate::quad::adaptive_simpson(&f, 0.0, split, 1e-13)?;
    let (tail, _) = crate::quad::adaptive_simpson(&f, split, PI, 1e-13)?;
    Ok((ln_gamma(m + nf) + ln_peak + ((head + tail) / PI).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson_half_line;

    fn ctrl() -> SeriesControl {
        SeriesControl { max_terms: 60, target_epsilon: 1e-12 }
    }

    fn canonical() -> FtrParams {
        FtrParams::new(5.0, 3.0, 0.5, 0.5).unwrap()
    }

    #[test]
    fn delta_zero_collapse() {
        // d_n = Gamma(n+m) (m+K)^{-(n+m)} when delta = 0
        let p = FtrParams::new(2.5, 1.7, 0.0, 1.0).unwrap();
        for n in [0usize, 3, 7] {
            let want = (ln_gamma(n as f64 + 2.5) - (n as f64 + 2.5) * (2.5 + 1.7_f64).ln()).exp();
            let got = coefficient_d(n, &p).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn coefficients_match_generative_integral() {
        for (m, k, d) in [(5.0, 3.0, 0.5), (2.7, 4.0, 0.8), (10.0, 7.0, 0.7)] {
            let p = FtrParams::new(m, k, d, 1.0).unwrap();
            for n in [0usize, 1, 2, 5, 11] {
                let got = coefficient_d(n, &p).unwrap();
                let want = coefficient_d_integral(n, &p).unwrap();
                assert!(
                    (got - want).abs() < 1e-9 * want.abs().max(1e-30),
                    "m={m} K={k} delta={d} n={n}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn frozen_high_precision_values() {
        // frozen from the generative-model integral in 30-digit arithmetic
        let p = canonical();
        let frozen = [
            (0usize, 9.5155386597529600818e-4),
            (1, 4.9156790242697657769e-4),
            (2, 3.2358005952931211405e-4),
        ];
        for (n, want) in frozen {
            let got = coefficient_d(n, &p).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "n={n}: got {got:.16e}, frozen {want:.16e}"
            );
        }
    }

    #[test]
    fn weights_normalize_and_mass_is_monotone() {
        let ws =
            weights(&canonical(), &SeriesControl { max_terms: 45, target_epsilon: 1e-11 }).unwrap();
        let mass: f64 = ws.iter().sum();
        assert!((1.0 - mass).abs() < 1e-10, "mass {mass}");
        let mut acc = 0.0;
        for w in ws.iter() {
            assert!(*w >= -1e-15);
            acc += w;
            assert!(acc <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn k_zero_reduces_to_exponential() {
        let p = FtrParams::new(3.0, 0.0, 0.3, 0.7).unwrap();
        let c = ctrl();
        let two_s2 = 2.0 * 0.7;
        for x in [0.0, 0.4, 2.2] {
            let got = pdf_squared(&p, x, &c).unwrap();
            let want = (-x / two_s2).exp() / two_s2;
            assert!((got - want).abs() < 1e-12, "x={x}");
            let gc = cdf_squared(&p, x, &c).unwrap();
            let wc = 1.0 - (-x / two_s2).exp();
            assert!((gc - wc).abs() < 1e-12);
        }
    }

    #[test]
    fn pdf_normalizes_and_mean_matches() {
        let p = canonical();
        let c = ctrl();
        let (mass, _) =
            adaptive_simpson_half_line(&|x| pdf_squared(&p, x, &c).unwrap(), p.avg_power(), 1e-9)
                .unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
        let (mean, _) = adaptive_simpson_half_line(
            &|x| x * pdf_squared(&p, x, &c).unwrap(),
            p.avg_power(),
            1e-9,
        )
        .unwrap();
        assert!((mean - 4.0).abs() < 1e-5, "mean {mean}"); // 2 sigma^2 (1+K) = 4
    }

    #[test]
    fn cdf_is_derivative_consistent_and_monotone() {
        let p = canonical();
        let c = ctrl();
        let mut prev = 0.0;
        for i in 1..40 {
            let x = 0.3 * i as f64;
            let cdf = cdf_squared(&p, x, &c).unwrap();
            assert!(cdf >= prev - 1e-12, "monotonicity broke at {x}");
            prev = cdf;
            let h = 1e-5 * (1.0 + x);
            let num = (cdf_squared(&p, x + h, &c).unwrap()
                - cdf_squared(&p, x - h, &c).unwrap())
                / (2.0 * h);
            let pdf = pdf_squared(&p, x, &c).unwrap();
            assert!(
                (num - pdf).abs() <= 1e-4 * pdf.abs().max(1e-12),
                "x={x}: derivative {num} vs pdf {pdf}"
            );
        }
    }

    #[test]
    fn envelope_relations() {
        let p = canonical();
        let c = ctrl();
        assert_eq!(envelope_cdf(&p, 0.0, &c).unwrap(), 0.0);
        let r = 1.3;
        assert!(
            (envelope_pdf(&p, r, &c).unwrap() - 2.0 * r * pdf_squared(&p, r * r, &c).unwrap())
                .abs()
                < 1e-15
        );
        let (mass, _) =
            adaptive_simpson_half_line(&|r| envelope_pdf(&p, r, &c).unwrap(), 2.0, 1e-9).unwrap();
        assert!((mass - 1.0).abs() < 1e-6);
        // K = 0 envelope is Rayleigh
        let ray = FtrParams::new(2.0, 0.0, 0.0, 0.8).unwrap();
        let got = envelope_pdf(&ray, 1.1, &c).unwrap();
        let want = 1.1 / 0.8 * (-1.1f64 * 1.1 / 1.6).exp();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn sampler_matches_second_moment() {
        let p = canonical();
        let n = 200_000;
        let xs = sample_envelope(&p, n, 0xFEED).unwrap();
        let mean_sq: f64 = xs.iter().map(|r| r * r).sum::<f64>() / n as f64;
        let var: f64 =
            xs.iter().map(|r| (r * r - mean_sq).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!((mean_sq - 4.0).abs() < 4.0 * se, "mean {mean_sq}, se {se}");
    }

    #[test]
    fn sampler_ks_against_analytic_cdf() {
        let p = canonical();
        let c = SeriesControl { max_terms: 30, target_epsilon: 1e-9 };
        let n = 100_000;
        let mut xs = sample_envelope(&p, n, 2024).unwrap();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut dmax: f64 = 0.0;
        for (i, r) in xs.iter().enumerate() {
            let f = envelope_cdf(&p, *r, &c).unwrap();
            dmax = dmax.max((f - i as f64 / n as f64).abs());
            dmax = dmax.max((f - (i + 1) as f64 / n as f64).abs());
        }
        let crit = 1.63 / (n as f64).sqrt(); // 1% level
        assert!(dmax < crit, "KS distance {dmax} exceeds {crit}");
    }

    #[test]
    fn k_zero_sampler_is_rayleigh() {
        let p = FtrParams::new(4.0, 0.0, 0.0, 0.6).unwrap();
        let c = ctrl();
        let n = 100_000;
        let mut xs = sample_envelope(&p, n, 7).unwrap();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut dmax: f64 = 0.0;
        for (i, r) in xs.iter().enumerate() {
            let f = envelope_cdf(&p, *r, &c).unwrap();
            dmax = dmax.max((f - i as f64 / n as f64).abs());
        }
        assert!(dmax < 1.63 / (n as f64).sqrt());
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(FtrParams::new(0.0, 1.0, 0.5, 1.0).is_err());
        assert!(FtrParams::new(1.0, -0.1, 0.5, 1.0).is_err());
        assert!(FtrParams::new(1.0, 1.0, 1.5, 1.0).is_err());
        assert!(FtrParams::new(1.0, 1.0, 0.5, 0.0).is_err());
        assert!(SeriesControl::new(0, 1e-9).is_err());
        assert!(sample_envelope(&canonical(), 0, 1).is_err());
    }
}
