//! Log-gamma (real and complex, principal branch) and the incomplete gamma
//! functions.
//!
//! The complex log-gamma is the workhorse of every Mellin–Barnes quadrature
//! in this crate: gamma products are accumulated as sums of `ln_gamma_complex`
//! and exponentiated once per grid node, so individual factors never overflow.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Lanczos coefficients, g = 7, n = 9 (GSL / Numerical Recipes set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Gamma(x)| for real `x` (sign handled by the caller where
/// it matters; all library call sites use x > 0).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = (PI * x).sin();
        (PI / s.abs()).ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Gamma(x) for real positive-ish arguments (overflows above ~171).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// Principal-branch complex log-gamma.
///
/// Errors on the poles (non-positive integers on the real axis). For
/// `Re z >= 0.5` the Lanczos sum is used directly; otherwise the reflection
/// formula with a branch-tracked `ln sin(pi z)`.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter("ln_gamma_complex: non-finite argument".into()));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::Domain(format!(
            "ln_gamma_complex: pole at z = {}",
            z.re
        )));
    }
    Ok(ln_gamma_complex_unchecked(z))
}

pub(crate) fn ln_gamma_complex_unchecked(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        lanczos_log(z)
    } else {
        // ln Gamma(z) = ln pi - ln sin(pi z) - ln Gamma(1 - z)
        let lnpi = Complex64::new(PI.ln(), 0.0);
        lnpi - ln_sin_pi(z) - lanczos_log(Complex64::new(1.0, 0.0) - z)
    }
}

fn lanczos_log(z: Complex64) -> Complex64 {
    let zm1 = z - Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += Complex64::new(*c, 0.0) / (zm1 + Complex64::new(i as f64, 0.0));
    }
    let t = zm1 + Complex64::new(LANCZOS_G + 0.5, 0.0);
    Complex64::new(0.5 * (2.0 * PI).ln(), 0.0) + (zm1 + Complex64::new(0.5, 0.0)) * t.ln() - t
        + acc.ln()
}

/// log(sin(pi z)) with the branch chosen so the reflection formula stays
/// continuous on each half plane.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}), |e^{2 i pi z}| <= 1
        let ipi = Complex64::new(0.0, PI);
        let w = (2.0 * ipi * z).exp();
        Complex64::new(-(2.0_f64.ln()), PI / 2.0) - ipi * z + (Complex64::new(1.0, 0.0) - w).ln()
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

/// Which incomplete-gamma integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaKind {
    Lower,
    Upper,
}

/// Non-regularized incomplete gamma: lower(a,x) + upper(a,x) = Gamma(a).
pub fn incomplete_gamma(a: f64, x: f64, kind: GammaKind) -> Result<f64> {
    let p = reg_lower_gamma(a, x)?;
    let g = gamma(a);
    Ok(match kind {
        GammaKind::Lower => p * g,
        GammaKind::Upper => (1.0 - p) * g,
    })
}

/// Regularized lower incomplete gamma P(a, x), series / continued fraction.
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    if a <= 0.0 {
        return Err(Error::Domain(format!("incomplete gamma requires a > 0, got a = {a}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("incomplete gamma requires x >= 0, got x = {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        // series: P(a,x) = x^a e^{-x} / Gamma(a) * sum_k x^k / (a)_{k+1}
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..1000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                let log_pref = a * x.ln() - x - ln_gamma(a);
                return Ok((log_pref.exp() * sum).clamp(0.0, 1.0));
            }
        }
        Err(Error::Convergence(format!("reg_lower_gamma series stalled at a={a}, x={x}")))
    } else {
        // Lentz continued fraction for Q(a,x)
        let mut b = x + 1.0 - a;
        let tiny = 1e-300;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                let log_pref = a * x.ln() - x - ln_gamma(a);
                let q = (log_pref.exp() * h).clamp(0.0, 1.0);
                return Ok(1.0 - q);
            }
        }
        Err(Error::Convergence(format!("reg_lower_gamma CF stalled at a={a}, x={x}")))
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn reg_upper_gamma(a: f64, x: f64) -> Result<f64> {
    Ok(1.0 - reg_lower_gamma(a, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;

    const TOL: f64 = 1e-12;

    #[test]
    fn ln_gamma_matches_factorials() {
        assert!((ln_gamma(1.0)).abs() < TOL);
        assert!((ln_gamma(5.0) - 24.0_f64.ln()).abs() < 1e-13);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn complex_log_gamma_real_axis() {
        let v = ln_gamma_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-13);
        let v5 = ln_gamma_complex(Complex64::new(5.0, 0.0)).unwrap();
        assert!((v5.re - 24.0_f64.ln()).abs() < 1e-13 && v5.im.abs() < 1e-13);
    }

    /// Independent oracle: high-order Stirling with argument shift.
    /// ln Gamma(z) = (z-1/2) ln z - z + ln(2 pi)/2 + sum B_{2n}/(2n(2n-1) z^{2n-1})
    /// applied after shifting z up by 10 through the recurrence.
    fn stirling_reference(mut z: Complex64) -> Complex64 {
        let mut shift = Complex64::new(0.0, 0.0);
        for _ in 0..24 {
            shift -= z.ln();
            z += 1.0;
        }
        const B: [f64; 8] = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360_360.0,
            1.0 / 156.0,
            -3617.0 / 122_400.0,
        ];
        let mut tail = Complex64::new(0.0, 0.0);
        let zinv2 = 1.0 / (z * z);
        let mut zp = 1.0 / z;
        for b in B {
            tail += b * zp;
            zp *= zinv2;
        }
        (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + tail + shift
    }

    #[test]
    fn complex_log_gamma_vs_stirling_series() {
        for &(re, im) in &[(1.0, 1.0), (0.3, -2.0), (-1.3, 0.7), (2.5, 10.0), (0.5, 0.1)] {
            let z = Complex64::new(re, im);
            let got = ln_gamma_complex(z).unwrap();
            let want = stirling_reference(z);
            // compare through exp: branch-insensitive
            let d = (got.exp() - want.exp()).norm() / want.exp().norm();
            assert!(d < 1e-11, "z={z}, got {got}, want {want}, rel {d:.2e}");
        }
    }

    #[test]
    fn complex_log_gamma_conjugate_symmetry() {
        for &(re, im) in &[(0.7, 3.0), (2.0, 0.5), (-0.4, 1.1)] {
            let z = Complex64::new(re, im);
            let a = ln_gamma_complex(z).unwrap();
            let b = ln_gamma_complex(z.conj()).unwrap();
            assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn complex_log_gamma_rejects_poles() {
        assert!(ln_gamma_complex(Complex64::new(0.0, 0.0)).is_err());
        assert!(ln_gamma_complex(Complex64::new(-3.0, 0.0)).is_err());
    }

    #[test]
    fn incomplete_gamma_closed_forms() {
        // a = 1: lower(1,x) = 1 - e^{-x}
        let v = incomplete_gamma(1.0, 1.0, GammaKind::Lower).unwrap();
        assert!((v - (1.0 - (-1.0_f64).exp())).abs() < 1e-14);
        assert_eq!(incomplete_gamma(1.0, 0.0, GammaKind::Lower).unwrap(), 0.0);
    }

    #[test]
    fn incomplete_gamma_vs_quadrature() {
        // upper(2.5, 1.3) by adaptive quadrature of the defining integral,
        // split at the effective decay scale.
        let a = 2.5;
        let x = 1.3;
        let f = |t: f64| t.powf(a - 1.0) * (-t).exp();
        let (head, _) = adaptive_simpson(&f, x, 40.0, 1e-14).unwrap();
        let got = incomplete_gamma(a, x, GammaKind::Upper).unwrap();
        assert!(
            (got - head).abs() < 1e-10 * head.abs(),
            "got {got}, quadrature {head}"
        );
    }

    #[test]
    fn incomplete_gamma_complementarity() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let a = 0.05 + 30.0 * next();
            let x = 40.0 * next();
            let lo = incomplete_gamma(a, x, GammaKind::Lower).unwrap();
            let hi = incomplete_gamma(a, x, GammaKind::Upper).unwrap();
            let g = gamma(a);
            assert!(
                ((lo + hi) - g).abs() <= 1e-12 * g,
                "complementarity failed at a={a}, x={x}"
            );
        }
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(incomplete_gamma(-1.0, 1.0, GammaKind::Lower).is_err());
        assert!(incomplete_gamma(0.0, 1.0, GammaKind::Upper).is_err());
        assert!(incomplete_gamma(1.0, -0.5, GammaKind::Lower).is_err());
    }
}
