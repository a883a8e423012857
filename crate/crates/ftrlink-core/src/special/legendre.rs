//! Legendre function of the first kind on the real axis `x >= 1`
//! (the hyperboloidal branch, real-valued for real degree and integer order).

use crate::error::{Error, Result};
use crate::special::gamma::ln_gamma;

/// P^order_degree(x) for x >= 1, real degree, integer order.
///
/// Evaluated through the regularized hypergeometric series
///
/// ```text
/// P^u_v(x) = ((x+1)/(x-1))^{u/2} * sum_k (-v)_k (v+1)_k w^k / (k! Gamma(1-u+k))
/// ```
///
/// with `w = (1-x)/2`, which stays finite for every integer order. A Pfaff
/// transform keeps the series argument inside the unit disc when `x` is
/// large.
pub fn legendre_p(degree: f64, order: i32, x: f64) -> Result<f64> {
    if !(x.is_finite() && degree.is_finite()) {
        return Err(Error::InvalidParameter("legendre_p: non-finite input".into()));
    }
    if x < 1.0 {
        return Err(Error::Domain(format!(
            "legendre_p is implemented for x >= 1 only (got x = {x})"
        )));
    }
    if x == 1.0 {
        // ((x+1)/(x-1))^{u/2} diverges for u > 0, vanishes for u < 0,
        // and the k >= 1 terms vanish with w = 0.
        return Ok(match order.cmp(&0) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
            std::cmp::Ordering::Greater => {
                return Err(Error::Domain(
                    "legendre_p: positive order diverges at x = 1".into(),
                ))
            }
        });
    }

    let w = 0.5 * (1.0 - x); // < 0
    let prefactor_ln = 0.5 * order as f64 * ((x + 1.0) / (x - 1.0)).ln();
    let a = -degree;
    let b = degree + 1.0;
    let series = if w > -0.5 {
        reg_2f1_series(a, b, 1.0 - order as f64, w)?
    } else {
        // Pfaff: F~(a,b;c;w) = (1-w)^{-a} F~(a, c-b; c; w/(w-1))
        let c = 1.0 - order as f64;
        let wp = w / (w - 1.0);
        (1.0 - w).powf(-a) * reg_2f1_series(a, c - b, c, wp)?
    };
    Ok(prefactor_ln.exp() * series)
}

/// Regularized Gauss series sum_k (a)_k (b)_k w^k / (k! Gamma(c+k)),
/// entire in c (finite at non-positive integer c).
fn reg_2f1_series(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    // pochhammer products are built incrementally; the 1/Gamma(c+k) factor is
    // zero while c+k is a non-positive integer, so start accumulating at the
    // first k where it becomes finite.
    let mut sum = 0.0;
    let mut poch = 1.0; // (a)_k (b)_k w^k / k!
    let mut prev_small = 0u32;
    for k in 0..4000 {
        let ck = c + k as f64;
        let term = if ck <= 0.0 && ck == ck.floor() {
            0.0
        } else {
            poch * inv_gamma(ck)
        };
        sum += term;
        if poch == 0.0 {
            // terminating (polynomial) series: integer degree hit -v
            return Ok(sum);
        }
        // convergence is judged relative to the accumulated sum; leading
        // zero terms (positive integer order) must not count as converged
        if term != 0.0 && sum != 0.0 && term.abs() <= 1e-16 * sum.abs() {
            prev_small += 1;
            if prev_small >= 3 {
                return Ok(sum);
            }
        } else {
            prev_small = 0;
        }
        let kf = k as f64;
        poch *= (a + kf) * (b + kf) * w / (kf + 1.0);
        if !poch.is_finite() {
            return Err(Error::Convergence(format!(
                "legendre series overflowed at k={k} (a={a}, b={b}, c={c}, w={w})"
            )));
        }
    }
    Err(Error::Convergence(format!(
        "legendre series did not converge (a={a}, b={b}, c={c}, w={w})"
    )))
}

/// 1/Gamma(x) for real x away from non-positive integers.
fn inv_gamma(x: f64) -> f64 {
    if x > 0.0 {
        (-ln_gamma(x)).exp()
    } else {
        // reflection keeps the sign: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
        (std::f64::consts::PI * x).sin() * (ln_gamma(1.0 - x)).exp() / std::f64::consts::PI
    }
}
