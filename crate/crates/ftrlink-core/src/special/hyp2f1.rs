//! Gauss hypergeometric function 2F1 inside the unit disc.

use crate::error::{Error, Result};

/// 2F1(a, b; c; z) for |z| < 1.
///
/// Direct series for moderate |z|; for z in (0.9, 1) with `a = 1` and
/// `b - c` a non-negative integer (the shape every bit-error expression in
/// this crate produces) the series is summed through the equivalent finite
/// rational form, which stays stable as z -> 1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c == c.floor() {
        return Err(Error::Domain(format!("gauss_2f1: c = {c} is a non-positive integer")));
    }
    if !z.is_finite() || z.abs() >= 1.0 {
        return Err(Error::Domain(format!("gauss_2f1 requires |z| < 1, got z = {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z > 0.9 && a == 1.0 {
        let n = b - c;
        if n >= 0.0 && n == n.floor() && n < 400.0 {
            return Ok(f21_one_integer_shift(c, n as usize, z));
        }
    }
    series(a, b, c, z)
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0u32;
    for k in 0..2_000_000u64 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if !term.is_finite() {
            return Err(Error::Convergence(format!(
                "gauss_2f1 series overflowed at k={k}; partial sum {sum:.6e}"
            )));
        }
        if term.abs() <= 1e-16 * sum.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!(
        "gauss_2f1 series did not reach 1e-10 (a={a}, b={b}, c={c}, z={z}); partial sum {sum:.6e}"
    )))
}

/// F(1, c+n; c; z) = (1/(c)_n) * sum_k (c+k)_n z^k, expanded in the rising
/// factorial basis (k+1)_i whose geometric sums are i! / (1-z)^{i+1}.
fn f21_one_integer_shift(c: f64, n: usize, z: f64) -> f64 {
    if n == 0 {
        return 1.0 / (1.0 - z);
    }
    // p(k) = prod_{r=0}^{n-1} (c + k + r); find B_i with p(k) = sum B_i (k+1)_i
    // by triangular interpolation at k = -1, -2, ..., -(n+1).
    let np = n + 1;
    let mut pvals = vec![0.0f64; np];
    for (row, pv) in pvals.iter_mut().enumerate() {
        let k = -(row as f64) - 1.0;
        let mut p = 1.0;
        for r in 0..n {
            p *= c + k + r as f64;
        }
        *pv = p;
    }
    // basis values (k+1)_i at k = -(row+1) vanish for i > row, so the
    // interpolation system is triangular
    let rising = |k: f64, i: usize| -> f64 {
        let mut b = 1.0;
        for r in 0..i {
            b *= k + 1.0 + r as f64;
        }
        b
    };
    let mut coef = vec![0.0f64; np];
    for row in 0..np {
        let k = -(row as f64) - 1.0;
        let mut acc = pvals[row];
        for i in 0..row {
            acc -= coef[i] * rising(k, i);
        }
        coef[row] = acc / rising(k, row);
    }
    let omz = 1.0 - z;
    let mut sum = 0.0;
    let mut fact = 1.0;
    let mut pow = omz;
    for (i, cf) in coef.iter().enumerate() {
        if i > 0 {
            fact *= i as f64;
        }
        sum += cf * fact / pow;
        pow *= omz;
    }
    // divide by (c)_n
    let mut poch = 1.0;
    for r in 0..n {
        poch *= c + r as f64;
    }
    sum / poch
}
