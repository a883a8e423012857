//! Adaptive quadrature on finite intervals.
//!
//! Simpson-based adaptive bisection with Richardson error control. The
//! integrands in this crate are smooth away from interval endpoints; callers
//! tame endpoint spikes with explicit variable changes before integrating.

use crate::error::{Error, Result};

/// Integrate `f` over `[a, b]` to absolute/relative tolerance `tol`.
///
/// Returns the estimate and an error bound.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("quadrature bounds must be finite".into()));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut err_acc = 0.0;
    let val = recurse(f, a, b, fa, fm, fb, whole, tol, 48, &mut err_acc)?;
    Ok((val, err_acc))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err_acc: &mut f64,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-300 {
        if depth == 0 && delta.abs() > 15.0 * tol {
            return Err(Error::Convergence(format!(
                "adaptive quadrature stalled on [{a:.6e}, {b:.6e}], residual {:.3e}",
                delta.abs()
            )));
        }
        *err_acc += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Convergence(format!(
            "adaptive quadrature depth exhausted on [{a:.6e}, {b:.6e}]"
        )));
    }
    let half_tol = 0.5 * tol;
    let l = recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1, err_acc)?;
    let r = recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1, err_acc)?;
    Ok(l + r)
}

/// Integrate a smooth function over `[0, inf)` by splitting at `scale` and
/// mapping the tail through `x = scale / t`.
pub fn adaptive_simpson_half_line<F: Fn(f64) -> f64>(f: &F, scale: f64, tol: f64) -> Result<(f64, f64)> {
    let s = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let (head, e1) = adaptive_simpson(&|x| f(x), 0.0, s, tol)?;
    let tail_f = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            let x = s / t;
            f(x) * s / (t * t)
        }
    };
    let (tail, e2) = adaptive_simpson(&tail_f, 0.0, 1.0, tol)?;
    Ok((head + tail, e1 + e2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let (v, _) = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn integrates_gaussian_tail() {
        // int_0^inf e^{-x^2} dx = sqrt(pi)/2
        let (v, _) = adaptive_simpson_half_line(&|x| (-x * x).exp(), 1.0, 1e-12).unwrap();
        assert!((v - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }
}
