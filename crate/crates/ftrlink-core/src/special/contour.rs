//! Mellin–Barnes contour quadrature.
//!
//! Every closed form in this crate is an integral
//!
//! ```text
//! (2 pi i)^{-D}  ∮...∮  S(s_1+...+s_D) * prod_i V_i(s_i) * prod_i z_i^{-s_i}  ds
//! ```
//!
//! over truncated vertical lines `s_i = c_i + i t`, `|t| <= half_width`, where
//! each per-variable factor `V_i` is a product of gamma factors
//! `Gamma(shift + slope * s)^{±1}` and gamma *series*
//! `sum_j amp_j Gamma(shift + j*step + slope*s)`, and the shared factor `S`
//! couples the variables only through `s_1 + ... + s_D`.
//!
//! That coupling structure makes the D-dimensional trapezoid sum collapse to
//! a sequence of 1-D convolutions: on a common grid `s_i = c_i + i*h*k`, the
//! shared factor depends only on `K = k_1 + ... + k_D`, so
//!
//! ```text
//! sum = sum_K S(K) * (V_1 ⊛ V_2 ⊛ ... ⊛ V_D)(K)
//! ```
//!
//! which costs `O(D n^2)` instead of `O(n^D)`. Trapezoid end-weights and the
//! `z^{-s}` factors fold into the per-variable grids.
//!
//! Gamma products are accumulated as complex log sums and exponentiated once
//! per node, so no individual factor can overflow.

use crate::error::{Error, Result};
use crate::special::gamma::ln_gamma_complex_unchecked;
use num_complex::Complex64;
use std::f64::consts::PI;

/// A single gamma factor `Gamma(shift + slope * s)^{±1}` of one contour
/// variable. `slope > 0` puts its poles to the left of the contour,
/// `slope < 0` to the right; denominator factors (`inverse`) have no poles.
#[derive(Debug, Clone, Copy)]
pub struct GammaFactor {
    pub shift: f64,
    pub slope: f64,
    pub inverse: bool,
}

/// A weighted gamma series `sum_j amps[j] * Gamma(shift + j*step + slope*s)`.
///
/// This is how truncated fading series fold into the integrand instead of
/// exploding into one contour integral per multi-index term.
#[derive(Debug, Clone)]
pub struct GammaSeries {
    pub amps: Vec<f64>,
    pub shift: f64,
    pub step: f64,
    pub slope: f64,
}

/// One contour variable: its factors, its positive real argument, and an
/// optional explicit abscissa overriding the automatic pole-window midpoint.
#[derive(Debug, Clone, Default)]
pub struct VarBlock {
    pub gammas: Vec<GammaFactor>,
    pub series: Vec<GammaSeries>,
    pub abscissa: Option<f64>,
}

/// Shared factor `Gamma(shift + slope * (s_1 + ... + s_D))^{±1}`.
#[derive(Debug, Clone, Copy)]
pub struct SharedFactor {
    pub shift: f64,
    pub slope: f64,
    pub inverse: bool,
}

/// Grid controls for the truncated vertical lines.
#[derive(Debug, Clone, Copy)]
pub struct ContourSettings {
    /// Half-width of the truncated line (default 60).
    pub half_width: f64,
    /// Points per contour dimension (default 2048, minimum 64).
    pub points: usize,
    /// Allowed |Im| residue relative to 1 + |Re| of the result.
    pub im_tol: f64,
    /// When set, re-evaluate at doubled resolution and error out if the
    /// result moves by more than this relative amount.
    pub refine_check: Option<f64>,
}

impl Default for ContourSettings {
    fn default() -> Self {
        Self { half_width: 60.0, points: 2048, im_tol: 1e-7, refine_check: None }
    }
}

/// A multivariate Mellin–Barnes integrand.
#[derive(Debug, Clone, Default)]
pub struct MellinBarnes {
    pub vars: Vec<VarBlock>,
    pub shared: Vec<SharedFactor>,
}

/// Maximum tensor-product contour dimension; larger systems go Monte-Carlo.
pub const MAX_DIM: usize = 4;

impl VarBlock {
    /// Rightmost pole of the left (ascending) family, if any.
    fn left_pole_bound(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut push = |v: f64| best = Some(best.map_or(v, |b: f64| b.max(v)));
        for g in &self.gammas {
            if !g.inverse && g.slope > 0.0 {
                push(-g.shift / g.slope);
            }
        }
        for s in &self.series {
            if s.slope > 0.0 && !s.amps.is_empty() {
                // poles of the j-th term sit at (-(shift + j*step) - k)/slope;
                // with step > 0 the j = 0 term is rightmost
                push(-s.shift / s.slope);
            }
        }
        best
    }

    /// Leftmost pole of the right (descending) family, if any.
    fn right_pole_bound(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut push = |v: f64| best = Some(best.map_or(v, |b: f64| b.min(v)));
        for g in &self.gammas {
            if !g.inverse && g.slope < 0.0 {
                push(-g.shift / g.slope);
            }
        }
        for s in &self.series {
            if s.slope < 0.0 && !s.amps.is_empty() {
                push(-s.shift / s.slope);
            }
        }
        best
    }

    /// Contour abscissa: explicit, or the midpoint of the pole window.
    pub fn resolve_abscissa(&self) -> Result<f64> {
        let left = self.left_pole_bound();
        let right = self.right_pole_bound();
        if let (Some(l), Some(r)) = (left, right) {
            if l >= r {
                return Err(Error::Contour(format!(
                    "pole families overlap: left bound {l} >= right bound {r}"
                )));
            }
        }
        if let Some(c) = self.abscissa {
            let ok_left = left.map_or(true, |l| c > l);
            let ok_right = right.map_or(true, |r| c < r);
            if !(ok_left && ok_right) {
                return Err(Error::Contour(format!(
                    "abscissa {c} does not separate pole families ({left:?}, {right:?})"
                )));
            }
            return Ok(c);
        }
        Ok(match (left, right) {
            (Some(l), Some(r)) => 0.5 * (l + r),
            (Some(l), None) => l + 1.0,
            (None, Some(r)) => r - 1.0,
            (None, None) => 0.5,
        })
    }

    /// ln of the factor product at `s` (complex log, branch only meaningful
    /// through exp).
    fn ln_value(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for g in &self.gammas {
            let lg = ln_gamma_complex_unchecked(Complex64::new(g.shift, 0.0) + g.slope * s);
            if g.inverse {
                acc -= lg;
            } else {
                acc += lg;
            }
        }
        for ser in &self.series {
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, amp) in ser.amps.iter().enumerate() {
                if *amp == 0.0 {
                    continue;
                }
                let arg = Complex64::new(ser.shift + j as f64 * ser.step, 0.0) + ser.slope * s;
                sum += amp * ln_gamma_complex_unchecked(arg).exp();
            }
            acc += sum.ln();
        }
        acc
    }
}

impl MellinBarnes {
    /// Evaluate against positive arguments `args` (one per variable).
    ///
    /// Returns the real part after asserting the imaginary residue is below
    /// `settings.im_tol * (1 + |Re|)`; conjugate symmetry of real-parameter
    /// integrands makes the exact value real.
    pub fn eval(&self, args: &[f64], settings: &ContourSettings) -> Result<f64> {
        let d = self.vars.len();
        if d == 0 || d != args.len() {
            return Err(Error::InvalidParameter(format!(
                "integrand has {d} variables but {} arguments were supplied",
                args.len()
            )));
        }
        if d > MAX_DIM {
            return Err(Error::DimensionCap(format!(
                "{d} contour dimensions exceed the cap of {MAX_DIM}; use the Monte-Carlo path"
            )));
        }
        if args.iter().any(|&z| !(z > 0.0) || !z.is_finite()) {
            return Err(Error::InvalidParameter("contour arguments must be positive and finite".into()));
        }
        if settings.points < 64 {
            return Err(Error::InvalidParameter("contour resolution must be at least 64 points".into()));
        }
        let value = self.eval_at_resolution(args, settings, settings.points)?;
        if let Some(rel) = settings.refine_check {
            let refined = self.eval_at_resolution(args, settings, settings.points * 2)?;
            let denom = refined.abs().max(1e-300);
            if (value - refined).abs() > rel * denom {
                return Err(Error::Resolution(format!(
                    "doubling resolution moved the result from {value:.9e} to {refined:.9e} \
                     (relative {:.2e} > {rel:.2e})",
                    (value - refined).abs() / denom
                )));
            }
        }
        Ok(value)
    }

    fn eval_at_resolution(
        &self,
        args: &[f64],
        settings: &ContourSettings,
        n: usize,
    ) -> Result<f64> {
        let d = self.vars.len();
        let h = 2.0 * settings.half_width / (n - 1) as f64;

        // per-variable grids with trapezoid weights and z^{-s}
        let mut grids: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        let mut abscissas = Vec::with_capacity(d);
        for (var, &z) in self.vars.iter().zip(args) {
            let c = var.resolve_abscissa()?;
            abscissas.push(c);
            let lnz = z.ln();
            let mut grid = Vec::with_capacity(n);
            for k in 0..n {
                let t = -settings.half_width + h * k as f64;
                let s = Complex64::new(c, t);
                let ln_v = var.ln_value(s) - s * lnz;
                let mut v = if ln_v.re > 700.0 {
                    return Err(Error::Contour(format!(
                        "integrand magnitude overflow (ln |V| = {:.1}) at abscissa {c}",
                        ln_v.re
                    )));
                } else {
                    ln_v.exp()
                };
                if k == 0 || k == n - 1 {
                    v *= 0.5;
                }
                grid.push(v);
            }
            grids.push(grid);
        }
        self.validate_shared(&abscissas)?;

        let total: Complex64 = if self.shared.is_empty() && d == 1 {
            grids[0].iter().sum()
        } else {
            // convolve per-variable grids, then weight by the shared factor
            let mut conv = grids[0].clone();
            for g in grids.iter().skip(1) {
                conv = convolve(&conv, g);
            }
            let c_sum: f64 = abscissas.iter().sum();
            let mid = ((n - 1) * d) as f64 / 2.0;
            let mut acc = Complex64::new(0.0, 0.0);
            for (kk, w) in conv.iter().enumerate() {
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                let ssum = Complex64::new(c_sum, h * (kk as f64 - mid));
                let mut ln_s = Complex64::new(0.0, 0.0);
                for f in &self.shared {
                    let lg = ln_gamma_complex_unchecked(
                        Complex64::new(f.shift, 0.0) + f.slope * ssum,
                    );
                    if f.inverse {
                        ln_s -= lg;
                    } else {
                        ln_s += lg;
                    }
                }
                acc += w * ln_s.exp();
            }
            acc
        };

        let value = total * Complex64::new(h / (2.0 * PI), 0.0).powu(d as u32);
        if value.im.abs() > settings.im_tol * (1.0 + value.re.abs()) {
            return Err(Error::Contour(format!(
                "imaginary residue {:.3e} exceeds tolerance (re = {:.6e}); \
                 the contour quadrature is not trustworthy here",
                value.im, value.re
            )));
        }
        Ok(value.re)
    }

    /// Shared numerator factors restrict the admissible sum of abscissas.
    fn validate_shared(&self, abscissas: &[f64]) -> Result<()> {
        let c_sum: f64 = abscissas.iter().sum();
        for f in &self.shared {
            if f.inverse || f.slope == 0.0 {
                continue;
            }
            let bound = -f.shift / f.slope;
            let ok = if f.slope > 0.0 { c_sum > bound } else { c_sum < bound };
            if !ok {
                return Err(Error::Contour(format!(
                    "abscissa sum {c_sum} conflicts with shared factor poles at {bound} \
                     (slope {})",
                    f.slope
                )));
            }
        }
        Ok(())
    }
}

fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai.norm_sqr() == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}
