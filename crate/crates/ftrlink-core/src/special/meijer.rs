//! Meijer G-function on the positive real axis.

use crate::error::{Error, Result};
use crate::special::contour::{ContourSettings, GammaFactor, MellinBarnes, VarBlock};

/// Order and parameter table of `G^{m,n}_{p,q}(z | a; b)`.
///
/// Evaluated as the Mellin–Barnes integral
///
/// ```text
/// G(z) = (2 pi i)^{-1} ∮ [prod_{j<=m} G(b_j+s) prod_{j<=n} G(1-a_j-s)] /
///        [prod_{j>n} G(a_j+s) prod_{j>m} G(1-b_j-s)] z^{-s} ds
/// ```
///
/// on a vertical line separating the ascending from the descending poles.
#[derive(Debug, Clone)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Optional explicit contour abscissa.
    pub abscissa: Option<f64>,
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let (p, q) = (a.len(), b.len());
        if m > q || n > p {
            return Err(Error::InvalidParameter(format!(
                "meijer g orders out of range: m={m} > q={q} or n={n} > p={p}"
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("meijer g parameters must be finite".into()));
        }
        Ok(Self { m, n, p, q, a, b, abscissa: None })
    }

    pub fn with_abscissa(mut self, c: f64) -> Self {
        self.abscissa = Some(c);
        self
    }

    pub(crate) fn to_integrand(&self) -> MellinBarnes {
        let mut gammas = Vec::new();
        for (j, &b) in self.b.iter().enumerate() {
            if j < self.m {
                gammas.push(GammaFactor { shift: b, slope: 1.0, inverse: false });
            } else {
                gammas.push(GammaFactor { shift: 1.0 - b, slope: -1.0, inverse: true });
            }
        }
        for (j, &a) in self.a.iter().enumerate() {
            if j < self.n {
                gammas.push(GammaFactor { shift: 1.0 - a, slope: -1.0, inverse: false });
            } else {
                gammas.push(GammaFactor { shift: a, slope: 1.0, inverse: true });
            }
        }
        MellinBarnes {
            vars: vec![VarBlock { gammas, series: vec![], abscissa: self.abscissa }],
            shared: vec![],
        }
    }
}

/// Evaluate `G(spec | x)` for `x > 0`.
pub fn meijer_g(spec: &MeijerGSpec, x: f64) -> Result<f64> {
    meijer_g_with(spec, x, &ContourSettings::default())
}

pub fn meijer_g_with(spec: &MeijerGSpec, x: f64, settings: &ContourSettings) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("meijer_g requires x > 0, got {x}")));
    }
    spec.to_integrand().eval(&[x], settings)
}
