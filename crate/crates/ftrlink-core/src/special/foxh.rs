//! Fox H-function, single and multivariate, on positive real arguments.

use crate::error::{Error, Result};
use crate::special::contour::{
    ContourSettings, GammaFactor, MellinBarnes, SharedFactor, VarBlock, MAX_DIM,
};

/// One gamma factor `Gamma(coeff ± weight * s)` with non-negative weight;
/// the pole side is carried by the block it sits in.
#[derive(Debug, Clone, Copy)]
pub struct HFactor {
    pub coeff: f64,
    pub weight: f64,
}

impl HFactor {
    pub fn new(coeff: f64, weight: f64) -> Result<Self> {
        if !coeff.is_finite() || !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma factor (coeff {coeff}, weight {weight}) must be finite with weight >= 0"
            )));
        }
        Ok(Self { coeff, weight })
    }
}

/// Per-variable factor block of a (possibly multivariate) H-integrand.
///
/// `num_left` entries contribute `Gamma(coeff + weight*s)` (poles left of the
/// contour), `num_right` entries `Gamma(coeff - weight*s)` (poles right);
/// `den_left`/`den_right` are the reciprocal counterparts.
#[derive(Debug, Clone, Default)]
pub struct HVarBlock {
    pub num_left: Vec<HFactor>,
    pub num_right: Vec<HFactor>,
    pub den_left: Vec<HFactor>,
    pub den_right: Vec<HFactor>,
}

/// Shared gamma factor coupling every contour variable through `s_1+...+s_D`.
#[derive(Debug, Clone, Copy)]
pub struct HSharedFactor {
    pub coeff: f64,
    /// Signed weight on the variable sum.
    pub weight: f64,
    pub inverse: bool,
}

/// Contour placement: one optional abscissa per variable plus grid controls.
#[derive(Debug, Clone)]
pub struct HContour {
    pub abscissa: Vec<Option<f64>>,
    pub half_width: f64,
    pub points: usize,
}

impl HContour {
    pub fn auto(dim: usize) -> Self {
        Self { abscissa: vec![None; dim], half_width: 60.0, points: 2048 }
    }
}

/// A Fox H-function specification in Mellin–Barnes normal form, evaluated as
///
/// ```text
/// H(z) = (2 pi i)^{-D} ∮...∮ S(Σs) prod_i B_i(s_i) z_i^{-s_i} ds
/// ```
#[derive(Debug, Clone)]
pub struct FoxHSpec {
    pub vars: Vec<HVarBlock>,
    pub shared: Vec<HSharedFactor>,
    pub contour: HContour,
}

impl FoxHSpec {
    pub fn new(vars: Vec<HVarBlock>, shared: Vec<HSharedFactor>, contour: HContour) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidParameter("H-spec needs at least one variable".into()));
        }
        if contour.abscissa.len() != vars.len() {
            return Err(Error::InvalidParameter(
                "contour abscissa list must match the variable count".into(),
            ));
        }
        if contour.points < 64 {
            return Err(Error::InvalidParameter("contour resolution must be >= 64".into()));
        }
        if !(contour.half_width > 0.0) {
            return Err(Error::InvalidParameter("contour half-width must be positive".into()));
        }
        let spec = Self { vars, shared, contour };
        // fail fast when no contour can separate the pole families
        for (i, blk) in spec.to_var_blocks()?.iter().enumerate() {
            blk.resolve_abscissa().map_err(|e| {
                Error::Contour(format!("variable {i}: {e}"))
            })?;
        }
        Ok(spec)
    }

    /// Classic single-variable `H^{m,n}_{p,q}(z | (a,A); (b,B))`.
    pub fn classic(
        m: usize,
        n: usize,
        upper: &[(f64, f64)],
        lower: &[(f64, f64)],
    ) -> Result<Self> {
        let (p, q) = (upper.len(), lower.len());
        if m > q || n > p {
            return Err(Error::InvalidParameter(format!(
                "orders out of range: m={m} > q={q} or n={n} > p={p}"
            )));
        }
        let mut blk = HVarBlock::default();
        for (j, &(b, bw)) in lower.iter().enumerate() {
            if j < m {
                blk.num_left.push(HFactor::new(b, bw)?);
            } else {
                blk.den_right.push(HFactor::new(1.0 - b, bw)?);
            }
        }
        for (j, &(a, aw)) in upper.iter().enumerate() {
            if j < n {
                blk.num_right.push(HFactor::new(1.0 - a, aw)?);
            } else {
                blk.den_left.push(HFactor::new(a, aw)?);
            }
        }
        Self::new(vec![blk], vec![], HContour::auto(1))
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn with_abscissas(mut self, abscissas: Vec<Option<f64>>) -> Self {
        self.contour.abscissa = abscissas;
        self
    }

    fn to_var_blocks(&self) -> Result<Vec<VarBlock>> {
        self.vars
            .iter()
            .zip(&self.contour.abscissa)
            .map(|(blk, &absc)| {
                let mut gammas = Vec::new();
                for f in &blk.num_left {
                    gammas.push(GammaFactor { shift: f.coeff, slope: f.weight, inverse: false });
                }
                for f in &blk.num_right {
                    gammas.push(GammaFactor { shift: f.coeff, slope: -f.weight, inverse: false });
                }
                for f in &blk.den_left {
                    gammas.push(GammaFactor { shift: f.coeff, slope: f.weight, inverse: true });
                }
                for f in &blk.den_right {
                    gammas.push(GammaFactor { shift: f.coeff, slope: -f.weight, inverse: true });
                }
                Ok(VarBlock { gammas, series: vec![], abscissa: absc })
            })
            .collect()
    }

    pub(crate) fn to_integrand(&self) -> Result<MellinBarnes> {
        Ok(MellinBarnes {
            vars: self.to_var_blocks()?,
            shared: self
                .shared
                .iter()
                .map(|f| SharedFactor { shift: f.coeff, slope: f.weight, inverse: f.inverse })
                .collect(),
        })
    }

    fn settings(&self) -> ContourSettings {
        ContourSettings {
            half_width: self.contour.half_width,
            points: self.contour.points,
            ..Default::default()
        }
    }
}

/// Single-variable Fox H at `x > 0`.
pub fn fox_h_single(spec: &FoxHSpec, x: f64) -> Result<f64> {
    if spec.dim() != 1 {
        return Err(Error::InvalidParameter(format!(
            "fox_h_single requires a one-dimensional spec (got {})",
            spec.dim()
        )));
    }
    fox_h_multivariate(spec, &[x])
}

/// Multivariate Fox H at positive arguments, one per contour dimension.
pub fn fox_h_multivariate(spec: &FoxHSpec, xs: &[f64]) -> Result<f64> {
    if spec.dim() > MAX_DIM {
        return Err(Error::DimensionCap(format!(
            "H-spec dimension {} exceeds {MAX_DIM}; use the Monte-Carlo path",
            spec.dim()
        )));
    }
    let settings = spec.settings();
    spec.to_integrand()?.eval(xs, &settings)
}

/// Multivariate Fox H with the doubled-resolution self-check enabled.
pub fn fox_h_multivariate_checked(spec: &FoxHSpec, xs: &[f64], rel_tol: f64) -> Result<f64> {
    let mut settings = spec.settings();
    settings.refine_check = Some(rel_tol);
    spec.to_integrand()?.eval(xs, &settings)
}
