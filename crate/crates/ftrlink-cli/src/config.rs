//! Experiment configuration schema (one JSON document per run) and the
//! feasibility checks behind `ftrlink validate`.

use ftrlink_core::af::{AfLink, HardwareProfile};
use ftrlink_core::ftr::{FtrParams, SeriesControl};
use ftrlink_core::mc::McConfig;
use ftrlink_core::ris::{RisElement, RisLink};
use serde::Deserialize;

/// Every experiment the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    FtrStats,
    ProductStats,
    TruncationTable,
    OptimizePhases,
    RisOp,
    RisAbep,
    AfOp,
    AfAbep,
    Compare,
    McValidate,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopConfig {
    pub m: f64,
    pub k: f64,
    pub delta: f64,
    /// Mean squared envelope `2 sigma^2 (1+K)`, linear scale.
    pub avg_power: f64,
}

impl HopConfig {
    pub fn build(&self) -> Result<FtrParams, String> {
        FtrParams::from_avg_power(self.m, self.k, self.delta, self.avg_power)
            .map_err(|e| e.to_string())
    }

    pub fn scaled(&self, avg_power: f64) -> Self {
        Self { avg_power, ..self.clone() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementConfig {
    pub hop1: HopConfig,
    pub hop2: HopConfig,
    #[serde(default)]
    pub theta1: f64,
    #[serde(default)]
    pub theta2: f64,
    #[serde(default)]
    pub phi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformElements {
    pub count: usize,
    pub hop1: HopConfig,
    pub hop2: HopConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisConfig {
    #[serde(default)]
    pub elements: Vec<ElementConfig>,
    #[serde(default)]
    pub uniform: Option<UniformElements>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerModeConfig {
    Fixed,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HardwareModeConfig {
    Ideal,
    Impaired,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareConfig {
    pub kappa1: f64,
    pub kappa2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AfConfig {
    pub hop1: HopConfig,
    pub hop2: HopConfig,
    /// Source and relay powers; a `power_db` sweep overrides both.
    #[serde(default = "one")]
    pub p1: f64,
    #[serde(default = "one")]
    pub p2: f64,
    #[serde(default)]
    pub power_mode: Option<PowerModeConfig>,
    #[serde(default)]
    pub hardware_mode: Option<HardwareModeConfig>,
    #[serde(default)]
    pub hardware: Option<HardwareConfig>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    #[serde(default = "default_terms")]
    pub max_terms: usize,
    #[serde(default = "default_eps")]
    pub target_epsilon: f64,
}

fn default_terms() -> usize {
    80
}
fn default_eps() -> f64 {
    1e-11
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { max_terms: default_terms(), target_epsilon: default_eps() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_block")]
    pub block_size: usize,
}

fn default_trials() -> usize {
    100_000
}
fn default_seed() -> u64 {
    1
}
fn default_block() -> usize {
    8192
}

impl Default for McSection {
    fn default() -> Self {
        Self { trials: default_trials(), seed: default_seed(), block_size: default_block() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Modulation {
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// One of: `power_db`, `gamma_th_db`, `avg_power_db`, `x`, `m_terms`.
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.start + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationRow {
    pub branches: usize,
    pub hops_per_branch: usize,
    pub m: f64,
    pub k: f64,
    pub delta: f64,
    pub sigma2: f64,
    pub m_terms: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default = "default_inner")]
    pub inner_iters: usize,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    /// 0 selects the noise-free expectation oracle.
    #[serde(default)]
    pub oracle_trials: usize,
}

fn default_inner() -> usize {
    12
}
fn default_sweeps() -> usize {
    4
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { inner_iters: default_inner(), sweeps: default_sweeps(), oracle_trials: 0 }
    }
}

/// Top-level experiment document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub comment: Option<String>,
    #[serde(default)]
    pub series: SeriesConfig,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub modulation: Option<Modulation>,
    #[serde(default = "one")]
    pub noise_w: f64,
    #[serde(default = "one")]
    pub power_w: f64,
    #[serde(default = "one")]
    pub gamma_th: f64,
    #[serde(default)]
    pub ris: Option<RisConfig>,
    #[serde(default)]
    pub af: Option<AfConfig>,
    #[serde(default)]
    pub hop: Option<HopConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub truncation_rows: Vec<TruncationRow>,
    #[serde(default)]
    pub optimize: OptimizeConfig,
    pub output: String,
}

const SWEEP_VARS: [&str; 5] = ["power_db", "gamma_th_db", "avg_power_db", "x", "m_terms"];

impl ExperimentConfig {
    pub fn series_control(&self) -> Result<SeriesControl, String> {
        SeriesControl::new(self.series.max_terms, self.series.target_epsilon)
            .map_err(|e| e.to_string())
    }

    pub fn mc_config(&self, seed_override: Option<u64>) -> Result<McConfig, String> {
        McConfig::new(self.mc.trials, seed_override.unwrap_or(self.mc.seed))
            .and_then(|c| c.with_block_size(self.mc.block_size))
            .map_err(|e| e.to_string())
    }

    pub fn ris_elements(&self) -> Result<Vec<RisElement>, String> {
        let ris = self.ris.as_ref().ok_or("missing `ris` block")?;
        let mut out = Vec::new();
        if let Some(u) = &ris.uniform {
            if u.count == 0 {
                return Err("ris.uniform.count must be >= 1".into());
            }
            let h1 = u.hop1.build().map_err(|e| format!("ris.uniform.hop1: {e}"))?;
            let h2 = u.hop2.build().map_err(|e| format!("ris.uniform.hop2: {e}"))?;
            out.extend((0..u.count).map(|_| RisElement {
                hop1: h1,
                hop2: h2,
                theta1: 0.0,
                theta2: 0.0,
                phi: 0.0,
            }));
        }
        for (i, el) in ris.elements.iter().enumerate() {
            out.push(RisElement {
                hop1: el.hop1.build().map_err(|e| format!("ris.elements[{i}].hop1: {e}"))?,
                hop2: el.hop2.build().map_err(|e| format!("ris.elements[{i}].hop2: {e}"))?,
                theta1: el.theta1,
                theta2: el.theta2,
                phi: el.phi,
            });
        }
        if out.is_empty() {
            return Err("ris block defines no elements".into());
        }
        Ok(out)
    }

    pub fn ris_link(&self, power: f64) -> Result<RisLink, String> {
        RisLink::new(self.ris_elements()?, power, self.noise_w).map_err(|e| e.to_string())
    }

    pub fn af_link(&self, power: Option<f64>) -> Result<AfLink, String> {
        let af = self.af.as_ref().ok_or("missing `af` block")?;
        let hw = match af.hardware_mode.unwrap_or(HardwareModeConfig::Ideal) {
            HardwareModeConfig::Ideal => HardwareProfile::ideal(),
            HardwareModeConfig::Impaired => {
                let h = af
                    .hardware
                    .as_ref()
                    .ok_or("af.hardware: block required when af.hardware_mode = \"impaired\"")?;
                HardwareProfile::new(h.kappa1, h.kappa2).map_err(|e| e.to_string())?
            }
        };
        let (p1, p2) = match power {
            Some(p) => (p, p),
            None => (af.p1, af.p2),
        };
        AfLink::new(
            af.hop1.build().map_err(|e| format!("af.hop1: {e}"))?,
            af.hop2.build().map_err(|e| format!("af.hop2: {e}"))?,
            p1,
            p2,
            self.noise_w,
            hw,
        )
        .map_err(|e| e.to_string())
    }

    /// Dry-run schema and feasibility check; returns the planned-evaluation
    /// report on success.
    pub fn validate(&self) -> Result<String, String> {
        self.series_control()?;
        if self.mc.trials > 0 {
            self.mc_config(None)?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.points == 0 {
                return Err("sweep.points: empty sweep range".into());
            }
            if !SWEEP_VARS.contains(&sweep.variable.as_str()) {
                return Err(format!(
                    "sweep.variable: unknown variable `{}` (expected one of {SWEEP_VARS:?})",
                    sweep.variable
                ));
            }
        }
        let need_sweep = |what: &str| -> Result<usize, String> {
            self.sweep
                .as_ref()
                .map(|s| s.points)
                .ok_or(format!("missing `sweep` block for {what}"))
        };
        let report = match self.kind {
            Kind::FtrStats => {
                self.hop.as_ref().ok_or("missing `hop` block")?.build()?;
                format!("ftr-stats: {} grid points", need_sweep("ftr-stats")?)
            }
            Kind::ProductStats => {
                let els = self.ris_elements()?;
                format!(
                    "product-stats over the first element chain: {} grid points \
                     ({} elements defined)",
                    need_sweep("product-stats")?,
                    els.len()
                )
            }
            Kind::TruncationTable => {
                if self.truncation_rows.is_empty() {
                    return Err("truncation_rows: at least one row required".into());
                }
                for (i, r) in self.truncation_rows.iter().enumerate() {
                    FtrParams::new(r.m, r.k, r.delta, r.sigma2)
                        .map_err(|e| format!("truncation_rows[{i}]: {e}"))?;
                    if r.branches == 0 || r.hops_per_branch == 0 || r.m_terms == 0 {
                        return Err(format!("truncation_rows[{i}]: counts must be >= 1"));
                    }
                }
                format!("truncation-table: {} rows", self.truncation_rows.len())
            }
            Kind::OptimizePhases => {
                let els = self.ris_elements()?;
                if self.optimize.inner_iters == 0 || self.optimize.sweeps == 0 {
                    return Err("optimize: iteration counts must be >= 1".into());
                }
                format!(
                    "optimize-phases: {} elements, {} probes per element",
                    els.len(),
                    self.optimize.inner_iters * self.optimize.sweeps
                )
            }
            Kind::RisOp | Kind::RisAbep => {
                let els = self.ris_elements()?;
                if els.len() > 4 {
                    return Err(format!(
                        "ris: {} elements exceed the closed-form cap of 4 contour dimensions; \
                         use kind = \"mc-validate\" for large surfaces",
                        els.len()
                    ));
                }
                if matches!(self.kind, Kind::RisAbep) && self.modulation.is_none() {
                    return Err("missing `modulation` block for ris-abep".into());
                }
                format!(
                    "{:?}: {} elements, {} sweep points, {} trials",
                    self.kind,
                    els.len(),
                    need_sweep("ris sweeps")?,
                    self.mc.trials
                )
            }
            Kind::AfOp | Kind::AfAbep => {
                self.af_link(None)?;
                if matches!(self.kind, Kind::AfAbep) && self.modulation.is_none() {
                    return Err("missing `modulation` block for af-abep".into());
                }
                format!(
                    "{:?}: {} sweep points, {} trials",
                    self.kind,
                    need_sweep("af sweeps")?,
                    self.mc.trials
                )
            }
            Kind::Compare => {
                let els = self.ris_elements()?;
                self.af_link(None)?;
                format!(
                    "compare: {} RIS elements vs AF relay, {} sweep points, {} trials",
                    els.len(),
                    need_sweep("compare")?,
                    self.mc.trials
                )
            }
            Kind::McValidate => {
                let mut parts = Vec::new();
                if self.ris.is_some() {
                    parts.push(format!("ris ({} elements)", self.ris_elements()?.len()));
                }
                if self.af.is_some() {
                    self.af_link(None)?;
                    parts.push("af".into());
                }
                if parts.is_empty() {
                    return Err("mc-validate needs a `ris` or `af` block".into());
                }
                format!(
                    "mc-validate: {} with {} trials, {} sweep points",
                    parts.join(" + "),
                    self.mc.trials,
                    need_sweep("mc-validate")?
                )
            }
        };
        Ok(report)
    }
}

/// Parse a config file with a line-precise message on failure.
pub fn load(path: &std::path::Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        format!("{} at line {}, column {}", e, e.line(), e.column())
    })
}
