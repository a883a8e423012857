//! Experiment execution and CSV export.

use crate::config::{ExperimentConfig, Kind, PowerModeConfig};
use ftrlink_core::af::AfMode;
use ftrlink_core::error::Error as CoreError;
use ftrlink_core::mc::{self, HardwareMode, PhaseMode, PowerMode};
use ftrlink_core::ris::{self, ExactMeasurementOracle, MeasurementOracle, PhaseOptimizerConfig};
use ftrlink_core::stats::{ChainBank, HopChain};
use ftrlink_core::{af, ftr};
use std::fmt::Write as _;
use std::time::Instant;

/// A numerical failure distinct from config problems (exit code 3 vs 2).
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter(_) | CoreError::DimensionCap(_) => {
                RunError::Config(e.to_string())
            }
            _ => RunError::Numerical(e.to_string()),
        }
    }
}

pub struct RunOptions {
    pub seed_override: Option<u64>,
    pub emit_timing: bool,
}

/// One output row; unavailable fields stay empty in the CSV.
#[derive(Default, Clone)]
struct Row {
    sweep_value: f64,
    analytic: Option<f64>,
    mc_mean: Option<f64>,
    mc_std_error: Option<f64>,
    truncation_eps: Option<f64>,
    wall_time_s: f64,
    series: Option<&'static str>,
    overlap: Option<bool>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Execute the experiment and return the CSV text.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<String, RunError> {
    cfg.validate().map_err(RunError::Config)?;
    let ctrl = cfg.series_control().map_err(RunError::Config)?;
    let with_compare_cols = matches!(cfg.kind, Kind::Compare);
    let mut rows: Vec<Row> = Vec::new();

    match cfg.kind {
        Kind::FtrStats => {
            let hop = cfg.hop.as_ref().unwrap().build().map_err(RunError::Config)?;
            let mc_cfg = cfg.mc_config(opts.seed_override).map_err(RunError::Config)?;
            let samples = ftr::sample_envelope(&hop, mc_cfg.trials, mc_cfg.seed)?;
            for x in cfg.sweep.as_ref().unwrap().values() {
                let t0 = Instant::now();
                let analytic = ftr::cdf_squared(&hop, x.max(0.0), &ctrl)?;
                let below =
                    samples.iter().filter(|r| *r * *r < x).count() as f64 / mc_cfg.trials as f64;
                let se = (below * (1.0 - below) / mc_cfg.trials as f64).sqrt();
                rows.push(Row {
                    sweep_value: x,
                    analytic: Some(analytic),
                    mc_mean: Some(below),
                    mc_std_error: Some(se),
                    wall_time_s: t0.elapsed().as_secs_f64(),
                    ..Default::default()
                });
            }
        }
        Kind::ProductStats => {
            let els = cfg.ris_elements().map_err(RunError::Config)?;
            let chain = HopChain::new(vec![els[0].hop1, els[0].hop2])?;
            let mc_cfg = cfg.mc_config(opts.seed_override).map_err(RunError::Config)?;
            let a = ftr::sample_envelope(&els[0].hop1, mc_cfg.trials, mc_cfg.seed)?;
            let b = ftr::sample_envelope(&els[0].hop2, mc_cfg.trials, mc_cfg.seed ^ 0x9E37)?;
            let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            for x in cfg.sweep.as_ref().unwrap().values() {
                let t0 = Instant::now();
                let analytic = ftrlink_core::stats::product_cdf(&chain, x.max(0.0), &ctrl)?;
                let below =
                    prods.iter().filter(|p| **p < x).count() as f64 / mc_cfg.trials as f64;
                let se = (below * (1.0 - below) / mc_cfg.trials as f64).sqrt();
                rows.push(Row {
                    sweep_value: x,
                    analytic: Some(analytic),
                    mc_mean: Some(below),
                    mc_std_error: Some(se),
                    wall_time_s: t0.elapsed().as_secs_f64(),
                    ..Default::default()
                });
            }
        }
        Kind::TruncationTable => {
            for row in &cfg.truncation_rows {
                let t0 = Instant::now();
                let hop = ftr::FtrParams::new(row.m, row.k, row.delta, row.sigma2)?;
                let chain = HopChain::new(vec![hop; row.hops_per_branch])?;
                let bank = ChainBank::new(vec![chain; row.branches])?;
                let eps = ftrlink_core::stats::truncation_error(&bank, row.m_terms)?;
                rows.push(Row {
                    sweep_value: row.m_terms as f64,
                    truncation_eps: Some(eps),
                    wall_time_s: t0.elapsed().as_secs_f64(),
                    ..Default::default()
                });
            }
        }
        Kind::OptimizePhases => {
            let link = cfg.ris_link(cfg.power_w).map_err(RunError::Config)?;
            let opt = PhaseOptimizerConfig {
                inner_iters: cfg.optimize.inner_iters,
                sweeps: cfg.optimize.sweeps,
            };
            let t0 = Instant::now();
            let (phi, trace) = if cfg.optimize.oracle_trials == 0 {
                let oracle = ExactMeasurementOracle::new(&link, &ctrl)?;
                ris::optimize_phases(&link, &opt, &oracle)?
            } else {
                let mc_cfg = ftrlink_core::mc::McConfig::new(
                    cfg.optimize.oracle_trials.max(1000),
                    opts.seed_override.unwrap_or(cfg.mc.seed),
                )?;
                let oracle = mc::make_measurement_oracle(&link, &mc_cfg);
                let probe: &dyn MeasurementOracle = &oracle;
                ris::optimize_phases(&link, &opt, probe)?
            };
            let elapsed = t0.elapsed().as_secs_f64();
            let totals: Vec<f64> = link
                .elements()
                .iter()
                .zip(&phi)
                .map(|(el, p)| el.theta1 + el.theta2 + p)
                .collect();
            let re: f64 = totals.iter().map(|t| t.cos()).sum::<f64>() / totals.len() as f64;
            let im: f64 = totals.iter().map(|t| t.sin()).sum::<f64>() / totals.len() as f64;
            let spread = 1.0 - re.hypot(im);
            for (idx, p) in phi.iter().enumerate() {
                rows.push(Row {
                    sweep_value: idx as f64,
                    analytic: Some(*p),
                    mc_mean: Some(*trace.last().unwrap()),
                    truncation_eps: Some(spread),
                    wall_time_s: elapsed / phi.len() as f64,
                    ..Default::default()
                });
            }
        }
        Kind::RisOp | Kind::RisAbep | Kind::AfOp | Kind::AfAbep | Kind::McValidate => {
            rows.extend(run_sweep(cfg, opts, &ctrl, cfg.kind)?);
        }
        Kind::Compare => {
            let ris_rows = run_sweep(cfg, opts, &ctrl, Kind::RisOp)?;
            let af_rows = run_sweep(cfg, opts, &ctrl, Kind::AfOp)?;
            for (mut r, mut a) in ris_rows.into_iter().zip(af_rows) {
                r.series = Some("ris");
                a.series = Some("af");
                // 3-sigma interval overlap between the two MC estimates
                let overlap = match (r.mc_mean, r.mc_std_error, a.mc_mean, a.mc_std_error) {
                    (Some(m1), Some(s1), Some(m2), Some(s2)) => {
                        Some((m1 - m2).abs() <= 3.0 * (s1 + s2))
                    }
                    _ => None,
                };
                r.overlap = overlap;
                a.overlap = overlap;
                rows.push(r);
                rows.push(a);
            }
        }
    }

    let mut out = String::new();
    out.push_str("sweep_value,analytic,mc_mean,mc_std_error,truncation_eps,wall_time_s");
    if with_compare_cols {
        out.push_str(",series,overlap");
    }
    out.push('\n');
    for r in rows {
        let wall = if opts.emit_timing { r.wall_time_s } else { 0.0 };
        let _ = write!(
            out,
            "{:.16e},{},{},{},{},{:.3e}",
            r.sweep_value,
            fmt_opt(r.analytic),
            fmt_opt(r.mc_mean),
            fmt_opt(r.mc_std_error),
            fmt_opt(r.truncation_eps),
            wall
        );
        if with_compare_cols {
            let _ = write!(
                out,
                ",{},{}",
                r.series.unwrap_or(""),
                r.overlap.map(|b| b.to_string()).unwrap_or_default()
            );
        }
        out.push('\n');
    }
    Ok(out)
}

/// Sweep-driven OP/ABEP evaluation shared by the single-system kinds,
/// `mc-validate`, and both halves of `compare`.
fn run_sweep(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    ctrl: &ftr::SeriesControl,
    kind: Kind,
) -> Result<Vec<Row>, RunError> {
    let sweep = cfg.sweep.as_ref().unwrap();
    let mc_cfg = cfg.mc_config(opts.seed_override).map_err(RunError::Config)?;
    let modulation = cfg.modulation.as_ref();
    let mut rows = Vec::new();
    let is_ris = matches!(kind, Kind::RisOp | Kind::RisAbep)
        || (matches!(kind, Kind::McValidate) && cfg.ris.is_some());
    let is_abep = matches!(kind, Kind::RisAbep | Kind::AfAbep);
    let af_mode = cfg
        .af
        .as_ref()
        .and_then(|a| a.power_mode)
        .map(|m| match m {
            PowerModeConfig::Fixed => AfMode::Configured,
            PowerModeConfig::Optimal => AfMode::OptimalPower,
        })
        .unwrap_or(AfMode::Configured);

    for v in sweep.values() {
        let t0 = Instant::now();
        let (power, gamma_th, avg_power) = match sweep.variable.as_str() {
            "power_db" => (10f64.powf(v / 10.0), cfg.gamma_th, None),
            "gamma_th_db" => (cfg.power_w, 10f64.powf(v / 10.0), None),
            "avg_power_db" => (cfg.power_w, cfg.gamma_th, Some(10f64.powf(v / 10.0))),
            _ => (cfg.power_w, cfg.gamma_th, None),
        };

        let row = if is_ris {
            let mut link = cfg.ris_link(power).map_err(RunError::Config)?;
            if let Some(u) = avg_power {
                let rescaled = link
                    .elements()
                    .iter()
                    .map(|el| {
                        Ok(ftrlink_core::ris::RisElement {
                            hop1: ftr::FtrParams::from_avg_power(
                                el.hop1.m(),
                                el.hop1.k(),
                                el.hop1.delta(),
                                u,
                            )?,
                            hop2: ftr::FtrParams::from_avg_power(
                                el.hop2.m(),
                                el.hop2.k(),
                                el.hop2.delta(),
                                u,
                            )?,
                            ..*el
                        })
                    })
                    .collect::<Result<Vec<_>, CoreError>>()?;
                link = ftrlink_core::ris::RisLink::new(rescaled, power, cfg.noise_w)?;
            }
            let analytic = if link.len() <= 4 {
                Some(if is_abep {
                    let m = modulation.unwrap();
                    ris::ris_abep(&link, m.p, m.q, ctrl)?
                } else {
                    ris::ris_outage(&link, gamma_th, ctrl)?
                })
            } else {
                None
            };
            let (mc_mean, mc_se) = if mc_cfg.trials > 0 {
                let samples = mc::simulate_ris_snr(&link, PhaseMode::Optimal, &mc_cfg);
                let est = if is_abep {
                    let m = modulation.unwrap();
                    mc::empirical_abep(&samples, m.p, m.q, mc_cfg.seed)?
                } else {
                    mc::empirical_outage(&samples, gamma_th, mc_cfg.seed)?
                };
                (Some(est.mean), Some(est.std_error))
            } else {
                (None, None)
            };
            let eps = ftrlink_core::stats::truncation_error(
                &link.chain_bank()?,
                ctrl.max_terms.saturating_sub(1),
            )
            .ok();
            Row {
                sweep_value: v,
                analytic,
                mc_mean,
                mc_std_error: mc_se,
                truncation_eps: eps,
                wall_time_s: t0.elapsed().as_secs_f64(),
                ..Default::default()
            }
        } else {
            let mut link = cfg.af_link(Some(power)).map_err(RunError::Config)?;
            if let Some(u) = avg_power {
                link = ftrlink_core::af::AfLink::new(
                    ftr::FtrParams::from_avg_power(
                        link.hop1.m(),
                        link.hop1.k(),
                        link.hop1.delta(),
                        u,
                    )?,
                    ftr::FtrParams::from_avg_power(
                        link.hop2.m(),
                        link.hop2.k(),
                        link.hop2.delta(),
                        u,
                    )?,
                    link.p1,
                    link.p2,
                    link.noise,
                    link.hardware,
                )?;
            }
            let closed_form_ok = link.hardware.is_ideal() || !is_abep;
            let analytic = if closed_form_ok {
                Some(if is_abep {
                    let m = modulation.unwrap();
                    af::af_abep(&link, m.p, m.q, af_mode, ctrl)?
                } else {
                    af::af_outage(&link, gamma_th, af_mode, ctrl)?
                })
            } else {
                None
            };
            let (mc_mean, mc_se) = if mc_cfg.trials > 0 {
                let power_mode = match af_mode {
                    AfMode::Configured => PowerMode::Fixed,
                    AfMode::OptimalPower => PowerMode::Optimal,
                };
                let hw_mode = if link.hardware.is_ideal() {
                    HardwareMode::Ideal
                } else {
                    HardwareMode::Impaired
                };
                let samples = mc::simulate_af_snr(&link, power_mode, hw_mode, &mc_cfg);
                let est = if is_abep {
                    let m = modulation.unwrap();
                    mc::empirical_abep(&samples, m.p, m.q, mc_cfg.seed)?
                } else {
                    mc::empirical_outage(&samples, gamma_th, mc_cfg.seed)?
                };
                (Some(est.mean), Some(est.std_error))
            } else {
                (None, None)
            };
            let bank = ChainBank::new(vec![HopChain::new(vec![link.hop1, link.hop2])?])?;
            let eps =
                ftrlink_core::stats::truncation_error(&bank, ctrl.max_terms.saturating_sub(1))
                    .ok();
            Row {
                sweep_value: v,
                analytic,
                mc_mean,
                mc_std_error: mc_se,
                truncation_eps: eps,
                wall_time_s: t0.elapsed().as_secs_f64(),
                ..Default::default()
            }
        };
        rows.push(row);
    }
    Ok(rows)
}
