//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured numbers.
//!
//! Run with
//!
//! ```text
//! cargo test -p ftrlink-core --test acceptance -- --nocapture --test-threads=1
//! ```

use ftrlink_core::af::{self, AfLink, AfMode, HardwareProfile};
use ftrlink_core::ftr::{self, FtrParams, SeriesControl};
use ftrlink_core::mc::{self, HardwareMode, McConfig, PhaseMode, PowerMode};
use ftrlink_core::ris::{self, ExactMeasurementOracle, PhaseOptimizerConfig, RisElement, RisLink};
use ftrlink_core::special::contour::ContourSettings;
use ftrlink_core::special::foxh::{fox_h_single, FoxHSpec};
use ftrlink_core::special::gamma::{incomplete_gamma, GammaKind};
use ftrlink_core::special::meijer::{meijer_g, MeijerGSpec};
use ftrlink_core::stats::{ChainBank, HopChain};
use std::time::Instant;

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Reference truncation table: (branches L, m, K, delta, M, expected eps).
/// All rows use two hops per branch and sigma^2 = 0.5.
const TRUNCATION_TABLE: [(usize, f64, f64, f64, usize, f64); 4] = [
    (1, 5.0, 3.0, 0.5, 24, 6.52e-6),
    (2, 5.0, 3.0, 0.5, 25, 7.93e-6),
    (2, 25.0, 3.0, 0.5, 17, 8.51e-6),
    (3, 5.0, 3.0, 0.25, 21, 8.34e-6),
];

fn two_sig_figs(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powf(x.abs().log10().floor() - 1.0);
    (x / scale).round() * scale
}

#[test]
fn criterion_1_truncation_table() {
    let start = Instant::now();
    let mut all_ok = true;
    let mut lines = Vec::new();
    for (l, m, k, delta, m_terms, expected) in TRUNCATION_TABLE {
        let hop = FtrParams::new(m, k, delta, 0.5).unwrap();
        let chain = HopChain::new(vec![hop, hop]).unwrap();
        let bank = ChainBank::new(vec![chain; l]).unwrap();
        let eps = ftrlink_core::stats::truncation_error(&bank, m_terms).unwrap();
        let ok = two_sig_figs(eps) == two_sig_figs(expected);
        all_ok &= ok;
        lines.push(format!(
            "    L={l} m={m} delta={delta} M={m_terms}: eps={eps:.3e} expected={expected:.2e} [{}]",
            status(ok)
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "[criterion 1] truncation-table reproduction: {} ({elapsed:.2}s)",
        status(all_ok && elapsed < 10.0)
    );
    for l in &lines {
        println!("{l}");
    }
    assert!(elapsed < 10.0, "criterion 1 exceeded its 10 s budget: {elapsed:.2}s");
    assert!(
        all_ok,
        "truncation-error rows disagree with the reference table; the series-mass \
         definition reproduces row 1 exactly, while rows 2-4 are mutually inconsistent \
         under any per-index mass bookkeeping (see the per-row output above)"
    );
}

/// The worked three-element alignment example: element laws, channel-phase
/// sums pi/4, pi/2, pi/8, expectations truncated at eleven series terms.
fn worked_example_link() -> RisLink {
    let el = |m: f64, k: f64, ups: f64, delta: f64, th1: f64, th2: f64| RisElement {
        hop1: FtrParams::from_avg_power(m, k, delta, ups).unwrap(),
        hop2: FtrParams::from_avg_power(m, k, delta, ups).unwrap(),
        theta1: th1,
        theta2: th2,
        phi: 0.0,
    };
    use std::f64::consts::PI;
    RisLink::new(
        vec![
            el(10.0, 3.0, 10.0, 0.5, PI / 8.0, PI / 8.0),
            el(5.0, 5.0, 20.0, 0.5, PI / 4.0, PI / 4.0),
            el(15.0, 1.0, 10.0, 0.3, PI / 16.0, PI / 16.0),
        ],
        1.0,
        1.0,
    )
    .unwrap()
}

#[test]
fn criterion_2_worked_alignment_example() {
    let start = Instant::now();
    // the published expectations correspond to the first eleven series terms
    let ctrl = SeriesControl { max_terms: 11, target_epsilon: 1e-30 };
    let link = worked_example_link();
    let (e_opt, per_el) = ris::expectation_opt(&link, &ctrl).unwrap();
    let expected = [8.36, 12.79, 8.16];
    let mut ok = true;
    for (got, want) in per_el.iter().zip(expected) {
        ok &= ((got - want) / want).abs() < 0.01;
    }
    ok &= ((e_opt - 29.33) / 29.33).abs() < 0.01;
    println!(
        "    per-element expectations: {per_el:.3?} (want ~[8.36, 12.79, 8.16]); \
         ceiling {e_opt:.4} (want ~29.33) [{}]",
        status(ok)
    );

    // alignment search: 12 halvings x 4 sweeps = 48 probes per element
    let cfg = PhaseOptimizerConfig { inner_iters: 12, sweeps: 4 };
    let probes_per_element = cfg.inner_iters * cfg.sweeps;
    assert!(probes_per_element <= 50);
    let oracle = ExactMeasurementOracle::new(&link, &ctrl).unwrap();
    let (phi, _trace) = ris::optimize_phases(&link, &cfg, &oracle).unwrap();
    let totals: Vec<f64> = link
        .elements()
        .iter()
        .zip(&phi)
        .map(|(el, p)| (el.theta1 + el.theta2 + p).rem_euclid(2.0 * std::f64::consts::PI))
        .collect();
    let mean_dir = {
        let re: f64 = totals.iter().map(|t| t.cos()).sum();
        let im: f64 = totals.iter().map(|t| t.sin()).sum();
        im.atan2(re).rem_euclid(2.0 * std::f64::consts::PI)
    };
    let variance: f64 = totals
        .iter()
        .map(|t| {
            let mut d = t - mean_dir;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            d * d
        })
        .sum::<f64>()
        / totals.len() as f64;
    let var_ok = variance < 1e-6;
    ok &= var_ok;
    println!(
        "    {probes_per_element} probes/element -> residual phase variance {variance:.2e} \
         (< 1e-6) [{}]",
        status(var_ok)
    );

    // converged common phase against the consensus value 0.86
    let consensus_ok = (mean_dir - 0.86).abs() < 0.02;
    ok &= consensus_ok;
    println!(
        "    converged common phase {mean_dir:.4} vs consensus 0.86 (+-0.02) [{}]",
        status(consensus_ok)
    );

    let elapsed = start.elapsed().as_secs_f64();
    println!("[criterion 2] worked alignment example: {} ({elapsed:.2}s)", status(ok));
    assert!(elapsed < 60.0, "criterion 2 exceeded its 60 s budget");
    assert!(ok);
}

#[test]
fn criterion_3_oracle_equivalence() {
    let start = Instant::now();
    let mut ok = true;
    let ctrl = SeriesControl { max_terms: 70, target_epsilon: 1e-11 };

    // (a) impaired-relay closed-form CDF vs the generic quadrature, 20-point
    // grid, five parameter sets, relative 1e-4
    let param_sets = [
        ((5.0, 3.0, 0.5, 4.0), (10.0, 7.0, 0.7, 6.0), (0.3, 0.2), (2.0, 1.5)),
        ((5.0, 3.0, 0.5, 4.0), (10.0, 7.0, 0.7, 6.0), (0.1, 0.1), (1.0, 1.0)),
        ((6.0, 2.0, 0.4, 3.0), (8.0, 4.0, 0.6, 5.0), (0.2, 0.4), (3.0, 0.8)),
        ((2.5, 1.0, 0.9, 2.0), (4.0, 2.0, 0.3, 2.5), (0.25, 0.15), (1.5, 2.5)),
        ((12.0, 6.0, 0.6, 8.0), (3.0, 1.5, 0.8, 1.5), (0.35, 0.05), (0.7, 1.9)),
    ];
    let mut worst_rel: f64 = 0.0;
    for (h1, h2, kap, pw) in param_sets {
        let link = AfLink::new(
            FtrParams::from_avg_power(h1.0, h1.1, h1.2, h1.3).unwrap(),
            FtrParams::from_avg_power(h2.0, h2.1, h2.2, h2.3).unwrap(),
            pw.0,
            pw.1,
            1.0,
            HardwareProfile::new(kap.0, kap.1).unwrap(),
        )
        .unwrap();
        let cdf1 = af::hop_cdf(&link.hop1, &ctrl).unwrap();
        let pdf2 = af::hop_pdf(&link.hop2, &ctrl).unwrap();
        let zmax = 1.0 / link.d();
        for i in 1..=20 {
            let z = zmax * i as f64 / 21.0;
            let closed = af::z_cdf(&link, z, &ctrl).unwrap();
            let generic =
                af::af_cdf_generic(&cdf1, &pdf2, link.c1(), link.c2(), link.d(), z).unwrap();
            let rel = (closed - generic).abs() / generic.max(1e-9);
            worst_rel = worst_rel.max(rel);
        }
    }
    let a_ok = worst_rel < 1e-4;
    ok &= a_ok;
    println!(
        "    closed-form vs generic-quadrature CDF: worst relative {worst_rel:.2e} (< 1e-4) [{}]",
        status(a_ok)
    );

    // (b) combined-surface SNR CDF vs million-trial empirical deciles, one
    // and two elements
    let elements = vec![
        RisElement {
            hop1: FtrParams::from_avg_power(5.0, 3.0, 0.5, 4.0).unwrap(),
            hop2: FtrParams::from_avg_power(10.0, 7.0, 0.7, 6.0).unwrap(),
            theta1: 0.0,
            theta2: 0.0,
            phi: 0.0,
        },
        RisElement {
            hop1: FtrParams::from_avg_power(6.0, 2.0, 0.4, 3.0).unwrap(),
            hop2: FtrParams::from_avg_power(8.0, 4.0, 0.6, 5.0).unwrap(),
            theta1: 0.0,
            theta2: 0.0,
            phi: 0.0,
        },
    ];
    for l in [1usize, 2] {
        let link = RisLink::new(elements[..l].to_vec(), 2.0, 1.0).unwrap();
        let cfg = McConfig { trials: 1_000_000, seed: 2024 + l as u64, block_size: 16384 };
        let mut samples = mc::simulate_ris_snr(&link, PhaseMode::Optimal, &cfg);
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut worst_dev: f64 = 0.0;
        for dec in 1..=9 {
            let q = dec as f64 / 10.0;
            let zq = samples[(q * cfg.trials as f64) as usize];
            let analytic = ris::ris_snr_cdf(&link, zq, &ctrl).unwrap();
            let se = (q * (1.0 - q) / cfg.trials as f64).sqrt();
            worst_dev = worst_dev.max((analytic - q).abs() / se);
        }
        let b_ok = worst_dev < 3.0;
        ok &= b_ok;
        println!(
            "    L={l} SNR CDF vs 1e6-trial deciles: worst deviation {worst_dev:.2} SE (< 3) [{}]",
            status(b_ok)
        );
    }

    // (c) closed-form error probabilities vs the error-kernel quadrature,
    // relative 1e-3 (surface with one and two elements; relay fixed and
    // power-optimized)
    for l in [1usize, 2] {
        let link = RisLink::new(elements[..l].to_vec(), 2.0, 1.0).unwrap();
        let closed = ris::ris_abep(&link, 0.5, 1.0, &ctrl).unwrap();
        let quad = ris::ris_abep_quadrature(&link, 0.5, 1.0, &ctrl).unwrap();
        let rel = (closed - quad).abs() / quad;
        let c_ok = rel < 1e-3;
        ok &= c_ok;
        println!(
            "    surface ABEP L={l}: closed {closed:.6e} vs quadrature {quad:.6e} \
             (rel {rel:.2e}) [{}]",
            status(c_ok)
        );
    }
    let relay = AfLink::new(
        FtrParams::from_avg_power(5.0, 3.0, 0.5, 4.0).unwrap(),
        FtrParams::from_avg_power(10.0, 7.0, 0.7, 6.0).unwrap(),
        3.0,
        1.5,
        1.0,
        HardwareProfile::ideal(),
    )
    .unwrap();
    for (mode, label) in [(AfMode::Configured, "fixed-power"), (AfMode::OptimalPower, "optimal-power")] {
        let closed = af::af_abep(&relay, 0.5, 1.0, mode, &ctrl).unwrap();
        let quad = af::af_abep_quadrature(&relay, 0.5, 1.0, mode, &ctrl).unwrap();
        let rel = (closed - quad).abs() / quad;
        let c_ok = rel < 1e-3;
        ok &= c_ok;
        println!(
            "    relay ABEP ({label}): closed {closed:.6e} vs quadrature {quad:.6e} \
             (rel {rel:.2e}) [{}]",
            status(c_ok)
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    println!("[criterion 3] oracle equivalence: {} ({elapsed:.1}s)", status(ok));
    assert!(elapsed < 900.0, "criterion 3 exceeded its 15 min budget");
    assert!(ok);
}

#[test]
fn criterion_4_special_function_reductions() {
    let start = Instant::now();
    let mut ok = true;

    // G^{1,0}_{0,1}(x) = e^{-x}
    let spec = MeijerGSpec::new(1, 0, vec![], vec![0.0]).unwrap();
    let mut worst: f64 = 0.0;
    for x in [0.2, 1.0, 2.7, 6.0] {
        let v = meijer_g(&spec, x).unwrap();
        worst = worst.max((v - (-x).exp()).abs() / (-x).exp());
    }
    let e_ok = worst < 1e-8;
    ok &= e_ok;
    println!("    exponential reduction: worst relative {worst:.2e} [{}]", status(e_ok));

    // G^{1,1}_{1,2}(x | 1; 1,0) = lower incomplete gamma(1, x)
    let spec = MeijerGSpec::new(1, 1, vec![1.0], vec![1.0, 0.0]).unwrap();
    let mut worst: f64 = 0.0;
    for x in [0.3, 1.0, 2.5] {
        let v = meijer_g(&spec, x).unwrap();
        let want = incomplete_gamma(1.0, x, GammaKind::Lower).unwrap();
        worst = worst.max((v - want).abs() / want);
    }
    let g_ok = worst < 1e-8;
    ok &= g_ok;
    println!("    incomplete-gamma reduction: worst relative {worst:.2e} [{}]", status(g_ok));

    // G^{2,0}_{0,2}(x | -; 1,1) = 2 x K_0(2 sqrt x): frozen 2 K_0(2) at x=1
    let spec = MeijerGSpec::new(2, 0, vec![], vec![1.0, 1.0]).unwrap();
    let v = meijer_g(&spec, 1.0).unwrap();
    let b_ok = (v - 0.2277877455170364).abs() < 1e-8;
    ok &= b_ok;
    println!("    Bessel-kernel reduction: {v:.12} vs 0.227787745517 [{}]", status(b_ok));

    // randomized weight-1 H == G corpus
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        // one ascending-pole gamma, one descending, one denominator entry;
        // parameters drawn so the contour window (-b0, 1-a0) stays open
        let b0 = next() * 2.0;
        let a0 = b0 + 0.5 + next() * 0.45;
        let b1 = -0.3 - next();
        let g = MeijerGSpec::new(1, 1, vec![a0], vec![b0, b1]).unwrap();
        let h = FoxHSpec::classic(1, 1, &[(a0, 1.0)], &[(b0, 1.0), (b1, 1.0)]).unwrap();
        let x = 0.3 + 2.0 * next();
        let gv = meijer_g(&g, x).unwrap();
        let hv = fox_h_single(&h, x).unwrap();
        worst = worst.max((gv - hv).abs() / gv.abs().max(1e-12));
    }
    let h_ok = worst < 1e-8;
    ok &= h_ok;
    println!("    weight-1 H == G corpus (40 specs): worst relative {worst:.2e} [{}]", status(h_ok));

    let elapsed = start.elapsed().as_secs_f64();
    println!("[criterion 4] special-function reductions: {} ({elapsed:.2}s)", status(ok));
    assert!(elapsed < 30.0, "criterion 4 exceeded its 30 s budget");
    assert!(ok);
}

/// Figure-style channel laws: hop1 (m=5, K=5, delta=0.5), hop2
/// (m=10, K=7, delta=0.7), equal mean squared envelope `ups` on both hops.
fn figure_hops(ups: f64) -> (FtrParams, FtrParams) {
    (
        FtrParams::from_avg_power(5.0, 5.0, 0.5, ups).unwrap(),
        FtrParams::from_avg_power(10.0, 7.0, 0.7, ups).unwrap(),
    )
}

fn ris_link_uniform(l: usize, ups: f64, power: f64) -> RisLink {
    let (h1, h2) = figure_hops(ups);
    RisLink::new(
        vec![
            RisElement { hop1: h1, hop2: h2, theta1: 0.0, theta2: 0.0, phi: 0.0 };
            l
        ],
        power,
        1.0,
    )
    .unwrap()
}

fn af_link_uniform(ups: f64, power: f64) -> AfLink {
    let (h1, h2) = figure_hops(ups);
    AfLink::new(h1, h2, power, power, 1.0, HardwareProfile::ideal()).unwrap()
}

#[test]
fn criterion_5_figure_shape_checks() {
    let start = Instant::now();
    let mut ok = true;
    let trials = 100_000usize;
    let ups = 1e-6; // -60 dB channel scale
    let gamma_th = 1.0;

    // (a) 100-element surface outage stays below the power-optimized relay
    // across the stated power range (84..96 dB)
    let mut a_ok = true;
    let mut detail = String::new();
    for pdb in [84.0, 87.0, 90.0, 93.0, 96.0] {
        let p = 10f64.powf(pdb / 10.0);
        let ris_link = ris_link_uniform(100, ups, p);
        let cfg = McConfig { trials, seed: 501, block_size: 8192 };
        let ris_samples = mc::simulate_ris_snr(&ris_link, PhaseMode::Optimal, &cfg);
        let ris_op = mc::empirical_outage(&ris_samples, gamma_th, cfg.seed).unwrap();
        let af_link = af_link_uniform(ups, p);
        let af_samples =
            mc::simulate_af_snr(&af_link, PowerMode::Optimal, HardwareMode::Ideal, &cfg);
        let af_op = mc::empirical_outage(&af_samples, gamma_th, cfg.seed).unwrap();
        a_ok &= ris_op.mean <= af_op.mean;
        detail.push_str(&format!(" {pdb:.0}dB: {:.1e}<={:.1e}", ris_op.mean, af_op.mean));
    }
    ok &= a_ok;
    println!("    100-element surface below optimal relay:{detail} [{}]", status(a_ok));

    // (b) relay outage and error rate fall faster with transmit power than a
    // 40-element surface over the pre-threshold window (66..82 dB)
    let grid = [66.0, 70.0, 74.0, 78.0, 82.0];
    let mut ris_op_curve = Vec::new();
    let mut af_op_curve = Vec::new();
    let mut ris_abep_curve = Vec::new();
    let mut af_abep_curve = Vec::new();
    for pdb in grid {
        let p = 10f64.powf(pdb / 10.0);
        let cfg = McConfig { trials, seed: 777, block_size: 8192 };
        let ris_samples =
            mc::simulate_ris_snr(&ris_link_uniform(40, ups, p), PhaseMode::Optimal, &cfg);
        ris_op_curve.push(mc::empirical_outage(&ris_samples, gamma_th, cfg.seed).unwrap().mean);
        ris_abep_curve.push(mc::empirical_abep(&ris_samples, 0.5, 1.0, cfg.seed).unwrap().mean);
        let af_samples =
            mc::simulate_af_snr(&af_link_uniform(ups, p), PowerMode::Optimal, HardwareMode::Ideal, &cfg);
        af_op_curve.push(mc::empirical_outage(&af_samples, gamma_th, cfg.seed).unwrap().mean);
        af_abep_curve.push(mc::empirical_abep(&af_samples, 0.5, 1.0, cfg.seed).unwrap().mean);
    }
    let log_drop = |c: &[f64]| (c[0].max(1e-9) / c[c.len() - 1].max(1e-9)).log10();
    let b_ok = log_drop(&af_op_curve) > log_drop(&ris_op_curve)
        && log_drop(&af_abep_curve) > log_drop(&ris_abep_curve);
    ok &= b_ok;
    println!(
        "    relay decays faster in power: OP drop {:.2} vs {:.2} decades, \
         ABEP drop {:.2} vs {:.2} decades [{}]",
        log_drop(&af_op_curve),
        log_drop(&ris_op_curve),
        log_drop(&af_abep_curve),
        log_drop(&ris_abep_curve),
        status(b_ok)
    );

    // (c) surface error rate improves faster with the channel scale than the
    // relay's at fixed power (76 dB)
    let p = 10f64.powf(7.6);
    let mut ris_by_ups = Vec::new();
    let mut af_by_ups = Vec::new();
    for ups_db in [-50.0, -45.0, -40.0] {
        let u = 10f64.powf(ups_db / 10.0);
        let cfg = McConfig { trials, seed: 901, block_size: 8192 };
        let ris_samples =
            mc::simulate_ris_snr(&ris_link_uniform(40, u, p), PhaseMode::Optimal, &cfg);
        ris_by_ups.push(mc::empirical_abep(&ris_samples, 0.5, 1.0, cfg.seed).unwrap().mean);
        let af_samples =
            mc::simulate_af_snr(&af_link_uniform(u, p), PowerMode::Optimal, HardwareMode::Ideal, &cfg);
        af_by_ups.push(mc::empirical_abep(&af_samples, 0.5, 1.0, cfg.seed).unwrap().mean);
    }
    let c_ok = log_drop(&ris_by_ups) > log_drop(&af_by_ups);
    ok &= c_ok;
    println!(
        "    surface ABEP decays faster in channel scale: {:.2} vs {:.2} decades [{}]",
        log_drop(&ris_by_ups),
        log_drop(&af_by_ups),
        status(c_ok)
    );

    let elapsed = start.elapsed().as_secs_f64();
    println!("[criterion 5] figure-shape checks: {} ({elapsed:.1}s)", status(ok));
    assert!(elapsed < 1200.0, "criterion 5 exceeded its 20 min budget");
    assert!(ok);
}

#[test]
fn criterion_6_property_suites() {
    let start = Instant::now();
    let mut ok = true;
    let ctrl = SeriesControl { max_terms: 60, target_epsilon: 1e-11 };

    // series-mass monotonicity, bounded by 1 + 1e-9
    let p = FtrParams::new(5.0, 3.0, 0.5, 0.5).unwrap();
    let ws = ftr::weights(&p, &SeriesControl { max_terms: 45, target_epsilon: 1e-12 }).unwrap();
    let mut acc = 0.0;
    let mut mono_ok = true;
    for w in ws.iter() {
        mono_ok &= *w >= -1e-15;
        acc += w;
        mono_ok &= acc <= 1.0 + 1e-9;
    }
    ok &= mono_ok;
    println!("    series-mass monotonicity and bound: [{}]", status(mono_ok));

    // CDF monotonicity and clamping on a log grid
    let link = AfLink::new(
        FtrParams::from_avg_power(5.0, 3.0, 0.5, 4.0).unwrap(),
        FtrParams::from_avg_power(10.0, 7.0, 0.7, 6.0).unwrap(),
        2.0,
        1.5,
        1.0,
        HardwareProfile::new(0.3, 0.2).unwrap(),
    )
    .unwrap();
    let mut prev = 0.0;
    let mut cdf_ok = true;
    for i in 0..30 {
        let z = 1.0 / link.d() * (i as f64 + 0.5) / 30.0;
        let v = af::z_cdf(&link, z, &ctrl).unwrap();
        cdf_ok &= (0.0..=1.0).contains(&v) && v >= prev - 1e-9;
        prev = v;
    }
    ok &= cdf_ok;
    println!("    CDF monotonicity and clamping: [{}]", status(cdf_ok));

    // sampler-vs-analytic KS at the 1% level
    let n = 100_000;
    let mut xs = ftr::sample_envelope(&p, n, 424242).unwrap();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut dmax: f64 = 0.0;
    for (i, r) in xs.iter().enumerate() {
        let f = ftr::envelope_cdf(&p, *r, &ctrl).unwrap();
        dmax = dmax.max((f - i as f64 / n as f64).abs());
        dmax = dmax.max((f - (i + 1) as f64 / n as f64).abs());
    }
    let ks_crit = 1.63 / (n as f64).sqrt();
    let ks_ok = dmax < ks_crit;
    ok &= ks_ok;
    println!("    sampler KS distance {dmax:.4e} < {ks_crit:.4e}: [{}]", status(ks_ok));

    // power-split optimality against a 10^4-point grid
    let mut split_ok = true;
    let mut state = 0xDEADBEEFu64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let hw = HardwareProfile::ideal();
    for _ in 0..100 {
        let q1 = 0.05 + 3.0 * next();
        let q2 = 0.05 + 3.0 * next();
        let budget = 0.4 + 2.0 * next();
        let split = af::optimal_power_split(q1, q2, budget).unwrap();
        let best = af::af_snr_approx(split.p1 * q1 * q1, split.p2 * q2 * q2, &hw);
        for i in 1..10_000 {
            let p2 = 2.0 * budget * i as f64 / 10_000.0;
            let alt = af::af_snr_approx((2.0 * budget - p2) * q1 * q1, p2 * q2 * q2, &hw);
            split_ok &= alt <= best * (1.0 + 1e-9);
        }
    }
    ok &= split_ok;
    println!("    power-split brute-force optimality: [{}]", status(split_ok));

    // determinism across 1, 2, 8 worker threads
    let ris = ris_link_uniform(3, 2.0, 4.0);
    let cfg = McConfig { trials: 30_000, seed: 31337, block_size: 1000 };
    let run = || {
        let s = mc::simulate_ris_snr(&ris, PhaseMode::Optimal, &cfg);
        mc::summarize(&s, cfg.seed).unwrap()
    };
    let base = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let mut det_ok = true;
    for threads in [2usize, 8] {
        let got = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(run);
        det_ok &= base.mean.to_bits() == got.mean.to_bits()
            && base.std_error.to_bits() == got.std_error.to_bits();
    }
    ok &= det_ok;
    println!("    bit-identical summaries across 1/2/8 threads: [{}]", status(det_ok));

    let elapsed = start.elapsed().as_secs_f64();
    println!("[criterion 6] property suites: {} ({elapsed:.1}s)", status(ok));
    assert!(ok);
}
