//! One function per experiment, each producing a dataset and a summary.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qtm_core::collision::collide;
use qtm_core::direct::{
    maximize_power_over_frequencies, optimal_k_tau, oscillator_high_t_optimal_efficiency, oscillator_high_t_power,
    oscillator_peak_power, oscillator_profile, sinc_peak, swap_comparison, swap_compatibility_window, swap_constants,
    v_max, SwapTimeRule,
};
use qtm_core::mediator::{advantage_analysis, mediator_performance, optimize_mediator, v_m_general};
use qtm_core::oracle::{oracle_collision, TruncationPolicy};
use qtm_core::otto::{ideal_otto_power, match_target_peak, oscillator_stability, peak_value, peaks_curve, PeakObjective};
use qtm_core::regime::{carnot_efficiency, curzon_ahlborn_efficiency};
use qtm_core::search::{linear_grid, log_grid};
use qtm_core::{cycle_performance, CollisionMode, MachineConfig, Result, SearchStatus, SystemKind};

use crate::config::{Experiment, ExperimentConfig, Objective, Scale};
use crate::dataset::{col, Dataset, Summary};

/// Everything an experiment emits.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub dataset: Dataset,
    pub summary: Summary,
    /// Text printed to stdout (the validate-oracle pass/fail table).
    pub report: Option<String>,
}

pub fn run_experiment(config: &ExperimentConfig, seed: u64) -> Result<Output> {
    match config.experiment {
        Experiment::SweepTau => sweep_tau(config),
        Experiment::OptimalTimeCurve => optimal_time_curve(config),
        Experiment::Frontier => frontier(config),
        Experiment::FreqMaximize => freq_maximize(config),
        Experiment::MediatorCompare => mediator_compare(config),
        Experiment::Advantage => advantage(config),
        Experiment::OttoCompare => otto_compare(config),
        Experiment::SwapCompare => swap_compare(config),
        Experiment::ValidateOracle => validate_oracle(config, seed),
        Experiment::AppendixD => appendix_d(config),
    }
}

fn axis(config: &ExperimentConfig) -> Vec<f64> {
    let (min, max, n) = (config.real("grid.min"), config.real("grid.max"), config.count("grid.count"));
    if n == 1 {
        return vec![min];
    }
    match config.scale() {
        Scale::Linear => linear_grid(min, max, n),
        Scale::Log => log_grid(min, max, n),
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn collect_rows<F>(grid: &[f64], row: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    grid.par_iter().map(|&x| row(x)).collect()
}

fn output(columns: Vec<crate::dataset::Column>, rows: Vec<Vec<f64>>, summary: Summary) -> Output {
    let mut dataset = Dataset::new(columns);
    for row in rows {
        dataset.push(row);
    }
    Output {
        dataset,
        summary,
        report: None,
    }
}

fn sweep_tau(config: &ExperimentConfig) -> Result<Output> {
    let m = config.machine()?;
    let (v_best, tau_star) = v_max(m.g(), m.delta(), m.t_w())?;
    let k = m.k();
    let rows = collect_rows(&axis(config), |tau| {
        let p = cycle_performance(&m, tau)?;
        Ok(vec![
            tau,
            k * tau,
            p.collision.a,
            p.v,
            p.work,
            p.heat_c,
            p.heat_h,
            p.power,
            tau / tau_star,
            p.v / v_best,
        ])
    })?;
    let at_star = cycle_performance(&m, tau_star)?;
    let mut s = Summary::default();
    s.text("regime", at_star.regime.regime.name())
        .real("tau_star", tau_star)
        .real("k_tau_star", k * tau_star)
        .real("v_max", v_best)
        .real("power_max", at_star.power);
    Ok(output(
        vec![
            col("tau", "1/nu_c"),
            col("k_tau", "1"),
            col("a", "1"),
            col("v", "nu_c"),
            col("work", "hbar nu_c"),
            col("heat_c", "hbar nu_c"),
            col("heat_h", "hbar nu_c"),
            col("power", "hbar nu_c^2"),
            col("tau_over_tau_star", "1"),
            col("v_over_v_max", "1"),
        ],
        rows,
        s,
    ))
}

/// Relative power loss of the swap time against the optimal time at `k t_w = s`.
pub fn swap_time_loss(s: f64) -> Result<f64> {
    let best = optimal_k_tau(s)?;
    Ok(1.0 - 1.0 / (PI / 2.0 + s) / best.value)
}

fn optimal_time_curve(config: &ExperimentConfig) -> Result<Output> {
    let rows = collect_rows(&axis(config), |s| {
        let best = optimal_k_tau(s)?;
        Ok(vec![s, best.x, best.value, 1.0 / (PI / 2.0 + s)])
    })?;
    let (y_star, alpha) = sinc_peak();
    let mut s = Summary::default();
    s.real("y_star", y_star)
        .real("alpha", alpha)
        .real("swap_loss_at_k_tw_0.01", swap_time_loss(0.01)?);
    Ok(output(
        vec![
            col("k_tw", "1"),
            col("k_tau_star", "1"),
            col("v_max_k_over_g2", "1"),
            col("v_swap_k_over_g2", "1"),
        ],
        rows,
        s,
    ))
}

fn report_peak(s: &mut Summary, r: &qtm_core::OptimizationReport) {
    for (name, value) in r.argmax.iter().chain(&r.annotations) {
        s.real(name, *value);
    }
    s.real("power", r.objective)
        .flag("on_search_boundary", r.status == SearchStatus::Boundary);
}

fn frontier(config: &ExperimentConfig) -> Result<Output> {
    let m = config.machine()?;
    let (t_c, t_h, g, t_w) = (m.t_c(), m.t_h(), m.g(), m.t_w());
    let peak = maximize_power_over_frequencies(SystemKind::Qubit, t_c, t_h, g, t_w, None)?;
    let rows = collect_rows(&axis(config), |eta| {
        let r = maximize_power_over_frequencies(SystemKind::Qubit, t_c, t_h, g, t_w, Some(eta))?;
        let omega_c = r.get("omega_c").unwrap_or(f64::NAN);
        Ok(vec![
            eta,
            omega_c,
            omega_c / (1.0 - eta),
            r.get("tau").unwrap_or(f64::NAN),
            r.objective,
            r.objective / peak.objective,
        ])
    })?;
    let eta_ca = curzon_ahlborn_efficiency(t_c, t_h);
    let mut s = Summary::default();
    report_peak(&mut s, &peak);
    s.real("eta_ca", eta_ca)
        .flag("peak_above_eta_ca", peak.get("eta_e").unwrap_or(f64::NAN) > eta_ca);
    Ok(output(
        vec![
            col("eta_e", "1"),
            col("omega_c", "nu_c"),
            col("omega_h", "nu_c"),
            col("tau", "1/nu_c"),
            col("power", "hbar nu_c^2"),
            col("normalized_power", "1"),
        ],
        rows,
        s,
    ))
}

fn freq_maximize(config: &ExperimentConfig) -> Result<Output> {
    let m = config.machine()?;
    let (t_c, t_h) = (m.t_c(), m.t_h());
    let r = maximize_power_over_frequencies(
        SystemKind::Qubit,
        t_c,
        t_h,
        m.g(),
        m.t_w(),
        config.opt_real("machine.eta_e"),
    )?;
    let omega_c = r.get("omega_c").unwrap_or(f64::NAN);
    let row = vec![
        omega_c,
        r.get("omega_h").unwrap_or(f64::NAN),
        r.get("eta_e").unwrap_or(f64::NAN),
        r.get("tau").unwrap_or(f64::NAN),
        r.objective,
        flag(r.status == SearchStatus::Boundary),
    ];
    let mut s = Summary::default();
    report_peak(&mut s, &r);
    s.real("eta_ca", curzon_ahlborn_efficiency(t_c, t_h))
        .real("eta_carnot", carnot_efficiency(t_c, t_h))
        .real("iterations", r.iterations as f64)
        .real("evaluations", r.evaluations as f64);
    Ok(output(
        vec![
            col("omega_c", "nu_c"),
            col("omega_h", "nu_c"),
            col("eta_e", "1"),
            col("tau", "1/nu_c"),
            col("power", "hbar nu_c^2"),
            col("on_search_boundary", "flag"),
        ],
        vec![row],
        s,
    ))
}

fn mediator_compare(config: &ExperimentConfig) -> Result<Output> {
    let (_, k_m) = config.mediator_frequencies();
    let rows = collect_rows(&axis(config), |tau| {
        let m = config.mediator(tau)?;
        let p = mediator_performance(&m)?;
        let single = config.mediator_with(tau, 1, 1)?;
        Ok(vec![
            tau,
            k_m * tau,
            p.v_m,
            v_m_general(&single)?,
            p.state.n_m_after_c,
            p.state.n_m_after_h,
            p.state.work,
            p.state.heat_c,
            p.state.heat_h,
            p.power,
        ])
    })?;
    let (wc, wh) = (config.real("machine.omega_c"), config.real("machine.omega_h"));
    let (t_c, t_h) = (config.real("machine.t_c"), config.real("machine.t_h"));
    let g_m = config.real("mediator.g_m");
    let opt = optimize_mediator(wc, wh, t_c, t_h, g_m)?;
    let (v_direct, tau_direct) = v_max(g_m, 0.5 * (wh - wc), config.real("machine.t_w"))?;
    let mut s = Summary::default();
    s.real("tau_m_star", opt.report.get("tau_m").unwrap_or(f64::NAN))
        .real("v_m_max", opt.report.objective)
        .real("direct_v_max", v_direct)
        .real("direct_tau_star", tau_direct)
        .pairs("omega_m_scan", &opt.omega_m_scan)
        .flag("omega_bar_is_local_max", opt.omega_bar_is_local_max)
        .pairs(
            "u_scan",
            &opt.u_scan.iter().map(|&(u, v)| (u as f64, v)).collect::<Vec<_>>(),
        )
        .flag("single_collision_dominates", opt.single_collision_dominates);
    Ok(output(
        vec![
            col("tau_m", "1/nu_c"),
            col("k_m_tau_m", "1"),
            col("v_m", "nu_c"),
            col("v_m_single_collision", "nu_c"),
            col("n_m_after_c", "1"),
            col("n_m_after_h", "1"),
            col("work", "hbar nu_c"),
            col("heat_c", "hbar nu_c"),
            col("heat_h", "hbar nu_c"),
            col("power", "hbar nu_c^2"),
        ],
        rows,
        s,
    ))
}

fn advantage(config: &ExperimentConfig) -> Result<Output> {
    let m = config.machine()?;
    let table = advantage_analysis(m.omega_c(), m.omega_h(), m.t_c(), m.t_h(), m.g(), &axis(config))?;
    let window: Vec<f64> = table.iter().filter(|r| r.mediator_advantage).map(|r| r.t_w).collect();
    let mut s = Summary::default();
    s.flag("window_nonempty", !window.is_empty());
    if let (Some(lo), Some(hi)) = (window.first(), window.last()) {
        s.real("window_t_w_min", *lo).real("window_t_w_max", *hi);
    }
    if let Some(r) = table.first() {
        s.real("v_m_max", r.v_m_max).real("tau_m_star", r.tau_m_star);
    }
    let rows = table
        .iter()
        .map(|r| {
            vec![
                r.t_w,
                r.v_max,
                r.tau_star,
                r.v_m_max,
                r.tau_m_star,
                flag(r.within_validity),
                flag(r.mediator_advantage),
            ]
        })
        .collect();
    Ok(output(
        vec![
            col("t_w", "1/nu_c"),
            col("v_max", "nu_c"),
            col("tau_star", "1/nu_c"),
            col("v_m_max", "nu_c"),
            col("tau_m_star", "1/nu_c"),
            col("within_validity", "flag"),
            col("mediator_advantage", "flag"),
        ],
        rows,
        s,
    ))
}

fn otto_compare(config: &ExperimentConfig) -> Result<Output> {
    let m = config.machine()?;
    let kind = m.kind_c();
    let (wc, wh, t_c, t_h) = (m.omega_c(), m.omega_h(), m.t_c(), m.t_h());
    let grid = axis(config);
    let curve = peaks_curve(&grid, wc, wh, t_c, t_h, kind)?;
    let rows = curve
        .par_iter()
        .map(|p| {
            let swap_tau = PI / (2.0 * p.k);
            let machine = m.clone().with_coupling(p.g)?.with_waiting_time(0.0)?;
            let otto_swap = ideal_otto_power(wc, wh, t_c, t_h, swap_tau, kind)?;
            Ok(vec![
                p.g,
                p.k,
                p.tau_star,
                p.power,
                ideal_otto_power(wc, wh, t_c, t_h, p.tau_star, kind)?,
                cycle_performance(&machine, swap_tau)?.power,
                p.g * p.g / (p.k * p.k) * otto_swap,
                oscillator_stability(wc, wh, p.g)?.lambda_minus,
                flag(p.stable),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut s = Summary::default();
    if let Some(target) = config.opt_real("otto.target") {
        let objective = match config.objective() {
            Objective::EnginePower => PeakObjective::EnginePower,
            Objective::RefrigeratorChi => PeakObjective::RefrigeratorChi,
        };
        let range = (grid[0], grid[grid.len() - 1]);
        let g = match_target_peak(target, objective, wc, wh, t_c, t_h, kind, range)?;
        s.real("target", target)
            .real("matched_g", g)
            .real("matched_peak", peak_value(objective, g, wc, wh, t_c, t_h, kind)?);
    }
    let bound = (wc * wh).sqrt();
    s.real("stability_bound_g", bound)
        .real("lambda_minus_at_bound", oscillator_stability(wc, wh, bound)?.lambda_minus);
    Ok(output(
        vec![
            col("g", "nu_c"),
            col("k", "nu_c"),
            col("tau_star", "1/nu_c"),
            col("peak_power", "hbar nu_c^2"),
            col("otto_power_at_tau_star", "hbar nu_c^2"),
            col("swap_power", "hbar nu_c^2"),
            col("swap_ceiling", "hbar nu_c^2"),
            col("lambda_minus", "nu_c"),
            col("stable", "flag"),
        ],
        rows,
        s,
    ))
}

fn swap_compare(config: &ExperimentConfig) -> Result<Output> {
    let m = config.machine()?;
    let (wc, wh, t_w) = (m.omega_c(), m.omega_h(), m.t_w());
    let delta = m.delta().abs();
    let rows = collect_rows(&axis(config), |g| {
        let c = swap_comparison(wc, wh, g, t_w)?;
        Ok(vec![
            g,
            g / delta,
            c.t_s,
            c.v_max,
            c.v_s_max,
            c.v_s_full_swap,
            c.ratio,
            flag(c.exchange_beats_full_swap),
            flag(c.rule == SwapTimeRule::RabiFrequency),
        ])
    })?;
    let (threshold, prefactor) = swap_constants();
    let (lo, hi) = swap_compatibility_window()?;
    let mut s = Summary::default();
    s.real("threshold_constant", threshold)
        .real("ratio_prefactor", prefactor)
        .real("compatibility_ratio_min", lo)
        .real("compatibility_ratio_max", hi);
    if let Some(g) = swap_comparison(wc, wh, m.g(), t_w)?.threshold_g {
        s.real("threshold_g", g);
    }
    Ok(output(
        vec![
            col("g", "nu_c"),
            col("g_over_delta", "1"),
            col("t_s", "1/nu_c"),
            col("v_max", "nu_c"),
            col("v_s_max", "nu_c"),
            col("v_s_full_swap", "nu_c"),
            col("ratio", "1"),
            col("exchange_beats_full_swap", "flag"),
            col("rabi_rule", "flag"),
        ],
        rows,
        s,
    ))
}

fn appendix_d(config: &ExperimentConfig) -> Result<Output> {
    let m = config.machine()?;
    let (t_c, t_h, g, t_w) = (m.t_c(), m.t_h(), m.g(), m.t_w());
    let eta_c = carnot_efficiency(t_c, t_h);
    let eta = config.real("machine.eta_e");
    let l = (1.0 - eta_c) / (1.0 - eta);
    let rows = collect_rows(&axis(config), |x| {
        let profile = oscillator_profile(x, l)?;
        let omega_c = 2.0 * x * t_c;
        let (v, _) = v_max(g, 0.5 * omega_c * eta / (1.0 - eta), t_w)?;
        Ok(vec![
            x,
            omega_c,
            profile.f,
            profile.b,
            oscillator_peak_power(x, eta, eta_c, g, t_w, t_c)?,
            t_c * oscillator_high_t_power(eta, eta_c, v)?,
        ])
    })?;
    let best = oscillator_high_t_optimal_efficiency(eta_c)?;
    let eta_ca = curzon_ahlborn_efficiency(t_c, t_h);
    let decreasing = rows.windows(2).all(|w| w[1][4] < w[0][4]);
    let mut s = Summary::default();
    s.real("eta_e", eta)
        .real("eta_carnot", eta_c)
        .real("l", l)
        .real("high_t_optimal_efficiency", best.x)
        .real("eta_ca", eta_ca)
        .real("optimal_minus_eta_ca", best.x - eta_ca)
        .flag("power_strictly_decreasing", decreasing);
    Ok(output(
        vec![
            col("x", "1"),
            col("omega_c", "nu_c"),
            col("f", "1"),
            col("b", "1"),
            col("power", "hbar nu_c^2"),
            col("high_t_power", "hbar nu_c^2"),
        ],
        rows,
        s,
    ))
}

/// One randomized oracle validation point.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePoint {
    pub machine: MachineConfig,
    pub tau: f64,
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Seeded parameter points with `g/|delta|` in [1e-2, 1e2], `k tau` in (0, 2 pi]
/// and `omega/T` in [0.1, 10] ([1, 10] on oscillator sides). Oscillator pairs
/// above 0.999 of the stability bound are redrawn.
pub fn oracle_points(
    omega_c: f64,
    kind_c: SystemKind,
    kind_h: SystemKind,
    count: usize,
    seed: u64,
) -> Result<Vec<OraclePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low_occupation = |k: SystemKind| if k.canonical() == SystemKind::Oscillator { 1.0 } else { 0.1 };
    let two_oscillators =
        kind_c.canonical() == SystemKind::Oscillator && kind_h.canonical() == SystemKind::Oscillator;
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let ratio = log_uniform(&mut rng, 0.2, 5.0);
        let g_over_delta = log_uniform(&mut rng, 1e-2, 1e2);
        let k_tau = 2.0 * PI * (1.0 - rng.gen_range(0.0..1.0));
        let x_c = log_uniform(&mut rng, low_occupation(kind_c), 10.0);
        let x_h = log_uniform(&mut rng, low_occupation(kind_h), 10.0);
        if (ratio - 1.0).abs() < 1e-2 {
            continue;
        }
        let omega_h = omega_c * ratio;
        let delta = 0.5 * (omega_h - omega_c);
        let g = g_over_delta * delta.abs();
        if two_oscillators && g >= 0.999 * (omega_c * omega_h).sqrt() {
            continue;
        }
        let mode = if qtm_core::collision::closed_form_is_exact(kind_c, kind_h) {
            CollisionMode::Exact
        } else {
            CollisionMode::Approximate
        };
        let machine = MachineConfig::new(omega_c, omega_h, omega_c / x_c, omega_h / x_h, g)?
            .with_kinds(kind_c, kind_h)
            .with_mode(mode);
        points.push(OraclePoint {
            tau: k_tau / delta.hypot(g),
            machine,
        });
    }
    Ok(points)
}

fn validate_oracle(config: &ExperimentConfig, seed: u64) -> Result<Output> {
    let (kind_c, kind_h) = config.kinds();
    let count = config.count("oracle.points");
    let threshold = config.real("oracle.threshold");
    let policy = TruncationPolicy::new(config.count("oracle.levels"), config.real("oracle.tail_tolerance"))?;
    let points = oracle_points(config.real("machine.omega_c"), kind_c, kind_h, count, seed)?;
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let formula = collide(&p.machine, p.tau)?;
            let oracle = oracle_collision(&p.machine, p.tau, &policy)?;
            let diff = (formula.n_h_post - oracle.outcome.n_h_post).abs();
            let m = &p.machine;
            Ok(vec![
                i as f64,
                m.omega_c(),
                m.omega_h(),
                m.t_c(),
                m.t_h(),
                m.g(),
                p.tau,
                formula.n_h_post,
                oracle.outcome.n_h_post,
                diff,
                flag(oracle.is_certified()),
                flag(oracle.is_certified() && diff <= threshold),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let certified: Vec<&Vec<f64>> = rows.iter().filter(|r| r[10] == 1.0).collect();
    let max_diff = certified.iter().map(|r| r[9]).fold(0.0, f64::max);
    let passed = rows.iter().filter(|r| r[11] == 1.0).count();
    let agreement = !certified.is_empty() && max_diff <= threshold;
    let all_certified = certified.len() == rows.len();

    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let mut report = String::new();
    writeln!(report, "validate-oracle: {kind_c}-{kind_h}, {count} points, seed {seed}").unwrap();
    writeln!(report, "  {:<30} {:>12} {:>12}  result", "criterion", "value", "threshold").unwrap();
    writeln!(
        report,
        "  {:<30} {:>12.3e} {:>12.1e}  {}",
        "max |d<n_h>| (certified)",
        max_diff,
        threshold,
        verdict(agreement)
    )
    .unwrap();
    writeln!(
        report,
        "  {:<30} {:>12} {:>12}  {}",
        "certified points",
        format!("{}/{}", certified.len(), rows.len()),
        "all",
        verdict(all_certified)
    )
    .unwrap();
    writeln!(
        report,
        "  {:<30} {:>12} {:>12}  {}",
        "points within threshold",
        format!("{passed}/{}", rows.len()),
        "all",
        verdict(passed == rows.len())
    )
    .unwrap();

    let mut s = Summary::default();
    s.real("points", rows.len() as f64)
        .real("certified", certified.len() as f64)
        .real("passed", passed as f64)
        .real("max_abs_diff", max_diff)
        .real("threshold", threshold)
        .text("verdict", verdict(agreement && all_certified));
    let mut out = output(
        vec![
            col("point", "1"),
            col("omega_c", "nu_c"),
            col("omega_h", "nu_c"),
            col("t_c", "nu_c"),
            col("t_h", "nu_c"),
            col("g", "nu_c"),
            col("tau", "1/nu_c"),
            col("n_h_formula", "1"),
            col("n_h_oracle", "1"),
            col("abs_diff", "1"),
            col("certified", "flag"),
            col("pass", "flag"),
        ],
        rows,
        s,
    );
    out.report = Some(report);
    Ok(out)
}
