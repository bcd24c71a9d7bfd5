//! The machine without mediator: one collision of duration `tau` between a
//! cold and a hot system, then rethermalization during the waiting time `t_w`.
//!
//! Every power function factorizes into a thermodynamic prefactor times the
//! rate term `V = (g/k)^2 sin^2(k tau) / (tau + t_w)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::collision::{collide, CollisionOutcome};
use crate::error::{require_non_negative, require_positive, QtmError, Result};
use crate::machine::MachineConfig;
use crate::regime::{carnot_efficiency, classify_regime, Regime, RegimeReport};
use crate::report::{OptimizationReport, SearchStatus};
use crate::search::{golden_section_max, grid_seeded_max, linear_grid, log_grid, ScalarMax};
use crate::system::{thermal_occupation, SystemKind};

/// Relative bracket tolerance of every scalar refinement.
pub const SCALAR_TOLERANCE: f64 = 1e-10;
/// Multi-start seeds over omega_c.
pub const FREQUENCY_SEEDS: usize = 64;
/// Default number of efficiencies sampled along a frontier.
pub const FRONTIER_POINTS: usize = 200;

pub fn v_term(g: f64, delta: f64, tau: f64, t_w: f64) -> Result<f64> {
    require_non_negative("g", g)?;
    require_non_negative("tau", tau)?;
    require_non_negative("t_w", t_w)?;
    if tau == 0.0 || g == 0.0 {
        return Ok(0.0);
    }
    let k = delta.hypot(g);
    let ratio = g / k;
    Ok(ratio * ratio * (k * tau).sin().powi(2) / (tau + t_w))
}

/// Maximizer `y*` of `sin^2(y)/y` and the maximum `alpha`, found by golden section.
pub fn sinc_peak() -> (f64, f64) {
    static PEAK: OnceLock<(f64, f64)> = OnceLock::new();
    *PEAK.get_or_init(|| {
        let best = golden_section_max(|y| y.sin().powi(2) / y, 1e-6, PI, 1e-13)
            .expect("sin^2(y)/y is unimodal on (0, pi)");
        (best.x, best.value)
    })
}

/// Maximizes `sin^2(y) / (y + s)` over the first lobe `y in (0, pi)`, where `s = k t_w`.
///
/// Later lobes repeat the same numerator peak over a larger denominator, so
/// the first lobe holds the global maximum.
pub fn optimal_k_tau(k_tw: f64) -> Result<ScalarMax> {
    require_non_negative("k t_w", k_tw)?;
    golden_section_max(
        |y| y.sin().powi(2) / (y + k_tw),
        0.0,
        PI,
        SCALAR_TOLERANCE,
    )
}

/// `(V_max, tau*)` for fixed coupling, detuning and waiting time.
pub fn v_max(g: f64, delta: f64, t_w: f64) -> Result<(f64, f64)> {
    require_positive("g", g)?;
    require_non_negative("t_w", t_w)?;
    let k = delta.hypot(g);
    let (y, peak) = if t_w == 0.0 {
        sinc_peak()
    } else {
        let best = optimal_k_tau(k * t_w)?;
        (best.x, best.value)
    };
    Ok((g * g / k * peak, y / k))
}

/// Optimal collision time at fixed frequencies, coupling and waiting time.
pub fn optimize_tau(g: f64, delta: f64, t_w: f64) -> Result<OptimizationReport> {
    require_positive("g", g)?;
    require_non_negative("t_w", t_w)?;
    let k = delta.hypot(g);
    let best = optimal_k_tau(k * t_w)?;
    let scale = g * g / k;
    let mut report = OptimizationReport::from_scalar(&best, "k_tau");
    report.objective = scale * best.value;
    report.argmax = vec![("tau", best.x / k), ("k_tau", best.x)];
    report.probes = linear_grid(0.0, PI, 9)[1..8]
        .iter()
        .map(|&y| (y, scale * y.sin().powi(2) / (y + k * t_w)))
        .collect();
    report.annotations = vec![
        ("k", k),
        ("v_swap", v_term(g, delta, PI / 2.0 / k, t_w)?),
    ];
    Ok(report)
}

/// Work, heats and power of one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePerformance {
    pub regime: RegimeReport,
    pub work: f64,
    pub heat_c: f64,
    pub heat_h: f64,
    /// P_E, P_R, P_A according to `regime` (zero when degenerate).
    pub power: f64,
    pub v: f64,
    pub collision: CollisionOutcome,
}

pub fn cycle_performance(config: &MachineConfig, tau: f64) -> Result<CyclePerformance> {
    let collision = collide(config, tau)?;
    let regime = classify_regime(config.omega_c(), config.omega_h(), config.t_c(), config.t_h())?;
    let v = v_term(config.g(), config.delta(), tau, config.t_w())?;
    let power = regime.power_prefactor(collision.n_c_th, collision.n_h_th) * v;
    Ok(CyclePerformance {
        regime,
        work: collision.work,
        heat_c: collision.heat_c,
        heat_h: collision.heat_h,
        power,
        v,
        collision,
    })
}

/// Engine prefactor (omega_h - omega_c)(<n_h>_th - <n_c>_th).
pub(crate) fn engine_prefactor(
    kind: SystemKind,
    omega_c: f64,
    omega_h: f64,
    t_c: f64,
    t_h: f64,
) -> Result<f64> {
    let n_c = thermal_occupation(kind, omega_c, t_c)?;
    let n_h = thermal_occupation(kind, omega_h, t_h)?;
    Ok((omega_h - omega_c) * (n_h - n_c))
}

/// Maximizes engine power over omega_c at fixed efficiency, given a rate
/// provider `rate(omega_c, omega_h) -> (V_max, tau*)`.
pub(crate) fn maximize_over_omega_c<R>(
    kind: SystemKind,
    t_c: f64,
    t_h: f64,
    eta: f64,
    rate: &R,
) -> Result<OptimizationReport>
where
    R: Fn(f64, f64) -> Result<(f64, f64)> + Sync,
{
    let eta_c = carnot_efficiency(t_c, t_h);
    if !(eta > 0.0 && eta < eta_c) {
        return Err(QtmError::Domain {
            name: "eta_e",
            value: eta,
            requirement: "fixed efficiency must satisfy 0 < eta_e < eta_C",
        });
    }
    let nu_c = t_c;
    let power = |ln_wc: f64| -> f64 {
        let wc = ln_wc.exp();
        let wh = wc / (1.0 - eta);
        match (engine_prefactor(kind, wc, wh, t_c, t_h), rate(wc, wh)) {
            (Ok(pref), Ok((v, _))) => pref * v,
            _ => f64::NEG_INFINITY,
        }
    };
    let grid: Vec<f64> = log_grid(1e-3 * nu_c, 10.0 * (t_h / t_c) * nu_c, FREQUENCY_SEEDS)
        .into_iter()
        .map(f64::ln)
        .collect();
    let seeded = grid_seeded_max(power, &grid, SCALAR_TOLERANCE)?;
    let omega_c = seeded.best.x.exp();
    let omega_h = omega_c / (1.0 - eta);
    let (_, tau) = rate(omega_c, omega_h)?;
    let mut report = OptimizationReport::from_seeded(seeded, "ln_omega_c");
    report.argmax = vec![("omega_c", omega_c), ("tau", tau)];
    report.annotations = vec![("omega_h", omega_h), ("eta_e", eta)];
    Ok(report)
}

/// Scans efficiencies and refines the global engine-power peak.
pub(crate) fn maximize_over_efficiency<R>(
    kind: SystemKind,
    t_c: f64,
    t_h: f64,
    rate: &R,
) -> Result<OptimizationReport>
where
    R: Fn(f64, f64) -> Result<(f64, f64)> + Sync,
{
    let eta_c = carnot_efficiency(t_c, t_h);
    let grid = efficiency_grid(eta_c, FRONTIER_POINTS);
    let peak_at = |eta: f64| {
        maximize_over_omega_c(kind, t_c, t_h, eta, rate)
            .map(|r| r.objective)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let seeded = grid_seeded_max(peak_at, &grid, SCALAR_TOLERANCE)?;
    let eta = seeded.best.x;
    let inner = maximize_over_omega_c(kind, t_c, t_h, eta, rate)?;
    let mut report = OptimizationReport::from_seeded(seeded, "eta_e");
    report.objective = report.objective.max(inner.objective);
    report.argmax = inner.argmax.clone();
    report.argmax.push(("eta_e", eta));
    report.annotations = vec![
        ("omega_h", inner.get("omega_h").unwrap_or(f64::NAN)),
        ("eta_carnot", eta_c),
    ];
    if inner.status == SearchStatus::Boundary {
        report.status = SearchStatus::Boundary;
    }
    Ok(report)
}

fn efficiency_grid(eta_c: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| eta_c * i as f64 / (points + 1) as f64)
        .collect()
}

fn check_frequency_search(kind: SystemKind, t_c: f64, t_h: f64, g: f64, t_w: f64) -> Result<()> {
    require_positive("t_c", t_c)?;
    require_positive("t_h", t_h)?;
    require_positive("g", g)?;
    require_non_negative("t_w", t_w)?;
    if t_h <= t_c {
        return Err(QtmError::Domain {
            name: "t_h",
            value: t_h,
            requirement: "an engine needs t_h > t_c",
        });
    }
    if kind.canonical() != SystemKind::Qubit {
        // Oscillator power grows without bound as the frequencies vanish.
        return Err(QtmError::Domain {
            name: "kind",
            value: f64::NAN,
            requirement: "frequency maximization has an interior optimum only for qubits",
        });
    }
    Ok(())
}

/// Engine power maximized over tau and omega_c (with omega_h = omega_c / (1 - eta_e)).
///
/// With `eta_e = Some(_)` the efficiency is held fixed; otherwise it is
/// maximized as well and the report carries the efficiency at maximum power
/// under the name `eta_e`.
pub fn maximize_power_over_frequencies(
    kind: SystemKind,
    t_c: f64,
    t_h: f64,
    g: f64,
    t_w: f64,
    eta_e: Option<f64>,
) -> Result<OptimizationReport> {
    check_frequency_search(kind, t_c, t_h, g, t_w)?;
    let rate = |wc: f64, wh: f64| v_max(g, 0.5 * (wh - wc), t_w);
    match eta_e {
        Some(eta) => maximize_over_omega_c(kind, t_c, t_h, eta, &rate),
        None => maximize_over_efficiency(kind, t_c, t_h, &rate),
    }
}

/// One point of the efficiency / maximum-power frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub eta_e: f64,
    pub omega_c: f64,
    pub omega_h: f64,
    pub tau: f64,
    pub power: f64,
    /// Power divided by the global peak.
    pub normalized: f64,
}

/// Frontier with `points` efficiencies uniform in (0, eta_C), plus the global peak.
pub fn efficiency_power_frontier(
    kind: SystemKind,
    t_c: f64,
    t_h: f64,
    g: f64,
    t_w: f64,
    points: usize,
) -> Result<(Vec<FrontierPoint>, OptimizationReport)> {
    check_frequency_search(kind, t_c, t_h, g, t_w)?;
    let peak = maximize_power_over_frequencies(kind, t_c, t_h, g, t_w, None)?;
    let rate = |wc: f64, wh: f64| v_max(g, 0.5 * (wh - wc), t_w);
    let grid = efficiency_grid(carnot_efficiency(t_c, t_h), points);
    let frontier = grid
        .par_iter()
        .map(|&eta| {
            let r = maximize_over_omega_c(kind, t_c, t_h, eta, &rate)?;
            let omega_c = r.get("omega_c").unwrap_or(f64::NAN);
            Ok(FrontierPoint {
                eta_e: eta,
                omega_c,
                omega_h: omega_c / (1.0 - eta),
                tau: r.get("tau").unwrap_or(f64::NAN),
                power: r.objective,
                normalized: r.objective / peak.objective,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((frontier, peak))
}

/// High-temperature oscillator engine power in units of k_B T_c:
/// `eta (eta_C - eta) / ((1 - eta_C)(1 - eta)) * V`.
pub fn oscillator_high_t_power(eta_e: f64, eta_c: f64, v: f64) -> Result<f64> {
    if !(eta_c > 0.0 && eta_c < 1.0) {
        return Err(QtmError::Domain {
            name: "eta_c",
            value: eta_c,
            requirement: "must lie in (0, 1)",
        });
    }
    if !(eta_e > 0.0 && eta_e <= eta_c) {
        return Err(QtmError::Domain {
            name: "eta_e",
            value: eta_e,
            requirement: "must lie in (0, eta_c]",
        });
    }
    require_non_negative("V", v)?;
    Ok(eta_e * (eta_c - eta_e) / ((1.0 - eta_c) * (1.0 - eta_e)) * v)
}

/// Efficiency maximizing the high-temperature oscillator power.
pub fn oscillator_high_t_optimal_efficiency(eta_c: f64) -> Result<ScalarMax> {
    oscillator_high_t_power(0.5 * eta_c, eta_c, 1.0)?;
    golden_section_max(
        |eta| oscillator_high_t_power(eta, eta_c, 1.0).unwrap_or(f64::NEG_INFINITY),
        0.0,
        eta_c,
        1e-13,
    )
}

/// `f(x) = x [coth(l x) - coth(x)]` and `b(x) = (sinh x cosh x - x) / sinh^2 x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorProfile {
    pub f: f64,
    pub b: f64,
}

pub fn oscillator_profile(x: f64, l: f64) -> Result<OscillatorProfile> {
    require_positive("x", x)?;
    if !(l > 0.0 && l <= 1.0) {
        return Err(QtmError::Domain {
            name: "l",
            value: l,
            requirement: "must lie in (0, 1]",
        });
    }
    Ok(OscillatorProfile {
        f: profile_f(x, l),
        b: profile_b(x),
    })
}

fn profile_f(x: f64, l: f64) -> f64 {
    if l * x < 1e-4 {
        // coth z = 1/z + z/3 - z^3/45 + ...
        let x2 = x * x;
        1.0 / l - 1.0 + (l - 1.0) * x2 / 3.0 - (l.powi(3) - 1.0) * x2 * x2 / 45.0
    } else {
        x * (1.0 / (l * x).tanh() - 1.0 / x.tanh())
    }
}

pub(crate) fn profile_b(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        x * (2.0 / 3.0 - 4.0 * x2 / 45.0 + 4.0 * x2 * x2 / 315.0)
    } else {
        let s = x.sinh();
        1.0 / x.tanh() - x / (s * s)
    }
}

/// Maximum oscillator engine power at `x = omega_c / (2 T_c)` (fixed efficiencies),
/// `T_c eta/(1-eta) f(x) V_max`, exact for ideal oscillators.
pub fn oscillator_peak_power(x: f64, eta_e: f64, eta_c: f64, g: f64, t_w: f64, t_c: f64) -> Result<f64> {
    require_positive("t_c", t_c)?;
    if !(eta_e > 0.0 && eta_e <= eta_c && eta_c < 1.0) {
        return Err(QtmError::Domain {
            name: "eta_e",
            value: eta_e,
            requirement: "need 0 < eta_e <= eta_c < 1",
        });
    }
    let l = (1.0 - eta_c) / (1.0 - eta_e);
    let profile = oscillator_profile(x, l)?;
    let omega_c = 2.0 * x * t_c;
    let delta = 0.5 * omega_c * eta_e / (1.0 - eta_e);
    let (v, _) = v_max(g, delta, t_w)?;
    Ok(t_c * eta_e / (1.0 - eta_e) * profile.f * v)
}

/// Rate term of a perfect-swap Hamiltonian acting for `tau_s`
/// (`t_s` is its full-swap time).
pub fn swap_v_term(tau_s: f64, t_s: f64, t_w: f64) -> Result<f64> {
    require_non_negative("tau_s", tau_s)?;
    require_positive("t_s", t_s)?;
    require_non_negative("t_w", t_w)?;
    if tau_s == 0.0 {
        return Ok(0.0);
    }
    Ok((PI * tau_s / (2.0 * t_s)).sin().powi(2) / (tau_s + t_w))
}

/// `(max V_S, optimal tau_s)` over the switching time.
pub fn swap_optimal_v(t_s: f64, t_w: f64) -> Result<(f64, f64)> {
    require_positive("t_s", t_s)?;
    require_non_negative("t_w", t_w)?;
    let scale = 2.0 * t_s / PI;
    let best = golden_section_max(
        |y| y.sin().powi(2) / (scale * y + t_w),
        0.0,
        PI,
        SCALAR_TOLERANCE,
    )?;
    Ok((best.value, scale * best.x))
}

/// Which spectral spread fixes the fair swap time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapTimeRule {
    /// g <= sqrt(w_c w_h): spread 2 w_bar, t_S = pi / (2 w_bar).
    OmegaBar,
    /// g > sqrt(w_c w_h): spread 2 k, t_S = pi / (2 k).
    RabiFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapComparison {
    pub rule: SwapTimeRule,
    pub t_s: f64,
    /// Time-optimized swap rate term.
    pub v_s_max: f64,
    /// Time-optimized exchange rate term.
    pub v_max: f64,
    /// Swap rate term at a full swap (tau_S = t_S).
    pub v_s_full_swap: f64,
    /// V_max / V_S(tau_S = t_S).
    pub ratio: f64,
    /// Coupling above which exchange beats a full swap (closed form, t_w = 0 only).
    pub threshold_g: Option<f64>,
    pub exchange_beats_full_swap: bool,
}

/// `(sqrt(2/(alpha pi - 2)), alpha pi / 2)`.
pub fn swap_constants() -> (f64, f64) {
    let (_, alpha) = sinc_peak();
    ((2.0 / (alpha * PI - 2.0)).sqrt(), alpha * PI / 2.0)
}

/// Exchange-beats-full-swap threshold when t_S = pi/(2 w_bar), at t_w = 0.
pub fn swap_threshold_omega_bar(omega_bar: f64, delta: f64) -> f64 {
    let (_, alpha) = sinc_peak();
    let ap = alpha * PI;
    (2.0 * omega_bar * (omega_bar + (omega_bar * omega_bar + ap * ap * delta * delta).sqrt())).sqrt()
        / ap
}

pub fn swap_comparison(omega_c: f64, omega_h: f64, g: f64, t_w: f64) -> Result<SwapComparison> {
    require_positive("omega_c", omega_c)?;
    require_positive("omega_h", omega_h)?;
    require_positive("g", g)?;
    require_non_negative("t_w", t_w)?;
    let delta = 0.5 * (omega_h - omega_c);
    let omega_bar = 0.5 * (omega_c + omega_h);
    let k = delta.hypot(g);
    let (rule, t_s) = if g <= (omega_c * omega_h).sqrt() {
        (SwapTimeRule::OmegaBar, PI / (2.0 * omega_bar))
    } else {
        (SwapTimeRule::RabiFrequency, PI / (2.0 * k))
    };
    let (v_max, _) = v_max(g, delta, t_w)?;
    let (v_s_max, _) = swap_optimal_v(t_s, t_w)?;
    let v_s_full_swap = 1.0 / (t_s + t_w);
    let threshold_g = (t_w == 0.0).then(|| match rule {
        SwapTimeRule::OmegaBar => swap_threshold_omega_bar(omega_bar, delta),
        SwapTimeRule::RabiFrequency => swap_constants().0 * delta.abs(),
    });
    Ok(SwapComparison {
        rule,
        t_s,
        v_s_max,
        v_max,
        v_s_full_swap,
        ratio: v_max / v_s_full_swap,
        threshold_g,
        exchange_beats_full_swap: v_max > v_s_full_swap,
    })
}

/// Range of omega_h / omega_c where a coupling g <= sqrt(w_c w_h) can beat a
/// full swap at t_w = 0.
pub fn swap_compatibility_window() -> Result<(f64, f64)> {
    let margin = |r: f64| r.sqrt() - swap_threshold_omega_bar(0.5 * (1.0 + r), 0.5 * (r - 1.0));
    let lo = crate::search::bisect_root(margin, 0.1, 1.0, 1e-13)?;
    let hi = crate::search::bisect_root(margin, 1.0, 10.0, 1e-13)?;
    Ok((lo, hi))
}

/// Engine-regime check used by the frequency searches.
pub fn is_engine(omega_c: f64, omega_h: f64, t_c: f64, t_h: f64) -> Result<bool> {
    Ok(classify_regime(omega_c, omega_h, t_c, t_h)?.regime == Regime::Engine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent route to the optimum: the stationarity condition
    /// tan(y) = 2 (y + s) on (0, pi/2), solved by bisection.
    fn stationary_k_tau(s: f64) -> f64 {
        crate::search::bisect_root(
            |y| 2.0 * (y + s) * y.cos() - y.sin(),
            1e-9,
            PI / 2.0,
            1e-15,
        )
        .unwrap()
    }

    #[test]
    fn sinc_constants() {
        let (y, alpha) = sinc_peak();
        assert!((y - 1.16556).abs() < 1e-4);
        assert!((alpha - 0.724611).abs() < 1e-5);
        assert!((y - stationary_k_tau(0.0)).abs() < 1e-7);
    }

    #[test]
    fn v_term_examples() {
        let (g, delta) = (0.8, 0.6);
        let k = 1.0;
        let (y, alpha) = sinc_peak();
        assert_relative_eq!(v_term(g, delta, y / k, 0.0).unwrap(), alpha * g * g / k, epsilon = 1e-15);
        assert!(v_term(g, delta, PI / k, 0.0).unwrap().abs() < 1e-30);
        assert_eq!(v_term(0.0, delta, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(v_term(g, delta, 0.0, 0.0).unwrap(), 0.0);
        assert!(v_term(g, delta, -1.0, 0.0).is_err());
    }

    #[test]
    fn optimal_time_matches_stationarity() {
        for s in [0.0, 1e-3, 0.01, 0.1, 1.0, 10.0, 1e3] {
            let y = optimal_k_tau(s).unwrap().x;
            assert!((y - stationary_k_tau(s)).abs() < 1e-6, "s = {s}");
        }
    }

    #[test]
    fn optimal_time_limits() {
        let r = optimize_tau(1.0, 0.0, 0.0).unwrap();
        assert!((r.get("k_tau").unwrap() - 1.16556).abs() < 1e-4);
        let r = optimize_tau(1.0, 0.0, 1e3).unwrap();
        assert!((r.get("k_tau").unwrap() - PI / 2.0).abs() < 1e-3);
        assert!(r.dominates_probes());
    }

    #[test]
    fn swap_time_loss_at_small_waiting_time() {
        let r = optimize_tau(1.0, 0.0, 0.01).unwrap();
        let loss = (r.objective - r.get("v_swap").unwrap()) / r.objective;
        assert!((loss - 0.12).abs() < 0.01, "loss = {loss}");
    }

    #[test]
    fn cycle_power_matches_prefactor_form() {
        let m = MachineConfig::new(1.0, 5.0, 1.0, 10.0, 1.0).unwrap();
        let perf = cycle_performance(&m, 0.7).unwrap();
        assert_eq!(perf.regime.regime, Regime::Engine);
        let direct = -perf.work / 0.7;
        assert_relative_eq!(perf.power, direct, max_relative = 1e-12);
        assert!(perf.power > 0.0);
    }

    #[test]
    fn degenerate_cycle_has_no_power() {
        let m = MachineConfig::new(1.0, 10.0, 1.0, 10.0, 1.0).unwrap();
        assert_eq!(cycle_performance(&m, 0.7).unwrap().power, 0.0);
    }

    #[test]
    fn long_waiting_time_kills_power() {
        let m = MachineConfig::new(1.0, 5.0, 1.0, 10.0, 1.0)
            .unwrap()
            .with_waiting_time(1e12)
            .unwrap();
        assert!(cycle_performance(&m, 1.0).unwrap().power < 1e-11);
    }

    #[test]
    fn high_t_oscillator_optimum_is_curzon_ahlborn() {
        let best = oscillator_high_t_optimal_efficiency(0.9).unwrap();
        assert!((best.x - (1.0 - 0.1f64.sqrt())).abs() < 1e-5);
        assert_eq!(oscillator_high_t_power(0.9, 0.9, 1.0).unwrap(), 0.0);
        assert!(oscillator_high_t_power(0.95, 0.9, 1.0).is_err());
    }

    #[test]
    fn profile_limits() {
        let l = 0.4;
        let p = oscillator_profile(1e-7, l).unwrap();
        assert!((p.f - (1.0 / l - 1.0)).abs() < 1e-10);
        assert!(p.b.abs() < 1e-6);
        // series and direct branches agree at the switch points
        assert_relative_eq!(profile_b(0.999_999e-2), profile_b(1.000_001e-2), max_relative = 1e-5);
        for x in [1e-3, 0.05, 1.0, 30.0, 400.0] {
            let p = oscillator_profile(x, l).unwrap();
            let direct = x * (1.0 / (l * x).tanh() - 1.0 / x.tanh());
            assert_relative_eq!(p.f, direct, max_relative = 1e-9);
        }
        assert!(oscillator_profile(1.0, 1.5).is_err());
    }

    #[test]
    fn swap_examples() {
        assert_relative_eq!(swap_v_term(0.3, 0.3, 0.0).unwrap(), 1.0 / 0.3, max_relative = 1e-15);
        assert!(swap_v_term(0.6, 0.3, 0.0).unwrap() < 1e-30);
        let (v, _) = swap_optimal_v(0.3, 0.0).unwrap();
        let (_, alpha) = sinc_peak();
        assert_relative_eq!(v, PI * alpha / (2.0 * 0.3), max_relative = 1e-12);
        assert!(swap_v_term(0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn swap_threshold_constants() {
        let (threshold, ratio) = swap_constants();
        assert!((threshold - 2.6898).abs() < 1e-3);
        assert!((ratio - 1.1382).abs() < 1e-3);
    }

    #[test]
    fn compatibility_window() {
        let (lo, hi) = swap_compatibility_window().unwrap();
        assert!((lo - 0.4832).abs() < 1e-4, "lo = {lo}");
        assert!((hi - 2.0697).abs() < 1e-4, "hi = {hi}");
    }

    #[test]
    fn swap_thresholds_agree_with_direct_comparison() {
        // strong coupling rule: threshold 2.6898 |delta|
        let (wc, wh) = (1.0, 3.0);
        let delta = 1.0;
        let cmp_low = swap_comparison(wc, wh, 2.0, 0.0).unwrap();
        assert_eq!(cmp_low.rule, SwapTimeRule::RabiFrequency);
        assert!(!cmp_low.exchange_beats_full_swap);
        let cmp_high = swap_comparison(wc, wh, 2.8, 0.0).unwrap();
        assert!(cmp_high.exchange_beats_full_swap);
        assert_relative_eq!(cmp_high.threshold_g.unwrap(), swap_constants().0 * delta);
        let ratio = swap_constants().1 * 2.8 * 2.8 / (delta * delta + 2.8 * 2.8);
        assert_relative_eq!(cmp_high.ratio, ratio, max_relative = 1e-12);
    }
}
