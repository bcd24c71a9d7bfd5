//! The machine with a mediator: a system of frequency `omega_m` that collides
//! `u_c` times with fresh cold systems, then `u_h` times with fresh hot ones.
//!
//! Writing `P_r` for the product of the stroke's collision coefficients, the
//! steady mediator occupations after each stroke are
//!
//! ```text
//! x_h = [n_h (1 - P_h) + n_c P_h (1 - P_c)] / (1 - P_c P_h)
//! x_c = [n_c (1 - P_c) + n_h P_c (1 - P_h)] / (1 - P_c P_h)
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::collision::{closed_form_is_exact, collision_coefficient};
use crate::direct::{maximize_over_efficiency, v_max, SCALAR_TOLERANCE};
use crate::error::{require_non_negative, require_positive, QtmError, Result};
use crate::regime::{classify_regime, RegimeReport};
use crate::report::OptimizationReport;
use crate::search::{golden_section_max, grid_seeded_max, linear_grid};
use crate::system::{thermal_occupation, Bath, SystemKind};

/// Seeds for the mediator collision-time search over the first lobe.
const TIME_SEEDS: usize = 48;

/// Consecutive collisions of the mediator with one collection.
#[derive(Debug, Clone, PartialEq)]
pub struct Stroke {
    coupling: f64,
    durations: Vec<f64>,
}

impl Stroke {
    pub fn new(coupling: f64, durations: Vec<f64>) -> Result<Self> {
        require_non_negative("g_r", coupling)?;
        if durations.is_empty() {
            return Err(QtmError::Domain {
                name: "u_r",
                value: 0.0,
                requirement: "u_r >= 1 collisions per stroke",
            });
        }
        for &tau in &durations {
            require_positive("tau_r", tau)?;
        }
        Ok(Stroke { coupling, durations })
    }

    /// `u` collisions of equal duration `tau`.
    pub fn uniform(coupling: f64, tau: f64, u: usize) -> Result<Self> {
        Self::new(coupling, vec![tau; u])
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn collisions(&self) -> usize {
        self.durations.len()
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn duration(&self) -> f64 {
        self.durations.iter().sum()
    }

    /// Product of the collision coefficients of the stroke.
    pub fn contraction(&self, delta: f64) -> Result<f64> {
        self.durations
            .iter()
            .try_fold(1.0, |p, &tau| Ok(p * collision_coefficient(self.coupling, delta, tau)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediatorConfig {
    omega_c: f64,
    omega_h: f64,
    omega_m: f64,
    bath_c: Bath,
    bath_h: Bath,
    kind: SystemKind,
    stroke_c: Stroke,
    stroke_h: Stroke,
    t_w_m: f64,
}

impl MediatorConfig {
    pub fn new(
        omega_c: f64,
        omega_h: f64,
        omega_m: f64,
        t_c: f64,
        t_h: f64,
        stroke_c: Stroke,
        stroke_h: Stroke,
    ) -> Result<Self> {
        require_positive("omega_c", omega_c)?;
        require_positive("omega_h", omega_h)?;
        require_positive("omega_m", omega_m)?;
        Ok(MediatorConfig {
            omega_c,
            omega_h,
            omega_m,
            bath_c: Bath::new(t_c)?,
            bath_h: Bath::new(t_h)?,
            kind: SystemKind::Qubit,
            stroke_c,
            stroke_h,
            t_w_m: 0.0,
        })
    }

    /// Equal couplings, equal times, `u` collisions per stroke and `omega_m = (omega_c + omega_h)/2`.
    pub fn symmetric(omega_c: f64, omega_h: f64, t_c: f64, t_h: f64, g_m: f64, tau_m: f64, u: usize) -> Result<Self> {
        let stroke = Stroke::uniform(g_m, tau_m, u)?;
        Self::new(
            omega_c,
            omega_h,
            0.5 * (omega_c + omega_h),
            t_c,
            t_h,
            stroke.clone(),
            stroke,
        )
    }

    /// Species shared by the mediator and both collections.
    pub fn with_kind(mut self, kind: SystemKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_waiting_time(mut self, t_w_m: f64) -> Result<Self> {
        self.t_w_m = require_non_negative("t_w_m", t_w_m)?;
        Ok(self)
    }

    pub fn with_omega_m(mut self, omega_m: f64) -> Result<Self> {
        self.omega_m = require_positive("omega_m", omega_m)?;
        Ok(self)
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn omega_h(&self) -> f64 {
        self.omega_h
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    pub fn t_c(&self) -> f64 {
        self.bath_c.temperature()
    }

    pub fn t_h(&self) -> f64 {
        self.bath_h.temperature()
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn stroke_c(&self) -> &Stroke {
        &self.stroke_c
    }

    pub fn stroke_h(&self) -> &Stroke {
        &self.stroke_h
    }

    pub fn t_w_m(&self) -> f64 {
        self.t_w_m
    }

    /// (omega_c - omega_m)/2
    pub fn delta_c(&self) -> f64 {
        0.5 * (self.omega_c - self.omega_m)
    }

    /// (omega_h - omega_m)/2
    pub fn delta_h(&self) -> f64 {
        0.5 * (self.omega_h - self.omega_m)
    }

    pub fn k_c(&self) -> f64 {
        self.delta_c().hypot(self.stroke_c.coupling)
    }

    pub fn k_h(&self) -> f64 {
        self.delta_h().hypot(self.stroke_h.coupling)
    }

    /// Total durations of both strokes plus the mediator waiting time.
    pub fn cycle_time(&self) -> f64 {
        self.stroke_c.duration() + self.stroke_h.duration() + self.t_w_m
    }

    /// `(P_c, P_h)`.
    pub fn contractions(&self) -> Result<(f64, f64)> {
        Ok((
            self.stroke_c.contraction(self.delta_c())?,
            self.stroke_h.contraction(self.delta_h())?,
        ))
    }

    fn check_model(&self) -> Result<()> {
        if !closed_form_is_exact(self.kind, self.kind) {
            return Err(QtmError::UnsupportedPair {
                cold: self.kind,
                hot: self.kind,
            });
        }
        if self.kind == SystemKind::Oscillator {
            for (omega, stroke) in [(self.omega_c, &self.stroke_c), (self.omega_h, &self.stroke_h)] {
                let bound = (omega * self.omega_m).sqrt();
                if stroke.coupling >= bound {
                    return Err(QtmError::UnstableCoupling {
                        g: stroke.coupling,
                        bound,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Mediator occupation after `u` collisions with thermal systems of occupation `n_r`.
pub fn stroke_update(n_in: f64, n_r: f64, a: f64, u: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(QtmError::Domain {
            name: "A_r",
            value: a,
            requirement: "must lie in [0, 1]",
        });
    }
    if u == 0 {
        return Err(QtmError::Domain {
            name: "u_r",
            value: 0.0,
            requirement: "u_r >= 1",
        });
    }
    Ok(n_r + (n_in - n_r) * a.powi(u as i32))
}

/// Periodic operating point of the mediator cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyCycleState {
    pub n_c_th: f64,
    pub n_h_th: f64,
    /// Mediator occupation at the end of the hot stroke.
    pub n_m_after_h: f64,
    /// Mediator occupation at the end of the cold stroke.
    pub n_m_after_c: f64,
    pub contraction_c: f64,
    pub contraction_h: f64,
    /// Total work per cycle (negative when extracted).
    pub work: f64,
    pub heat_c: f64,
    pub heat_h: f64,
    /// Work of the cold and hot strokes separately.
    pub work_c: f64,
    pub work_h: f64,
}

impl SteadyCycleState {
    pub fn first_law_residual(&self) -> f64 {
        self.work + self.heat_c + self.heat_h
    }
}

pub fn steady_cycle(config: &MediatorConfig) -> Result<SteadyCycleState> {
    config.check_model()?;
    let (p_c, p_h) = config.contractions()?;
    let product = p_c * p_h;
    let denominator = 1.0 - product;
    if denominator <= 0.0 {
        return Err(QtmError::NoContraction { product });
    }
    let n_c = thermal_occupation(config.kind, config.omega_c, config.t_c())?;
    let n_h = thermal_occupation(config.kind, config.omega_h, config.t_h())?;
    let x_h = (n_h * (1.0 - p_h) + n_c * p_h * (1.0 - p_c)) / denominator;
    let x_c = (n_c * (1.0 - p_c) + n_h * p_c * (1.0 - p_h)) / denominator;
    // Written through the closed-form gap so the identities hold to rounding.
    let gap = (n_h - n_c) * (1.0 - p_c) * (1.0 - p_h) / denominator;
    let (wc, wh, wm) = (config.omega_c, config.omega_h, config.omega_m);
    Ok(SteadyCycleState {
        n_c_th: n_c,
        n_h_th: n_h,
        n_m_after_h: x_h,
        n_m_after_c: x_c,
        contraction_c: p_c,
        contraction_h: p_h,
        work: (wc - wh) * gap,
        heat_c: -wc * gap,
        heat_h: wh * gap,
        work_c: -(wm - wc) * gap,
        work_h: (wm - wh) * gap,
    })
}

/// Rate term of the mediator cycle: `(1 - P_c)(1 - P_h) / (T (1 - P_c P_h))`.
pub fn v_m_general(config: &MediatorConfig) -> Result<f64> {
    let (p_c, p_h) = config.contractions()?;
    let product = p_c * p_h;
    if product >= 1.0 {
        return Err(QtmError::NoContraction { product });
    }
    Ok((1.0 - p_c) * (1.0 - p_h) / (config.cycle_time() * (1.0 - product)))
}

/// Symmetric protocol: `(1 - A^u) / (2 u tau (1 + A^u))`.
pub fn v_m_symmetric(a: f64, u: usize, tau: f64) -> Result<f64> {
    require_positive("tau_m", tau)?;
    let p = stroke_update(1.0, 0.0, a, u)?;
    // 1 - A^u without cancellation when A is close to 1
    let escaped = -(u as f64 * (a - 1.0).ln_1p()).exp_m1();
    Ok(escaped / (2.0 * u as f64 * tau * (1.0 + p)))
}

/// Single collision per stroke: `g^2 sin^2(k tau) / (2 tau (2 k^2 - g^2 sin^2(k tau)))`.
pub fn v_m_single(g_m: f64, delta_m: f64, tau_m: f64) -> Result<f64> {
    require_non_negative("g_m", g_m)?;
    require_non_negative("tau_m", tau_m)?;
    if tau_m == 0.0 || g_m == 0.0 {
        return Ok(0.0);
    }
    let k2 = g_m * g_m + delta_m * delta_m;
    let s = g_m * g_m * (k2.sqrt() * tau_m).sin().powi(2);
    Ok(s / (2.0 * tau_m * (2.0 * k2 - s)))
}

/// Performance of one mediator configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediatorPerformance {
    pub regime: RegimeReport,
    pub state: SteadyCycleState,
    pub v_m: f64,
    /// Prefactor times `v_m`.
    pub power: f64,
}

pub fn mediator_performance(config: &MediatorConfig) -> Result<MediatorPerformance> {
    let state = steady_cycle(config)?;
    let v_m = v_m_general(config)?;
    let regime = classify_regime(config.omega_c, config.omega_h, config.t_c(), config.t_h())?;
    Ok(MediatorPerformance {
        regime,
        state,
        v_m,
        power: regime.power_prefactor(state.n_c_th, state.n_h_th) * v_m,
    })
}

/// `(V_m,max, tau_m*)` for the symmetric protocol with `u` collisions per stroke.
pub fn v_m_max(g_m: f64, delta_m: f64, u: usize) -> Result<(f64, f64)> {
    let best = maximize_symmetric_time(g_m, delta_m, u)?;
    Ok((best.value, best.x))
}

fn symmetric_rate(g_m: f64, delta_m: f64, u: usize, tau: f64) -> f64 {
    let a = collision_coefficient(g_m, delta_m, tau).unwrap_or(1.0).clamp(0.0, 1.0);
    v_m_symmetric(a, u, tau).unwrap_or(f64::NEG_INFINITY)
}

fn maximize_symmetric_time(g_m: f64, delta_m: f64, u: usize) -> Result<crate::search::ScalarMax> {
    require_positive("g_m", g_m)?;
    let k = delta_m.hypot(g_m);
    let v = |tau: f64| symmetric_rate(g_m, delta_m, u, tau);
    // Later lobes repeat the first lobe's A values at longer times.
    let grid = linear_grid(0.0, PI / k, TIME_SEEDS + 2);
    Ok(grid_seeded_max(v, &grid[1..=TIME_SEEDS], SCALAR_TOLERANCE)?.best)
}

/// Result of the mediator optimization with its numerical cross-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct MediatorOptimum {
    /// `tau_m*` and `V_m,max` at omega_m = omega_bar, u = 1.
    pub report: OptimizationReport,
    /// `(omega_m / omega_bar, V_m,max)` over a local scan, stroke times optimized independently.
    pub omega_m_scan: Vec<(f64, f64)>,
    pub omega_bar_is_local_max: bool,
    /// `(u, V_m,max)` for u = 1, 2, 4.
    pub u_scan: Vec<(usize, f64)>,
    pub single_collision_dominates: bool,
}

/// Maximizes the mediator rate term over the collision time.
pub fn optimize_mediator(omega_c: f64, omega_h: f64, t_c: f64, t_h: f64, g_m: f64) -> Result<MediatorOptimum> {
    require_positive("omega_c", omega_c)?;
    require_positive("omega_h", omega_h)?;
    require_positive("t_c", t_c)?;
    require_positive("t_h", t_h)?;
    let delta_m = 0.25 * (omega_h - omega_c);
    let best = maximize_symmetric_time(g_m, delta_m, 1)?;
    let mut report = OptimizationReport::from_scalar(&best, "tau_m");
    let omega_bar = 0.5 * (omega_c + omega_h);
    report.argmax = vec![("tau_m", best.x), ("omega_m", omega_bar)];
    report.annotations = vec![("delta_m", delta_m), ("k_m", delta_m.hypot(g_m))];
    report.probes = linear_grid(0.0, best.x * 2.0, 9)[1..]
        .iter()
        .map(|&tau| (tau, symmetric_rate(g_m, delta_m, 1, tau)))
        .filter(|&(tau, _)| tau * delta_m.hypot(g_m) < PI)
        .collect();

    let omega_m_scan = [0.9, 0.95, 1.0, 1.05, 1.1]
        .par_iter()
        .map(|&ratio| {
            let v = asymmetric_v_m_max(omega_c, omega_h, ratio * omega_bar, g_m)?;
            Ok((ratio, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let centre = omega_m_scan[2].1;
    let omega_bar_is_local_max = omega_m_scan
        .iter()
        .filter(|&&(r, _)| r != 1.0)
        .all(|&(_, v)| v < centre);

    let u_scan = [1usize, 2, 4]
        .iter()
        .map(|&u| Ok((u, v_m_max(g_m, delta_m, u)?.0)))
        .collect::<Result<Vec<_>>>()?;
    let single_collision_dominates = u_scan.windows(2).all(|w| w[0].1 >= w[1].1);

    Ok(MediatorOptimum {
        report,
        omega_m_scan,
        omega_bar_is_local_max,
        u_scan,
        single_collision_dominates,
    })
}

/// V_m maximized over independent stroke times (u = 1), at a given omega_m.
fn asymmetric_v_m_max(omega_c: f64, omega_h: f64, omega_m: f64, g_m: f64) -> Result<f64> {
    let (delta_c, delta_h) = (0.5 * (omega_c - omega_m), 0.5 * (omega_h - omega_m));
    let (k_c, k_h) = (delta_c.hypot(g_m), delta_h.hypot(g_m));
    let v = |tau_c: f64, tau_h: f64| {
        let a_c = collision_coefficient(g_m, delta_c, tau_c).unwrap_or(1.0);
        let a_h = collision_coefficient(g_m, delta_h, tau_h).unwrap_or(1.0);
        let d = 1.0 - a_c * a_h;
        if d <= 0.0 {
            return 0.0;
        }
        (1.0 - a_c) * (1.0 - a_h) / ((tau_c + tau_h) * d)
    };
    let inner = |tau_c: f64| {
        let grid = linear_grid(0.0, PI / k_h, 18);
        grid_seeded_max(|t| v(tau_c, t), &grid[1..17], 1e-8)
            .map(|r| r.best.value)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let grid = linear_grid(0.0, PI / k_c, 18);
    Ok(grid_seeded_max(inner, &grid[1..17], 1e-8)?.best.value)
}

/// One row of the direct-versus-mediator comparison at fixed frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvantageRow {
    pub t_w: f64,
    /// Direct-cycle rate term maximized over tau.
    pub v_max: f64,
    pub tau_star: f64,
    /// Mediator rate term maximized over tau_m (independent of t_w).
    pub v_m_max: f64,
    pub tau_m_star: f64,
    /// t_w <= tau_m*, where neglecting the mediator waiting time is justified.
    pub within_validity: bool,
    pub mediator_advantage: bool,
}

/// Compares the direct cycle at each waiting time with the mediator cycle (g = g_m, t_w_m = 0).
pub fn advantage_analysis(
    omega_c: f64,
    omega_h: f64,
    t_c: f64,
    t_h: f64,
    g: f64,
    t_w_grid: &[f64],
) -> Result<Vec<AdvantageRow>> {
    let optimum = optimize_mediator(omega_c, omega_h, t_c, t_h, g)?;
    let v_m_max = optimum.report.objective;
    let tau_m_star = optimum.report.get("tau_m").unwrap_or(f64::NAN);
    let delta = 0.5 * (omega_h - omega_c);
    t_w_grid
        .par_iter()
        .map(|&t_w| {
            let (v_max, tau_star) = v_max(g, delta, t_w)?;
            let within_validity = t_w <= tau_m_star;
            Ok(AdvantageRow {
                t_w,
                v_max,
                tau_star,
                v_m_max,
                tau_m_star,
                within_validity,
                mediator_advantage: within_validity && v_m_max > v_max,
            })
        })
        .collect()
}

/// Frequency-maximized comparison for qubits at one coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyAdvantage {
    pub mediator: OptimizationReport,
    /// Direct cycle with t_w equal to the mediator's optimal collision time.
    pub direct: OptimizationReport,
    pub t_w: f64,
    /// Mediator peak power over direct peak power.
    pub power_ratio: f64,
}

/// Maximizes both cycles over frequencies and collision times (qubits, engine,
/// g = g_m, omega_m = omega_bar, u = 1); the direct cycle waits `tau_m*`.
pub fn advantage_frequency_maximized(t_c: f64, t_h: f64, g: f64) -> Result<FrequencyAdvantage> {
    require_positive("t_c", t_c)?;
    require_positive("t_h", t_h)?;
    require_positive("g", g)?;
    if t_h <= t_c {
        return Err(QtmError::Domain {
            name: "t_h",
            value: t_h,
            requirement: "an engine needs t_h > t_c",
        });
    }
    let mediator_rate = |wc: f64, wh: f64| v_m_max(g, 0.25 * (wh - wc), 1);
    let mediator = maximize_over_efficiency(SystemKind::Qubit, t_c, t_h, &mediator_rate)?;
    let t_w = mediator.get("tau").unwrap_or(f64::NAN);
    let direct_rate = |wc: f64, wh: f64| v_max(g, 0.5 * (wh - wc), t_w);
    let direct = maximize_over_efficiency(SystemKind::Qubit, t_c, t_h, &direct_rate)?;
    Ok(FrequencyAdvantage {
        power_ratio: mediator.objective / direct.objective,
        mediator,
        direct,
        t_w,
    })
}

/// `[1 - A]/tau - [1 - A^u]/(u tau)`, non-negative when a single collision
/// exchanges energy fastest.
pub fn stroke_rate_margin(a: f64, u: usize, tau: f64) -> Result<f64> {
    require_positive("tau", tau)?;
    let p = stroke_update(1.0, 0.0, a, u)?;
    Ok((1.0 - a) / tau - (1.0 - p) / (u as f64 * tau))
}

/// Mediator rate term maximized over the collision time, direct-cycle style,
/// for use where only the single-collision optimum is needed.
pub fn optimize_single_collision_time(g_m: f64, delta_m: f64) -> Result<OptimizationReport> {
    require_positive("g_m", g_m)?;
    let k = delta_m.hypot(g_m);
    let best = golden_section_max(
        |y| v_m_single(g_m, delta_m, y / k).unwrap_or(f64::NEG_INFINITY),
        0.0,
        PI,
        SCALAR_TOLERANCE,
    )?;
    let mut report = OptimizationReport::from_scalar(&best, "k_tau_m");
    report.argmax = vec![("tau_m", best.x / k), ("k_tau_m", best.x)];
    Ok(report)
}
