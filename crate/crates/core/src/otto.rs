//! Comparison with an ideal (adiabatic) Otto cycle, whose power equals the
//! direct-cycle power with `V = 1/tau`, and the two-oscillator stability bound.

use nalgebra::Matrix4;
use rayon::prelude::*;

use crate::direct::{sinc_peak, v_term};
use crate::error::{require_non_negative, require_positive, QtmError, Result};
use crate::regime::{classify_regime, Regime, RegimeReport};
use crate::search::bisect_root;
use crate::system::{thermal_occupation, SystemKind};

fn prefactor(kind: SystemKind, omega_c: f64, omega_h: f64, t_c: f64, t_h: f64) -> Result<(RegimeReport, f64)> {
    let regime = classify_regime(omega_c, omega_h, t_c, t_h)?;
    let n_c = thermal_occupation(kind, omega_c, t_c)?;
    let n_h = thermal_occupation(kind, omega_h, t_h)?;
    Ok((regime, regime.power_prefactor(n_c, n_h)))
}

/// Power of the ideal Otto cycle of total duration `tau` (regime-specific, as for the direct cycle).
pub fn ideal_otto_power(omega_c: f64, omega_h: f64, t_c: f64, t_h: f64, tau: f64, kind: SystemKind) -> Result<f64> {
    require_positive("tau", tau)?;
    Ok(prefactor(kind, omega_c, omega_h, t_c, t_h)?.1 / tau)
}

/// One point of the parametric curve (tau*(g), P_max(g)) at t_w = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakPoint {
    pub g: f64,
    pub k: f64,
    pub tau_star: f64,
    pub power: f64,
    /// False for oscillator pairs at or above sqrt(omega_c omega_h).
    pub stable: bool,
}

pub fn peaks_curve(
    g_grid: &[f64],
    omega_c: f64,
    omega_h: f64,
    t_c: f64,
    t_h: f64,
    kind: SystemKind,
) -> Result<Vec<PeakPoint>> {
    let (_, pref) = prefactor(kind, omega_c, omega_h, t_c, t_h)?;
    let (y_star, alpha) = sinc_peak();
    let delta = 0.5 * (omega_h - omega_c);
    let bound = (omega_c * omega_h).sqrt();
    g_grid
        .par_iter()
        .map(|&g| {
            require_positive("g", g)?;
            let k = delta.hypot(g);
            Ok(PeakPoint {
                g,
                k,
                tau_star: y_star / k,
                power: pref * alpha * g * g / k,
                stable: kind != SystemKind::Oscillator || g < bound,
            })
        })
        .collect()
}

/// Rate term entering a power or figure-of-merit evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateTerm {
    Direct { g: f64, t_w: f64 },
    IdealOtto,
}

impl RateTerm {
    pub fn evaluate(&self, delta: f64, tau: f64) -> Result<f64> {
        match *self {
            RateTerm::Direct { g, t_w } => v_term(g, delta, tau, t_w),
            RateTerm::IdealOtto => Ok(1.0 / require_positive("tau", tau)?),
        }
    }
}

/// `chi = COP_R * P_R` for a refrigerator.
pub fn figure_of_merit_chi(
    omega_c: f64,
    omega_h: f64,
    t_c: f64,
    t_h: f64,
    tau: f64,
    kind: SystemKind,
    rate: RateTerm,
) -> Result<f64> {
    let (regime, pref) = prefactor(kind, omega_c, omega_h, t_c, t_h)?;
    if regime.regime != Regime::Refrigerator {
        return Err(QtmError::Regime {
            expected: Regime::Refrigerator.name(),
            found: regime.regime.name(),
        });
    }
    let cop = regime.merit.unwrap_or(0.0);
    Ok(cop * pref * rate.evaluate(0.5 * (omega_h - omega_c), tau)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub stable: bool,
}

/// Normal-mode eigenvalues `omega_bar +- k` of the two-oscillator Hamiltonian matrix.
pub fn oscillator_stability(omega_c: f64, omega_h: f64, g: f64) -> Result<StabilityReport> {
    require_positive("omega_c", omega_c)?;
    require_positive("omega_h", omega_h)?;
    require_non_negative("g", g)?;
    let omega_bar = 0.5 * (omega_c + omega_h);
    let k = (0.5 * (omega_h - omega_c)).hypot(g);
    // omega_bar^2 - k^2 = omega_c omega_h - g^2, without cancellation
    let lambda_minus = (omega_c * omega_h - g * g) / (omega_bar + k);
    Ok(StabilityReport {
        lambda_plus: omega_bar + k,
        lambda_minus,
        stable: lambda_minus > 0.0,
    })
}

/// Quadrature-space Hamiltonian matrix of the coupled oscillators.
pub fn oscillator_hamiltonian_matrix(omega_c: f64, omega_h: f64, g: f64) -> Matrix4<f64> {
    Matrix4::new(
        omega_h, 0.0, g, 0.0, //
        0.0, omega_h, 0.0, g, //
        g, 0.0, omega_c, 0.0, //
        0.0, g, 0.0, omega_c,
    )
}

/// Peak quantity matched by `match_target_peak`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakObjective {
    /// Engine power maximized over tau.
    EnginePower,
    /// Refrigerator figure of merit maximized over tau.
    RefrigeratorChi,
}

/// Peak of the chosen objective over tau at coupling `g`, t_w = 0.
pub fn peak_value(
    objective: PeakObjective,
    g: f64,
    omega_c: f64,
    omega_h: f64,
    t_c: f64,
    t_h: f64,
    kind: SystemKind,
) -> Result<f64> {
    require_positive("g", g)?;
    let (regime, pref) = prefactor(kind, omega_c, omega_h, t_c, t_h)?;
    let (expected, scale) = match objective {
        PeakObjective::EnginePower => (Regime::Engine, pref),
        PeakObjective::RefrigeratorChi => (Regime::Refrigerator, pref * regime.merit.unwrap_or(0.0)),
    };
    if regime.regime != expected {
        return Err(QtmError::Regime {
            expected: expected.name(),
            found: regime.regime.name(),
        });
    }
    let (_, alpha) = sinc_peak();
    let k = (0.5 * (omega_h - omega_c)).hypot(g);
    Ok(scale * alpha * g * g / k)
}

/// Coupling at which the direct-cycle peak equals `target`, searched in
/// `g in [g_lo, g_hi]` (the peak grows monotonically with g).
#[allow(clippy::too_many_arguments)]
pub fn match_target_peak(
    target: f64,
    objective: PeakObjective,
    omega_c: f64,
    omega_h: f64,
    t_c: f64,
    t_h: f64,
    kind: SystemKind,
    g_range: (f64, f64),
) -> Result<f64> {
    require_positive("target", target)?;
    require_positive("g_lo", g_range.0)?;
    require_positive("g_hi", g_range.1)?;
    peak_value(objective, g_range.0, omega_c, omega_h, t_c, t_h, kind)?;
    let gap = |ln_g: f64| {
        peak_value(objective, ln_g.exp(), omega_c, omega_h, t_c, t_h, kind)
            .map(|p| p.ln() - target.ln())
            .unwrap_or(f64::NAN)
    };
    let ln_g = bisect_root(gap, g_range.0.ln(), g_range.1.ln(), 1e-13)?;
    Ok(ln_g.exp())
}
