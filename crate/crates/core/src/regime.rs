use crate::error::{require_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Engine,
    Refrigerator,
    HeatPump,
    ThermalAccelerator,
    /// Zero-work boundary: omega_h = omega_c or omega_h / T_h = omega_c / T_c.
    Degenerate,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Engine => "engine",
            Regime::Refrigerator => "refrigerator",
            Regime::HeatPump => "heat-pump",
            Regime::ThermalAccelerator => "thermal-accelerator",
            Regime::Degenerate => "degenerate",
        }
    }
}

/// Working regime together with its efficiency or coefficient of performance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Efficiency (engine) or COP; `None` on the degenerate boundary.
    pub merit: Option<f64>,
    omega_c: f64,
    omega_h: f64,
}

impl RegimeReport {
    /// The same cycle read as a heat pump, with COP omega_h / (omega_h - omega_c).
    ///
    /// Returns `self` unchanged unless the cycle is a refrigerator.
    pub fn as_heat_pump(self) -> RegimeReport {
        if self.regime != Regime::Refrigerator {
            return self;
        }
        RegimeReport {
            regime: Regime::HeatPump,
            merit: Some(self.omega_h / (self.omega_h - self.omega_c)),
            ..self
        }
    }

    /// Thermodynamic prefactor f such that the regime's power equals f * V.
    ///
    /// Engine: (w_h - w_c)(n_h - n_c); refrigerator: w_c (n_c - n_h);
    /// heat pump: w_h (n_c - n_h); accelerator: w_c (n_h - n_c).
    pub fn power_prefactor(&self, n_c_th: f64, n_h_th: f64) -> f64 {
        let (wc, wh) = (self.omega_c, self.omega_h);
        match self.regime {
            Regime::Engine => (wh - wc) * (n_h_th - n_c_th),
            Regime::Refrigerator => wc * (n_c_th - n_h_th),
            Regime::HeatPump => wh * (n_c_th - n_h_th),
            Regime::ThermalAccelerator => wc * (n_h_th - n_c_th),
            Regime::Degenerate => 0.0,
        }
    }
}

/// Classifies the cycle from frequencies and temperatures alone.
///
/// Valid for equal species on both sides. With T_h > T_c this reproduces the
/// usual table: engine for w_c < w_h < w_c T_h/T_c, refrigerator above it,
/// thermal accelerator for w_h < w_c. The quadrant w_h < w_c with
/// w_h/T_h > w_c/T_c (reachable only for T_h < T_c) is an engine whose roles
/// are exchanged; it reports efficiency 1 - w_h/w_c.
pub fn classify_regime(omega_c: f64, omega_h: f64, t_c: f64, t_h: f64) -> Result<RegimeReport> {
    require_positive("omega_c", omega_c)?;
    require_positive("omega_h", omega_h)?;
    require_positive("t_c", t_c)?;
    require_positive("t_h", t_h)?;

    // Cross-multiplied to keep exact boundary ties exact.
    let cold_ratio = omega_c * t_h;
    let hot_ratio = omega_h * t_c;
    let report = |regime, merit| RegimeReport {
        regime,
        merit,
        omega_c,
        omega_h,
    };
    if omega_h == omega_c || cold_ratio == hot_ratio {
        return Ok(report(Regime::Degenerate, None));
    }
    // hot side more populated iff w_c/T_c > w_h/T_h
    let hot_more_populated = cold_ratio > hot_ratio;
    let hot_gap_larger = omega_h > omega_c;
    Ok(match (hot_gap_larger, hot_more_populated) {
        (true, true) => report(Regime::Engine, Some(1.0 - omega_c / omega_h)),
        (true, false) => report(Regime::Refrigerator, Some(omega_c / (omega_h - omega_c))),
        (false, true) => report(
            Regime::ThermalAccelerator,
            Some(omega_c / (omega_c - omega_h)),
        ),
        (false, false) => report(Regime::Engine, Some(1.0 - omega_h / omega_c)),
    })
}

pub fn carnot_efficiency(t_c: f64, t_h: f64) -> f64 {
    1.0 - t_c / t_h
}

pub fn curzon_ahlborn_efficiency(t_c: f64, t_h: f64) -> f64 {
    1.0 - (t_c / t_h).sqrt()
}
