//! Closed-form collision map for the exchange interaction.
//!
//! For qubit-qubit and oscillator-oscillator pairs initially in a product of
//! thermal states, the hot occupation after a collision of duration `tau` is
//!
//! ```text
//! <n_h>_tau = <n_c>_th + (<n_h>_th - <n_c>_th) A,   A = 1 - (g/k)^2 sin^2(k tau)
//! ```

use crate::error::{require_non_negative, QtmError, Result};
use crate::machine::{CollisionMode, MachineConfig};
use crate::system::{thermal_occupation, SystemKind};

/// Fraction of the occupation imbalance that survives a collision.
///
/// Lies in `[delta^2/k^2, 1]` and is `pi/k`-periodic in `tau`.
pub fn collision_coefficient(g: f64, delta: f64, tau: f64) -> Result<f64> {
    require_non_negative("tau", tau)?;
    require_non_negative("g", g)?;
    if g == 0.0 {
        return Ok(1.0);
    }
    let k = delta.hypot(g);
    let ratio = g / k;
    Ok(1.0 - ratio * ratio * (k * tau).sin().powi(2))
}

/// Coefficients of `n_h(t) = f_h n_h + f_c n_c + f_+ A_+ + f_- A_-` in the
/// Heisenberg picture, with `A_+ = a_h a_c^dag + a_h^dag a_c` and
/// `A_- = a_h a_c^dag - a_h^dag a_c`.
///
/// `f_-` is purely imaginary; its imaginary part is returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergForm {
    pub f_h: f64,
    pub f_c: f64,
    pub f_plus: f64,
    pub f_minus_im: f64,
}

pub fn heisenberg_closed_form(g: f64, delta: f64, t: f64) -> HeisenbergForm {
    let k2 = g * g + delta * delta;
    if k2 == 0.0 {
        return HeisenbergForm {
            f_h: 1.0,
            f_c: 0.0,
            f_plus: 0.0,
            f_minus_im: 0.0,
        };
    }
    let k = k2.sqrt();
    let c = (2.0 * k * t).cos();
    HeisenbergForm {
        f_h: (2.0 * delta * delta + g * g * (1.0 + c)) / (2.0 * k2),
        f_c: g * g * (1.0 - c) / (2.0 * k2),
        f_plus: g * delta * (1.0 - c) / (2.0 * k2),
        f_minus_im: g * (2.0 * k * t).sin() / (2.0 * k),
    }
}

/// One interaction stroke followed by rethermalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionOutcome {
    pub a: f64,
    pub n_c_th: f64,
    pub n_h_th: f64,
    pub n_c_post: f64,
    pub n_h_post: f64,
    /// Work done on the pair to switch the interaction on and off (negative when extracted).
    pub work: f64,
    pub heat_c: f64,
    pub heat_h: f64,
}

impl CollisionOutcome {
    /// Builds the energetics from thermal and post-collision occupations.
    ///
    /// `transferred` is the number of excitations moved from hot to cold.
    pub(crate) fn from_transfer(
        omega_c: f64,
        omega_h: f64,
        n_c_th: f64,
        n_h_th: f64,
        transferred: f64,
        a: f64,
    ) -> Self {
        CollisionOutcome {
            a,
            n_c_th,
            n_h_th,
            n_c_post: n_c_th + transferred,
            n_h_post: n_h_th - transferred,
            work: -(omega_h - omega_c) * transferred,
            heat_c: -omega_c * transferred,
            heat_h: omega_h * transferred,
        }
    }

    pub fn first_law_residual(&self) -> f64 {
        self.work + self.heat_c + self.heat_h
    }
}

/// Applies the closed-form map to a thermal product state.
pub fn collide(config: &MachineConfig, tau: f64) -> Result<CollisionOutcome> {
    let (kc, kh) = (config.kind_c(), config.kind_h());
    if config.mode() == CollisionMode::Exact && !closed_form_is_exact(kc, kh) {
        return Err(QtmError::UnsupportedPair { cold: kc, hot: kh });
    }
    config.check_stability()?;
    let a = collision_coefficient(config.g(), config.delta(), tau)?;
    let n_c_th = thermal_occupation(kc, config.omega_c(), config.t_c())?;
    let n_h_th = thermal_occupation(kh, config.omega_h(), config.t_h())?;
    let transferred = (n_h_th - n_c_th) * (1.0 - a);
    Ok(CollisionOutcome::from_transfer(
        config.omega_c(),
        config.omega_h(),
        n_c_th,
        n_h_th,
        transferred,
        a,
    ))
}

/// The commutator algebra closes only for two qubits or two oscillators.
pub fn closed_form_is_exact(kind_c: SystemKind, kind_h: SystemKind) -> bool {
    matches!(
        (kind_c.canonical(), kind_h.canonical()),
        (SystemKind::Qubit, SystemKind::Qubit) | (SystemKind::Oscillator, SystemKind::Oscillator)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn coefficient_examples() {
        assert_eq!(collision_coefficient(0.7, 0.3, 0.0).unwrap(), 1.0);
        let g = 1.3;
        let a = collision_coefficient(g, 0.0, PI / 4.0 / g).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        let g = 2.0;
        let k = 8f64.sqrt();
        let a = collision_coefficient(g, g, PI / 2.0 / k).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        assert!(collision_coefficient(1.0, 1.0, -1e-3).is_err());
    }

    #[test]
    fn heisenberg_form_reproduces_coefficient() {
        let (g, delta, t) = (0.7, -0.4, 1.9);
        let f = heisenberg_closed_form(g, delta, t);
        assert!((f.f_h + f.f_c - 1.0).abs() < 1e-15);
        assert!((f.f_h - collision_coefficient(g, delta, t).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn resonant_pair_does_no_work() {
        let m = MachineConfig::new(2.0, 2.0, 1.0, 10.0, 0.4).unwrap();
        let out = collide(&m, 0.9).unwrap();
        assert_eq!(out.work, 0.0);
    }

    #[test]
    fn identity_collision_exchanges_nothing() {
        let m = MachineConfig::new(1.0, 5.0, 1.0, 10.0, 0.0).unwrap();
        let out = collide(&m, 3.0).unwrap();
        assert_eq!(out.a, 1.0);
        assert_eq!((out.work, out.heat_c, out.heat_h), (-0.0, -0.0, 0.0));
    }

    #[test]
    fn mixed_species_need_approximate_mode() {
        let m = MachineConfig::new(1.0, 2.0, 1.0, 10.0, 0.1)
            .unwrap()
            .with_kinds(SystemKind::Qubit, SystemKind::Oscillator);
        assert!(matches!(
            collide(&m, 1.0),
            Err(QtmError::UnsupportedPair { .. })
        ));
        let m = m.with_mode(CollisionMode::Approximate);
        assert!(collide(&m, 1.0).is_ok());

        let levels = MachineConfig::new(1.0, 2.0, 1.0, 10.0, 0.1)
            .unwrap()
            .with_kind(SystemKind::FiniteLevels(5));
        assert!(collide(&levels, 1.0).is_err());
        let two = levels.with_kind(SystemKind::FiniteLevels(2));
        assert!(collide(&two, 1.0).is_ok());
    }

    #[test]
    fn unstable_oscillators_refused() {
        let m = MachineConfig::new(1.0, 4.0, 1.0, 10.0, 2.0)
            .unwrap()
            .with_kind(SystemKind::Oscillator);
        assert!(matches!(
            collide(&m, 1.0),
            Err(QtmError::UnstableCoupling { .. })
        ));
    }
}
