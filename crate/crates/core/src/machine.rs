use crate::error::{require_non_negative, require_positive, QtmError, Result};
use crate::system::{Bath, SystemKind};

/// Whether the closed-form collision map may be used outside its exact range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CollisionMode {
    /// Only qubit-qubit and oscillator-oscillator pairs.
    #[default]
    Exact,
    /// Apply the closed form to any pair, accepting a model error.
    Approximate,
}

/// A full parameter point of the direct (no-mediator) machine.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineConfig {
    omega_c: f64,
    omega_h: f64,
    bath_c: Bath,
    bath_h: Bath,
    g: f64,
    t_w: f64,
    kind_c: SystemKind,
    kind_h: SystemKind,
    mode: CollisionMode,
    allow_unstable: bool,
}

impl MachineConfig {
    /// Qubit pair with no waiting time.
    pub fn new(omega_c: f64, omega_h: f64, t_c: f64, t_h: f64, g: f64) -> Result<Self> {
        require_positive("omega_c", omega_c)?;
        require_positive("omega_h", omega_h)?;
        require_non_negative("g", g)?;
        Ok(MachineConfig {
            omega_c,
            omega_h,
            bath_c: Bath::new(t_c)?,
            bath_h: Bath::new(t_h)?,
            g,
            t_w: 0.0,
            kind_c: SystemKind::Qubit,
            kind_h: SystemKind::Qubit,
            mode: CollisionMode::Exact,
            allow_unstable: false,
        })
    }

    pub fn with_waiting_time(mut self, t_w: f64) -> Result<Self> {
        self.t_w = require_non_negative("t_w", t_w)?;
        Ok(self)
    }

    pub fn with_kind(self, kind: SystemKind) -> Self {
        self.with_kinds(kind, kind)
    }

    pub fn with_kinds(mut self, kind_c: SystemKind, kind_h: SystemKind) -> Self {
        self.kind_c = kind_c.canonical();
        self.kind_h = kind_h.canonical();
        self
    }

    pub fn with_mode(mut self, mode: CollisionMode) -> Self {
        self.mode = mode;
        self
    }

    /// Allow oscillator couplings at or above the stability bound.
    pub fn allow_unstable_coupling(mut self, allow: bool) -> Self {
        self.allow_unstable = allow;
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Result<Self> {
        self.g = require_non_negative("g", g)?;
        Ok(self)
    }

    pub fn with_frequencies(mut self, omega_c: f64, omega_h: f64) -> Result<Self> {
        self.omega_c = require_positive("omega_c", omega_c)?;
        self.omega_h = require_positive("omega_h", omega_h)?;
        Ok(self)
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn omega_h(&self) -> f64 {
        self.omega_h
    }
    pub fn t_c(&self) -> f64 {
        self.bath_c.temperature()
    }
    pub fn t_h(&self) -> f64 {
        self.bath_h.temperature()
    }
    pub fn bath_c(&self) -> Bath {
        self.bath_c
    }
    pub fn bath_h(&self) -> Bath {
        self.bath_h
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn t_w(&self) -> f64 {
        self.t_w
    }
    pub fn kind_c(&self) -> SystemKind {
        self.kind_c
    }
    pub fn kind_h(&self) -> SystemKind {
        self.kind_h
    }
    pub fn mode(&self) -> CollisionMode {
        self.mode
    }
    pub fn unstable_allowed(&self) -> bool {
        self.allow_unstable
    }

    /// Half detuning (omega_h - omega_c) / 2.
    pub fn delta(&self) -> f64 {
        0.5 * (self.omega_h - self.omega_c)
    }

    /// Rabi-like frequency sqrt(delta^2 + g^2).
    pub fn k(&self) -> f64 {
        self.delta().hypot(self.g)
    }

    pub fn omega_bar(&self) -> f64 {
        0.5 * (self.omega_c + self.omega_h)
    }

    /// Refuses oscillator pairs coupled at or above sqrt(omega_c omega_h) unless overridden.
    ///
    /// A qubit bounds the exchange Hamiltonian from below, so only
    /// oscillator-oscillator pairs are checked.
    pub fn check_stability(&self) -> Result<()> {
        let oscillator_pair =
            self.kind_c == SystemKind::Oscillator && self.kind_h == SystemKind::Oscillator;
        if !oscillator_pair || self.allow_unstable {
            return Ok(());
        }
        let bound = (self.omega_c * self.omega_h).sqrt();
        if self.g >= bound {
            return Err(QtmError::UnstableCoupling { g: self.g, bound });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let m = MachineConfig::new(1.0, 4.0, 1.0, 10.0, 2.0).unwrap();
        assert_eq!(m.delta(), 1.5);
        assert_eq!(m.k(), 2.5);
        assert_eq!(m.omega_bar(), 2.5);
        assert_eq!(m.t_w(), 0.0);
        assert_eq!(m.kind_c(), SystemKind::Qubit);
    }

    #[test]
    fn validation() {
        assert!(MachineConfig::new(0.0, 4.0, 1.0, 10.0, 2.0).is_err());
        assert!(MachineConfig::new(1.0, 4.0, -1.0, 10.0, 2.0).is_err());
        assert!(MachineConfig::new(1.0, 4.0, 1.0, 10.0, -2.0).is_err());
        let m = MachineConfig::new(1.0, 4.0, 1.0, 10.0, 2.0).unwrap();
        assert!(m.with_waiting_time(-1.0).is_err());
    }

    #[test]
    fn stability_only_for_oscillators() {
        let m = MachineConfig::new(1.0, 4.0, 1.0, 10.0, 2.0).unwrap();
        assert!(m.check_stability().is_ok());
        let osc = m.clone().with_kind(SystemKind::Oscillator);
        assert!(matches!(
            osc.check_stability(),
            Err(QtmError::UnstableCoupling { .. })
        ));
        assert!(osc.allow_unstable_coupling(true).check_stability().is_ok());
        let surrogate = m.with_kind(SystemKind::FiniteLevels(40));
        assert!(surrogate.check_stability().is_ok());
    }
}
