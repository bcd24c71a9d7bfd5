//! Working-substance species and their thermal states.
//!
//! Units: hbar = k_B = 1, so frequencies, temperatures and energies share one unit.

use std::fmt;
use std::str::FromStr;

use crate::error::{require_positive, QtmError, Result};

/// Species of the systems in one collection, fixing the ladder algebra.
///
/// `FiniteLevels(2)` behaves exactly like `Qubit`; use [`SystemKind::canonical`]
/// before comparing kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Qubit,
    /// Ideal harmonic oscillator (no level cutoff).
    Oscillator,
    /// Evenly spaced ladder with a hard cutoff a^dagger |N-1> = 0.
    FiniteLevels(usize),
}

impl SystemKind {
    pub fn finite(level_count: usize) -> Result<Self> {
        if level_count < 2 {
            return Err(QtmError::Domain {
                name: "level_count",
                value: level_count as f64,
                requirement: "must be >= 2",
            });
        }
        Ok(SystemKind::FiniteLevels(level_count).canonical())
    }

    pub fn canonical(self) -> Self {
        match self {
            SystemKind::FiniteLevels(2) => SystemKind::Qubit,
            other => other,
        }
    }

    /// Hilbert-space dimension, `None` for the ideal oscillator.
    pub fn level_count(self) -> Option<usize> {
        match self {
            SystemKind::Qubit => Some(2),
            SystemKind::Oscillator => None,
            SystemKind::FiniteLevels(n) => Some(n),
        }
    }

    pub fn same_species(self, other: SystemKind) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.canonical() {
            SystemKind::Qubit => f.write_str("qubit"),
            SystemKind::Oscillator => f.write_str("oscillator"),
            SystemKind::FiniteLevels(n) => write!(f, "levels:{n}"),
        }
    }
}

impl FromStr for SystemKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "qubit" => Ok(SystemKind::Qubit),
            "oscillator" => Ok(SystemKind::Oscillator),
            other => {
                let n = other
                    .strip_prefix("levels:")
                    .and_then(|n| n.parse::<usize>().ok())
                    .ok_or_else(|| {
                        format!("unknown system kind '{other}' (expected qubit, oscillator or levels:N)")
                    })?;
                SystemKind::finite(n).map_err(|e| e.to_string())
            }
        }
    }
}

/// A thermal bath at a fixed positive temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bath {
    temperature: f64,
}

impl Bath {
    pub fn new(temperature: f64) -> Result<Self> {
        require_positive("temperature", temperature)?;
        Ok(Bath { temperature })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

/// Mean excitation number of the Gibbs state of `omega * n` at temperature `temperature`.
pub fn thermal_occupation(kind: SystemKind, omega: f64, temperature: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("temperature", temperature)?;
    let x = omega / temperature;
    Ok(match kind.canonical() {
        SystemKind::Qubit => 1.0 / (x.exp() + 1.0),
        SystemKind::Oscillator => 1.0 / x.exp_m1(),
        SystemKind::FiniteLevels(n) => {
            let weights = boltzmann_weights(n, x);
            let z: f64 = weights.iter().sum();
            weights
                .iter()
                .enumerate()
                .map(|(level, w)| level as f64 * w)
                .sum::<f64>()
                / z
        }
    })
}

/// Normalized Gibbs populations of the first `level_count` levels.
///
/// For an oscillator this is the truncated (renormalized) thermal state.
pub fn thermal_populations(level_count: usize, omega: f64, temperature: f64) -> Result<Vec<f64>> {
    require_positive("omega", omega)?;
    require_positive("temperature", temperature)?;
    let mut weights = boltzmann_weights(level_count, omega / temperature);
    let z: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= z);
    Ok(weights)
}

/// Population an ideal oscillator keeps above the first `level_count` levels.
pub fn oscillator_tail_mass(level_count: usize, omega: f64, temperature: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    require_positive("temperature", temperature)?;
    Ok((-(level_count as f64) * omega / temperature).exp())
}

fn boltzmann_weights(level_count: usize, x: f64) -> Vec<f64> {
    (0..level_count).map(|n| (-(n as f64) * x).exp()).collect()
}
