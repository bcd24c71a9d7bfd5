//! Two-stroke quantum thermal machines built from collisions between a cold
//! and a hot system, optionally through a mediator.
//!
//! Units: hbar = k_B = 1. Frequencies, temperatures, couplings and rates share
//! one energy unit.

pub mod collision;
pub mod direct;
pub mod error;
pub mod machine;
pub mod mediator;
pub mod oracle;
pub mod otto;
pub mod regime;
pub mod report;
pub mod search;
pub mod system;

pub use collision::{collide, collision_coefficient, CollisionOutcome};
pub use direct::{cycle_performance, optimize_tau, v_term, CyclePerformance};
pub use error::{QtmError, Result};
pub use machine::{CollisionMode, MachineConfig};
pub use mediator::{steady_cycle, MediatorConfig, SteadyCycleState, Stroke};
pub use oracle::{oracle_collision, OracleReport, OracleStatus, TruncationPolicy};
pub use regime::{classify_regime, Regime, RegimeReport};
pub use report::{OptimizationReport, SearchStatus};
pub use system::{thermal_occupation, Bath, SystemKind};
