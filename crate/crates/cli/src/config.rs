//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment, keys carry a section prefix
//! (`machine.`, `mediator.`, `grid.`, `oracle.`, `otto.`, `output.`). Every key
//! has a documented default; `auto` selects an experiment-specific default that
//! is resolved at load time, so the echoed configuration is always explicit
//! except for keys the experiment does not read.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use qtm_core::system::SystemKind;
use qtm_core::{MachineConfig, MediatorConfig, Stroke};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    SweepTau,
    OptimalTimeCurve,
    Frontier,
    FreqMaximize,
    MediatorCompare,
    Advantage,
    OttoCompare,
    SwapCompare,
    ValidateOracle,
    AppendixD,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::SweepTau,
        Experiment::OptimalTimeCurve,
        Experiment::Frontier,
        Experiment::FreqMaximize,
        Experiment::MediatorCompare,
        Experiment::Advantage,
        Experiment::OttoCompare,
        Experiment::SwapCompare,
        Experiment::ValidateOracle,
        Experiment::AppendixD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SweepTau => "sweep-tau",
            Experiment::OptimalTimeCurve => "optimal-time-curve",
            Experiment::Frontier => "frontier",
            Experiment::FreqMaximize => "freq-maximize",
            Experiment::MediatorCompare => "mediator-compare",
            Experiment::Advantage => "advantage",
            Experiment::OttoCompare => "otto-compare",
            Experiment::SwapCompare => "swap-compare",
            Experiment::ValidateOracle => "validate-oracle",
            Experiment::AppendixD => "appendix-d",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!("unknown experiment `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    EnginePower,
    RefrigeratorChi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Real(f64),
    Count(usize),
    Kind(SystemKind),
    Scale(Scale),
    Flag(bool),
    Objective(Objective),
    Auto,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(x) => write!(f, "{x:?}"),
            Value::Count(n) => write!(f, "{n}"),
            Value::Kind(k) => write!(f, "{k}"),
            Value::Scale(Scale::Linear) => f.write_str("linear"),
            Value::Scale(Scale::Log) => f.write_str("log"),
            Value::Flag(b) => write!(f, "{b}"),
            Value::Objective(Objective::EnginePower) => f.write_str("engine-power"),
            Value::Objective(Objective::RefrigeratorChi) => f.write_str("refrigerator-chi"),
            Value::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Type {
    Positive,
    NonNegative,
    /// Integer with a lower bound and the precondition quoted when it is violated.
    Count(usize, &'static str),
    Kind,
    Scale,
    Flag,
    Objective,
}

struct KeyDef {
    key: &'static str,
    ty: Type,
    default: &'static str,
    auto: bool,
    doc: &'static str,
}

const fn key_def(key: &'static str, ty: Type, default: &'static str, doc: &'static str) -> KeyDef {
    let auto = matches!(default.as_bytes(), b"auto");
    KeyDef {
        key,
        ty,
        default,
        auto,
        doc,
    }
}

const KEYS: &[KeyDef] = &[
    key_def("machine.omega_c", Type::Positive, "1.0", "cold-system frequency [nu_c]"),
    key_def("machine.omega_h", Type::Positive, "2.0", "hot-system frequency [nu_c]"),
    key_def("machine.t_c", Type::Positive, "1.0", "cold bath temperature [nu_c]"),
    key_def("machine.t_h", Type::Positive, "10.0", "hot bath temperature [nu_c]"),
    key_def("machine.g", Type::Positive, "0.1", "direct coupling [nu_c]"),
    key_def("machine.t_w", Type::NonNegative, "0.0", "waiting time between collisions [1/nu_c]"),
    key_def("machine.kind", Type::Kind, "qubit", "system kind: qubit | oscillator | levels:N"),
    key_def("machine.kind_h", Type::Kind, "auto", "hot-side kind (auto: machine.kind)"),
    key_def("machine.eta_e", Type::Positive, "auto", "fixed engine efficiency (auto: freq-maximize also maximizes it; appendix-d uses the Curzon-Ahlborn value)"),
    key_def("mediator.g_m", Type::Positive, "1.0", "mediator coupling to both sides [nu_c]"),
    key_def("mediator.omega_m", Type::Positive, "auto", "mediator frequency (auto: (omega_c + omega_h)/2) [nu_c]"),
    key_def("mediator.u_c", Type::Count(1, "collisions per stroke need u_r >= 1"), "1", "collisions per cold stroke"),
    key_def("mediator.u_h", Type::Count(1, "collisions per stroke need u_r >= 1"), "1", "collisions per hot stroke"),
    key_def("mediator.t_w_m", Type::NonNegative, "0.0", "mediator-cycle waiting time [1/nu_c]"),
    key_def("grid.min", Type::NonNegative, "auto", "lower end of the swept axis"),
    key_def("grid.max", Type::NonNegative, "auto", "upper end of the swept axis"),
    key_def("grid.count", Type::Count(1, "grids must be non-empty"), "auto", "number of grid points"),
    key_def("grid.scale", Type::Scale, "auto", "grid spacing: linear | log"),
    key_def("oracle.points", Type::Count(1, "at least one validation point"), "auto", "random validation points (auto: 1000 for finite pairs, 100 with an oscillator)"),
    key_def("oracle.levels", Type::Count(2, "a truncation needs at least 2 levels"), "60", "oscillator truncation N"),
    key_def("oracle.tail_tolerance", Type::Positive, "1e-10", "certification tolerance for tail mass and doubling change"),
    key_def("oracle.threshold", Type::Positive, "auto", "pass threshold on |d<n_h>| (auto: 1e-10 finite pairs, 1e-6 with an oscillator)"),
    key_def("otto.objective", Type::Objective, "engine-power", "peak matched by otto.target: engine-power | refrigerator-chi"),
    key_def("otto.target", Type::Positive, "auto", "target peak for coupling matching (auto: no matching)"),
    key_def("output.json", Type::Flag, "true", "also write a JSON summary"),
];

fn lookup(key: &str) -> Option<&'static KeyDef> {
    KEYS.iter().find(|s| s.key == key)
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    Resolved,
    File { line: usize, column: usize },
    Override { index: usize, column: usize },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => f.write_str("default"),
            Origin::Resolved => f.write_str("experiment default"),
            Origin::File { line, column } => write!(f, "line {line}, column {column}"),
            Origin::Override { index, column } => write!(f, "--set #{index}, column {column}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: Option<Origin>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("config error")?;
        if let Some(origin) = &self.origin {
            write!(f, " at {origin}")?;
        }
        if let Some(key) = &self.key {
            write!(f, ": `{key}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(origin: &Origin, key: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        origin: Some(origin.clone()),
        key: key.map(str::to_owned),
        message: message.into(),
    }
}

fn parse_value(def: &KeyDef, raw: &str, origin: &Origin) -> Result<Value, ConfigError> {
    let bad = |msg: String| err(origin, Some(def.key), msg);
    if raw == "auto" {
        return if def.auto {
            Ok(Value::Auto)
        } else {
            Err(bad("`auto` is not accepted for this key".into()))
        };
    }
    match def.ty {
        Type::Positive | Type::NonNegative => {
            let x: f64 = raw.parse().map_err(|_| bad(format!("expected a real number, found `{raw}`")))?;
            if !x.is_finite() {
                return Err(bad(format!("must be finite, found {raw}")));
            }
            let ok = match def.ty {
                Type::Positive => x > 0.0,
                _ => x >= 0.0,
            };
            if !ok {
                let need = if def.ty == Type::Positive {
                    "must be positive"
                } else {
                    "must be non-negative"
                };
                let what = if def.key.starts_with("machine.t_") && def.key != "machine.t_w" {
                    "bath temperature "
                } else {
                    ""
                };
                return Err(bad(format!("{what}{need}, found {x:?}")));
            }
            Ok(Value::Real(x))
        }
        Type::Count(min, why) => {
            let n: usize = raw
                .parse()
                .map_err(|_| bad(format!("expected a non-negative integer, found `{raw}`")))?;
            if n < min {
                return Err(bad(format!("{why}, found {n}")));
            }
            Ok(Value::Count(n))
        }
        Type::Kind => raw.parse::<SystemKind>().map(Value::Kind).map_err(|e| bad(e.to_string())),
        Type::Scale => match raw {
            "linear" => Ok(Value::Scale(Scale::Linear)),
            "log" => Ok(Value::Scale(Scale::Log)),
            _ => Err(bad(format!("expected `linear` or `log`, found `{raw}`"))),
        },
        Type::Flag => match raw {
            "true" => Ok(Value::Flag(true)),
            "false" => Ok(Value::Flag(false)),
            _ => Err(bad(format!("expected `true` or `false`, found `{raw}`"))),
        },
        Type::Objective => match raw {
            "engine-power" => Ok(Value::Objective(Objective::EnginePower)),
            "refrigerator-chi" => Ok(Value::Objective(Objective::RefrigeratorChi)),
            _ => Err(bad(format!("expected `engine-power` or `refrigerator-chi`, found `{raw}`"))),
        },
    }
}

/// A validated experiment configuration with all defaults applied.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    values: BTreeMap<&'static str, (Value, Origin)>,
}

/// Equality ignores where values came from.
impl PartialEq for ExperimentConfig {
    fn eq(&self, other: &Self) -> bool {
        self.experiment == other.experiment
            && self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a.0 == b.0 && a.1 .0 == b.1 .0)
    }
}

/// Splits `key = value`, returning trimmed parts with 1-based columns.
fn split_assignment(text: &str) -> Option<((&str, usize), (&str, usize))> {
    let eq = text.find('=')?;
    let (k, v) = (&text[..eq], &text[eq + 1..]);
    let key = k.trim();
    let key_col = k.len() - k.trim_start().len() + 1;
    let value = v.trim();
    let value_col = eq + 2 + (v.len() - v.trim_start().len());
    Some(((key, key_col), (value, value_col)))
}

impl ExperimentConfig {
    /// Parses config text and `--set` overrides, applies defaults and validates.
    pub fn load(experiment: Experiment, text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut values: BTreeMap<&'static str, (Value, Origin)> = BTreeMap::new();
        let mut assign = |key: &str, key_col, raw: &str, value_col, mk: &dyn Fn(usize) -> Origin, seen_file: bool| {
            let def = lookup(key).ok_or_else(|| err(&mk(key_col), Some(key), "unknown key (run `qtm keys` for the reference)"))?;
            if seen_file {
                if let Some((_, prev)) = values.get(def.key) {
                    return Err(err(&mk(key_col), Some(key), format!("duplicate key, first set at {prev}")));
                }
            }
            let origin = mk(value_col);
            let value = parse_value(def, raw, &origin)?;
            values.insert(def.key, (value, origin));
            Ok::<(), ConfigError>(())
        };

        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw_line.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let mk = |column| Origin::File { line, column };
            let ((key, key_col), (value, value_col)) = split_assignment(content).ok_or_else(|| {
                err(
                    &mk(content.len() - content.trim_start().len() + 1),
                    None,
                    "expected `key = value`",
                )
            })?;
            if key.is_empty() {
                return Err(err(&mk(key_col), None, "missing key before `=`"));
            }
            if value.is_empty() {
                return Err(err(&mk(value_col), Some(key), "missing value after `=`"));
            }
            assign(key, key_col, value, value_col, &mk, true)?;
        }
        for (i, text) in overrides.iter().enumerate() {
            let index = i + 1;
            let mk = |column| Origin::Override { index, column };
            let ((key, key_col), (value, value_col)) =
                split_assignment(text).ok_or_else(|| err(&mk(1), None, format!("expected `key=value`, found `{text}`")))?;
            if value.is_empty() {
                return Err(err(&mk(value_col), Some(key), "missing value after `=`"));
            }
            assign(key, key_col, value, value_col, &mk, false)?;
        }
        for def in KEYS {
            if !values.contains_key(def.key) {
                let value = parse_value(def, def.default, &Origin::Default).expect("defaults parse");
                values.insert(def.key, (value, Origin::Default));
            }
        }
        let mut config = ExperimentConfig { experiment, values };
        config.resolve()?;
        config.validate()?;
        Ok(config)
    }

    /// Rebuilds a configuration from the provenance header of an emitted dataset.
    pub fn from_provenance(csv: &str) -> Result<Self, ConfigError> {
        let mut experiment = None;
        let mut body = String::new();
        for line in csv.lines().take_while(|l| l.starts_with("# ")) {
            if let Some(name) = line.strip_prefix("# experiment: ") {
                experiment = Some(name.parse::<Experiment>().map_err(|m| ConfigError {
                    origin: None,
                    key: None,
                    message: m,
                })?);
            } else if let Some(assignment) = line.strip_prefix("# config: ") {
                body.push_str(assignment);
                body.push('\n');
            }
        }
        let experiment = experiment.ok_or_else(|| ConfigError {
            origin: None,
            key: None,
            message: "provenance header names no experiment".into(),
        })?;
        Self::load(experiment, &body, &[])
    }

    pub fn value(&self, key: &str) -> Value {
        self.values.get(key).unwrap_or_else(|| panic!("unknown key {key}")).0
    }

    pub fn origin(&self, key: &str) -> Origin {
        self.values[key].1.clone()
    }

    pub fn real(&self, key: &str) -> f64 {
        match self.value(key) {
            Value::Real(x) => x,
            v => panic!("{key} is not a resolved real: {v}"),
        }
    }

    pub fn opt_real(&self, key: &str) -> Option<f64> {
        match self.value(key) {
            Value::Real(x) => Some(x),
            Value::Auto => None,
            v => panic!("{key} is not a real: {v}"),
        }
    }

    pub fn count(&self, key: &str) -> usize {
        match self.value(key) {
            Value::Count(n) => n,
            v => panic!("{key} is not a resolved count: {v}"),
        }
    }

    pub fn kind(&self, key: &str) -> SystemKind {
        match self.value(key) {
            Value::Kind(k) => k,
            v => panic!("{key} is not a resolved kind: {v}"),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.value(key), Value::Flag(true))
    }

    pub fn scale(&self) -> Scale {
        match self.value("grid.scale") {
            Value::Scale(s) => s,
            v => panic!("grid.scale is not resolved: {v}"),
        }
    }

    pub fn objective(&self) -> Objective {
        match self.value("otto.objective") {
            Value::Objective(o) => o,
            v => panic!("otto.objective is not an objective: {v}"),
        }
    }

    /// Resolved `key = value` assignments in reference order.
    pub fn echo(&self) -> Vec<String> {
        KEYS.iter()
            .map(|s| format!("{} = {}", s.key, self.values[s.key].0))
            .collect()
    }

    pub fn kinds(&self) -> (SystemKind, SystemKind) {
        let c = self.kind("machine.kind");
        (c, self.kind("machine.kind_h"))
    }

    /// The direct machine described by the `machine.` keys.
    pub fn machine(&self) -> qtm_core::Result<MachineConfig> {
        let (kind_c, kind_h) = self.kinds();
        MachineConfig::new(
            self.real("machine.omega_c"),
            self.real("machine.omega_h"),
            self.real("machine.t_c"),
            self.real("machine.t_h"),
            self.real("machine.g"),
        )?
        .with_waiting_time(self.real("machine.t_w"))
        .map(|m| m.with_kinds(kind_c, kind_h))
    }

    /// Mediator frequency and the larger of the two stroke Rabi frequencies.
    pub fn mediator_frequencies(&self) -> (f64, f64) {
        let (wc, wh) = (self.real("machine.omega_c"), self.real("machine.omega_h"));
        let wm = self.real("mediator.omega_m");
        let delta = (0.5 * (wc - wm)).abs().max((0.5 * (wh - wm)).abs());
        (wm, delta.hypot(self.real("mediator.g_m")))
    }

    /// A mediator cycle with uniform strokes of per-collision duration `tau_m`.
    pub fn mediator(&self, tau_m: f64) -> qtm_core::Result<MediatorConfig> {
        self.mediator_with(tau_m, self.count("mediator.u_c"), self.count("mediator.u_h"))
    }

    pub fn mediator_with(&self, tau_m: f64, u_c: usize, u_h: usize) -> qtm_core::Result<MediatorConfig> {
        let g = self.real("mediator.g_m");
        MediatorConfig::new(
            self.real("machine.omega_c"),
            self.real("machine.omega_h"),
            self.real("mediator.omega_m"),
            self.real("machine.t_c"),
            self.real("machine.t_h"),
            Stroke::uniform(g, tau_m, u_c)?,
            Stroke::uniform(g, tau_m, u_h)?,
        )?
        .with_waiting_time(self.real("mediator.t_w_m"))
        .map(|m| m.with_kind(self.kind("machine.kind")))
    }

    fn set_resolved(&mut self, key: &'static str, value: Value) {
        let entry = self.values.get_mut(key).expect("known key");
        if entry.0 == Value::Auto {
            *entry = (value, Origin::Resolved);
        }
    }

    fn resolve(&mut self) -> Result<(), ConfigError> {
        use Experiment::*;
        if self.value("machine.kind_h") == Value::Auto {
            let k = self.value("machine.kind");
            self.set_resolved("machine.kind_h", k);
        }
        let (wc, wh) = (self.real("machine.omega_c"), self.real("machine.omega_h"));
        self.set_resolved("mediator.omega_m", Value::Real(0.5 * (wc + wh)));
        let grid = |min: f64, max: f64, count: usize, scale| (min, max, count, scale);
        let defaults = match self.experiment {
            SweepTau => {
                let k = (0.5 * (wh - wc)).hypot(self.real("machine.g"));
                Some(grid(0.01 / k, 2.0 * PI / k, 200, Scale::Linear))
            }
            OptimalTimeCurve => Some(grid(1e-3, 1e3, 301, Scale::Log)),
            Frontier => {
                let eta_c = 1.0 - self.real("machine.t_c") / self.real("machine.t_h");
                let n = 200usize;
                Some(grid(eta_c / (n + 1) as f64, eta_c * n as f64 / (n + 1) as f64, n, Scale::Linear))
            }
            MediatorCompare => {
                let (_, k_m) = self.mediator_frequencies();
                // k_m tau_m = pi gives A = 1, where the cycle stops contracting.
                Some(grid(PI / (201.0 * k_m), 200.0 * PI / (201.0 * k_m), 200, Scale::Linear))
            }
            Advantage => Some(grid(1e-3, 10.0, 60, Scale::Log)),
            OttoCompare => {
                let bound = (wc * wh).sqrt();
                let oscillators = self.kinds().0.canonical() == SystemKind::Oscillator;
                Some(grid(1e-3 * bound, if oscillators { 0.999 } else { 10.0 } * bound, 100, Scale::Log))
            }
            SwapCompare => Some(grid(1e-3, 1e3, 121, Scale::Log)),
            AppendixD => Some(grid(1e-3, 10.0, 200, Scale::Log)),
            FreqMaximize | ValidateOracle => None,
        };
        if let Some((min, max, count, scale)) = defaults {
            self.set_resolved("grid.min", Value::Real(min));
            self.set_resolved("grid.max", Value::Real(max));
            self.set_resolved("grid.count", Value::Count(count));
            self.set_resolved("grid.scale", Value::Scale(scale));
        }
        if self.experiment == ValidateOracle {
            let (c, h) = self.kinds();
            let finite = c.level_count().is_some() && h.level_count().is_some();
            self.set_resolved("oracle.points", Value::Count(if finite { 1000 } else { 100 }));
            self.set_resolved("oracle.threshold", Value::Real(if finite { 1e-10 } else { 1e-6 }));
        }
        if self.experiment == AppendixD {
            let eta_ca = 1.0 - (self.real("machine.t_c") / self.real("machine.t_h")).sqrt();
            if eta_ca > 0.0 {
                self.set_resolved("machine.eta_e", Value::Real(eta_ca));
            }
        }
        Ok(())
    }

    fn fail(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: Some(self.origin(key)),
            key: Some(key.to_owned()),
            message: message.into(),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        use Experiment::*;
        let e = self.experiment;
        self.machine()
            .and_then(|m| m.check_stability())
            .map_err(|m| self.fail("machine.g", m.to_string()))?;
        let (t_c, t_h) = (self.real("machine.t_c"), self.real("machine.t_h"));
        if matches!(e, Frontier | FreqMaximize | AppendixD) && t_h <= t_c {
            return Err(self.fail("machine.t_h", format!("an engine needs t_h > t_c = {t_c:?}")));
        }
        if let Some(eta) = self.opt_real("machine.eta_e") {
            if eta >= 1.0 - t_c / t_h {
                return Err(self.fail("machine.eta_e", "fixed efficiency must satisfy 0 < eta_e < eta_C = 1 - t_c/t_h"));
            }
        }
        if let Value::Real(min) = self.value("grid.min") {
            let max = self.real("grid.max");
            if !(max > min) {
                return Err(self.fail("grid.max", format!("grid.max must exceed grid.min = {min:?}")));
            }
            if self.scale() == Scale::Log && min <= 0.0 {
                return Err(self.fail("grid.min", "a log grid needs grid.min > 0"));
            }
            let needs_positive = matches!(e, SweepTau | MediatorCompare | OttoCompare | SwapCompare | AppendixD | Frontier);
            if needs_positive && min <= 0.0 {
                return Err(self.fail("grid.min", "this axis must stay strictly positive"));
            }
            if e == Frontier && max >= 1.0 - t_c / t_h {
                return Err(self.fail("grid.max", "efficiencies must stay below eta_C = 1 - t_c/t_h"));
            }
        }
        let (kind_c, kind_h) = self.kinds();
        match e {
            SweepTau | OttoCompare if !qtm_core::collision::closed_form_is_exact(kind_c, kind_h) => {
                return Err(self.fail("machine.kind_h", "the closed-form collision needs a qubit or oscillator pair of one species"));
            }
            Frontier | FreqMaximize if kind_c.canonical() != SystemKind::Qubit || kind_h.canonical() != SystemKind::Qubit => {
                return Err(self.fail("machine.kind", "frequency maximization has an interior optimum only for qubits"));
            }
            MediatorCompare => {
                if kind_h != kind_c {
                    return Err(self.fail("machine.kind_h", "the mediator cycle couples systems of one species"));
                }
                let (_, k_m) = self.mediator_frequencies();
                self.mediator(PI / (2.0 * k_m)).map_err(|m| self.fail("mediator.g_m", m.to_string()))?;
            }
            _ => {}
        }
        Ok(())
    }
}

/// Human-readable reference of every key, its default and meaning.
pub fn key_reference() -> String {
    let width = KEYS.iter().map(|s| s.key.len()).max().unwrap_or(0);
    let mut out = String::from("Configuration keys (`key = value`, `#` comments; override with --set key=value):\n\n");
    for s in KEYS {
        out.push_str(&format!("  {:<width$}  default {:<13} {}\n", s.key, s.default, s.doc));
    }
    out.push_str(
        "\nGrid defaults per experiment (used when grid.* = auto):\n\
         \x20 sweep-tau           tau in [0.01/k, 2 pi/k], 200 linear\n\
         \x20 optimal-time-curve  k t_w in [1e-3, 1e3], 301 log\n\
         \x20 frontier            eta_e = eta_C i/201, i = 1..200\n\
         \x20 mediator-compare    k_m tau_m = pi i/201, i = 1..200\n\
         \x20 advantage           t_w in [1e-3, 10], 60 log\n\
         \x20 otto-compare        g in [1e-3, 10] sqrt(omega_c omega_h) (0.999 for oscillators), 100 log\n\
         \x20 swap-compare        g in [1e-3, 1e3], 121 log\n\
         \x20 appendix-d          x = omega_c/(2 t_c) in [1e-3, 10], 200 log\n",
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_applies_documented_defaults() {
        let c = ExperimentConfig::load(Experiment::SweepTau, "machine.g = 0.5\n", &[]).unwrap();
        assert_eq!(c.real("machine.t_w"), 0.0);
        assert_eq!(c.kinds(), (SystemKind::Qubit, SystemKind::Qubit));
        assert_eq!(c.count("grid.count"), 200);
        assert_eq!(c.origin("grid.count"), Origin::Resolved);
    }

    #[test]
    fn negative_temperature_names_the_bath_key() {
        let e = ExperimentConfig::load(Experiment::SweepTau, "# baths\nmachine.t_c = -1\n", &[]).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("machine.t_c"));
        assert_eq!(e.origin, Some(Origin::File { line: 2, column: 15 }));
        assert!(e.message.contains("temperature must be positive"), "{e}");
    }

    #[test]
    fn zero_collisions_cite_the_stroke_precondition() {
        let e = ExperimentConfig::load(Experiment::MediatorCompare, "", &["mediator.u_c=0".into()]).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("mediator.u_c"));
        assert!(e.message.contains("u_r >= 1"), "{e}");
        assert_eq!(e.origin, Some(Origin::Override { index: 1, column: 14 }));
    }

    #[test]
    fn unknown_and_malformed_lines_are_rejected() {
        let e = ExperimentConfig::load(Experiment::SweepTau, "machine.gg = 1", &[]).unwrap_err();
        assert!(e.message.contains("unknown key"));
        let e = ExperimentConfig::load(Experiment::SweepTau, "\n  machine.g 1", &[]).unwrap_err();
        assert_eq!(e.origin, Some(Origin::File { line: 2, column: 3 }));
        let e = ExperimentConfig::load(Experiment::SweepTau, "machine.g = 1\nmachine.g = 2", &[]).unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = ExperimentConfig::load(Experiment::SweepTau, "machine.kind = spin", &[]).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("machine.kind"));
        let e = ExperimentConfig::load(Experiment::SweepTau, "machine.g = auto", &[]).unwrap_err();
        assert!(e.message.contains("auto"));
    }

    #[test]
    fn overrides_replace_file_values() {
        let c = ExperimentConfig::load(Experiment::SweepTau, "machine.g = 0.5", &["machine.g=0.25".into()]).unwrap();
        assert_eq!(c.real("machine.g"), 0.25);
    }

    #[test]
    fn cross_key_preconditions() {
        let e = ExperimentConfig::load(Experiment::Frontier, "machine.t_h = 0.5", &[]).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("machine.t_h"));
        let e = ExperimentConfig::load(Experiment::SweepTau, "grid.min = 2\ngrid.max = 1", &[]).unwrap_err();
        assert_eq!(e.key.as_deref(), Some("grid.max"));
        let e = ExperimentConfig::load(
            Experiment::SweepTau,
            "machine.kind = oscillator\nmachine.omega_c = 1\nmachine.omega_h = 4\nmachine.g = 2",
            &[],
        )
        .unwrap_err();
        assert!(e.message.contains("stability"), "{e}");
    }

    #[test]
    fn echo_round_trips() {
        let c = ExperimentConfig::load(Experiment::Advantage, "machine.omega_h = 5\nmachine.g = 1\n", &[]).unwrap();
        let text = c.echo().join("\n");
        let back = ExperimentConfig::load(Experiment::Advantage, &text, &[]).unwrap();
        assert_eq!(c, back);
    }
}
