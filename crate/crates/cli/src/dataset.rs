//! CSV datasets with a `# `-prefixed provenance header.
//!
//! Layout:
//!
//! ```text
//! # qtm <version>
//! # experiment: <name>
//! # seed: <seed>
//! # config: <key> = <value>      (one line per key, reference order)
//! # units: <unit>,<unit>,...
//! <column>,<column>,...
//! <row>
//! ```
//!
//! Reals are written in Rust's shortest round-trip form; flags are 0 or 1.

use std::fmt::Write as _;

use serde_json::{Map, Value as Json};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Self {
        Dataset {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// First non-finite entry as `(row, column name, value)`.
    pub fn first_non_finite(&self) -> Option<(usize, &'static str, f64)> {
        self.rows.iter().enumerate().find_map(|(i, row)| {
            row.iter()
                .zip(&self.columns)
                .find(|(v, _)| !v.is_finite())
                .map(|(v, c)| (i, c.name, *v))
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self, config: &ExperimentConfig, seed: u64) -> String {
        let mut out = provenance(config, seed);
        let units: Vec<_> = self.columns.iter().map(|c| c.unit).collect();
        let names: Vec<_> = self.columns.iter().map(|c| c.name).collect();
        writeln!(out, "# units: {}", units.join(",")).unwrap();
        writeln!(out, "{}", names.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

pub fn provenance(config: &ExperimentConfig, seed: u64) -> String {
    let mut out = String::new();
    writeln!(out, "# qtm {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# experiment: {}", config.experiment).unwrap();
    writeln!(out, "# seed: {seed}").unwrap();
    for line in config.echo() {
        writeln!(out, "# config: {line}").unwrap();
    }
    out
}

/// Ordered JSON object for the summary file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(pub Map<String, Json>);

impl Summary {
    pub fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.0.insert(key.to_owned(), json_real(x));
        self
    }

    pub fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.0.insert(key.to_owned(), Json::Bool(b));
        self
    }

    pub fn text(&mut self, key: &str, s: &str) -> &mut Self {
        self.0.insert(key.to_owned(), Json::String(s.to_owned()));
        self
    }

    pub fn pairs(&mut self, key: &str, pairs: &[(f64, f64)]) -> &mut Self {
        let list = pairs.iter().map(|&(a, b)| Json::Array(vec![json_real(a), json_real(b)])).collect();
        self.0.insert(key.to_owned(), Json::Array(list));
        self
    }

    pub fn to_json(&self, config: &ExperimentConfig, seed: u64) -> String {
        let mut root = Map::new();
        root.insert("experiment".into(), Json::String(config.experiment.name().into()));
        root.insert("version".into(), Json::String(env!("CARGO_PKG_VERSION").into()));
        root.insert("seed".into(), Json::from(seed));
        root.insert("results".into(), Json::Object(self.0.clone()));
        let mut s = serde_json::to_string_pretty(&Json::Object(root)).expect("summary serializes");
        s.push('\n');
        s
    }
}

fn json_real(x: f64) -> Json {
    serde_json::Number::from_f64(x).map_or(Json::Null, Json::Number)
}
