use crate::search::{ScalarMax, SeededMax};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// The optimum lies strictly inside the search box.
    Interior,
    /// The best seed sat on the edge of the search box; the optimum may lie outside it.
    Boundary,
}

/// Argmax, objective and diagnostics of an optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    /// Named optimal parameters, e.g. `("tau", 0.93)`.
    pub argmax: Vec<(&'static str, f64)>,
    pub objective: f64,
    /// Final bracket of the last refined coordinate.
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub evaluations: usize,
    pub tolerance_achieved: f64,
    pub status: SearchStatus,
    /// Coordinate along which `probes` were taken.
    pub probe_axis: &'static str,
    /// Retained (coordinate, objective) samples; none exceeds `objective`.
    pub probes: Vec<(f64, f64)>,
    /// Derived values at the optimum (efficiencies, frequencies, ...).
    pub annotations: Vec<(&'static str, f64)>,
}

impl OptimizationReport {
    pub(crate) fn from_scalar(best: &ScalarMax, probe_axis: &'static str) -> Self {
        OptimizationReport {
            argmax: Vec::new(),
            objective: best.value,
            bracket: best.bracket,
            iterations: best.iterations,
            evaluations: best.evaluations,
            tolerance_achieved: best.tolerance_achieved,
            status: SearchStatus::Interior,
            probe_axis,
            probes: Vec::new(),
            annotations: Vec::new(),
        }
    }

    pub(crate) fn from_seeded(seeded: SeededMax, probe_axis: &'static str) -> Self {
        let mut report = Self::from_scalar(&seeded.best, probe_axis);
        report.probes = seeded.probes;
        if seeded.on_boundary {
            report.status = SearchStatus::Boundary;
        }
        report
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.argmax
            .iter()
            .chain(self.annotations.iter())
            .find(|(n, _)| *n == name)
            .map(|&(_, v)| v)
    }

    /// Largest retained probe value never exceeds the reported objective.
    pub fn dominates_probes(&self) -> bool {
        self.probes.iter().all(|&(_, v)| v <= self.objective)
    }
}
