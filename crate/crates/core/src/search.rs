//! Derivative-free scalar search.

use crate::error::{QtmError, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_ITERATIONS: usize = 400;

/// Result of a bracketed scalar maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
    /// Final bracket `[lo, hi]` containing `x`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub evaluations: usize,
    /// Final bracket width relative to |x|.
    pub tolerance_achieved: f64,
}

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket width falls below `rel_tol * max(|x|, 1e-300)`.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<ScalarMax>
where
    F: Fn(f64) -> f64,
{
    if !(rel_tol > 0.0) {
        return Err(QtmError::Domain {
            name: "rel_tol",
            value: rel_tol,
            requirement: "tolerance must be positive",
        });
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(QtmError::Domain {
            name: "bracket",
            value: hi - lo,
            requirement: "bracket must be finite with lo < hi",
        });
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evaluations = 2;
    let mut iterations = 0;

    let converged = |a: f64, b: f64| {
        let mid = 0.5 * (a + b);
        b - a <= rel_tol * mid.abs().max(1e-300)
    };

    while !converged(a, b) {
        if iterations == MAX_GOLDEN_ITERATIONS {
            return Err(QtmError::NonConvergence {
                routine: "golden-section",
                iterations,
                width: b - a,
            });
        }
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        evaluations += 1;
    }

    let (x, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(ScalarMax {
        x,
        value,
        bracket: (a, b),
        iterations,
        evaluations,
        tolerance_achieved: (b - a) / x.abs().max(1e-300),
    })
}

/// Outcome of a grid scan followed by golden-section refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct SeededMax {
    pub best: ScalarMax,
    /// Every grid point and its objective value.
    pub probes: Vec<(f64, f64)>,
    /// The best grid point sat on the first or last node.
    pub on_boundary: bool,
}

/// Scans `grid` (strictly increasing) and refines around the best node.
///
/// The returned maximum is never below any probed value.
pub fn grid_seeded_max<F>(f: F, grid: &[f64], rel_tol: f64) -> Result<SeededMax>
where
    F: Fn(f64) -> f64,
{
    if grid.len() < 3 {
        return Err(QtmError::Domain {
            name: "grid length",
            value: grid.len() as f64,
            requirement: "a seeding grid needs at least 3 nodes",
        });
    }
    let probes: Vec<(f64, f64)> = grid.iter().map(|&x| (x, f(x))).collect();
    let best_idx = probes
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if p.1 > probes[best].1 { i } else { best });
    let on_boundary = best_idx == 0 || best_idx == grid.len() - 1;
    let lo = grid[best_idx.saturating_sub(1)];
    let hi = grid[(best_idx + 1).min(grid.len() - 1)];

    let mut best = golden_section_max(&f, lo, hi, rel_tol)?;
    best.evaluations += probes.len();
    let (gx, gv) = probes[best_idx];
    if gv > best.value {
        best.x = gx;
        best.value = gv;
    }
    Ok(SeededMax {
        best,
        probes,
        on_boundary,
    })
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to absolute tolerance `tol`.
pub fn bisect_root<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(QtmError::Numerical(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo:e}, {f_hi:e}"
        )));
    }
    for _ in 0..MAX_GOLDEN_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(QtmError::NonConvergence {
        routine: "bisection",
        iterations: MAX_GOLDEN_ITERATIONS,
        width: hi - lo,
    })
}

/// `count` points from `lo` to `hi`, uniform in log scale.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    linear_grid(a, b, count).into_iter().map(f64::exp).collect()
}

/// `count` points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
