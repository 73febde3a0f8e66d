//! Least-squares fit of the three-parameter power law y = a * x^b + c.
//!
//! The exponent is found by a coarse grid over [0.1, 20] followed by
//! golden-section refinement; for each candidate exponent the scale and
//! offset have a closed-form linear least-squares solution, so the
//! search is one-dimensional.

use crate::error::{LabError, Result};

const B_RANGE: (f64, f64) = (0.1, 20.0);
const GRID_STEPS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Residual sum of squares at the fitted parameters.
    pub residual: f64,
    pub points: usize,
}

impl FitResult {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x.powf(self.b) + self.c
    }
}

pub fn fit_power(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(LabError::Data(format!(
            "power fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    for &(x, y) in points {
        if !(x > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(LabError::Data(format!(
                "power fit points need positive finite x and finite y, got ({x}, {y})"
            )));
        }
    }
    let x0 = points[0].0;
    if points.iter().all(|&(x, _)| x == x0) {
        return Err(LabError::Data(
            "all abscissae are equal; the power exponent is unidentifiable".into(),
        ));
    }

    // Coarse pass: the residual is smooth in b but need not be unimodal
    // over the whole range, so bracket the global grid minimum first.
    let step = (B_RANGE.1 - B_RANGE.0) / GRID_STEPS as f64;
    let grid_b = |i: usize| B_RANGE.0 + step * i as f64;
    let mut best_i = 0;
    let mut best_rss = f64::INFINITY;
    for i in 0..=GRID_STEPS {
        let (_, _, rss) = solve_linear(points, grid_b(i));
        if rss < best_rss {
            best_rss = rss;
            best_i = i;
        }
    }

    let lo = grid_b(best_i.saturating_sub(1));
    let hi = grid_b((best_i + 1).min(GRID_STEPS));
    let b = golden_section(points, lo, hi);
    let (a, c, residual) = solve_linear(points, b);
    Ok(FitResult { a, b, c, residual, points: points.len() })
}

/// Closed-form least squares for (a, c) at a fixed exponent, returning
/// the residual sum of squares as the third element.
fn solve_linear(points: &[(f64, f64)], b: f64) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mean_u = points.iter().map(|&(x, _)| x.powf(b)).sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(x, y) in points {
        let du = x.powf(b) - mean_u;
        cov += du * (y - mean_y);
        var += du * du;
    }
    // A degenerate power term (all u equal, e.g. overflowed) collapses
    // to the constant fit.
    let a = if var > 0.0 { cov / var } else { 0.0 };
    let c = mean_y - a * mean_u;
    let rss = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (a * x.powf(b) + c);
            r * r
        })
        .sum();
    (a, c, rss)
}

fn golden_section(points: &[(f64, f64)], mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut m1 = hi - INV_PHI * (hi - lo);
    let mut m2 = lo + INV_PHI * (hi - lo);
    let mut f1 = solve_linear(points, m1).2;
    let mut f2 = solve_linear(points, m2).2;
    // 120 contractions shrink the bracket by ~1e-25, past f64 spacing.
    for _ in 0..120 {
        if f1 <= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - INV_PHI * (hi - lo);
            f1 = solve_linear(points, m1).2;
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + INV_PHI * (hi - lo);
            f2 = solve_linear(points, m2).2;
        }
    }
    (lo + hi) / 2.0
}
