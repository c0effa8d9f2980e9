//! Sampled densities on an (x, t) grid.

use crate::error::{domain, Result};

/// Which solver produced a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityMethod {
    Exact,
    Paper,
    ClosedN1,
    Diffusion,
    Ctrw,
    Subordinated,
}

impl DensityMethod {
    pub fn label(self) -> &'static str {
        match self {
            DensityMethod::Exact => "exact",
            DensityMethod::Paper => "paper",
            DensityMethod::ClosedN1 => "closed_N1",
            DensityMethod::Diffusion => "diffusion",
            DensityMethod::Ctrw => "ctrw",
            DensityMethod::Subordinated => "subordinated",
        }
    }
}

/// Values U(x_i, t_j), stored per time.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub x_grid: Vec<f64>,
    pub times: Vec<f64>,
    /// values[j][i] = U(x_i, t_j).
    pub values: Vec<Vec<f64>>,
    pub method: DensityMethod,
    pub params_fingerprint: u64,
}

impl DensityField {
    pub fn new(
        x_grid: Vec<f64>,
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
        method: DensityMethod,
        params_fingerprint: u64,
    ) -> Result<Self> {
        if values.len() != times.len() || values.iter().any(|row| row.len() != x_grid.len()) {
            return domain("density values do not match the (x, t) grid");
        }
        if let Some((j, i)) = values
            .iter()
            .enumerate()
            .find_map(|(j, row)| row.iter().position(|v| !v.is_finite()).map(|i| (j, i)))
        {
            return domain(format!("non-finite density at x = {}, t = {}", x_grid[i], times[j]));
        }
        Ok(DensityField { x_grid, times, values, method, params_fingerprint })
    }

    pub fn profile(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    /// Trapezoid-rule integral over the grid.
    pub fn trapezoid_mass(&self, j: usize) -> f64 {
        trapezoid(&self.x_grid, &self.values[j])
    }

    /// max |U(x) - U(-x)| if the grid is symmetric about 0.
    pub fn max_asymmetry(&self, j: usize) -> Option<f64> {
        let n = self.x_grid.len();
        let symmetric = (0..n).all(|i| self.x_grid[i] == -self.x_grid[n - 1 - i]);
        if !symmetric {
            return None;
        }
        let u = &self.values[j];
        Some((0..n).map(|i| (u[i] - u[n - 1 - i]).abs()).fold(0.0, f64::max))
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])).sum()
}

/// n equally spaced points on [a, b].
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    // Mirror the upper half so grids symmetric about 0 are exactly symmetric.
    let mut v: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    if a == -b {
        for i in 0..n / 2 {
            v[n - 1 - i] = -v[i];
        }
        if n % 2 == 1 {
            v[n / 2] = 0.0;
        }
    }
    v
}

/// Composite Gauss rule on [0, x_max] with panels graded geometrically
/// towards 0 (ratio `ratio`, first panel [0, x_min], no panel wider than
/// `max_width`), for integrands with a cusp at the origin.
pub fn graded_half_line_rule(x_max: f64, x_min: f64, ratio: f64, max_width: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = crate::quad::GaussRule::cached(order);
    let mut cuts = vec![0.0, x_min.min(x_max)];
    while *cuts.last().unwrap() < x_max {
        let last = *cuts.last().unwrap();
        let next = (last * ratio).min(last + max_width).min(x_max);
        cuts.push(next);
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in cuts.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push(c + h * x);
            weights.push(h * wt);
        }
    }
    (nodes, weights)
}

pub(crate) fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.is_empty() {
        return domain("empty x grid");
    }
    if x_grid.iter().any(|x| !x.is_finite()) {
        return domain("x grid contains non-finite values");
    }
    Ok(())
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return domain("no observation times");
    }
    if times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return domain("observation times must be positive");
    }
    Ok(())
}
