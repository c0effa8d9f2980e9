//! Inverse Fourier transforms of the form (1/π) ∫_0^∞ [cos(kx) Re f - sin(kx) Im f] dk.
//!
//! Two drivers share the same tail treatment:
//! * `fourier_inversion` for a single x: Gauss panels on half-periods of the
//!   oscillation, plus the fitted power-law tail and an epsilon-accelerated
//!   residual beyond k_max.
//! * `KMesh` for many x at once: an adaptive Gauss-Kronrod mesh built from f
//!   alone and reused for every x.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

use crate::quad::{expint_n, gk_error, kronrod_nodes, kronrod_weights, wynn_epsilon, GaussRule};

type C = Complex64;

/// How the part of the integral beyond k_max is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailMode {
    /// Truncate at k_max.
    None,
    /// Fit Re f ≈ a₂/k² + a₄/k⁴, Im f ≈ b₁/k + b₃/k³ at k_max, integrate the
    /// model exactly and the residual numerically.
    AsymptoticSubtraction,
}

/// Quadrature controls for Fourier inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Lower bound for the truncation wavenumber; drivers may raise it.
    pub k_max: f64,
    /// Gauss nodes per half-period panel.
    pub nodes_per_halfperiod: usize,
    /// Epsilon-table order (0 disables acceleration).
    pub acceleration_order: usize,
    pub tail_mode: TailMode,
    /// Absolute accuracy target for the k-integral.
    pub tolerance: f64,
    /// Width ε of the Gaussian mollifier exp(-ε²k²/2) applied to non-decaying integrands.
    pub mollifier_width: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            k_max: 200.0,
            nodes_per_halfperiod: 16,
            acceleration_order: 8,
            tail_mode: TailMode::AsymptoticSubtraction,
            tolerance: 1e-11,
            mollifier_width: 0.01,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_max > 0.0 && self.k_max.is_finite()) {
            return Err(Error::Configuration(format!("k_max = {} must be positive", self.k_max)));
        }
        if !(8..=64).contains(&self.nodes_per_halfperiod) {
            return Err(Error::Configuration(format!(
                "nodes_per_halfperiod = {} outside [8, 64]",
                self.nodes_per_halfperiod
            )));
        }
        if self.acceleration_order > 12 {
            return Err(Error::Configuration(format!(
                "acceleration_order = {} outside [0, 12]",
                self.acceleration_order
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Configuration("tolerance must be positive".into()));
        }
        if !(self.mollifier_width > 0.0) {
            return Err(Error::Configuration("mollifier width must be positive".into()));
        }
        Ok(())
    }

    pub fn with_k_max(&self, k_max: f64) -> Self {
        QuadratureSpec { k_max, ..self.clone() }
    }
}

/// Number of terms in each of the real and imaginary tail series.
pub const TAIL_TERMS: usize = 4;
/// Sample points of the tail fit, in units of k₀.
const FIT_POINTS: [f64; TAIL_TERMS] = [1.0, 1.3, 1.7, 2.2];
/// Points where the fitted model is checked, in units of k₀.
const CHECK_POINTS: [f64; 2] = [1.5, 3.0];

/// Power-law tail model beyond k₀:
/// Re f ≈ Σ_j re[j] / k^{2j+2}, Im f ≈ Σ_j im[j] / k^{2j+1}.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TailModel {
    pub k0: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TailModel {
    /// Interpolate the samples (k_i, f(k_i)), one term per sample.
    pub fn fit(k0: f64, samples: &[(f64, C)]) -> Self {
        let m = samples.len();
        // Work in u = k₀/k to keep the systems well scaled.
        let u: Vec<f64> = samples.iter().map(|(k, _)| k0 / k).collect();
        let vre = DMatrix::from_fn(m, m, |i, j| u[i].powi(2 * j as i32 + 2));
        let vim = DMatrix::from_fn(m, m, |i, j| u[i].powi(2 * j as i32 + 1));
        let yre = DVector::from_fn(m, |i, _| samples[i].1.re);
        let yim = DVector::from_fn(m, |i, _| samples[i].1.im);
        let cre = vre.lu().solve(&yre).unwrap_or_else(|| DVector::zeros(m));
        let cim = vim.lu().solve(&yim).unwrap_or_else(|| DVector::zeros(m));
        let re = (0..m).map(|j| cre[j] * k0.powi(2 * j as i32 + 2)).collect();
        let im = (0..m).map(|j| cim[j] * k0.powi(2 * j as i32 + 1)).collect();
        TailModel { k0, re, im }
    }

    /// Fit at the standard points and report the largest mismatch at the check points.
    pub fn fit_checked<F: Fn(f64) -> Result<C>>(f: &F, k0: f64) -> Result<(Self, f64, f64)> {
        let samples: Vec<(f64, C)> = FIT_POINTS
            .iter()
            .map(|&s| {
                let k = s * k0;
                f(k).and_then(|v| check_value(k, v)).map(|v| (k, v))
            })
            .collect::<Result<_>>()?;
        let model = Self::fit(k0, &samples);
        let mut mis: f64 = 0.0;
        for &s in &CHECK_POINTS {
            let k = s * k0;
            let v = check_value(k, f(k)?)?;
            mis = mis.max((v - model.eval(k)).norm());
        }
        Ok((model, mis, samples[0].1.norm()))
    }

    pub fn eval(&self, k: f64) -> C {
        let i = 1.0 / k;
        let mut re = 0.0;
        let mut im = 0.0;
        let mut p = i;
        for j in 0..self.re.len().max(self.im.len()) {
            if let Some(b) = self.im.get(j) {
                im += b * p;
            }
            p *= i;
            if let Some(a) = self.re.get(j) {
                re += a * p;
            }
            p *= i;
        }
        C::new(re, im)
    }

    /// ∫_{k₀}^∞ [cos(kx) Re m - sin(kx) Im m] dk = Re ∫_{k₀}^∞ e^{ikx} m dk, using
    /// ∫_{k₀}^∞ e^{ikx} k^{-n} dk = k₀^{1-n} E_n(-i k₀ x).
    pub fn integral(&self, x: f64) -> f64 {
        let k = self.k0;
        let z = C::new(0.0, -k * x);
        let mut s = 0.0;
        for (j, a) in self.re.iter().enumerate() {
            let n = 2 * j + 2;
            s += a * (expint_n(n, z) * k.powi(1 - n as i32)).re;
        }
        if x != 0.0 {
            for (j, b) in self.im.iter().enumerate() {
                let n = 2 * j + 1;
                // Re(i b J) = -b Im J
                s -= b * (expint_n(n, z) * k.powi(1 - n as i32)).im;
            }
        }
        s
    }
}

fn check_value(k: f64, v: C) -> Result<C> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature(format!("integrand not finite at k = {k}")))
    }
}

/// Gauss integration of g on [a, b], bisecting until two levels agree.
fn gauss_adaptive<G: Fn(f64) -> Result<f64>>(g: &G, a: f64, b: f64, rule: &GaussRule, tol: f64, depth: usize) -> Result<f64> {
    let mut coarse = 0.0;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        coarse += w * g(c + h * x)?;
    }
    coarse *= h;
    let mut fine = 0.0;
    for (lo, hi) in [(a, c), (c, b)] {
        let cc = 0.5 * (lo + hi);
        let hh = 0.5 * (hi - lo);
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * g(cc + hh * x)?;
        }
        fine += s * hh;
    }
    if (fine - coarse).abs() <= tol || depth == 0 {
        if depth == 0 && (fine - coarse).abs() > 1e3 * tol {
            return Err(Error::Quadrature(format!("panel [{a}, {b}] did not resolve")));
        }
        return Ok(fine);
    }
    Ok(gauss_adaptive(g, a, c, rule, 0.5 * tol, depth - 1)? + gauss_adaptive(g, c, b, rule, 0.5 * tol, depth - 1)?)
}

/// (1/π) ∫_0^∞ [cos(kx) Re f(k) - sin(kx) Im f(k)] dk.
///
/// f must behave like the tail model beyond spec.k_max when the asymptotic
/// tail mode is selected.
pub fn fourier_inversion<F: Fn(f64) -> Result<C>>(f: F, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    fourier_inversion_with_breaks(f, x, spec, &[])
}

/// As `fourier_inversion`, with panel boundaries forced at the given points
/// (kinks of f).
pub fn fourier_inversion_with_breaks<F: Fn(f64) -> Result<C>>(
    f: F,
    x: f64,
    spec: &QuadratureSpec,
    breaks: &[f64],
) -> Result<f64> {
    spec.validate()?;
    let kmax = spec.k_max;
    let xa = x.abs();
    let rule = GaussRule::cached(spec.nodes_per_halfperiod);
    let g = |k: f64| -> Result<f64> {
        let v = check_value(k, f(k)?)?;
        let (s, c) = (k * x).sin_cos();
        Ok(v.re * c - v.im * s)
    };
    // Head: panels of at most a half period (and at most k_max/64) between breakpoints.
    let hp = if xa > 0.0 { PI / xa } else { f64::INFINITY };
    let width = hp.min(kmax / 64.0);
    let mut cuts = vec![0.0];
    cuts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < kmax));
    cuts.push(kmax);
    cuts.sort_by(f64::total_cmp);
    let n_panels: usize = cuts.windows(2).map(|w| ((w[1] - w[0]) / width).ceil().max(1.0) as usize).sum();
    let panel_tol = spec.tolerance / n_panels as f64;
    let mut head = 0.0;
    for w in cuts.windows(2) {
        let m = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for j in 0..m {
            let a = w[0] + (w[1] - w[0]) * j as f64 / m as f64;
            let b = w[0] + (w[1] - w[0]) * (j + 1) as f64 / m as f64;
            head += gauss_adaptive(&g, a, b, rule, panel_tol, 24)?;
        }
    }
    let tail = match spec.tail_mode {
        TailMode::None => 0.0,
        TailMode::AsymptoticSubtraction => {
            let (model, _, _) = TailModel::fit_checked(&f, kmax)?;
            let resid = |k: f64| -> Result<f64> {
                let v = check_value(k, f(k)?)? - model.eval(k);
                let (s, c) = (k * x).sin_cos();
                Ok(v.re * c - v.im * s)
            };
            model.integral(x) + residual_tail(&resid, kmax, xa, rule, spec)?
        }
    };
    Ok((head + tail) / PI)
}

/// ∫_{k₀}^∞ of a small residual, with epsilon acceleration of panel sums.
fn residual_tail<G: Fn(f64) -> Result<f64>>(g: &G, k0: f64, xa: f64, rule: &GaussRule, spec: &QuadratureSpec) -> Result<f64> {
    if spec.acceleration_order == 0 {
        return Ok(0.0);
    }
    let mut sums = Vec::new();
    let mut s = 0.0;
    let mut a = k0;
    let mut last = f64::NAN;
    let mut stable = 0;
    for j in 0..400 {
        // Geometric panels for slowly varying tails, half periods once oscillation dominates.
        let geo = a;
        let b = if xa > 0.0 { a + geo.min(PI / xa) } else { a + geo };
        s += gauss_adaptive(g, a, b, rule, spec.tolerance * 1e-2, 16)?;
        sums.push(s);
        a = b;
        if j >= 2 {
            let (est, err) = wynn_epsilon(&sums, spec.acceleration_order);
            if err <= spec.tolerance && (est - last).abs() <= spec.tolerance {
                stable += 1;
                if stable >= 2 {
                    return Ok(est);
                }
            } else {
                stable = 0;
            }
            last = est;
        }
    }
    Err(Error::Quadrature("tail residual did not converge".into()))
}

/// Adaptive Gauss-Kronrod mesh on [0, K] for a fixed integrand, reusable for any x.
#[derive(Debug, Clone)]
pub struct KMesh {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<C>,
    pub k_end: f64,
    pub tail: Option<TailModel>,
}

/// Build options for `KMesh`.
#[derive(Debug, Clone)]
pub struct MeshOptions {
    pub k_end: f64,
    /// Largest panel width (controls resolution of cos(kx) for |x| ≤ x_max).
    pub max_width: f64,
    /// Points where f is not smooth.
    pub breakpoints: Vec<f64>,
    pub tolerance: f64,
    pub tail_mode: TailMode,
    /// Allow doubling k_end up to this many times until the tail model fits.
    pub max_extensions: usize,
}

impl MeshOptions {
    pub fn new(k_end: f64, x_max: f64, spec: &QuadratureSpec) -> Self {
        MeshOptions {
            k_end,
            max_width: if x_max > 0.0 { 4.0 / x_max } else { f64::INFINITY },
            breakpoints: vec![],
            tolerance: spec.tolerance,
            tail_mode: spec.tail_mode,
            max_extensions: 6,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fv: [C; 15],
}

impl KMesh {
    pub fn build<F>(f: &F, opts: &MeshOptions) -> Result<KMesh>
    where
        F: Fn(f64) -> Result<C> + Sync,
    {
        let mut k_end = opts.k_end;
        let mut panels: Vec<Panel> = Vec::new();
        let mut covered = 0.0;
        let mut tail = None;
        for ext in 0..=opts.max_extensions {
            let mut fresh = mesh_segment(f, covered, k_end, opts)?;
            panels.append(&mut fresh);
            covered = k_end;
            if opts.tail_mode == TailMode::None {
                break;
            }
            // Fit the power-law tail at k_end and validate it further out.
            let (model, mis, head) = TailModel::fit_checked(f, k_end)?;
            // The neglected residual integral is bounded by roughly mis · k.
            if mis * k_end <= opts.tolerance || head * k_end <= opts.tolerance {
                tail = Some(model);
                break;
            }
            if ext == opts.max_extensions {
                return Err(Error::Quadrature(format!(
                    "integrand not in its power-law regime by k = {k_end} (model mismatch {mis:e})"
                )));
            }
            k_end *= 2.0;
        }
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let wk = kronrod_weights();
        let mut nodes = Vec::with_capacity(panels.len() * 15);
        let mut weights = Vec::with_capacity(panels.len() * 15);
        let mut values = Vec::with_capacity(panels.len() * 15);
        for p in &panels {
            let h = 0.5 * (p.b - p.a);
            let ks = kronrod_nodes(p.a, p.b);
            for j in 0..15 {
                nodes.push(ks[j]);
                weights.push(wk[j] * h);
                values.push(p.fv[j]);
            }
        }
        Ok(KMesh { nodes, weights, values, k_end, tail })
    }

    /// (1/π) ∫_0^∞ [cos(kx) Re f - sin(kx) Im f] dk.
    pub fn transform(&self, x: f64) -> f64 {
        let mut s = 0.0;
        let mut comp = 0.0;
        for i in 0..self.nodes.len() {
            let v = self.values[i];
            let term = if v.im == 0.0 {
                self.weights[i] * v.re * (self.nodes[i] * x).cos()
            } else {
                let (sn, cs) = (self.nodes[i] * x).sin_cos();
                self.weights[i] * (v.re * cs - v.im * sn)
            };
            let t = s + term;
            comp += if s.abs() >= term.abs() { (s - t) + term } else { (term - t) + s };
            s = t;
        }
        let tail = self.tail.as_ref().map(|m| m.integral(x)).unwrap_or(0.0);
        (s + comp + tail) / PI
    }

    /// Transform of an even real integrand, evaluated with cos(k|x|) so the
    /// result is exactly even in x.
    pub fn transform_even(&self, x: f64) -> f64 {
        self.transform(x.abs())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn mesh_segment<F>(f: &F, start: f64, end: f64, opts: &MeshOptions) -> Result<Vec<Panel>>
where
    F: Fn(f64) -> Result<C> + Sync,
{
    let mut cuts = vec![start];
    for &b in &opts.breakpoints {
        if b > start && b < end {
            cuts.push(b);
        }
    }
    cuts.push(end);
    cuts.sort_by(f64::total_cmp);
    let init_w = opts.max_width.min((end - start) / 16.0).min(opts.k_end / 64.0);
    let mut todo = Vec::new();
    for w in cuts.windows(2) {
        let m = ((w[1] - w[0]) / init_w).ceil().max(1.0) as usize;
        for i in 0..m {
            let a = w[0] + (w[1] - w[0]) * i as f64 / m as f64;
            let b = w[0] + (w[1] - w[0]) * (i + 1) as f64 / m as f64;
            todo.push((a, b));
        }
    }
    let scale = opts.k_end;
    let mut done = Vec::new();
    for _round in 0..60 {
        if todo.is_empty() {
            return Ok(done);
        }
        let evaluated: Vec<Result<(Panel, f64)>> = todo
            .par_iter()
            .map(|&(a, b)| {
                let ks = kronrod_nodes(a, b);
                let mut fv = [C::new(0.0, 0.0); 15];
                for j in 0..15 {
                    fv[j] = check_value(ks[j], f(ks[j])?)?;
                }
                let (_, err) = gk_error(&fv, 0.5 * (b - a));
                Ok((Panel { a, b, fv }, err))
            })
            .collect();
        let mut next = Vec::new();
        for r in evaluated {
            let (panel, err) = r?;
            let (a, b) = (panel.a, panel.b);
            if err <= opts.tolerance * (b - a) / scale || (b - a) <= 1e-13 * scale {
                done.push(panel);
            } else {
                let m = 0.5 * (a + b);
                next.push((a, m));
                next.push((m, b));
            }
        }
        todo = next;
    }
    Err(Error::Quadrature("k-mesh refinement did not terminate".into()))
}
