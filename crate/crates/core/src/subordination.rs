//! Time-change (subordination) of first-order solutions: u_α(t) = ∫ u₁(τ) φ(τ, t) dτ.
//!
//! φ(τ, t) = t^{-α} M_α(τ t^{-α}), so in ξ = τ/t^α the kernel is M_α(ξ) dξ and
//! the quadrature in ξ is independent of t.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::quad::GaussRule;
use crate::specfun::m_wright;

/// φ(τ, t) = (t / (α τ^{1+1/α})) f_α(t τ^{-1/α}) = t^{-α} M_α(τ / t^α).
pub fn kernel_phi(tau: f64, t: f64, alpha: f64) -> Result<f64> {
    if !(tau > 0.0) || !(t > 0.0) {
        return domain(format!("kernel needs τ > 0 and t > 0 (got τ = {tau}, t = {t})"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("α = {alpha} outside (0, 1); at α = 1 the kernel is δ(τ - t)"));
    }
    let ta = t.powf(alpha);
    Ok(m_wright(alpha, tau / ta)? / ta)
}

/// Quadrature nodes τ_i and weights w_i ≈ φ(τ_i, t) dτ.
#[derive(Debug, Clone)]
pub struct SubordinationKernel {
    pub alpha: f64,
    pub t: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const XI_FLOOR: f64 = 1e-12;
const PANEL_RATIO: f64 = 1.25;
const GL_ORDER: usize = 16;

/// Base rule in ξ, shared across t.
#[derive(Debug)]
struct XiRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn xi_max(alpha: f64) -> f64 {
    // M_α(ξ) ~ exp(-c ξ^{1/(1-α)}); stop where the exponent reaches ~45, with margin.
    let c = (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha));
    1.5 * (45.0 / c).powf(1.0 - alpha).max(2.0)
}

fn panel_sum(alpha: f64, a: f64, b: f64, rule: &GaussRule) -> Result<(f64, Vec<(f64, f64)>)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    let mut pts = Vec::with_capacity(rule.nodes.len());
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let xi = c + h * x;
        let wt = w * h * m_wright(alpha, xi)?;
        s += wt;
        pts.push((xi, wt));
    }
    Ok((s, pts))
}

fn refine(alpha: f64, a: f64, b: f64, max_width: f64, rule: &GaussRule, depth: usize) -> Result<Vec<(f64, f64)>> {
    let m = 0.5 * (a + b);
    if b - a <= max_width {
        let (whole, _) = panel_sum(alpha, a, b, rule)?;
        let (l, lp) = panel_sum(alpha, a, m, rule)?;
        let (r, rp) = panel_sum(alpha, m, b, rule)?;
        if (l + r - whole).abs() <= 1e-12 * whole.abs() + 1e-16 * (b - a) || depth == 0 {
            let mut out = lp;
            out.extend(rp);
            return Ok(out);
        }
    }
    let mut out = refine(alpha, a, m, max_width, rule, depth.saturating_sub(1))?;
    out.extend(refine(alpha, m, b, max_width, rule, depth.saturating_sub(1))?);
    Ok(out)
}

fn build_xi_rule(alpha: f64, max_width: f64) -> Result<XiRule> {
    let rule = GaussRule::cached(GL_ORDER);
    let top = xi_max(alpha);
    let mut cuts = vec![0.0, XI_FLOOR];
    while *cuts.last().unwrap() < top {
        let next = (cuts.last().unwrap() * PANEL_RATIO).min(top);
        cuts.push(next);
    }
    let parts: Vec<Result<Vec<(f64, f64)>>> = cuts
        .par_windows(2)
        .map(|w| refine(alpha, w[0], w[1], max_width, rule, 30))
        .collect();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for p in parts {
        for (x, w) in p? {
            nodes.push(x);
            weights.push(w);
        }
    }
    Ok(XiRule { nodes, weights })
}

type RuleCache = Mutex<HashMap<(u64, u64), Arc<XiRule>>>;

fn xi_rule(alpha: f64, max_width: f64) -> Result<Arc<XiRule>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (alpha.to_bits(), max_width.to_bits());
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let r = Arc::new(build_xi_rule(alpha, max_width)?);
    cache.lock().unwrap().insert(key, r.clone());
    Ok(r)
}

impl SubordinationKernel {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        Self::with_max_step(alpha, t, f64::INFINITY)
    }

    /// Kernel whose τ-panels are no wider than `max_step`, for u₁ that
    /// oscillates in τ.
    pub fn with_max_step(alpha: f64, t: f64, max_step: f64) -> Result<Self> {
        if !(t > 0.0) {
            return domain(format!("t = {t} must be positive"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("α = {alpha} outside (0, 1]"));
        }
        if !(max_step > 0.0) {
            return domain("panel width must be positive");
        }
        if alpha == 1.0 {
            return Ok(SubordinationKernel { alpha, t, nodes: vec![t], weights: vec![1.0] });
        }
        let ta = t.powf(alpha);
        let rule = xi_rule(alpha, max_step / ta)?;
        Ok(SubordinationKernel {
            alpha,
            t,
            nodes: rule.nodes.iter().map(|xi| xi * ta).collect(),
            weights: rule.weights.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i (should be 1).
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// ∫ τ^p φ(τ, t) dτ.
    pub fn moment(&self, p: i32) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(tau, w)| w * tau.powi(p)).sum()
    }

    /// ∫ f(τ) φ(τ, t) dτ for real f.
    pub fn integrate<F: Fn(f64) -> Result<f64> + Sync>(&self, f: F) -> Result<f64> {
        let vals: Vec<Result<f64>> = self.nodes.par_iter().map(|&tau| f(tau)).collect();
        let mut s = 0.0;
        for (v, w) in vals.into_iter().zip(&self.weights) {
            s += w * v?;
        }
        Ok(s)
    }

    /// ∫ f(τ) φ(τ, t) dτ for complex f.
    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&tau, &w)| f(tau) * w).sum()
    }
}

/// Kernels for integrands oscillating like e^{-iωτ}, with panel widths
/// bucketed by powers of two in ω.
#[derive(Debug)]
pub struct OscillatoryKernels {
    pub alpha: f64,
    pub t: f64,
    cache: Mutex<HashMap<i32, Arc<SubordinationKernel>>>,
}

/// Radians of e^{-iωτ} per Gauss panel.
const PHASE_PER_PANEL: f64 = 8.0;

impl OscillatoryKernels {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        SubordinationKernel::new(alpha, t)?;
        Ok(OscillatoryKernels { alpha, t, cache: Mutex::new(HashMap::new()) })
    }

    pub fn for_frequency(&self, omega: f64) -> Result<Arc<SubordinationKernel>> {
        let b = omega.abs().max(1.0).log2().ceil() as i32;
        if let Some(k) = self.cache.lock().unwrap().get(&b) {
            return Ok(k.clone());
        }
        let k = Arc::new(SubordinationKernel::with_max_step(self.alpha, self.t, PHASE_PER_PANEL / 2f64.powi(b))?);
        self.cache.lock().unwrap().insert(b, k.clone());
        Ok(k)
    }
}

/// u(x, t) = ∫ u₁(x, τ) φ(τ, t) dτ on the kernel's τ-grid.
pub fn subordinate_density<F>(u1: F, x: f64, kernel: &SubordinationKernel) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    kernel.integrate(|tau| u1(x, tau))
}
