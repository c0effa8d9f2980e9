//! Continuous-time random walk whose τ → 0 limit is the fractional transport equation.
//!
//! Each event, after a Mittag-Leffler distributed wait, is a scattering
//! (probability ξ_s), a jump of length r along μ (probability 1 - ξ_t), or an
//! absorption (probability ξ_a).

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::field::{check_times, DensityField, DensityMethod};
use crate::legendre::PhaseFunction;
use crate::params::MediumParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtrwParams {
    pub alpha: f64,
    pub tau: f64,
    pub xi_t: f64,
    pub xi_s: f64,
    pub xi_a: f64,
    pub r: f64,
}

/// ξ_t = σ_t τ^α, ξ_s = σ_s τ^α, r = v τ^α / (1 - ξ_t).
pub fn map_params(params: &MediumParams, tau: f64) -> Result<CtrwParams> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("τ = {tau} must be positive"));
    }
    let ta = tau.powf(params.alpha);
    let xi_t = params.sigma_t() * ta;
    if !(xi_t < 1.0) {
        return Err(Error::Scale(format!("σ_t τ^α = {xi_t} must be < 1; choose a smaller τ")));
    }
    let xi_s = params.sigma_s * ta;
    Ok(CtrwParams {
        alpha: params.alpha,
        tau,
        xi_t,
        xi_s,
        xi_a: xi_t - xi_s,
        r: params.v * ta / (1.0 - xi_t),
    })
}

/// τ giving ξ_t = 0.1.
pub fn default_tau(params: &MediumParams) -> f64 {
    (0.1 / params.sigma_t()).powf(1.0 / params.alpha)
}

/// Waiting time with survival E_α(-(t/τ)^α); exponential with mean τ at α = 1.
pub fn sample_waiting_time<R: Rng + ?Sized>(alpha: f64, tau: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    if alpha == 1.0 {
        return -tau * u.ln();
    }
    let v: f64 = rng.sample(Open01);
    let (s, c) = (alpha * PI).sin_cos();
    -tau * u.ln() * (s / (alpha * PI * v).tan() - c).powf(1.0 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerState {
    pub x: f64,
    pub mu: f64,
    pub clock: f64,
    pub alive: bool,
    /// Statistical weight; stays 1 unless the phase function takes negative values.
    pub weight: f64,
}

impl WalkerState {
    pub fn new(mu: f64) -> Self {
        WalkerState { x: 0.0, mu, clock: 0.0, alive: true, weight: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Scatter,
    Jump,
    Absorb,
}

/// One renewal: wait, then scatter, jump or be absorbed.
pub fn step<R: Rng + ?Sized>(w: &WalkerState, cp: &CtrwParams, pf: &PhaseFunction, rng: &mut R) -> Result<(WalkerState, Event)> {
    if !w.alive {
        return Err(Error::Domain("step called on an absorbed walker".into()));
    }
    let mut next = *w;
    next.clock += sample_waiting_time(cp.alpha, cp.tau, rng);
    let u: f64 = rng.random();
    let event = if u < cp.xi_s {
        let d = pf.sample(w.mu, rng);
        next.mu = d.mu;
        next.weight *= d.weight;
        Event::Scatter
    } else if u < cp.xi_s + (1.0 - cp.xi_t) {
        next.x += w.mu * cp.r;
        Event::Jump
    } else {
        next.alive = false;
        Event::Absorb
    };
    Ok((next, event))
}

/// Histogram estimate of U(x, t) with per-bin standard errors.
#[derive(Debug, Clone)]
pub struct CtrwEstimate {
    /// Bin-averaged density at the bin centres.
    pub field: DensityField,
    /// Standard error of each value in `field`.
    pub std_err: Vec<Vec<f64>>,
    /// Fraction of walkers not yet absorbed, per observation time.
    pub survival: Vec<f64>,
    pub survival_std_err: Vec<f64>,
    pub params: CtrwParams,
}

const CHUNK: usize = 4096;

fn bin_edges(x_grid: &[f64]) -> Result<Vec<f64>> {
    if x_grid.len() < 2 {
        return domain("histogram needs at least two bin centres");
    }
    if x_grid.windows(2).any(|w| !(w[1] > w[0])) || x_grid.iter().any(|x| !x.is_finite()) {
        return domain("bin centres must be finite and strictly increasing");
    }
    let n = x_grid.len();
    let mut e = Vec::with_capacity(n + 1);
    e.push(x_grid[0] - 0.5 * (x_grid[1] - x_grid[0]));
    e.extend(x_grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    e.push(x_grid[n - 1] + 0.5 * (x_grid[n - 1] - x_grid[n - 2]));
    Ok(e)
}

/// Per-chunk sums: weights and squared weights per (time, bin), and survivors per time.
struct Tally {
    w: Vec<f64>,
    w2: Vec<f64>,
    alive: Vec<u64>,
}

impl Tally {
    fn new(nt: usize, nb: usize) -> Self {
        Tally { w: vec![0.0; nt * nb], w2: vec![0.0; nt * nb], alive: vec![0; nt] }
    }

    fn merge(&mut self, o: &Tally) {
        for (a, b) in self.w.iter_mut().zip(&o.w) {
            *a += b;
        }
        for (a, b) in self.w2.iter_mut().zip(&o.w2) {
            *a += b;
        }
        for (a, b) in self.alive.iter_mut().zip(&o.alive) {
            *a += b;
        }
    }
}

/// Stream for walker `index`: independent of how walkers are split across threads.
pub fn walker_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_walker(index: u64, seed: u64, t_obs: &[f64], edges: &[f64], cp: &CtrwParams, pf: &PhaseFunction, tally: &mut Tally) -> Result<()> {
    let nb = edges.len() - 1;
    let mut rng = walker_rng(seed, index);
    let mut w = WalkerState::new(2.0 * rng.random::<f64>() - 1.0);
    let mut j = 0;
    while j < t_obs.len() {
        let (next, _) = step(&w, cp, pf, &mut rng)?;
        // Frozen between events: observations before the next event see the current state.
        while j < t_obs.len() && t_obs[j] < next.clock {
            tally.alive[j] += 1;
            let b = edges.partition_point(|&e| e <= w.x);
            if b >= 1 && b <= nb {
                tally.w[j * nb + b - 1] += w.weight;
                tally.w2[j * nb + b - 1] += w.weight * w.weight;
            }
            j += 1;
        }
        if !next.alive {
            break;
        }
        w = next;
    }
    Ok(())
}

/// Simulate `n_walkers` walkers from x = 0 with isotropic initial direction and
/// histogram their positions at each observation time.
///
/// `x_grid` holds bin centres; bin edges sit halfway between them. The result
/// is bit-identical for a given seed whatever the thread count.
pub fn simulate_density(
    n_walkers: usize,
    t_obs: &[f64],
    x_grid: &[f64],
    params: &MediumParams,
    tau: f64,
    seed: u64,
) -> Result<CtrwEstimate> {
    if n_walkers == 0 {
        return domain("need at least one walker");
    }
    check_times(t_obs)?;
    if t_obs.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("observation times must be increasing");
    }
    let edges = bin_edges(x_grid)?;
    let cp = map_params(params, tau)?;
    let pf = &params.phase;
    let (nt, nb) = (t_obs.len(), x_grid.len());
    let n_chunks = n_walkers.div_ceil(CHUNK);
    let tallies: Vec<Result<Tally>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::new(nt, nb);
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_walkers) {
                run_walker(i as u64, seed, t_obs, &edges, &cp, pf, &mut tally)?;
            }
            Ok(tally)
        })
        .collect();
    let mut total = Tally::new(nt, nb);
    for t in tallies {
        total.merge(&t?);
    }
    let n = n_walkers as f64;
    let mut values = vec![vec![0.0; nb]; nt];
    let mut std_err = vec![vec![0.0; nb]; nt];
    for j in 0..nt {
        for b in 0..nb {
            let h = edges[b + 1] - edges[b];
            let mean = total.w[j * nb + b] / n;
            let var = (total.w2[j * nb + b] / n - mean * mean).max(0.0);
            values[j][b] = mean / h;
            std_err[j][b] = (var / n).sqrt() / h;
        }
    }
    let survival: Vec<f64> = total.alive.iter().map(|&a| a as f64 / n).collect();
    let survival_std_err = survival.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
    let field = DensityField::new(x_grid.to_vec(), t_obs.to_vec(), values, DensityMethod::Ctrw, params.fingerprint(0))?;
    Ok(CtrwEstimate { field, std_err, survival, survival_std_err, params: cp })
}
