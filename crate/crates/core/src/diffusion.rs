//! Time-fractional diffusion approximation ∂_t^α U = D₀ ∂_x² U - σ_a U with U(x, 0) = δ(x).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::field::{check_grid, check_times, DensityField, DensityMethod};
use crate::fourier::{fourier_inversion, KMesh, MeshOptions, QuadratureSpec};
use crate::params::MediumParams;
use crate::specfun::gamma::gamma;
use crate::specfun::{m_wright, mittag_leffler_real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub alpha: f64,
    pub d0: f64,
    pub sigma_a: f64,
}

impl DiffusionParams {
    pub fn new(alpha: f64, d0: f64, sigma_a: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("α = {alpha} outside (0, 1]"));
        }
        if !(d0 > 0.0 && d0.is_finite()) {
            return domain(format!("D₀ = {d0} must be positive"));
        }
        if !(sigma_a >= 0.0 && sigma_a.is_finite()) {
            return domain(format!("σ_a = {sigma_a} must be non-negative"));
        }
        Ok(DiffusionParams { alpha, d0, sigma_a })
    }

    pub fn from_medium(params: &MediumParams) -> Result<Self> {
        Self::new(params.alpha, d0(params)?, params.sigma_a)
    }

    /// Wavenumber where D₀ k² t^α = 1.
    fn wavenumber_scale(&self, t: f64) -> f64 {
        1.0 / (self.d0 * t.powf(self.alpha)).sqrt()
    }
}

/// D₀ = v² / (3 (1 - g) σ_s).
pub fn d0(params: &MediumParams) -> Result<f64> {
    let g = params.g();
    if !(g < 1.0) {
        return Err(Error::DegenerateTransport(format!("g = {g} leaves no diffusive limit")));
    }
    if !(params.sigma_s > 0.0) {
        return Err(Error::DegenerateTransport("σ_s = 0 leaves no diffusive limit".into()));
    }
    Ok(params.v * params.v / (3.0 * (1.0 - g) * params.sigma_s))
}

/// Fourier mode Û(k, t) = E_α(-(D₀ k² + σ_a) t^α).
pub fn diffusion_mode(k: f64, t: f64, dp: &DiffusionParams) -> Result<f64> {
    mittag_leffler_real(dp.alpha, -(dp.d0 * k * k + dp.sigma_a) * t.powf(dp.alpha))
}

fn cutoff(t: f64, dp: &DiffusionParams, spec: &QuadratureSpec) -> f64 {
    spec.k_max.max(20.0 * dp.wavenumber_scale(t))
}

/// U_DA(x, t) = (1/π) ∫_0^∞ cos(kx) Û(k, t) dk.
pub fn diffusion_density_quadrature(x: f64, t: f64, dp: &DiffusionParams, spec: &QuadratureSpec) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let f = |k: f64| Ok(Complex64::new(diffusion_mode(k, t, dp)?, 0.0));
    fourier_inversion(f, x.abs(), &spec.with_k_max(cutoff(t, dp, spec)))
}

/// U_DA(x, t) = t^{-α/2} / (2 √D₀) · M_{α/2}(|x| / (√D₀ t^{α/2})), unit mass.
pub fn diffusion_density_mwright(x: f64, t: f64, dp: &DiffusionParams) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    if dp.sigma_a > 0.0 {
        return Err(Error::Configuration("the M-Wright form has no absorption; use the quadrature form".into()));
    }
    let s = dp.d0.sqrt() * t.powf(0.5 * dp.alpha);
    Ok(m_wright(0.5 * dp.alpha, x.abs() / s)? / (2.0 * s))
}

/// ∫ x² U_DA dx = 2 D₀ t^α / Γ(1 + α) without absorption.
pub fn second_moment(t: f64, dp: &DiffusionParams) -> f64 {
    2.0 * dp.d0 * t.powf(dp.alpha) / gamma(1.0 + dp.alpha)
}

/// U_DA on a grid via one k-mesh per time.
pub fn diffusion_density(x_grid: &[f64], times: &[f64], dp: &DiffusionParams, spec: &QuadratureSpec) -> Result<DensityField> {
    check_grid(x_grid)?;
    check_times(times)?;
    spec.validate()?;
    let x_max = x_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let f = |k: f64| Ok(Complex64::new(diffusion_mode(k, t, dp)?, 0.0));
        let mesh = KMesh::build(&f, &MeshOptions::new(cutoff(t, dp, spec), x_max, spec))?;
        values.push(x_grid.par_iter().map(|&x| mesh.transform_even(x)).collect());
    }
    DensityField::new(x_grid.to_vec(), times.to_vec(), values, DensityMethod::Diffusion, fingerprint(dp))
}

fn fingerprint(dp: &DiffusionParams) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in [dp.alpha, dp.d0, dp.sigma_a] {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}
