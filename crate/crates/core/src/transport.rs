//! Angular density u(x, μ, t) and energy density U(x, t) of the P_N system.
//!
//! Fourier convention: û(k) = ∫ e^{-ikx} u dx, u = (1/2π) ∫ e^{ikx} û dk, so the
//! streaming term becomes i k v μ and c_l(-k) = c_l(k)*.
//!
//! Normalization: the angular density has a unit point source δ(x) δ(μ - μ₀).
//! The energy density uses the isotropic source δ(x)/2 per direction, so
//! U(x, 0) = δ(x) and Û(k, t) = [E_α(-A(k) t^α)]₀₀.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::field::{check_grid, check_times, DensityField, DensityMethod};
use crate::fourier::{fourier_inversion, fourier_inversion_with_breaks, KMesh, MeshOptions, QuadratureSpec};
use crate::legendre::legendre_all;
use crate::params::MediumParams;
use crate::quad::GaussRule;
use crate::specfun::mittag_leffler;
use crate::spectral::{assemble_operator, decompose, EvolutionMode, ModeDecomposition};
use crate::subordination::{kernel_phi, OscillatoryKernels};

type C = Complex64;

/// Relative shift applied to wavenumbers that hit an exceptional point.
const DISPLACEMENT: f64 = 1e-5;

/// Legendre coefficients c_l(k, t; μ₀), l = 0..N.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub k: f64,
    pub t: f64,
    pub mu0: f64,
    pub c: Vec<C>,
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu.abs() <= 1.0) {
        return domain(format!("direction cosine {mu} outside [-1, 1]"));
    }
    Ok(())
}

/// c_l = √(2l+1) P_l(μ₀) / 2 for the point source δ(μ - μ₀).
pub fn initial_coefficients(mu0: f64, order: usize) -> Result<CoefficientVector> {
    check_mu(mu0)?;
    let p = legendre_all(order, mu0)?;
    let c = p.iter().enumerate().map(|(l, pl)| C::new(((2 * l + 1) as f64).sqrt() * pl / 2.0, 0.0)).collect();
    Ok(CoefficientVector { k: 0.0, t: 0.0, mu0, c })
}

/// Evaluate f at k; if A(k) is defective there, average f(k ± δ).
fn regular_at<F>(k: f64, f: F) -> Result<Vec<C>>
where
    F: Fn(f64) -> Result<Vec<C>>,
{
    match f(k) {
        Err(Error::DefectiveOperator { .. }) => {
            let d = DISPLACEMENT * k.abs().max(1.0);
            let a = f(k - d)?;
            let b = f(k + d)?;
            Ok(a.iter().zip(&b).map(|(x, y)| (x + y) * 0.5).collect())
        }
        r => r,
    }
}

/// c(k, t) = E_α(-A(k) t^α) c(k, 0).
pub fn evolve_coefficients(
    k: f64,
    t: f64,
    mu0: f64,
    order: usize,
    params: &MediumParams,
    mode: EvolutionMode,
) -> Result<CoefficientVector> {
    let init = initial_coefficients(mu0, order)?;
    if !(t >= 0.0) {
        return domain(format!("t = {t} must be non-negative"));
    }
    if t == 0.0 {
        return Ok(CoefficientVector { k, ..init });
    }
    let c = regular_at(k, |kk| crate::spectral::evolve_coefficients(kk, t, &init.c, params, order, mode))?;
    Ok(CoefficientVector { k, t, mu0, c })
}

fn combine(dec: &ModeDecomposition, e: &[C], mode: EvolutionMode) -> C {
    match mode {
        EvolutionMode::Exact => dec.exact_weights().iter().zip(e).map(|(w, e)| w * e).sum(),
        EvolutionMode::Paper => dec.paper_weights().iter().zip(e).map(|(w, e)| e * *w).sum(),
    }
}

/// Û(k, t) = [E_α(-A(k) t^α)]₀₀ (no mollifier).
pub fn energy_integrand(k: f64, t: f64, params: &MediumParams, order: usize, mode: EvolutionMode) -> Result<f64> {
    let v = regular_at(k, |kk| {
        let dec = decompose(&assemble_operator(kk, params, order)?)?;
        let e = dec.ml_factors(t, params.alpha)?;
        Ok(vec![combine(&dec, &e, mode)])
    })?;
    Ok(v[0].re)
}

/// Û(k, t) for order α from the α = 1 evolution: Σ_n w_n ∫ e^{-λ_n τ} φ(τ, t) dτ
/// with exact-mode weights w_n.
pub fn subordinated_energy_integrand(
    k: f64,
    params: &MediumParams,
    order: usize,
    kernels: &OscillatoryKernels,
) -> Result<f64> {
    let v = regular_at(k, |kk| {
        let dec = decompose(&assemble_operator(kk, params, order)?)?;
        let omega = dec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.im.abs()));
        let kernel = kernels.for_frequency(omega)?;
        let e: Vec<C> = dec.eigenvalues.iter().map(|&l| kernel.integrate_complex(|tau| (-l * tau).exp())).collect();
        Ok(vec![combine(&dec, &e, EvolutionMode::Exact)])
    })?;
    Ok(v[0].re)
}

/// U(x, t; N) for order α obtained by time-changing the α = 1 solution.
pub fn subordinated_energy_density(
    x_grid: &[f64],
    times: &[f64],
    params: &MediumParams,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<DensityField> {
    check_grid(x_grid)?;
    check_times(times)?;
    spec.validate()?;
    let moll = needs_mollifier(params, order);
    let eps = spec.mollifier_width;
    let x_max = grid_extent(x_grid);
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let kernels = OscillatoryKernels::new(params.alpha, t)?;
        let f = |k: f64| -> Result<C> {
            let v = subordinated_energy_integrand(k, params, order, &kernels)?;
            Ok(C::new(if moll { v * mollifier(k, eps) } else { v }, 0.0))
        };
        let mesh = KMesh::build(&f, &MeshOptions::new(initial_cutoff(params, order, t, spec), x_max, spec))?;
        values.push(x_grid.par_iter().map(|&x| mesh.transform_even(x)).collect());
    }
    DensityField::new(x_grid.to_vec(), times.to_vec(), values, DensityMethod::Subordinated, params.fingerprint(order))
}

/// Closed-form N = 1 integrand with weights (1 ∓ s)/2 below k_c and
/// Re E_α of the complex eigenvalue above.
pub fn energy_integrand_n1_closed(k: f64, t: f64, params: &MediumParams) -> Result<f64> {
    if params.phase.order() > 1 {
        return domain("closed form needs a phase function of order L ≤ 1");
    }
    let kc = params.critical_wavenumber();
    let d = params.sigma_s * (1.0 - params.g());
    let ta = t.powf(params.alpha);
    let r = k.abs() / kc;
    if r <= 1.0 {
        let s = (1.0 - r * r).sqrt();
        let lp = params.sigma_a + 0.5 * d * (1.0 + s);
        let lm = params.sigma_a + 0.5 * d * (1.0 - s);
        let ep = mittag_leffler(params.alpha, C::new(-lp * ta, 0.0))?.re;
        let em = mittag_leffler(params.alpha, C::new(-lm * ta, 0.0))?.re;
        Ok(0.5 * ((1.0 - s) * ep + (1.0 + s) * em))
    } else {
        let s = (r * r - 1.0).sqrt();
        let lm = C::new(params.sigma_a + 0.5 * d, -0.5 * d * s);
        Ok(mittag_leffler(params.alpha, -lm * ta)?.re)
    }
}

/// Whether the integrand keeps a non-decaying part (ballistic fronts for
/// α = 1, the μ = 0 mode for even N) and needs the Gaussian mollifier.
pub fn needs_mollifier(params: &MediumParams, order: usize) -> bool {
    params.alpha == 1.0 || order.is_multiple_of(2)
}

fn mollifier(k: f64, width: f64) -> f64 {
    (-0.5 * (width * k).powi(2)).exp()
}

/// Smallest positive root of P_{N+1}: the slowest propagation speed of the P_N system is v μ_min.
pub fn slowest_direction(order: usize) -> f64 {
    GaussRule::cached(order + 1).nodes.iter().copied().filter(|&x| x > 1e-12).fold(1.0, f64::min)
}

/// Wavenumber beyond which the integrand is in its power-law tail.
pub fn wavenumber_scale(params: &MediumParams, order: usize, t: f64) -> f64 {
    let rate = params.sigma_t().max(t.powf(-params.alpha));
    rate / (params.v * slowest_direction(order))
}

fn initial_cutoff(params: &MediumParams, order: usize, t: f64, spec: &QuadratureSpec) -> f64 {
    spec.k_max.max(50.0 * params.critical_wavenumber()).max(8.0 * wavenumber_scale(params, order, t))
}

/// Adaptive k-mesh for Û(k, t), reusable for every |x| ≤ x_max.
pub fn energy_mesh(
    t: f64,
    params: &MediumParams,
    order: usize,
    mode: EvolutionMode,
    spec: &QuadratureSpec,
    x_max: f64,
) -> Result<KMesh> {
    let moll = needs_mollifier(params, order);
    let eps = spec.mollifier_width;
    let f = |k: f64| -> Result<C> {
        let v = energy_integrand(k, t, params, order, mode)?;
        Ok(C::new(if moll { v * mollifier(k, eps) } else { v }, 0.0))
    };
    let mut opts = MeshOptions::new(initial_cutoff(params, order, t, spec), x_max, spec);
    if mode == EvolutionMode::Paper {
        opts.breakpoints.push(params.critical_wavenumber());
    }
    KMesh::build(&f, &opts)
}

fn grid_extent(x_grid: &[f64]) -> f64 {
    x_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// U(x, t; N) on a grid. Values are exactly even in x.
pub fn energy_density(
    x_grid: &[f64],
    times: &[f64],
    params: &MediumParams,
    order: usize,
    mode: EvolutionMode,
    spec: &QuadratureSpec,
) -> Result<DensityField> {
    check_grid(x_grid)?;
    check_times(times)?;
    spec.validate()?;
    let x_max = grid_extent(x_grid);
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let mesh = energy_mesh(t, params, order, mode, spec, x_max)?;
        values.push(x_grid.par_iter().map(|&x| mesh.transform_even(x)).collect());
    }
    let method = match mode {
        EvolutionMode::Exact => DensityMethod::Exact,
        EvolutionMode::Paper => DensityMethod::Paper,
    };
    DensityField::new(x_grid.to_vec(), times.to_vec(), values, method, params.fingerprint(order))
}

/// Closed-form N = 1 energy density at a single point.
pub fn energy_density_n1_closed(x: f64, t: f64, params: &MediumParams, spec: &QuadratureSpec) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let moll = needs_mollifier(params, 1);
    let eps = spec.mollifier_width;
    let f = |k: f64| -> Result<C> {
        let v = energy_integrand_n1_closed(k, t, params)?;
        Ok(C::new(if moll { v * mollifier(k, eps) } else { v }, 0.0))
    };
    let s = spec.with_k_max(initial_cutoff(params, 1, t, spec));
    fourier_inversion_with_breaks(f, x.abs(), &s, &[params.critical_wavenumber()])
}

/// Closed-form N = 1 energy density on a grid.
pub fn energy_density_n1_closed_grid(
    x_grid: &[f64],
    times: &[f64],
    params: &MediumParams,
    spec: &QuadratureSpec,
) -> Result<DensityField> {
    check_grid(x_grid)?;
    check_times(times)?;
    spec.validate()?;
    let moll = needs_mollifier(params, 1);
    let eps = spec.mollifier_width;
    let x_max = grid_extent(x_grid);
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let f = |k: f64| -> Result<C> {
            let v = energy_integrand_n1_closed(k, t, params)?;
            Ok(C::new(if moll { v * mollifier(k, eps) } else { v }, 0.0))
        };
        let mut opts = MeshOptions::new(initial_cutoff(params, 1, t, spec), x_max, spec);
        opts.breakpoints.push(params.critical_wavenumber());
        let mesh = KMesh::build(&f, &opts)?;
        values.push(x_grid.par_iter().map(|&x| mesh.transform_even(x)).collect());
    }
    DensityField::new(x_grid.to_vec(), times.to_vec(), values, DensityMethod::ClosedN1, params.fingerprint(1))
}

/// Angular density u(x, μ, t; μ₀) = (1/2π) ∫ e^{ikx} Σ_l c_l √(2l+1) P_l(μ) dk.
#[allow(clippy::too_many_arguments)]
pub fn angular_density(
    x: f64,
    mu: f64,
    mu0: f64,
    t: f64,
    params: &MediumParams,
    order: usize,
    mode: EvolutionMode,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_mu(mu)?;
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let basis: Vec<f64> = legendre_all(order, mu)?
        .iter()
        .enumerate()
        .map(|(l, p)| ((2 * l + 1) as f64).sqrt() * p)
        .collect();
    let moll = needs_mollifier(params, order);
    let eps = spec.mollifier_width;
    let f = |k: f64| -> Result<C> {
        let c = evolve_coefficients(k, t, mu0, order, params, mode)?;
        let v: C = c.c.iter().zip(&basis).map(|(c, b)| c * *b).sum();
        Ok(if moll { v * mollifier(k, eps) } else { v })
    };
    fourier_inversion(f, x, &spec.with_k_max(initial_cutoff(params, order, t, spec)))
}

/// E_α(-(i k v μ₀ + σ_t) t^α), the Fourier transform of the unscattered part.
pub fn ballistic_integrand(k: f64, mu0: f64, t: f64, params: &MediumParams) -> Result<C> {
    let a = C::new(params.sigma_t(), k * params.v * mu0);
    mittag_leffler(params.alpha, -a * t.powf(params.alpha))
}

/// Unscattered density (coefficient of δ(μ - μ₀)) by Fourier inversion.
/// For α = 1 or μ₀ = 0 the pulse is a point mass and is mollified.
pub fn ballistic_density(x: f64, mu0: f64, t: f64, params: &MediumParams, spec: &QuadratureSpec) -> Result<f64> {
    check_mu(mu0)?;
    if !(t > 0.0) {
        return domain(format!("t = {t} must be positive"));
    }
    let singular = params.alpha == 1.0 || mu0 == 0.0;
    let eps = spec.mollifier_width;
    let f = |k: f64| -> Result<C> {
        let v = ballistic_integrand(k, mu0, t, params)?;
        Ok(if singular { v * mollifier(k, eps) } else { v })
    };
    let speed = params.v * mu0.abs().max(1e-3);
    let kmax = spec.k_max.max(64.0 * params.sigma_t().max(t.powf(-params.alpha)) / speed);
    fourier_inversion(f, x, &spec.with_k_max(kmax))
}

/// Closed form of the unscattered density for α < 1, μ₀ ≠ 0:
/// e^{-σ_t τ} φ(τ, t) / (v|μ₀|) with τ = x/(vμ₀) > 0.
pub fn ballistic_density_exact(x: f64, mu0: f64, t: f64, params: &MediumParams) -> Result<f64> {
    check_mu(mu0)?;
    if params.alpha == 1.0 || mu0 == 0.0 {
        return domain("unscattered density is a point mass for α = 1 or μ₀ = 0");
    }
    let tau = x / (params.v * mu0);
    if tau <= 0.0 {
        return Ok(0.0);
    }
    Ok((-params.sigma_t() * tau).exp() * kernel_phi(tau, t, params.alpha)? / (params.v * mu0.abs()))
}

/// Coefficients of the unscattered part truncated to l ≤ N: E_α(-a t^α) c(k, 0).
pub fn ballistic_coefficients(
    k: f64,
    t: f64,
    mu0: f64,
    order: usize,
    params: &MediumParams,
) -> Result<CoefficientVector> {
    let init = initial_coefficients(mu0, order)?;
    if t == 0.0 {
        return Ok(CoefficientVector { k, ..init });
    }
    let e = ballistic_integrand(k, mu0, t, params)?;
    Ok(CoefficientVector { k, t, mu0, c: init.c.iter().map(|c| c * e).collect() })
}

/// Source for the scattered part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterSource {
    /// b_l = σ_s β_l P_l(μ₀) / (2√(2l+1)).
    Physical,
    /// Physical source plus the streaming flux into l = N+1 that the
    /// truncated system drops: i k v (N+1) P_{N+1}(μ₀) / (2√(2N+1)) in row N.
    /// With this source ballistic + scattered reproduces the full P_N solution.
    TruncationConsistent,
}

pub fn source_vector(k: f64, mu0: f64, order: usize, params: &MediumParams, kind: ScatterSource) -> Result<Vec<C>> {
    check_mu(mu0)?;
    let p = legendre_all(order + 1, mu0)?;
    let mut b: Vec<C> = (0..=order)
        .map(|l| C::new(params.sigma_s * params.phase.beta_l(l) * p[l] / (2.0 * ((2 * l + 1) as f64).sqrt()), 0.0))
        .collect();
    if kind == ScatterSource::TruncationConsistent {
        let n = order as f64;
        b[order] += C::new(0.0, k * params.v * (n + 1.0) * p[order + 1] / (2.0 * (2.0 * n + 1.0).sqrt()));
    }
    Ok(b)
}

/// Scattered coefficients (A - a)⁻¹ [E_α(-a t^α) - E_α(-A t^α)] b with
/// a = i k v μ₀ + σ_t and the truncation-consistent source.
pub fn scattered_coefficients(
    k: f64,
    t: f64,
    mu0: f64,
    order: usize,
    params: &MediumParams,
    mode: EvolutionMode,
) -> Result<CoefficientVector> {
    let b = source_vector(k, mu0, order, params, ScatterSource::TruncationConsistent)?;
    scattered_coefficients_with_source(k, t, mu0, order, params, mode, &b)
}

#[allow(clippy::too_many_arguments)]
pub fn scattered_coefficients_with_source(
    k: f64,
    t: f64,
    mu0: f64,
    order: usize,
    params: &MediumParams,
    mode: EvolutionMode,
    b: &[C],
) -> Result<CoefficientVector> {
    check_mu(mu0)?;
    if !(t >= 0.0) {
        return domain(format!("t = {t} must be non-negative"));
    }
    if b.len() != order + 1 {
        return domain("source vector length must be N+1");
    }
    if t == 0.0 {
        return Ok(CoefficientVector { k, t, mu0, c: vec![C::new(0.0, 0.0); order + 1] });
    }
    let c = regular_at(k, |kk| {
        let dec = decompose(&assemble_operator(kk, params, order)?)?;
        let a = C::new(params.sigma_t(), kk * params.v * mu0);
        let ta = t.powf(params.alpha);
        let ea = mittag_leffler(params.alpha, -a * ta)?;
        let e = dec.ml_factors(t, params.alpha)?;
        let bnorm = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let scale = a.norm() + dec.operator_norm;
        let mut d = Vec::with_capacity(e.len());
        for (n, (&lam, &en)) in dec.eigenvalues.iter().zip(&e).enumerate() {
            let gap = lam - a;
            if gap.norm() <= 1e-12 * scale {
                let proj: C = match mode {
                    EvolutionMode::Exact => (0..=order).map(|j| dec.left[(n, j)] * b[j]).sum(),
                    EvolutionMode::Paper => (0..=order).map(|j| dec.right[(j, n)].conj() * b[j]).sum(),
                };
                if proj.norm() > 1e-14 * bnorm {
                    return Err(Error::SingularResolvent { k: kk });
                }
                d.push(C::new(0.0, 0.0));
            } else {
                d.push((ea - en) / gap);
            }
        }
        Ok(dec.apply_diagonal(&d, b, mode))
    })?;
    Ok(CoefficientVector { k, t, mu0, c })
}

/// Mass of U at time t from the k = 0 value: E_α(-σ_a t^α).
pub fn mass_law(t: f64, params: &MediumParams) -> Result<f64> {
    Ok(mittag_leffler(params.alpha, C::new(-params.sigma_a * t.powf(params.alpha), 0.0))?.re)
}

/// A point mass at `centre` smoothed by the Gaussian mollifier of the given width.
pub fn mollified_point_mass(x: f64, centre: f64, mass: f64, width: f64) -> f64 {
    mass * (-0.5 * ((x - centre) / width).powi(2)).exp() / (width * (2.0 * PI).sqrt())
}
