//! Reduced-size invariant checks, run by `fracrte validate`.

use num_complex::Complex64;

use crate::ctrw::simulate_density;
use crate::diffusion::{diffusion_density_mwright, diffusion_density_quadrature, DiffusionParams};
use crate::error::Result;
use crate::field::graded_half_line_rule;
use crate::fourier::QuadratureSpec;
use crate::legendre::PhaseFunction;
use crate::params::MediumParams;
use crate::specfun::{mittag_leffler, mittag_leffler_real};
use crate::spectral::{assemble_operator, decompose, p1_modes, EvolutionMode};
use crate::subordination::SubordinationKernel;
use crate::transport::{
    ballistic_coefficients, energy_density, energy_integrand, evolve_coefficients, mass_law, scattered_coefficients,
    subordinated_energy_integrand,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error against the tolerance.
    pub detail: String,
}

fn check(name: &'static str, worst: Result<f64>, tol: f64) -> CheckResult {
    match worst {
        Ok(w) => CheckResult { name, passed: w <= tol, detail: format!("worst {w:.2e} (tol {tol:.0e})") },
        Err(e) => CheckResult { name, passed: false, detail: e.to_string() },
    }
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = 0.0f64;
    for v in it {
        m = m.max(v?);
    }
    Ok(m)
}

fn specfun_identities() -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..=20 {
        let x = -10.0 + i as f64;
        let e = mittag_leffler_real(1.0, x)?;
        worst = worst.max((e - x.exp()).abs() / x.exp());
        let y = 0.25 * i as f64;
        worst = worst.max((mittag_leffler_real(2.0, -y * y)? - y.cos()).abs());
        let z = 0.3 * (i as f64 - 10.0);
        let w = (z * z).exp() * statrs::function::erf::erfc(-z);
        worst = worst.max((mittag_leffler_real(0.5, z)? - w).abs() / w);
    }
    for alpha in [0.25, 0.375, 0.5] {
        for j in 0..12 {
            let z = Complex64::from_polar(0.25 * (j % 4 + 1) as f64 * 0.75, 0.5 * j as f64);
            let lhs = mittag_leffler(alpha, z)? + mittag_leffler(alpha, -z)?;
            let rhs = mittag_leffler(2.0 * alpha, z * z)? * 2.0;
            worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
        }
    }
    Ok(worst)
}

fn p1_closed_form() -> Result<f64> {
    let p = MediumParams::reference(0.5)?;
    let kc = p.critical_wavenumber();
    max_of((0..=200).map(|i| 5.0 * kc * i as f64 / 200.0).filter(|k| (k - kc).abs() > 1e-6).map(|k| {
        let dec = decompose(&assemble_operator(k, &p, 1)?)?;
        let m = p1_modes(k, &p);
        let w = dec.paper_weights();
        let mut e = 0.0f64;
        for (l, wn) in dec.eigenvalues.iter().zip(&w) {
            let (dp, dm) = ((l - m.lambda_plus).norm(), (l - m.lambda_minus).norm());
            let (d, wc) = if dp < dm { (dp, m.paper_plus) } else { (dm, m.paper_minus) };
            e = e.max(d).max((wn - wc).abs());
        }
        Ok(e)
    }))
}

fn mass_law_subset() -> Result<f64> {
    let mut worst = 0.0f64;
    let spec = QuadratureSpec::default();
    for alpha in [0.5, 1.0] {
        for sigma_a in [0.0, 1.0] {
            for order in [1, 7] {
                let p = MediumParams::new(alpha, 1.0, 10.0, sigma_a, PhaseFunction::linear(0.9)?)?;
                let t: f64 = 0.1;
                let x_ext = if alpha == 1.0 { t + 0.1 } else { 20.0 * (t.powf(alpha) / 3.0).sqrt().max(0.05) };
                let (x, w) = graded_half_line_rule(x_ext, 1e-9, 1.3, 0.004, 10);
                let f = energy_density(&x, &[t], &p, order, EvolutionMode::Exact, &spec)?;
                let m: f64 = 2.0 * f.values[0].iter().zip(&w).map(|(u, w)| u * w).sum::<f64>();
                worst = worst.max((m - mass_law(t, &p)?).abs());
            }
        }
    }
    Ok(worst)
}

fn split_identity() -> Result<f64> {
    let p = MediumParams::reference(0.6)?;
    let mut worst = 0.0f64;
    for (i, order) in [1usize, 3, 6].into_iter().enumerate() {
        for j in 0..5 {
            let k = 0.37 + 3.1 * (i * 5 + j) as f64;
            let (t, mu0) = (0.02 + 0.05 * j as f64, -0.9 + 0.4 * j as f64);
            let full = evolve_coefficients(k, t, mu0, order, &p, EvolutionMode::Exact)?;
            let b = ballistic_coefficients(k, t, mu0, order, &p)?;
            let s = scattered_coefficients(k, t, mu0, order, &p, EvolutionMode::Exact)?;
            for l in 0..=order {
                worst = worst.max((b.c[l] + s.c[l] - full.c[l]).norm());
            }
        }
    }
    Ok(worst)
}

fn diffusion_cross_method() -> Result<f64> {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        let dp = DiffusionParams::new(alpha, 1.0 / 3.0, 0.0)?;
        for t in [0.01, 0.1] {
            for x in [0.0, 0.05, 0.3, 1.0] {
                let m = diffusion_density_mwright(x, t, &dp)?;
                let q = diffusion_density_quadrature(x, t, &dp, &spec)?;
                worst = worst.max((m - q).abs() / (1.0 + m));
            }
        }
    }
    Ok(worst)
}

fn kernel_mass() -> Result<f64> {
    max_of([0.25, 0.5, 0.75].into_iter().flat_map(|a| {
        [0.01, 0.1, 1.0].into_iter().map(move |t| Ok((SubordinationKernel::new(a, t)?.mass() - 1.0).abs()))
    }))
}

fn subordination_in_k() -> Result<f64> {
    let p = MediumParams::reference(0.5)?;
    let kernels = crate::subordination::OscillatoryKernels::new(0.5, 0.05)?;
    max_of([0.0, 0.3, 2.0, 30.0, 300.0].into_iter().map(|k| {
        let s = subordinated_energy_integrand(k, &p, 1, &kernels)?;
        let d = energy_integrand(k, 0.05, &p, 1, EvolutionMode::Exact)?;
        Ok((s - d).abs())
    }))
}

/// Survival of a CTRW run with absorption, in units of its standard error.
fn ctrw_survival() -> Result<f64> {
    let p = MediumParams::new(0.5, 1.0, 9.0, 1.0, PhaseFunction::linear(0.9)?)?;
    let est = simulate_density(100_000, &[0.05], &[-0.1, 0.0, 0.1], &p, 1e-4, 1)?;
    let m = mass_law(0.05, &p)?;
    Ok((est.survival[0] - m).abs() / est.survival_std_err[0])
}

/// Run every check. Takes a few seconds.
pub fn run_suite() -> Vec<CheckResult> {
    vec![
        check("special-function identities", specfun_identities(), 1e-8),
        check("P1 closed-form eigenvalues and weights", p1_closed_form(), 1e-10),
        check("mass law (α ∈ {0.5, 1}, N ∈ {1, 7})", mass_law_subset(), 1e-4),
        check("ballistic + scattered = full", split_identity(), 1e-8),
        check("diffusion quadrature vs M-Wright", diffusion_cross_method(), 1e-6),
        check("subordination kernel mass", kernel_mass(), 1e-6),
        check("subordinated vs direct Û(k)", subordination_in_k(), 1e-8),
        check("CTRW survival (σ units)", ctrw_survival(), 3.0),
    ]
}
