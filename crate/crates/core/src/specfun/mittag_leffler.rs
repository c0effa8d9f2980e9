//! One-parameter Mittag-Leffler function E_α(z) for complex z.
//!
//! Three regimes: a compensated Taylor series near the origin, the algebraic
//! asymptotic expansion (with exponential residues) far away, and numerical
//! inversion of the Laplace transform s^{α-1}/(s^α - z) on an optimal parabolic
//! contour in between.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::rgamma;
use crate::error::{domain, Error, Result};
use crate::quad::CompensatedSum;

/// Tunables for Mittag-Leffler evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlConfig {
    /// Taylor series is used for |z| at or below this radius.
    pub series_cutoff_radius: f64,
    /// Asymptotic expansion is tried for |z| at or above this radius.
    pub asymptotic_radius: f64,
    /// Target relative accuracy.
    pub target_rel_tol: f64,
    /// Maximum number of Taylor terms.
    pub max_terms: usize,
}

impl Default for MlConfig {
    fn default() -> Self {
        MlConfig {
            series_cutoff_radius: 1.0,
            asymptotic_radius: 15.0,
            target_rel_tol: 1e-15,
            max_terms: 500,
        }
    }
}

impl MlConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_cutoff_radius > 0.0)
            || !(self.asymptotic_radius > self.series_cutoff_radius)
            || !(self.target_rel_tol > 0.0 && self.target_rel_tol < 1e-3)
            || self.max_terms < 10
        {
            return Err(Error::Configuration(format!("invalid Mittag-Leffler config {self:?}")));
        }
        Ok(())
    }
}

/// E_α(z) with the default configuration.
///
/// The contract covers 0 < α ≤ 1; values up to α = 2 are accepted so that the
/// duplication identity E_α(z) + E_α(-z) = 2 E_{2α}(z²) can be exercised.
pub fn mittag_leffler(alpha: f64, z: Complex64) -> Result<Complex64> {
    mittag_leffler_with(alpha, z, &MlConfig::default())
}

/// E_α(x) for real x.
pub fn mittag_leffler_real(alpha: f64, x: f64) -> Result<f64> {
    Ok(mittag_leffler(alpha, Complex64::new(x, 0.0))?.re)
}

pub fn mittag_leffler_with(alpha: f64, z: Complex64, cfg: &MlConfig) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return domain(format!("α = {alpha} outside (0, 2]"));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return domain(format!("non-finite argument {z}"));
    }
    if alpha == 1.0 {
        return Ok(z.exp());
    }
    let r = z.norm();
    if r == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if r <= cfg.series_cutoff_radius {
        return taylor(alpha, z, cfg);
    }
    if r >= cfg.asymptotic_radius && r.powf(1.0 / alpha) >= 40.0 {
        if let Some(v) = asymptotic(alpha, z, cfg.target_rel_tol) {
            return Ok(v);
        }
    }
    let v = contour(alpha, z, cfg.target_rel_tol)?;
    Ok(if z.im == 0.0 { Complex64::new(v.re, 0.0) } else { v })
}

fn taylor(alpha: f64, z: Complex64, cfg: &MlConfig) -> Result<Complex64> {
    let mut sum = CompensatedSum::new();
    let mut zn = Complex64::new(1.0, 0.0);
    let mut small = 0;
    for n in 0..cfg.max_terms {
        let term = zn * rgamma(alpha * n as f64 + 1.0);
        sum.add(term);
        let s = sum.value().norm();
        if term.norm() <= 0.25 * cfg.target_rel_tol * s {
            small += 1;
            if small >= 3 {
                return Ok(sum.value());
            }
        } else {
            small = 0;
        }
        zn *= z;
    }
    Err(Error::Convergence(format!(
        "Taylor series for E_{alpha}({z}) did not converge in {} terms",
        cfg.max_terms
    )))
}

/// Poles s with s^α = z on the principal sheet (|arg s| < π).
fn principal_poles(alpha: f64, z: Complex64) -> Vec<Complex64> {
    let theta = z.arg();
    let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let r = z.norm().powf(1.0 / alpha);
    (kmin..=kmax)
        .map(|k| Complex64::from_polar(r, (theta + 2.0 * PI * k as f64) / alpha))
        .filter(|s| s.arg().abs() < PI)
        .collect()
}

fn asymptotic(alpha: f64, z: Complex64, tol: f64) -> Option<Complex64> {
    let mut expo = Complex64::new(0.0, 0.0);
    for s in principal_poles(alpha, z) {
        expo += s.exp() / alpha;
    }
    let zinv = z.inv();
    let mut alg = CompensatedSum::new();
    let mut zp = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut last = f64::INFINITY;
    for n in 1..400 {
        zp *= zinv;
        let c = rgamma(1.0 - alpha * n as f64);
        if c == 0.0 {
            continue;
        }
        let term = zp * c;
        let m = term.norm();
        if m > prev && n > 3 {
            // Divergent tail before reaching the tolerance.
            break;
        }
        alg.add(-term);
        prev = m;
        last = m;
        let total = (expo + alg.value()).norm();
        if m <= tol * total {
            return Some(expo + alg.value());
        }
    }
    let total = (expo + alg.value()).norm();
    if alpha >= 1.0 && last.is_infinite() {
        // No algebraic terms at all (e.g. α = 2): the residues are exact.
        return Some(expo);
    }
    if last <= 10.0 * tol * total {
        return Some(expo + alg.value());
    }
    None
}

const LOG_EPS_MACHINE: f64 = -36.043_653_389_117_15;

/// Laplace-transform inversion along an optimal parabolic contour.
fn contour(alpha: f64, z: Complex64, tol: f64) -> Result<Complex64> {
    let t = 1.0;
    let mut log_epsilon = tol.ln();
    let target_log = log_epsilon;

    // Singularities: origin plus poles, ordered by φ(s) = (Re s + |s|)/2.
    let mut poles: Vec<(f64, Complex64)> = {
        let theta = z.arg();
        let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
        let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
        let r = z.norm().powf(1.0 / alpha);
        (kmin..=kmax)
            .map(|k| {
                let s = Complex64::from_polar(r, (theta + 2.0 * PI * k as f64) / alpha);
                (0.5 * (s.re + s.norm()), s)
            })
            .collect()
    };
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));
    poles.retain(|p| p.0 > 1e-15);
    let mut s_star = vec![Complex64::new(0.0, 0.0)];
    let mut phi = vec![0.0];
    for (ph, s) in &poles {
        s_star.push(*s);
        phi.push(*ph);
    }
    let j1 = s_star.len();
    let mut p = vec![1.0; j1];
    p[0] = (-2.0 * alpha).max(0.0);
    let mut q = vec![1.0; j1];
    q[j1 - 1] = f64::INFINITY;
    phi.push(f64::INFINITY);

    let admissible: Vec<usize> = (0..j1)
        .filter(|&j| phi[j] < (log_epsilon - LOG_EPS_MACHINE) / t && phi[j] < phi[j + 1])
        .collect();
    if admissible.is_empty() {
        return Err(Error::Convergence(format!("no admissible contour region for E_{alpha}({z})")));
    }

    let (mu, h, n, region) = loop {
        let mut best = (0.0, 0.0, f64::INFINITY, 0usize);
        for &j in &admissible {
            let (m, hh, nn) = if j < j1 - 1 {
                optimal_param_rb(t, phi[j], phi[j + 1], p[j], q[j], log_epsilon)
            } else {
                optimal_param_ru(t, phi[j], p[j], log_epsilon)
            };
            if nn < best.2 {
                best = (m, hh, nn, j);
            }
        }
        if best.2 > 200.0 {
            log_epsilon += std::f64::consts::LN_10;
            if log_epsilon - target_log > 3.0 * std::f64::consts::LN_10 {
                return Err(Error::Convergence(format!(
                    "contour inversion for E_{alpha}({z}) would need tolerance above {:e}",
                    log_epsilon.exp()
                )));
            }
            continue;
        }
        break best;
    };
    let n = n as i64;

    let am1 = alpha - 1.0;
    let mut acc = CompensatedSum::new();
    for k in -n..=n {
        let u = h * k as f64;
        let s = Complex64::new(mu * (1.0 - u * u), 2.0 * mu * u);
        let sd = Complex64::new(-2.0 * mu * u, 2.0 * mu);
        let f = s.powf(am1) / (s.powf(alpha) - z);
        acc.add((s * t).exp() * f * sd);
    }
    let integral = acc.value() * h / Complex64::new(0.0, 2.0 * PI);
    let mut residues = Complex64::new(0.0, 0.0);
    for s in &s_star[region + 1..] {
        residues += (s * t).exp() / alpha;
    }
    let out = integral + residues;
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::Convergence(format!("non-finite contour sum for E_{alpha}({z})")));
    }
    Ok(out)
}

fn optimal_param_rb(t: f64, phi_j: f64, phi_j1: f64, pj: f64, qj: f64, log_epsilon: f64) -> (f64, f64, f64) {
    let fac = 1.01;
    let f_max = (log_epsilon - LOG_EPS_MACHINE).exp();
    let sq_phi_j = phi_j.sqrt();
    let threshold = 2.0 * ((log_epsilon - LOG_EPS_MACHINE) / t).sqrt();
    let sq_phi_j1 = phi_j1.sqrt().min(threshold - sq_phi_j);

    let small_p = pj < 1e-14;
    let small_q = qj < 1e-14;
    let (sq_bar_j, sq_bar_j1, f_bar) = if small_p && small_q {
        (sq_phi_j, sq_phi_j1, 1.0)
    } else if small_p {
        let f_min = if sq_phi_j > 0.0 {
            fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)).powf(qj)
        } else {
            fac
        };
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / qj);
        (sq_phi_j, (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq), f_bar)
    } else if small_q {
        let f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)).powf(pj);
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        ((2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp), sq_phi_j1, f_bar)
    } else {
        let mut f_min = fac * ((sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j)).powf(pj.max(qj));
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        f_min = f_min.max(1.5);
        let f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        let fq = f_bar.powf(-1.0 / qj);
        let w = -phi_j1 * t / log_epsilon;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        let a = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
        let b = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
        (a, b, f_bar)
    };
    let log_eps = log_epsilon - f_bar.ln();
    let w = -sq_bar_j1 * sq_bar_j1 * t / log_eps;
    let mu = (((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_eps * (sq_bar_j1 - sq_bar_j) / ((1.0 + w) * sq_bar_j + sq_bar_j1);
    let n = ((1.0 - log_eps / t / mu).sqrt() / h).ceil();
    if !(mu > 0.0) || !(h > 0.0) || !n.is_finite() {
        return (0.0, 0.0, f64::INFINITY);
    }
    (mu, h, n)
}

fn optimal_param_ru(t: f64, phi_j: f64, pj: f64, log_epsilon: f64) -> (f64, f64, f64) {
    let sq_phi_j = phi_j.sqrt();
    let mut phibar = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sq_phibar = phibar.sqrt();
    let (f_min, f_max, f_tar) = (1.0f64, 10.0f64, 5.0f64);
    let mut n;
    let mut a;
    let mut sq_mu;
    let mut iter = 0;
    loop {
        let phi_t = phibar * t;
        let log_eps_phi_t = log_epsilon / phi_t;
        n = (phi_t / PI * (1.0 - 1.5 * log_eps_phi_t + (1.0 - 2.0 * log_eps_phi_t).sqrt())).ceil();
        a = PI * n / phi_t;
        sq_mu = sq_phibar * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let fbar = ((sq_phibar - sq_phi_j) / sq_mu).powf(-pj);
        let stop = pj < 1e-14 || (f_min < fbar && fbar < f_max);
        iter += 1;
        if stop || iter > 100 {
            break;
        }
        sq_phibar = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi_j;
        phibar = sq_phibar * sq_phibar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;
    let threshold = (log_epsilon - LOG_EPS_MACHINE) / t;
    if mu > threshold {
        let qv = if pj.abs() < 1e-14 { 0.0 } else { f_tar.powf(-1.0 / pj) * mu.sqrt() };
        let phibar = (qv + phi_j.sqrt()).powi(2);
        if phibar < threshold {
            let w = (LOG_EPS_MACHINE / (LOG_EPS_MACHINE - log_epsilon)).sqrt();
            let u = (-phibar * t / LOG_EPS_MACHINE).sqrt();
            mu = threshold;
            n = (w * log_epsilon / 2.0 / PI / (u * w - 1.0)).ceil();
            h = (LOG_EPS_MACHINE / (LOG_EPS_MACHINE - log_epsilon)).sqrt() / n;
        } else {
            return (0.0, 0.0, f64::INFINITY);
        }
    }
    if !(h > 0.0) || !n.is_finite() {
        return (0.0, 0.0, f64::INFINITY);
    }
    (mu, h, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn alpha_one_is_exponential() {
        let z = c(-0.3, 2.0);
        assert_eq!(mittag_leffler(1.0, z).unwrap(), z.exp());
    }

    #[test]
    fn alpha_two_is_cosine() {
        for x in [0.3, 1.0, 2.5, 4.0, 7.0] {
            let e = mittag_leffler_real(2.0, -x * x).unwrap();
            assert!((e - x.cos()).abs() < 1e-10, "x={x}: {e}");
        }
    }

    #[test]
    fn regimes_agree_at_boundaries() {
        // Contour vs Taylor just outside the series radius, contour vs asymptotic far out.
        for &alpha in &[0.25, 0.5, 0.75, 0.9] {
            for &arg in &[PI, 0.75 * PI, 0.5 * PI, 0.2] {
                let z = Complex64::from_polar(1.2, arg);
                let t = taylor(alpha, z, &MlConfig { max_terms: 2000, ..Default::default() }).unwrap();
                let g = contour(alpha, z, 1e-15).unwrap();
                assert!((t - g).norm() <= 1e-13 * t.norm().max(1.0), "α={alpha} arg={arg}");
                let z = Complex64::from_polar(60.0, arg.max(0.6 * PI));
                let a = asymptotic(alpha, z, 1e-15).unwrap();
                let g = contour(alpha, z, 1e-15).unwrap();
                assert!((a - g).norm() <= 1e-12 * a.norm(), "α={alpha}: {a} vs {g}");
            }
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(mittag_leffler(0.0, c(1.0, 0.0)).is_err());
        assert!(mittag_leffler(2.5, c(1.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn duplication_identity(alpha in 0.2f64..=1.0, r in 0.0f64..=3.0, th in -PI..PI) {
            let z = Complex64::from_polar(r, th);
            let lhs = mittag_leffler(alpha, z).unwrap() + mittag_leffler(alpha, -z).unwrap();
            let rhs = mittag_leffler(2.0 * alpha, z * z).unwrap() * 2.0;
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0), "{} vs {}", lhs, rhs);
        }

        #[test]
        fn monotone_decreasing_on_negative_axis(alpha in 0.05f64..1.0, x in 0.0f64..50.0) {
            let a = mittag_leffler_real(alpha, -x).unwrap();
            let b = mittag_leffler_real(alpha, -x - 0.1).unwrap();
            prop_assert!(a > 0.0 && b > 0.0 && b < a);
        }

        #[test]
        fn conjugate_symmetry(alpha in 0.05f64..=1.0, r in 0.0f64..40.0, th in 0.5 * PI..PI) {
            let z = Complex64::from_polar(r, th);
            let a = mittag_leffler(alpha, z).unwrap();
            let b = mittag_leffler(alpha, z.conj()).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }
}
