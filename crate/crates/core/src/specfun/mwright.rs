use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_gamma, rgamma, sin_pi};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_adaptive, CompensatedSum};

const SERIES_LIMIT: f64 = 1.0;

/// M-Wright function M_ν(x) for 0 ≤ ν < 1, x ≥ 0.
///
/// Power series near the origin, Zolotarev-Kanter integral representation
/// (non-negative integrand) elsewhere.
pub fn m_wright(nu: f64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&nu) {
        return domain(format!("ν = {nu} outside [0, 1)"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("x = {x} must be finite and non-negative"));
    }
    if nu == 0.0 {
        return Ok((-x).exp());
    }
    if nu == 0.5 {
        return Ok((-0.25 * x * x).exp() / PI.sqrt());
    }
    // Near ν = 1 the series converges too slowly beyond x ≈ 1/2.
    let limit = if nu > 0.9 { 0.5 } else { SERIES_LIMIT };
    if x <= limit {
        series(nu, x)
    } else {
        kanter(nu, x)
    }
}

pub(crate) fn series(nu: f64, x: f64) -> Result<f64> {
    let mut sum = CompensatedSum::new();
    let mut small = 0;
    let mut abs_sum = 0.0;
    let mut ratio = 1.0f64;
    for n in 0..400 {
        if n > 0 {
            ratio *= -x / n as f64;
        }
        let term = if ratio == 0.0 { 0.0 } else { ratio.signum() * series_term(nu, ratio.abs(), n) };
        sum.add(Complex64::new(term, 0.0));
        abs_sum += term.abs();
        // Relative to the running sum, or to the term scale when the sum cancels.
        if term.abs() <= 1e-17 * sum.value().re.abs() || (n > 20 && term.abs() <= 1e-19 * abs_sum) {
            small += 1;
            if small >= 3 {
                return Ok(sum.value().re);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!("M-Wright series at ν={nu}, x={x}")))
}

/// x^n/n! times 1/Γ(1 - ν - νn), via the reflection formula once Γ would overflow.
fn series_term(nu: f64, xn_over_fact: f64, n: usize) -> f64 {
    let z = 1.0 - nu - nu * n as f64;
    if z > -20.0 {
        return xn_over_fact * rgamma(z);
    }
    // 1/Γ(z) = sin(πz) Γ(1-z) / π
    sin_pi(z) / PI * (xn_over_fact.ln() + ln_gamma(1.0 - z)).exp()
}

/// ln of Kanter's function A(θ) = [sin(νθ)^ν sin((1-ν)θ)^{1-ν} / sin θ]^{1/(1-ν)}.
pub(crate) fn ln_kanter(nu: f64, theta: f64) -> f64 {
    let c = 1.0 / (1.0 - nu);
    nu * c * (nu * theta).sin().ln() + ((1.0 - nu) * theta).sin().ln() - c * theta.sin().ln()
}

/// ∫_0^π A e^{-(A - A(0)) X} dθ; returns (-A(0) X, integral).
pub(crate) fn kanter_integral(nu: f64, big_x: f64) -> Result<(f64, f64)> {
    let la0 = (nu / (1.0 - nu)) * nu.ln() + (1.0 - nu).ln();
    let a0 = la0.exp();
    let f = |theta: f64| {
        if theta >= PI {
            return 0.0;
        }
        if theta <= 0.0 {
            return a0;
        }
        let la = ln_kanter(nu, theta);
        let d = a0 * (la - la0).exp_m1();
        let e = la - d * big_x;
        if e < -745.0 {
            0.0
        } else {
            e.exp()
        }
    };
    let r = integrate_adaptive(f, 0.0, PI, 1e-300, 1e-12, 4000)?;
    Ok((-a0 * big_x, r.value))
}

fn kanter(nu: f64, x: f64) -> Result<f64> {
    let c = 1.0 / (1.0 - nu);
    let big_x = x.powf(c);
    let a0 = nu.powf(nu * c) * (1.0 - nu);
    if a0 * big_x - nu * c * x.ln() > 760.0 {
        return Ok(0.0);
    }
    let (ls, v) = kanter_integral(nu, big_x)?;
    if v <= 0.0 {
        return Ok(0.0);
    }
    Ok((ls + nu * c * x.ln() + v.ln()).exp() * c / PI)
}
