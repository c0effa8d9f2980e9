use crate::error::{domain, Result};
use crate::legendre::PhaseFunction;

/// Medium and model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumParams {
    pub alpha: f64,
    pub v: f64,
    pub sigma_s: f64,
    pub sigma_a: f64,
    pub phase: PhaseFunction,
}

impl MediumParams {
    pub fn new(alpha: f64, v: f64, sigma_s: f64, sigma_a: f64, phase: PhaseFunction) -> Result<Self> {
        let p = MediumParams { alpha, v, sigma_s, sigma_a, phase };
        p.validate()?;
        Ok(p)
    }

    /// v = 1, σ_s = 10, σ_a = 0, linear phase function with g = 0.9.
    pub fn reference(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, 10.0, 0.0, PhaseFunction::linear(0.9)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return domain(format!("α = {} outside (0, 1]", self.alpha));
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return domain(format!("v = {} must be positive", self.v));
        }
        if !(self.sigma_s >= 0.0 && self.sigma_s.is_finite()) {
            return domain(format!("σ_s = {} must be non-negative", self.sigma_s));
        }
        if !(self.sigma_a >= 0.0 && self.sigma_a.is_finite()) {
            return domain(format!("σ_a = {} must be non-negative", self.sigma_a));
        }
        if !(self.sigma_t() > 0.0) {
            return domain("σ_t = σ_a + σ_s must be positive");
        }
        Ok(())
    }

    pub fn sigma_t(&self) -> f64 {
        self.sigma_a + self.sigma_s
    }

    pub fn g(&self) -> f64 {
        self.phase.anisotropy_g()
    }

    /// Wavenumber where the two P1 modes coalesce: √3 σ_s (1-g) / (2v).
    pub fn critical_wavenumber(&self) -> f64 {
        3f64.sqrt() * self.sigma_s * (1.0 - self.g()) / (2.0 * self.v)
    }

    /// Same medium with a different α.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.v, self.sigma_s, self.sigma_a, self.phase.clone())
    }

    /// Stable fingerprint of the parameters plus truncation order.
    pub fn fingerprint(&self, order: usize) -> u64 {
        // FNV-1a over the bit patterns.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for x in [self.alpha, self.v, self.sigma_s, self.sigma_a] {
            eat(x.to_bits());
        }
        for b in self.phase.beta() {
            eat(b.to_bits());
        }
        eat(order as u64);
        h
    }
}
