//! Legendre polynomials and Legendre-expanded phase functions.

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::quad::GaussRule;

/// P_l(μ) by the three-term recurrence.
pub fn legendre_eval(l: usize, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(legendre_unchecked(l, mu))
}

/// P_0(μ), ..., P_lmax(μ).
pub fn legendre_all(lmax: usize, mu: f64) -> Result<Vec<f64>> {
    check_mu(mu)?;
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax >= 1 {
        out.push(mu);
    }
    for l in 2..=lmax {
        let lf = l as f64;
        let p = ((2.0 * lf - 1.0) * mu * out[l - 1] - (lf - 1.0) * out[l - 2]) / lf;
        out.push(p);
    }
    Ok(out)
}

pub(crate) fn legendre_unchecked(l: usize, mu: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = mu;
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * mu * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn check_mu(mu: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&mu) || mu.is_nan() {
        return domain(format!("μ = {mu} outside [-1, 1]"));
    }
    Ok(())
}

/// Phase function p(μ, μ') = ½ Σ_l β_l P_l(μ) P_l(μ').
///
/// Construction checks β_0 = 1 and 0 < β_l < 2l+1. The kernel may still take
/// negative values (e.g. L = 1 with β_1 > 1); the grid scan records the minimum,
/// and `PhaseFunction::non_negative` rejects such kernels outright.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    beta: Vec<f64>,
    min_value: f64,
}

const SCAN_POINTS: usize = 512;

impl PhaseFunction {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidPhaseFunction("empty coefficient list".into()));
        }
        if beta[0] != 1.0 {
            return Err(Error::InvalidPhaseFunction(format!("β_0 = {} must equal 1", beta[0])));
        }
        for (l, &b) in beta.iter().enumerate().skip(1) {
            let ub = (2 * l + 1) as f64;
            if !(b > 0.0 && b < ub) {
                return Err(Error::InvalidPhaseFunction(format!(
                    "β_{l} = {b} outside (0, {ub})"
                )));
            }
        }
        let min_value = scan_minimum(&beta);
        Ok(PhaseFunction { beta, min_value })
    }

    /// Like `new`, but also rejects kernels that go negative on the scan grid.
    pub fn non_negative(beta: Vec<f64>) -> Result<Self> {
        let p = Self::new(beta)?;
        if p.min_value < -1e-12 {
            return Err(Error::InvalidPhaseFunction(format!(
                "kernel takes negative value {:.6} on the scan grid",
                p.min_value
            )));
        }
        Ok(p)
    }

    pub fn isotropic() -> Self {
        PhaseFunction { beta: vec![1.0], min_value: 0.5 }
    }

    /// Linear anisotropic kernel with mean cosine g (β_1 = 3g).
    pub fn linear(g: f64) -> Result<Self> {
        if g == 0.0 {
            return Ok(Self::isotropic());
        }
        Self::new(vec![1.0, 3.0 * g])
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Truncation order L.
    pub fn order(&self) -> usize {
        self.beta.len() - 1
    }

    /// Coefficient β_l, zero beyond L.
    pub fn beta_l(&self, l: usize) -> f64 {
        self.beta.get(l).copied().unwrap_or(0.0)
    }

    pub fn anisotropy_g(&self) -> f64 {
        self.beta_l(1) / 3.0
    }

    /// Minimum of p over the construction scan grid.
    pub fn min_on_grid(&self) -> f64 {
        self.min_value
    }

    pub fn is_non_negative(&self) -> bool {
        self.min_value >= -1e-12
    }

    pub fn eval(&self, mu: f64, mu_prime: f64) -> Result<f64> {
        check_mu(mu)?;
        check_mu(mu_prime)?;
        Ok(eval_unchecked(&self.beta, mu, mu_prime))
    }

    /// ∫ |p(μ, μ')| dμ; equals 1 for non-negative kernels.
    pub fn abs_norm(&self, mu_prime: f64) -> f64 {
        if self.is_non_negative() {
            return 1.0;
        }
        if self.order() == 1 {
            let b = self.beta[1] * mu_prime;
            return linear_abs_mass(b) / 2.0;
        }
        let rule = GaussRule::cached(64);
        // Split at the sign changes found on a fine grid for accuracy.
        let mut edges = vec![-1.0];
        let n = 256;
        let mut prev = eval_unchecked(&self.beta, -1.0, mu_prime);
        for i in 1..=n {
            let mu = -1.0 + 2.0 * i as f64 / n as f64;
            let cur = eval_unchecked(&self.beta, mu, mu_prime);
            if prev * cur < 0.0 {
                edges.push(mu - 1.0 / n as f64);
            }
            prev = cur;
        }
        edges.push(1.0);
        edges
            .windows(2)
            .map(|w| rule.integrate(w[0], w[1], |mu| eval_unchecked(&self.beta, mu, mu_prime).abs()))
            .sum()
    }

    /// Sample a new direction given incoming μ'.
    ///
    /// For non-negative kernels the weight is 1. For signed kernels μ is drawn
    /// from |p|/‖p‖₁ and the weight is sign(p)·‖p‖₁, which keeps every linear
    /// functional of the walk unbiased.
    pub fn sample<R: Rng + ?Sized>(&self, mu_prime: f64, rng: &mut R) -> DirectionSample {
        match self.order() {
            0 => DirectionSample { mu: 2.0 * rng.random::<f64>() - 1.0, weight: 1.0 },
            1 => sample_linear(self.beta[1] * mu_prime, rng),
            _ => self.sample_rejection(mu_prime, rng),
        }
    }

    fn sample_rejection<R: Rng + ?Sized>(&self, mu_prime: f64, rng: &mut R) -> DirectionSample {
        let bound: f64 = 0.5 * self.beta.iter().sum::<f64>();
        let norm = self.abs_norm(mu_prime);
        loop {
            let mu = 2.0 * rng.random::<f64>() - 1.0;
            let p = eval_unchecked(&self.beta, mu, mu_prime);
            if rng.random::<f64>() * bound <= p.abs() {
                let weight = if self.is_non_negative() { 1.0 } else { p.signum() * norm };
                return DirectionSample { mu, weight };
            }
        }
    }
}

/// A sampled direction and its statistical weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionSample {
    pub mu: f64,
    pub weight: f64,
}

fn eval_unchecked(beta: &[f64], mu: f64, mu_prime: f64) -> f64 {
    if beta.len() == 1 {
        return 0.5;
    }
    if beta.len() == 2 {
        return 0.5 * (1.0 + beta[1] * mu * mu_prime);
    }
    let mut s = 0.0;
    let (mut a0, mut a1) = (1.0, mu);
    let (mut b0, mut b1) = (1.0, mu_prime);
    s += beta[0];
    s += beta[1] * a1 * b1;
    for (l, &b) in beta.iter().enumerate().skip(2) {
        let lf = l as f64;
        let a2 = ((2.0 * lf - 1.0) * mu * a1 - (lf - 1.0) * a0) / lf;
        let b2 = ((2.0 * lf - 1.0) * mu_prime * b1 - (lf - 1.0) * b0) / lf;
        s += b * a2 * b2;
        a0 = a1;
        a1 = a2;
        b0 = b1;
        b1 = b2;
    }
    0.5 * s
}

fn scan_minimum(beta: &[f64]) -> f64 {
    if beta.len() == 1 {
        return 0.5;
    }
    if beta.len() == 2 {
        // Linear in μμ', extremes at the corners.
        return 0.5 * (1.0 - beta[1].abs());
    }
    let grid: Vec<f64> =
        (0..SCAN_POINTS).map(|i| -1.0 + 2.0 * i as f64 / (SCAN_POINTS - 1) as f64).collect();
    let mut m = f64::INFINITY;
    for &a in &grid {
        for &b in &grid {
            m = m.min(eval_unchecked(beta, a, b));
        }
    }
    m
}

/// ∫_{-1}^{1} |1 + bμ| dμ.
fn linear_abs_mass(b: f64) -> f64 {
    if b.abs() <= 1.0 {
        2.0
    } else {
        // Zero at μ_z = -1/b; the two pieces are triangles.
        let z = -1.0 / b;
        let left = 0.5 * (z + 1.0) * (1.0 - b).abs();
        let right = 0.5 * (1.0 - z) * (1.0 + b).abs();
        left + right
    }
}

/// Antiderivative G(μ) = μ + bμ²/2 of 1 + bμ.
fn lin_anti(b: f64, mu: f64) -> f64 {
    mu + 0.5 * b * mu * mu
}

/// Solve μ + bμ²/2 = g for the root inside [lo, hi].
fn invert_lin_anti(b: f64, g: f64, lo: f64, hi: f64) -> f64 {
    if b.abs() < 1e-12 {
        return g.clamp(lo, hi);
    }
    // (b/2) μ² + μ - g = 0, stable root pair.
    let a = 0.5 * b;
    let disc = (1.0 + 4.0 * a * g).max(0.0);
    let q = -0.5 * (1.0 + disc.sqrt());
    let r1 = q / a;
    let r2 = -g / q;
    let pick = |r: f64| r >= lo - 1e-12 && r <= hi + 1e-12;
    let mu = if pick(r2) { r2 } else if pick(r1) { r1 } else { r2 };
    mu.clamp(lo, hi)
}

fn sample_linear<R: Rng + ?Sized>(b: f64, rng: &mut R) -> DirectionSample {
    let u: f64 = rng.random();
    if b.abs() <= 1.0 {
        // CDF (G(μ) - G(-1)) / 2.
        let target = lin_anti(b, -1.0) + 2.0 * u;
        return DirectionSample { mu: invert_lin_anti(b, target, -1.0, 1.0), weight: 1.0 };
    }
    let z = -1.0 / b;
    let left = 0.5 * (z + 1.0) * (1.0 - b).abs();
    let right = 0.5 * (1.0 - z) * (1.0 + b).abs();
    let total = left + right;
    let s = u * total;
    let (mu, sign) = if s < left {
        // Integrand sign on [-1, z] is sign(1 - b).
        let sg = (1.0 - b).signum();
        let target = lin_anti(b, -1.0) + sg * s;
        (invert_lin_anti(b, target, -1.0, z), sg)
    } else {
        let sg = (1.0 + b).signum();
        let target = lin_anti(b, z) + sg * (s - left);
        (invert_lin_anti(b, target, z, 1.0), sg)
    };
    DirectionSample { mu, weight: sign * total / 2.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_eval(0, 0.3).unwrap(), 1.0);
        assert!((legendre_eval(2, 0.5).unwrap() + 0.125).abs() < 1e-15);
        assert!((legendre_eval(3, 0.5).unwrap() + 0.4375).abs() < 1e-15);
        assert!(legendre_eval(2, 1.5).is_err());
    }

    #[test]
    fn legendre_orthogonality() {
        let r = GaussRule::new(40);
        for l in 0..12 {
            for m in 0..12 {
                let v = r.integrate(-1.0, 1.0, |x| legendre_unchecked(l, x) * legendre_unchecked(m, x));
                let expect = if l == m { 2.0 / (2 * l + 1) as f64 } else { 0.0 };
                assert!((v - expect).abs() < 1e-13, "l={l} m={m}");
            }
        }
    }

    #[test]
    fn phase_examples() {
        let p = PhaseFunction::new(vec![1.0, 2.7]).unwrap();
        assert!((p.eval(1.0, 1.0).unwrap() - 1.85).abs() < 1e-15);
        assert!((p.anisotropy_g() - 0.9).abs() < 1e-15);
        assert!(!p.is_non_negative());
        assert!(PhaseFunction::non_negative(vec![1.0, 2.7]).is_err());
        assert!(PhaseFunction::new(vec![1.0, 3.0]).is_err());
        assert!(PhaseFunction::new(vec![0.9]).is_err());
        assert_eq!(PhaseFunction::isotropic().eval(0.2, -0.7).unwrap(), 0.5);
    }

    #[test]
    fn phase_normalisation() {
        let r = GaussRule::new(32);
        let p = PhaseFunction::new(vec![1.0, 1.2, 0.8, 0.3]).unwrap();
        for mp in [-0.9, -0.2, 0.4, 1.0] {
            let m = r.integrate(-1.0, 1.0, |mu| p.eval(mu, mp).unwrap());
            assert!((m - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_mean_of_signed_kernel() {
        let p = PhaseFunction::new(vec![1.0, 2.7]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let (mut s, mut s2, mut w) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let d = p.sample(1.0, &mut rng);
            s += d.weight * d.mu;
            s2 += (d.weight * d.mu).powi(2);
            w += d.weight;
        }
        let mean = s / n as f64;
        let sd = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 0.9).abs() < 3.0 * sd, "mean {mean} sd {sd}");
        assert!((w / n as f64 - 1.0).abs() < 0.02);
    }

    #[test]
    fn ks_test_linear_kernel() {
        let b1 = 0.9;
        let mp = 0.7;
        let p = PhaseFunction::new(vec![1.0, b1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| p.sample(mp, &mut rng).mu).collect();
        xs.sort_by(f64::total_cmp);
        let b = b1 * mp;
        let cdf = |mu: f64| 0.5 * (lin_anti(b, mu) - lin_anti(b, -1.0));
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = cdf(x);
            d = d.max((f - i as f64 / n as f64).abs()).max(((i + 1) as f64 / n as f64 - f).abs());
        }
        assert!(d <= 4.0 / (n as f64).sqrt(), "KS distance {d}");
    }

    #[test]
    fn isotropic_mean_is_zero() {
        let p = PhaseFunction::isotropic();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let m: f64 = (0..n).map(|_| p.sample(0.5, &mut rng).mu).sum::<f64>() / n as f64;
        assert!(m.abs() < 3.0 * (1.0 / 3.0 / n as f64).sqrt());
    }

    proptest! {
        #[test]
        fn recurrence_matches_explicit_p4(mu in -1.0f64..=1.0) {
            let p4 = (35.0 * mu.powi(4) - 30.0 * mu * mu + 3.0) / 8.0;
            prop_assert!((legendre_eval(4, mu).unwrap() - p4).abs() < 1e-14);
            let all = legendre_all(6, mu).unwrap();
            for (l, v) in all.iter().enumerate() {
                prop_assert!((legendre_unchecked(l, mu) - v).abs() < 1e-15);
            }
        }

        #[test]
        fn legendre_bounded(l in 0usize..40, mu in -1.0f64..=1.0) {
            prop_assert!(legendre_eval(l, mu).unwrap().abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn signed_sampler_stays_in_range(b1 in 0.01f64..2.99, mp in -1.0f64..=1.0, seed in 0u64..1000) {
            let p = PhaseFunction::new(vec![1.0, b1]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let d = p.sample(mp, &mut rng);
                prop_assert!((-1.0..=1.0).contains(&d.mu));
                prop_assert!((d.weight.abs() - p.abs_norm(mp)).abs() < 1e-12);
                let pv = p.eval(d.mu, mp).unwrap();
                prop_assert!(pv * d.weight >= -1e-12);
            }
        }
    }
}
