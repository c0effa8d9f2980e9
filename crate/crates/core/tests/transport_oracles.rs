//! Energy density against brute-force references.

use fracrte::fourier::QuadratureSpec;
use fracrte::specfun::mittag_leffler;
use fracrte::spectral::EvolutionMode;
use fracrte::transport::{energy_density, energy_integrand};
use fracrte::MediumParams;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;

/// N = 1 paper-mode integrand written out from the eigenpair formulas:
/// λ± = (k_c/√3)(1 ± s), weights (1 ∓ s)/2, s = √(1 - (k/k_c)²) (imaginary above k_c).
fn p1_integrand(k: f64, t: f64, alpha: f64) -> f64 {
    let kc = 3f64.sqrt() / 2.0;
    let c = kc / 3f64.sqrt();
    let ta = t.powf(alpha);
    let s = C::new(1.0 - (k / kc).powi(2), 0.0).sqrt();
    let e = |lam: C| mittag_leffler(alpha, -lam * ta).unwrap();
    let w = |sign: f64| if k <= kc { 0.5 * (1.0 - sign * s.re) } else { 0.5 };
    let plus = e((s + 1.0) * c) * w(1.0);
    let minus = e((-s + 1.0) * c) * w(-1.0);
    (plus + minus).re
}

#[test]
fn p1_paper_density_matches_dense_simpson() {
    let (alpha, t) = (0.5, 0.05);
    let p = MediumParams::reference(alpha).unwrap();
    let xs = [0.05, 0.2, 0.5];
    let u = energy_density(&xs, &[t], &p, 1, EvolutionMode::Paper, &QuadratureSpec::default()).unwrap();
    // Paper-mode weights jump from (1 ∓ s)/2 to 1/2 at k_c: a kink, so split the rule there.
    let kc = 3f64.sqrt() / 2.0;
    let k_max = 4000.0;
    let simpson = |a: f64, b: f64, n: usize, x: f64| -> f64 {
        let h = (b - a) / n as f64;
        let g = |k: f64| (k * x).cos() * p1_integrand(k, t, alpha);
        let mut s = g(a) + g(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(a + i as f64 * h);
        }
        s * h / 3.0
    };
    for (j, &x) in xs.iter().enumerate() {
        let body = simpson(0.0, kc, 2000, x) + simpson(kc, k_max, 800_000, x);
        // Tail beyond k_max from f ~ C/k², two terms of integration by parts.
        let fk = p1_integrand(k_max, t, alpha);
        let tail = fk * (-(k_max * x).sin() / x + 2.0 * (k_max * x).cos() / (x * x * k_max));
        let oracle = (body + tail) / PI;
        assert!((u.values[0][j] - oracle).abs() < 1e-8, "x = {x}: {} vs {oracle}", u.values[0][j]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A(k) = D + i k B with D ≥ 0 and B real symmetric generates a contraction,
    /// and subordination preserves it.
    #[test]
    fn exact_integrand_bounded_and_even(
        alpha in 0.2f64..=1.0,
        k in 0.0f64..200.0,
        t in 1e-3f64..1.0,
        order in 1usize..9,
    ) {
        let p = MediumParams::reference(alpha).unwrap();
        let a = energy_integrand(k, t, &p, order, EvolutionMode::Exact).unwrap();
        let b = energy_integrand(-k, t, &p, order, EvolutionMode::Exact).unwrap();
        prop_assert!(a.abs() <= 1.0 + 1e-12);
        prop_assert!((a - b).abs() <= 1e-12);
    }
}
