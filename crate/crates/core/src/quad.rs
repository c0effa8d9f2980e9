//! Quadrature building blocks: Gauss-Legendre rules, adaptive Gauss-Kronrod,
//! Wynn's epsilon algorithm, sine/cosine integrals and compensated sums.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Cached rule for common orders.
    pub fn cached(n: usize) -> &'static GaussRule {
        static R8: OnceLock<GaussRule> = OnceLock::new();
        static R16: OnceLock<GaussRule> = OnceLock::new();
        static R24: OnceLock<GaussRule> = OnceLock::new();
        static R32: OnceLock<GaussRule> = OnceLock::new();
        static R64: OnceLock<GaussRule> = OnceLock::new();
        match n {
            8 => R8.get_or_init(|| GaussRule::new(8)),
            16 => R16.get_or_init(|| GaussRule::new(16)),
            24 => R24.get_or_init(|| GaussRule::new(24)),
            32 => R32.get_or_init(|| GaussRule::new(32)),
            64 => R64.get_or_init(|| GaussRule::new(64)),
            _ => Box::leak(Box::new(GaussRule::new(n))),
        }
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// 15-point Kronrod abscissae (non-negative half), 7-point Gauss subset at odd indices.
pub const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
pub const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
pub const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes of the 15-point Kronrod rule mapped to [a, b], in increasing order.
pub fn kronrod_nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; 15];
    for j in 0..7 {
        out[j] = c - h * XGK[j];
        out[14 - j] = c + h * XGK[j];
    }
    out[7] = c;
    out
}

/// Kronrod weights matching `kronrod_nodes` (unscaled).
pub fn kronrod_weights() -> [f64; 15] {
    let mut w = [0.0; 15];
    for j in 0..7 {
        w[j] = WGK[j];
        w[14 - j] = WGK[j];
    }
    w[7] = WGK[7];
    w
}

/// Gauss weights aligned with `kronrod_nodes` (zero at Kronrod-only nodes).
pub fn gauss_weights_aligned() -> [f64; 15] {
    let mut w = [0.0; 15];
    for (g, j) in [1usize, 3, 5].iter().enumerate() {
        w[*j] = WG[g];
        w[14 - *j] = WG[g];
    }
    w[7] = WG[3];
    w
}

/// QUADPACK-style error estimate from Kronrod and Gauss results on one panel.
pub fn gk_error(fv: &[Complex64; 15], h: f64) -> (Complex64, f64) {
    let wk = kronrod_weights();
    let wg = gauss_weights_aligned();
    let mut rk = Complex64::new(0.0, 0.0);
    let mut rg = Complex64::new(0.0, 0.0);
    for j in 0..15 {
        rk += fv[j] * wk[j];
        rg += fv[j] * wg[j];
    }
    let mean = rk * 0.5;
    let mut asc = 0.0;
    for j in 0..15 {
        asc += wk[j] * (fv[j] - mean).norm();
    }
    let resasc = asc * h.abs();
    let mut err = ((rk - rg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    (rk * h, err)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss-Kronrod integration of a real function on [a, b].
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let mut eval = |lo: f64, hi: f64| -> (f64, f64) {
        let nodes = kronrod_nodes(lo, hi);
        let mut fv = [Complex64::new(0.0, 0.0); 15];
        for j in 0..15 {
            fv[j] = Complex64::new(f(nodes[j]), 0.0);
        }
        let (v, e) = gk_error(&fv, 0.5 * (hi - lo));
        (v.re, e)
    };
    let (v0, e0) = eval(a, b);
    let mut panels = vec![(a, b, v0, e0)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Integral { value: total, error: err });
        }
        if panels.len() >= max_panels {
            return Err(Error::Quadrature(format!(
                "adaptive quadrature on [{a}, {b}] exhausted {max_panels} panels (error {err:e})"
            )));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Quadrature("panel width underflow".into()));
        }
        let (vl, el) = eval(lo, mid);
        let (vr, er) = eval(mid, hi);
        panels.push((lo, mid, vl, el));
        panels.push((mid, hi, vr, er));
    }
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
///
/// Uses at most the last `2 * order + 1` entries; returns the highest even-column
/// estimate together with the difference to the neighbouring estimate.
pub fn wynn_epsilon(seq: &[f64], order: usize) -> (f64, f64) {
    let n = seq.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    if order == 0 || n < 3 {
        let last = seq[n - 1];
        let err = if n >= 2 { (last - seq[n - 2]).abs() } else { f64::INFINITY };
        return (last, err);
    }
    let m = n.min(2 * order + 1);
    let s = &seq[n - m..];
    let mut prev = vec![0.0; m + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = s[m - 1];
    let mut best_err = (s[m - 1] - s[m - 2]).abs();
    let mut col = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut broke = false;
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() {
                broke = true;
                break;
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        if broke {
            // Exact convergence: the current column is already constant.
            break;
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            let k = cur.len();
            let est = cur[k - 1];
            if !est.is_finite() {
                break;
            }
            let e = if k >= 2 { (cur[k - 1] - cur[k - 2]).abs() } else { (est - best).abs() };
            best_err = e.max(f64::EPSILON * est.abs());
            best = est;
        }
    }
    (best, best_err)
}

/// Sine and cosine integrals `(Si(x), Ci(x))` for x > 0.
pub fn sici(x: f64) -> (f64, f64) {
    const EULER: f64 = 0.577_215_664_901_532_9;
    assert!(x > 0.0);
    if x > 2.0 {
        // Continued fraction for E1(ix), modified Lentz.
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / 1e-300, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..1000 {
            let a = -((i - 1) * (i - 1)) as f64;
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(x.cos(), -x.sin());
        (FRAC_PI_2 + h.im, -h.re)
    } else {
        let mut si = 0.0;
        let mut ci = 0.0;
        let mut term = 1.0;
        for k in 1..200usize {
            term *= x / k as f64;
            let t = term / k as f64;
            if k % 2 == 1 {
                si += if (k / 2) % 2 == 0 { t } else { -t };
            } else {
                ci += if (k / 2) % 2 == 0 { t } else { -t };
            }
            if term < 1e-18 {
                break;
            }
        }
        (si, EULER + x.ln() + ci)
    }
}

/// Generalized exponential integral E_n(z) = ∫_1^∞ e^{-zs} s^{-n} ds for Re z ≥ 0.
pub fn expint_n(n: usize, z: Complex64) -> Complex64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    let one = Complex64::new(1.0, 0.0);
    if z.norm() == 0.0 {
        assert!(n >= 2, "E_1(0) diverges");
        return one / (n - 1) as f64;
    }
    if z.norm() > 1.0 {
        // Continued fraction, modified Lentz.
        let mut b = z + n as f64;
        let mut c = Complex64::new(1e300, 0.0);
        let mut d = one / b;
        let mut h = d;
        for i in 1..5000usize {
            let an = -((i * (n - 1 + i)) as f64);
            b += 2.0;
            d = one / (d * an + b);
            c = b + Complex64::new(an, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del - one).norm() < 1e-16 {
                break;
            }
        }
        h * (-z).exp()
    } else {
        let mut ans = if n >= 2 { one / (n - 1) as f64 } else { -z.ln() - EULER };
        let mut fact = one;
        for i in 1..200usize {
            fact *= -z / i as f64;
            let del = if i + 1 != n {
                -fact / (i as f64 - n as f64 + 1.0)
            } else {
                let psi = -EULER + (1..n).map(|m| 1.0 / m as f64).sum::<f64>();
                fact * (-z.ln() + psi)
            };
            ans += del;
            if del.norm() < 1e-17 * ans.norm() {
                break;
            }
        }
        ans
    }
}

/// Neumaier compensated summation for complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        let (s, c) = two_sum_neumaier(self.sum.re, x.re);
        let (t, d) = two_sum_neumaier(self.sum.im, x.im);
        self.sum = Complex64::new(s, t);
        self.comp += Complex64::new(c, d);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[inline]
fn two_sum_neumaier(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, c)
}
