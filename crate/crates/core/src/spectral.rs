//! Legendre-moment (P_N) operator A(k), its eigen-decomposition and the
//! Mittag-Leffler evolution of the moment vector.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::params::MediumParams;
use crate::specfun::mittag_leffler;

type C = Complex64;

/// h_l = (2l+1) - (σ_s/σ_t) β_l.
pub fn h_coefficient(l: usize, params: &MediumParams) -> f64 {
    (2 * l + 1) as f64 - params.sigma_s / params.sigma_t() * params.phase.beta_l(l)
}

/// Tridiagonal operator A(k) of order N+1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    pub k: f64,
    pub order: usize,
    /// Diagonal σ_t h_l / (2l+1).
    pub diag: Vec<f64>,
    /// Coupling magnitudes v l / √(4l²-1) for l = 1..N; the entry is i k times this.
    pub coupling: Vec<f64>,
}

impl SpectralOperator {
    pub fn size(&self) -> usize {
        self.order + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> C {
        if i == j {
            C::new(self.diag[i], 0.0)
        } else if i + 1 == j {
            C::new(0.0, self.k * self.coupling[i])
        } else if j + 1 == i {
            C::new(0.0, self.k * self.coupling[j])
        } else {
            C::new(0.0, 0.0)
        }
    }

    pub fn matrix(&self) -> DMatrix<C> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let o: f64 = self.coupling.iter().map(|c| 2.0 * (c * self.k).powi(2)).sum();
        (d + o).sqrt()
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = x[i] * self.diag[i];
                if i + 1 < n {
                    s += x[i + 1] * C::new(0.0, self.k * self.coupling[i]);
                }
                if i > 0 {
                    s += x[i - 1] * C::new(0.0, self.k * self.coupling[i - 1]);
                }
                s
            })
            .collect()
    }
}

/// Assemble A(k) for truncation order N ≥ 1.
pub fn assemble_operator(k: f64, params: &MediumParams, order: usize) -> Result<SpectralOperator> {
    if order < 1 {
        return domain("truncation order N must be at least 1");
    }
    if !k.is_finite() {
        return domain(format!("k = {k} must be finite"));
    }
    if order < params.phase.order() {
        return domain(format!(
            "N = {order} below phase-function order L = {}",
            params.phase.order()
        ));
    }
    let st = params.sigma_t();
    let diag = (0..=order).map(|l| st * h_coefficient(l, params) / (2 * l + 1) as f64).collect();
    let coupling = (1..=order)
        .map(|l| {
            let lf = l as f64;
            params.v * lf / (4.0 * lf * lf - 1.0).sqrt()
        })
        .collect();
    Ok(SpectralOperator { k, order, diag, coupling })
}

/// Eigen-decomposition A = Q Λ Q⁻¹ with unit-norm columns of Q.
#[derive(Debug, Clone)]
pub struct ModeDecomposition {
    pub k: f64,
    pub eigenvalues: Vec<C>,
    pub right: DMatrix<C>,
    pub left: DMatrix<C>,
    /// ‖Q‖_F ‖Q⁻¹‖_F / n.
    pub condition_estimate: f64,
    /// Smallest pairwise eigenvalue distance.
    pub min_gap: f64,
    pub operator_norm: f64,
    pub defective: bool,
}

const DEFECT_GAP: f64 = 1e-6;
const DEFECT_COND: f64 = 1e4;
const MAX_COND: f64 = 1e13;

/// Compute the mode decomposition. Fails with `DefectiveOperator` near exceptional
/// points, where eigenvalues coalesce and the eigenvector basis degenerates.
pub fn decompose(op: &SpectralOperator) -> Result<ModeDecomposition> {
    let n = op.size();
    let a = op.matrix();
    let norm = op.norm().max(f64::MIN_POSITIVE);
    let schur = Schur::try_new(a, 1e-15, 10_000)
        .ok_or(Error::NumericalInstability { k: op.k, condition: f64::INFINITY })?;
    let (z, t) = schur.unpack();

    // Order eigenvalues by (Re, Im) and compute eigenvectors of T by back substitution.
    let smin = (f64::EPSILON * norm).max(f64::MIN_POSITIVE * 1e10);
    let mut vecs = DMatrix::<C>::zeros(n, n);
    for j in 0..n {
        let mut y = vec![C::new(0.0, 0.0); n];
        y[j] = C::new(1.0, 0.0);
        let tjj = t[(j, j)];
        for i in (0..j).rev() {
            let mut s = C::new(0.0, 0.0);
            for m in i + 1..=j {
                s += t[(i, m)] * y[m];
            }
            let mut d = t[(i, i)] - tjj;
            if d.norm() < smin {
                d = C::new(smin, 0.0);
            }
            y[i] = -s / d;
        }
        let mut v = DMatrix::<C>::zeros(n, 1);
        for r in 0..n {
            let mut s = C::new(0.0, 0.0);
            for m in 0..=j {
                s += z[(r, m)] * y[m];
            }
            v[(r, 0)] = s;
        }
        let vn = v.norm();
        for r in 0..n {
            vecs[(r, j)] = v[(r, 0)] / vn;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| cmp_eigenvalues(t[(p, p)], t[(q, q)], norm));
    let eigenvalues: Vec<C> = order.iter().map(|&i| t[(i, i)]).collect();
    let right = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);

    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min_gap = min_gap.min((eigenvalues[i] - eigenvalues[j]).norm());
        }
    }
    let left = right.clone().try_inverse();
    let (left, cond) = match left {
        Some(l) => {
            let c = right.norm() * l.norm() / n as f64;
            (l, c)
        }
        None => (DMatrix::zeros(n, n), f64::INFINITY),
    };
    let defective = !cond.is_finite() || (min_gap < DEFECT_GAP * norm && cond > DEFECT_COND);
    if defective {
        return Err(Error::DefectiveOperator { k: op.k, gap: min_gap, condition: cond });
    }
    if cond > MAX_COND {
        return Err(Error::NumericalInstability { k: op.k, condition: cond });
    }
    Ok(ModeDecomposition {
        k: op.k,
        eigenvalues,
        right,
        left,
        condition_estimate: cond,
        min_gap,
        operator_norm: norm,
        defective,
    })
}

/// Order by real part, then imaginary part; real parts within rounding of each
/// other count as equal so conjugate pairs sort consistently.
pub(crate) fn cmp_eigenvalues(a: C, b: C, scale: f64) -> std::cmp::Ordering {
    if (a.re - b.re).abs() <= 1e-12 * scale {
        a.im.total_cmp(&b.im)
    } else {
        a.re.total_cmp(&b.re)
    }
}

/// Mode-combination rule used for the time evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvolutionMode {
    /// c(t) = Q E_α(-Λ t^α) Q⁻¹ c₀.
    Exact,
    /// c(t) = V E_α(-Λ t^α) Vᴴ c₀ with unit-norm eigenvectors V, so the
    /// [0,0] weights are |v_n^{(0)}|² (exact only for Hermitian A).
    Paper,
}

impl ModeDecomposition {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// E_α(-λ_n t^α) for every mode.
    pub fn ml_factors(&self, t: f64, alpha: f64) -> Result<Vec<C>> {
        let ta = t.powf(alpha);
        self.eigenvalues.iter().map(|&l| mittag_leffler(alpha, -l * ta)).collect()
    }

    /// Apply Q diag(d) Q⁻¹ (exact) or V diag(d) Vᴴ (paper) to c₀.
    pub fn apply_diagonal(&self, d: &[C], c0: &[C], mode: EvolutionMode) -> Vec<C> {
        let n = self.size();
        let mut coef = vec![C::new(0.0, 0.0); n];
        for m in 0..n {
            let mut s = C::new(0.0, 0.0);
            for (j, c) in c0.iter().enumerate() {
                let l = match mode {
                    EvolutionMode::Exact => self.left[(m, j)],
                    EvolutionMode::Paper => self.right[(j, m)].conj(),
                };
                s += l * c;
            }
            coef[m] = s * d[m];
        }
        (0..n)
            .map(|r| (0..n).map(|m| self.right[(r, m)] * coef[m]).sum())
            .collect()
    }

    /// Weights w_n with [f(A)]_{00} = Σ w_n f(λ_n) for the exact combination.
    pub fn exact_weights(&self) -> Vec<C> {
        (0..self.size()).map(|m| self.right[(0, m)] * self.left[(m, 0)]).collect()
    }

    /// Weights |v_n^{(0)}|² of the unit-norm eigenvectors.
    pub fn paper_weights(&self) -> Vec<f64> {
        (0..self.size()).map(|m| self.right[(0, m)].norm_sqr()).collect()
    }
}

/// c(k, t) = E_α(-A(k) t^α) c₀.
pub fn evolve_coefficients(
    k: f64,
    t: f64,
    c0: &[C],
    params: &MediumParams,
    order: usize,
    mode: EvolutionMode,
) -> Result<Vec<C>> {
    if !(t >= 0.0) {
        return domain(format!("t = {t} must be non-negative"));
    }
    if c0.len() != order + 1 {
        return domain(format!("initial vector has length {} but N+1 = {}", c0.len(), order + 1));
    }
    let op = assemble_operator(k, params, order)?;
    let dec = decompose(&op)?;
    let d = dec.ml_factors(t, params.alpha)?;
    Ok(dec.apply_diagonal(&d, c0, mode))
}

/// Closed-form P1 modes: eigenvalues and weights for N = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1Modes {
    pub lambda_plus: C,
    pub lambda_minus: C,
    /// Exact weights [Q]_{0n}[Q⁻¹]_{n0}.
    pub exact_plus: C,
    pub exact_minus: C,
    /// Eigenvector weights (1 ∓ s)/2 below k_c, 1/2 above.
    pub paper_plus: f64,
    pub paper_minus: f64,
}

/// Closed forms for the 2×2 operator [[σ_a, ivk/√3], [ivk/√3, σ_a + d]], d = σ_s(1-g).
pub fn p1_modes(k: f64, params: &MediumParams) -> P1Modes {
    let d = params.sigma_s * (1.0 - params.g());
    let a = params.sigma_a;
    let kc = params.critical_wavenumber();
    let r = k / kc;
    // s = √(1 - (k/k_c)²), imaginary above k_c.
    let s = C::new(1.0 - r * r, 0.0).sqrt();
    let half = d / 2.0;
    let lp = C::new(a + half, 0.0) + s * half;
    let lm = C::new(a + half, 0.0) - s * half;
    // e₀ᵀ f(A) e₀ = Σ w± f(λ±): w± = (λ± - A₁₁)/(λ± - λ∓) with A₁₁ = a + d.
    let a11 = C::new(a + d, 0.0);
    let ep = (lp - a11) / (lp - lm);
    let em = (lm - a11) / (lm - lp);
    let (pp, pm) = if r.abs() <= 1.0 {
        let sr = s.re;
        ((1.0 - sr) / 2.0, (1.0 + sr) / 2.0)
    } else {
        (0.5, 0.5)
    };
    P1Modes { lambda_plus: lp, lambda_minus: lm, exact_plus: ep, exact_minus: em, paper_plus: pp, paper_minus: pm }
}
