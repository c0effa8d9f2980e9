//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the report is always shown.
//! Exits non-zero if any criterion fails other than those in `KNOWN_RED`.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracrte::ctrw::{map_params, simulate_density};
use fracrte::diffusion::{d0, diffusion_density, diffusion_density_mwright, second_moment, DiffusionParams};
use fracrte::field::{graded_half_line_rule, linspace};
use fracrte::fourier::QuadratureSpec;
use fracrte::legendre::PhaseFunction;
use fracrte::quad::GaussRule;
use fracrte::specfun::{mittag_leffler, mittag_leffler_real};
use fracrte::spectral::{assemble_operator, decompose, EvolutionMode};
use fracrte::transport::{
    ballistic_coefficients, energy_density, evolve_coefficients, mass_law, scattered_coefficients,
    subordinated_energy_density,
};
use fracrte::MediumParams;

/// Criteria that fail for a documented reason (see README).
const KNOWN_RED: &[u32] = &[8];

// e^{z²} erfc(-z) from mpmath at 40 digits (tests/oracles/gen_acceptance.py).
const ERFC_TABLE: &[(f64, f64, f64, f64)] = &[
    (0.25, 0.0, 1.3586423701047221152, 0.0),
    (0.23096988312782168, 0.09567085809127245, 1.309167039757799754, 0.16526176228277479264),
    (0.1767766952966369, 0.1767766952966369, 1.1890033322975695727, 0.27003031482634873405),
    (0.09567085809127245, 0.23096988312782168, 1.053197183566099644, 0.29828570790015776675),
    (5.167580274565997e-44, 0.25, 0.93941306281347578612, 0.27062951561798749281),
    (-0.09567085809127245, 0.23096988312782168, 0.8584707529551193725, 0.21374607682930884913),
    (-0.1767766952966369, 0.1767766952966369, 0.80709168910262872547, 0.14511167914158831983),
    (-0.23096988312782168, 0.09567085809127245, 0.77916248058949391066, 0.072909631543062789816),
    (-0.25, 1.0335160549131994e-43, 0.77034654773099674392, 7.6811522275932476779e-44),
    (0.75, 0.0, 3.0031716636274523087, 0.0),
    (0.6929096493834651, 0.2870125742738173, 2.236280561868886684, 1.2632705593900971325),
    (0.5303300858899106, 0.5303300858899106, 1.1784587311521406232, 1.2986238137733879106),
    (0.2870125742738173, 0.6929096493834651, 0.71119877959133218695, 0.90265835143813662568),
    (1.550274082369799e-43, 0.75, 0.56978282473092300977, 0.59015671124787827092),
    (-0.2870125742738173, 0.6929096493834651, 0.5275724237850679765, 0.38220018483006787702),
    (-0.5303300858899106, 0.5303300858899106, 0.51339026730999539213, 0.23201846670134773265),
    (-0.6929096493834651, 0.2870125742738173, 0.5082637432116251516, 0.11017586901990593616),
    (-0.75, 3.100548164739598e-43, 0.50693765029314480579, 1.1409170537876663814e-43),
    (1.5, 0.0, 18.653886256262733939, 0.0),
    (1.3858192987669302, 0.5740251485476346, -0.51209551218478824216, 9.9127799252950333808),
    (1.0606601717798212, 1.0606601717798212, -1.5440001421688490865, 1.7588184283936146328),
    (0.5740251485476346, 1.3858192987669302, -0.23899985630543402439, 0.73270217902157946711),
    (3.100548164739598e-43, 1.5, 0.10539922456186433678, 0.48322733014076905793),
    (-0.5740251485476346, 1.3858192987669302, 0.2307724479440917462, 0.32533770813074975932),
    (-1.0606601717798212, 1.0606601717798212, 0.28765289672337152943, 0.20267203461777164878),
    (-1.3858192987669302, 0.5740251485476346, 0.31386083264914401056, 0.09756694514387507629),
    (-1.5, 6.201096329479196e-43, 0.32158541645431750235, 1.0146414745700547865e-43),
    (2.25, 0.0, 315.73888373164453896, 0.0),
    (2.078728948150395, 0.861037722821452, -65.173738783716408256, -30.352172170792869052),
    (1.590990257669732, 1.590990257669732, 0.49709928383697718829, -1.7212413855619890869),
    (0.861037722821452, 2.078728948150395, -0.17470760548134564527, 0.2105996710641451379),
    (4.650822247109397e-43, 2.25, 0.0063297154274857465769, 0.28949048542367409732),
    (-0.861037722821452, 2.078728948150395, 0.12420851709971956874, 0.23425873106511862956),
    (-1.590990257669732, 1.590990257669732, 0.1889049044415858116, 0.15742789178947435954),
    (-2.078728948150395, 0.861037722821452, 0.22124324737128043649, 0.078376941188345508937),
    (-2.25, 9.301644494218795e-43, 0.23108725873039186996, 8.2306999166367751892e-44),
    (3.0, 0.0, 16205.988853999586625, 0.0),
    (2.7716385975338604, 1.1480502970952693, 1157.1274957628117862, 93.749057223179187323),
    (2.1213203435596424, 2.1213203435596424, -1.9612102808302785284, 0.94899781327427101468),
    (1.1480502970952693, 2.7716385975338604, -0.079794614488691285163, 0.17676765073706598825),
    (6.201096329479196e-43, 3.0, 0.0001234098040866795495, 0.20115731703760038666),
    (-1.1480502970952693, 2.7716385975338604, 0.08322844194753404005, 0.17648967600770543071),
    (-2.1213203435596424, 2.1213203435596424, 0.13894975706092586692, 0.12476084279075496735),
    (-2.7716385975338604, 1.1480502970952693, 0.16939548469725257298, 0.063718052772001165324),
    (-3.0, 1.2402192658958393e-42, 0.17900115118138995042, 6.7433524391193639469e-44),
];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn worst_within(worst: f64, tol: f64) -> Outcome {
    outcome(worst <= tol, format!("worst {worst:.2e} (tol {tol:.0e})"))
}

/// Σ|a - b| / Σ|b| on a common uniform grid.
fn rel_l1(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(a, b)| (a - b).abs()).sum();
    num / b.iter().map(|b| b.abs()).sum::<f64>()
}

fn reference(alpha: f64) -> MediumParams {
    MediumParams::reference(alpha).unwrap()
}

fn c1_special_functions() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..=40 {
        for j in 0..=40 {
            let z = C::new(-10.0 + 0.5 * i as f64, -10.0 + 0.5 * j as f64);
            if z.norm() > 10.0 {
                continue;
            }
            let e = mittag_leffler(1.0, z).unwrap();
            worst = worst.max((e - z.exp()).norm() / z.exp().norm());
        }
    }
    for i in 0..=100 {
        let x = 0.05 * i as f64;
        let e = mittag_leffler_real(2.0, -x * x).unwrap();
        worst = worst.max((e - x.cos()).abs() / x.cos().abs().max(1e-300).max(1.0));
    }
    for &(zr, zi, wr, wi) in ERFC_TABLE {
        let w = C::new(wr, wi);
        let e = mittag_leffler(0.5, C::new(zr, zi)).unwrap();
        worst = worst.max((e - w).norm() / w.norm());
    }
    for alpha in [0.25, 0.375, 0.5] {
        for r in [0.1, 0.5, 1.0, 1.7, 2.4, 3.0] {
            for j in 0..16 {
                let z = C::from_polar(r, PI * j as f64 / 8.0);
                let lhs = mittag_leffler(alpha, z).unwrap() + mittag_leffler(alpha, -z).unwrap();
                let rhs = mittag_leffler(2.0 * alpha, z * z).unwrap() * 2.0;
                worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
            }
        }
    }
    worst_within(worst, 1e-8)
}

fn c2_p1_closed_form() -> Outcome {
    let p = reference(0.5);
    let kc = 3f64.sqrt() / 2.0;
    let mut worst = (p.critical_wavenumber() - kc).abs();
    for i in 0..=2000 {
        let k = 5.0 * kc * i as f64 / 2000.0;
        if (k - kc).abs() <= 1e-6 {
            continue;
        }
        let q = k / kc;
        let c = kc / 3f64.sqrt();
        let (lam, wts) = if q <= 1.0 {
            let s = (1.0 - q * q).sqrt();
            ([C::new(c * (1.0 + s), 0.0), C::new(c * (1.0 - s), 0.0)], [(1.0 - s) / 2.0, (1.0 + s) / 2.0])
        } else {
            let s = (q * q - 1.0).sqrt();
            ([C::new(c, c * s), C::new(c, -c * s)], [0.5, 0.5])
        };
        let dec = decompose(&assemble_operator(k, &p, 1).unwrap()).unwrap();
        let w = dec.paper_weights();
        for (l, wn) in dec.eigenvalues.iter().zip(&w) {
            let n = if (l - lam[0]).norm() <= (l - lam[1]).norm() { 0 } else { 1 };
            worst = worst.max((l - lam[n]).norm()).max((wn - wts[n]).abs());
        }
    }
    worst_within(worst, 1e-10)
}

fn c3_mass_law() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        for sigma_a in [0.0, 1.0] {
            let p = MediumParams::new(alpha, 1.0, 10.0, sigma_a, PhaseFunction::linear(0.9).unwrap()).unwrap();
            for order in [1, 7] {
                for t in [0.01f64, 0.1] {
                    // α = 1 has compact support with a mollified front; α < 1 has a stretched-exponential tail.
                    let (x_ext, width) = if alpha == 1.0 {
                        (t + 0.1, 0.004)
                    } else {
                        let s = (t.powf(alpha) / 3.0).sqrt();
                        (30.0 * s.max(0.05), 0.25 * s)
                    };
                    let (x, w) = graded_half_line_rule(x_ext, 1e-9, 1.3, width, 10);
                    let f = energy_density(&x, &[t], &p, order, EvolutionMode::Exact, &spec).unwrap();
                    let m: f64 = 2.0 * f.values[0].iter().zip(&w).map(|(u, w)| u * w).sum::<f64>();
                    worst = worst.max((m - mass_law(t, &p).unwrap()).abs());
                }
            }
        }
    }
    worst_within(worst, 1e-4)
}

/// Û(k, t) at α = 1 from the Legendre moment equations
/// ∂_t u_l + i k v [(l+1) u_{l+1} + l u_{l-1}] / (2l+1) = -(σ_t - σ_s β_l / (2l+1)) u_l,
/// u_{N+1} = 0, u(0) = e₀, integrated with classical RK4.
fn moment_ode_mode(k: f64, t: f64, p: &MediumParams, beta: &[f64], order: usize) -> f64 {
    let n = order + 1;
    let rate: Vec<f64> = (0..n)
        .map(|l| p.sigma_t() - p.sigma_s * beta.get(l).copied().unwrap_or(0.0) / (2 * l + 1) as f64)
        .collect();
    let rhs = |u: &[C]| -> Vec<C> {
        (0..n)
            .map(|l| {
                let lf = l as f64;
                let mut flux = C::new(0.0, 0.0);
                if l + 1 < n {
                    flux += u[l + 1] * (lf + 1.0);
                }
                if l > 0 {
                    flux += u[l - 1] * lf;
                }
                -C::new(0.0, k * p.v) * flux / (2.0 * lf + 1.0) - u[l] * rate[l]
            })
            .collect()
    };
    let steps = ((t * (p.sigma_t() + p.v * k) / 0.02).ceil() as usize).max(20);
    let h = t / steps as f64;
    let mut u = vec![C::new(0.0, 0.0); n];
    u[0] = C::new(1.0, 0.0);
    let axpy = |u: &[C], k: &[C], a: f64| -> Vec<C> { u.iter().zip(k).map(|(u, k)| u + k * a).collect() };
    for _ in 0..steps {
        let k1 = rhs(&u);
        let k2 = rhs(&axpy(&u, &k1, 0.5 * h));
        let k3 = rhs(&axpy(&u, &k2, 0.5 * h));
        let k4 = rhs(&axpy(&u, &k3, h));
        for l in 0..n {
            u[l] += (k1[l] + k2[l] * 2.0 + k3[l] * 2.0 + k4[l]) * (h / 6.0);
        }
    }
    u[0].re
}

/// Mollified U(x, t; N) at α = 1 by a uniform trapezoid rule in k.
fn moment_ode_density(x: &[f64], t: f64, p: &MediumParams, beta: &[f64], order: usize, width: f64) -> Vec<f64> {
    let dk = 0.25;
    let k_max = 9.0 / width;
    let ks: Vec<f64> = (0..=(k_max / dk) as usize).map(|i| i as f64 * dk).collect();
    let f: Vec<f64> =
        ks.iter().map(|&k| moment_ode_mode(k, t, p, beta, order) * (-0.5 * (width * k).powi(2)).exp()).collect();
    x.iter()
        .map(|&x| {
            let s: f64 = ks.iter().zip(&f).map(|(k, f)| (k * x).cos() * f).sum();
            (s - 0.5 * f[0]) * dk / PI
        })
        .collect()
}

fn c4_alpha_one() -> Outcome {
    let spec = QuadratureSpec::default();
    let p = reference(1.0);
    let x = linspace(-1.0, 1.0, 401);
    let mut worst_t = 0.0f64;
    for order in [1, 7] {
        for t in [0.05, 0.1] {
            let u = energy_density(&x, &[t], &p, order, EvolutionMode::Exact, &spec).unwrap();
            let o = moment_ode_density(&x, t, &p, &[1.0, 2.7], order, spec.mollifier_width);
            worst_t = worst_t.max(rel_l1(&u.values[0], &o));
        }
    }
    let dp = DiffusionParams::from_medium(&p).unwrap();
    let xd = linspace(-2.0, 2.0, 401);
    let times = [0.01, 0.05, 0.1, 0.5];
    let f = diffusion_density(&xd, &times, &dp, &spec).unwrap();
    let mut worst_d = 0.0f64;
    for (j, &t) in times.iter().enumerate() {
        for (i, &x) in xd.iter().enumerate() {
            let g = (-x * x / (4.0 * dp.d0 * t)).exp() / (4.0 * PI * dp.d0 * t).sqrt();
            worst_d = worst_d.max((f.values[j][i] - g).abs() / g.max(1.0));
        }
    }
    outcome(
        worst_t <= 2e-3 && worst_d <= 1e-8,
        format!("transport rel L1 {worst_t:.2e} (tol 2e-3), diffusion {worst_d:.2e} (tol 1e-8)"),
    )
}

fn c5_diffusion() -> Outcome {
    let spec = QuadratureSpec::default();
    let d = d0(&reference(0.5)).unwrap();
    let mut worst_pt = 0.0f64;
    let mut worst_m2 = 0.0f64;
    let x = linspace(-1.0, 1.0, 41);
    for (alpha, times) in [(0.25, [1e-4, 2.5e-3, 0.01]), (0.5, [0.01, 0.05, 0.1]), (0.75, [0.05, 0.1, 0.2]), (1.0, [0.01, 0.05, 0.1])] {
        let dp = DiffusionParams::new(alpha, d, 0.0).unwrap();
        let f = diffusion_density(&x, &times, &dp, &spec).unwrap();
        for (j, &t) in times.iter().enumerate() {
            for (i, &xi) in x.iter().enumerate() {
                let m = diffusion_density_mwright(xi, t, &dp).unwrap();
                worst_pt = worst_pt.max((f.values[j][i] - m).abs() / m.max(1.0));
            }
            let s = (d * t.powf(alpha)).sqrt();
            let (xs, ws) = graded_half_line_rule(50.0 * s, 1e-8 * s, 1.2, 0.5 * s, 12);
            let u = diffusion_density(&xs, &[t], &dp, &spec).unwrap();
            let m2: f64 = 2.0 * xs.iter().zip(&ws).zip(&u.values[0]).map(|((x, w), u)| x * x * w * u).sum::<f64>();
            let exact = second_moment(t, &dp);
            worst_m2 = worst_m2.max((m2 - exact).abs() / exact);
        }
    }
    let d_err = (d - 1.0 / 3.0).abs();
    outcome(
        worst_pt <= 1e-6 && worst_m2 <= 1e-6 && d_err <= 1e-15,
        format!("pointwise {worst_pt:.2e}, second moment {worst_m2:.2e} (tol 1e-6), D0 = {d:.15}"),
    )
}

fn c6_split() -> Outcome {
    let p = reference(0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k: f64 = rng.random_range(0.0..50.0);
        let t: f64 = rng.random_range(1e-3..1.0);
        let mu0: f64 = rng.random_range(-1.0..1.0);
        let order = 7;
        let full = evolve_coefficients(k, t, mu0, order, &p, EvolutionMode::Exact).unwrap();
        let b = ballistic_coefficients(k, t, mu0, order, &p).unwrap();
        let s = scattered_coefficients(k, t, mu0, order, &p, EvolutionMode::Exact).unwrap();
        for l in 0..=order {
            worst = worst.max((b.c[l] + s.c[l] - full.c[l]).norm());
        }
    }
    worst_within(worst, 1e-8)
}

fn c7_subordination() -> Outcome {
    let spec = QuadratureSpec::default();
    let p = reference(0.5);
    let x = linspace(-1.0, 1.0, 401);
    let times = [0.01, 0.05, 0.1];
    let direct = energy_density(&x, &times, &p, 1, EvolutionMode::Exact, &spec).unwrap();
    let sub = subordinated_energy_density(&x, &times, &p, 1, &spec).unwrap();
    let worst = (0..times.len()).map(|j| rel_l1(&sub.values[j], &direct.values[j])).fold(0.0, f64::max);
    worst_within(worst, 1e-3)
}

/// Bin averages of U(x, t; N) over bins of width h centred on `centres`.
fn bin_average(centres: &[f64], h: f64, t: f64, p: &MediumParams, order: usize) -> Vec<f64> {
    let g = GaussRule::cached(8);
    let nodes: Vec<f64> = centres.iter().flat_map(|&c| g.nodes.iter().map(move |xi| c + 0.5 * h * xi)).collect();
    let u = energy_density(&nodes, &[t], p, order, EvolutionMode::Exact, &QuadratureSpec::default()).unwrap();
    (0..centres.len()).map(|i| (0..8).map(|q| 0.5 * g.weights[q] * u.values[0][8 * i + q]).sum()).collect()
}

fn c8_ctrw() -> Outcome {
    let p = reference(0.5);
    let t = 0.05;
    let h = 0.01;
    let tau = 1e-6;
    let centres: Vec<f64> = (0..41).map(|i| (i as f64 - 20.0) * h).collect();
    let xi_t = map_params(&p, tau).unwrap().xi_t;
    let est = simulate_density(1_000_000, &[t], &centres, &p, tau, 2024).unwrap();
    let u7 = bin_average(&centres, h, t, &p, 7);
    let z = |u: &[f64], i: usize| (est.field.values[0][i] - u[i]) / est.std_err[0][i];
    let within = (0..41).filter(|&i| z(&u7, i).abs() <= 3.0).count();
    let frac = within as f64 / 41.0;

    let pa = MediumParams::new(0.5, 1.0, 9.0, 1.0, PhaseFunction::linear(0.9).unwrap()).unwrap();
    let sa = simulate_density(200_000, &[t], &[-0.1, 0.0, 0.1], &pa, 1e-5, 7).unwrap();
    let zs = (sa.survival[0] - mass_law(t, &pa).unwrap()) / sa.survival_std_err[0];

    let u31 = bin_average(&centres, h, t, &p, 31);
    let within31 = (0..41).filter(|&i| z(&u31, i).abs() <= 3.0).count();
    println!(
        "      info: ξ_t = {xi_t:.3}; centre bin MC {:.3} ± {:.3}, U(N=7) {:.3}, U(N=31) {:.3}; \
         N=31 reference puts {within31}/41 bins within 3σ",
        est.field.values[0][20], est.std_err[0][20], u7[20], u31[20]
    );
    outcome(
        frac >= 0.95 && zs.abs() <= 3.0,
        format!("{within}/41 bins within 3σ of U(N=7) (need ≥ 95%), survival {zs:+.2}σ"),
    )
}

fn fwhm(x: &[f64], u: &[f64]) -> f64 {
    let m = u.iter().copied().fold(f64::MIN, f64::max);
    let above: Vec<usize> = (0..u.len()).filter(|&i| u[i] >= 0.5 * m).collect();
    x[*above.last().unwrap()] - x[above[0]]
}

fn c9_figures() -> Outcome {
    let spec = QuadratureSpec::default();
    let x = linspace(-1.0, 1.0, 401);
    let i0 = 200;
    let mut notes = Vec::new();
    let mut ok = true;
    for (alpha, times) in [(0.25, [1e-4, 2.5e-3, 0.01]), (0.5, [0.01, 0.05, 0.1]), (0.75, [0.05, 0.1, 0.2])] {
        let p = reference(alpha);
        let u = energy_density(&x, &times, &p, 1, EvolutionMode::Paper, &spec).unwrap();
        let d = diffusion_density(&x, &times, &DiffusionParams::from_medium(&p).unwrap(), &spec).unwrap();
        for j in 0..3 {
            ok &= u.max_asymmetry(j) == Some(0.0) && u.values[j].iter().all(|v| *v > 0.0);
        }
        let (wu, wd) = (fwhm(&x, &u.values[0]), fwhm(&x, &d.values[0]));
        let narrower = u.values[0][i0] > d.values[0][i0] && wu < wd;
        ok &= narrower;
        notes.push(format!("α={alpha}: FWHM {wu:.3} vs {wd:.3}"));
        if alpha == 0.75 {
            let v = &u.values[2];
            let peak = (i0 + 1..v.len() - 1).find(|&i| v[i] >= v[i - 1] && v[i] >= v[i + 1]);
            let two_peaks = v[i0] < v[i0 - 1] && v[i0] < v[i0 + 1] && peak.is_some_and(|i| v[i] > v[i0]);
            ok &= two_peaks;
            notes.push(format!("t=0.2 maxima at ±{:.3}, local min at 0: {two_peaks}", peak.map_or(f64::NAN, |i| x[i])));
        }
    }
    outcome(ok, notes.join("; "))
}

fn c10_diffusion_limit() -> Outcome {
    let spec = QuadratureSpec::default();
    let x = linspace(-1.0, 1.0, 401);
    let t = 0.05;
    let base = MediumParams::new(0.5, 1.0, 10.0, 1.0, PhaseFunction::linear(0.9).unwrap()).unwrap();
    let dp = DiffusionParams::from_medium(&base).unwrap();
    let ud = diffusion_density(&x, &[t], &dp, &spec).unwrap();
    let mut dist = Vec::new();
    for eps in [1.0, 0.5, 0.25] {
        // Same equation in unscaled variables: v → v/ε, σ_s → σ_s/ε², σ_a fixed.
        let p = MediumParams::new(0.5, base.v / eps, base.sigma_s / (eps * eps), base.sigma_a, base.phase.clone()).unwrap();
        let u = energy_density(&x, &[t], &p, 7, EvolutionMode::Exact, &spec).unwrap();
        dist.push(rel_l1(&u.values[0], &ud.values[0]));
    }
    outcome(
        dist[1] < dist[0] && dist[2] < dist[1],
        format!("rel L1 to U_DA: {:.3e}, {:.3e}, {:.3e} for ε = 1, 1/2, 1/4", dist[0], dist[1], dist[2]),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "special-function oracles", c1_special_functions, Duration::from_secs(10)),
        (2, "P1 closed-form spectrum", c2_p1_closed_form, Duration::from_secs(5)),
        (3, "mass law", c3_mass_law, Duration::from_secs(120)),
        (4, "α = 1 reduction", c4_alpha_one, Duration::from_secs(120)),
        (5, "diffusion cross-method", c5_diffusion, Duration::from_secs(60)),
        (6, "ballistic/scattered split", c6_split, Duration::from_secs(60)),
        (7, "subordination", c7_subordination, Duration::from_secs(300)),
        (8, "CTRW convergence", c8_ctrw, Duration::from_secs(600)),
        (9, "figure reproduction", c9_figures, Duration::from_secs(600)),
        (10, "diffusion-limit trend", c10_diffusion_limit, Duration::from_secs(600)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f, budget) in criteria {
        let start = Instant::now();
        let o = f();
        let el = start.elapsed();
        let passed = o.passed && el <= budget;
        let status = match (passed, KNOWN_RED.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{status} [{id:>2}] {name}: {} [{:.1} s, budget {} s]", o.detail, el.as_secs_f64(), budget.as_secs());
        if !passed && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
