//! Shared oracle machinery for the integration tests: quadrature that is
//! independent of the library's closed forms, and small statistics
//! helpers. Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use d2dse_core::SystemParams;

/// Composite Simpson rule on [a, b] with n subintervals (n made even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n.is_multiple_of(2) { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * core::f64::consts::PI).sqrt()
}

/// `E[exp(sign * X ln10 / 10)]` for `X ~ Normal(0, sigma_db^2)`, by
/// quadrature over the Gaussian density (no closed-form moment used).
pub fn shadow_moment_quad(sigma_db: f64, sign: f64) -> f64 {
    if sigma_db == 0.0 {
        return 1.0;
    }
    let ln10 = core::f64::consts::LN_10;
    simpson(
        |z| normal_pdf(z) * (sign * sigma_db * z * ln10 / 10.0).exp(),
        -14.0,
        14.0,
        20_000,
    )
}

/// `integral_0^inf 2 pi r / pathloss(r) dr` by quadrature: exact Simpson
/// on the clamped region plus a log-space rule far into the tail.
pub fn radial_interference_integral(p: &SystemParams) -> f64 {
    let d0 = p.far_field_m;
    let two_pi = 2.0 * core::f64::consts::PI;
    let inner = simpson(|r| two_pi * r, 0.0, d0, 64);
    // r = d0 e^u, dr = r du
    let u_max = (1e7_f64).ln();
    let outer = simpson(
        |u| {
            let r = d0 * u.exp();
            two_pi * r * r / p.pathloss(r)
        },
        0.0,
        u_max,
        60_000,
    );
    inner + outer
}

/// Fraction of `radial_interference_integral` lying beyond `radius`.
pub fn tail_fraction(p: &SystemParams, radius: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let u_max = (1e7_f64 * p.far_field_m / radius).ln();
    let tail = simpson(
        |u| {
            let r = radius * u.exp();
            two_pi * r * r / p.pathloss(r)
        },
        0.0,
        u_max,
        60_000,
    );
    tail / radial_interference_integral(p)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Interference-free per-pair rate oracle
/// `E[log2(1 + snr * gain(D) * S * G)]` with lognormal shadowing `S` and
/// `G ~ Gamma(N, 1)`, by tensor quadrature over both densities.
pub fn noise_limited_rate_quad(p: &SystemParams, snr: f64) -> f64 {
    let base = p.reference_gain() / p.pathloss(p.pair_separation_m);
    let n = p.tx_antennas;
    let ln10 = core::f64::consts::LN_10;
    let ln2 = core::f64::consts::LN_2;
    let gamma_pdf = |g: f64| g.powi(n as i32 - 1) * (-g).exp() / factorial(n - 1);
    let g_max = 40.0 + 10.0 * n as f64;
    simpson(
        |z| {
            let shadow = (-(p.shadowing_db * z) * ln10 / 10.0).exp();
            let inner = simpson(
                |g| gamma_pdf(g) * (snr * base * shadow * g).ln_1p() / ln2,
                0.0,
                g_max,
                2_000,
            );
            normal_pdf(z) * inner
        },
        -10.0,
        10.0,
        400,
    )
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d_max = 0.0f64;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let d = (i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs();
        d_max = d_max.max(d);
    }
    d_max
}

/// Mean and standard error of a sample.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
