// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's geometry: matrices are written out entry by
//! entry and positivity is decided by principal minors.

#![allow(dead_code)]

use nalgebra::{Complex, Matrix3};
use qutrit_assign::{AssignmentResult, IntegratorConfig, Sequence};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C = Complex<f64>;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;
pub const X8_MIN: f64 = -2.0 / SQRT3;
pub const X8_MAX: f64 = 1.0 / SQRT3;

/// `rho(x) = I/3 + (1/2) sum x_i lambda_i`, entries spelled out.
pub fn rho_matrix(x: &[f64; 8]) -> Matrix3<C> {
    let third = 1.0 / 3.0;
    let a = third + 0.5 * x[2] + x[7] / (2.0 * SQRT3);
    let b = third - x[7] / SQRT3;
    let c = third - 0.5 * x[2] + x[7] / (2.0 * SQRT3);
    let r12 = C::new(0.5 * x[0], -0.5 * x[1]);
    let r13 = C::new(0.5 * x[3], -0.5 * x[4]);
    let r23 = C::new(0.5 * x[5], 0.5 * x[6]);
    Matrix3::new(
        C::new(a, 0.0),
        r12,
        r13,
        r12.conj(),
        C::new(b, 0.0),
        r23,
        r13.conj(),
        r23.conj(),
        C::new(c, 0.0),
    )
}

/// Positive semidefiniteness from the signs of all principal minors.
pub fn psd_by_minors(x: &[f64; 8]) -> bool {
    let m = rho_matrix(x);
    let d = |i: usize| m[(i, i)].re;
    if d(0) < 0.0 || d(1) < 0.0 || d(2) < 0.0 {
        return false;
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if d(i) * d(j) - m[(i, j)].norm_sqr() < 0.0 {
            return false;
        }
    }
    m.determinant().re >= 0.0
}

/// Smallest eigenvalue of `rho(x)` from nalgebra's Hermitian solver.
pub fn min_eigenvalue(x: &[f64; 8]) -> f64 {
    rho_matrix(x)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Von Neumann entropy in nats from nalgebra eigenvalues.
pub fn entropy(m: &Matrix3<C>) -> f64 {
    m.symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-300)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Composite Simpson rule on `[lo, hi]` with `2 * half_steps` intervals.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, half_steps: usize) -> f64 {
    let n = 2 * half_steps;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * k as f64);
    }
    acc * h / 3.0
}

/// Posterior mean of `x8` on the slice `x3 = m` when the prior depends on
/// the state only through `(rho_11 rho_22 rho_33)^k`.
///
/// Writing `rho = D^(1/2) C D^(1/2)` with `D` the diagonal and `C` a unit
/// diagonal correlation matrix, each complex off-diagonal pair scales by
/// `sqrt(d_i d_j)`, so the flat measure projects onto the diagonal with
/// density `(abc)^2`. The Slater weight `det^k = (abc)^k det(C)^k` adds `k`.
pub fn slice_x8_by_marginal(m: f64, k: u32) -> f64 {
    let p = 2 + k as i32;
    let b_max = 1.0 - m.abs();
    let w = |b: f64| {
        let a = 0.5 * (1.0 - b + m);
        let c = 0.5 * (1.0 - b - m);
        (a * b * c).max(0.0).powi(p)
    };
    let x8 = |b: f64| (1.0 - 3.0 * b) / SQRT3;
    let num = simpson(|b| x8(b) * w(b), 0.0, b_max, 20_000);
    let den = simpson(w, 0.0, b_max, 20_000);
    num / den
}

/// Midpoint-rule grid over the coordinate box with `cells` points per free
/// axis; returns `(sum w x8, sum w)` for physical grid points. `pin` fixes
/// `x3`, otherwise all eight axes are gridded.
pub fn grid_moments(cells: usize, pin: Option<f64>, weight: impl Fn(&[f64; 8]) -> f64) -> (f64, f64) {
    let axes: Vec<usize> = (0..8).filter(|&i| !(pin.is_some() && i == 2)).collect();
    let bound = |i: usize| if i == 7 { (X8_MIN, X8_MAX) } else { (-1.0, 1.0) };
    let total = cells.pow(axes.len() as u32);
    let mut x = [0.0; 8];
    if let Some(m) = pin {
        x[2] = m;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for flat in 0..total {
        let mut r = flat;
        for &i in &axes {
            let (lo, hi) = bound(i);
            let k = r % cells;
            r /= cells;
            x[i] = lo + (hi - lo) * (k as f64 + 0.5) / cells as f64;
        }
        if psd_by_minors(&x) {
            let w = weight(&x);
            num += w * x[7];
            den += w;
        }
    }
    (num, den)
}

pub fn rho11(x: &[f64; 8]) -> f64 {
    1.0 / 3.0 + 0.5 * x[2] + x[7] / (2.0 * SQRT3)
}

pub fn cfg(n_samples: u64, seed: u64) -> IntegratorConfig {
    IntegratorConfig::with_samples(n_samples, seed)
}

pub fn adaptive(target: f64, seed: u64) -> IntegratorConfig {
    IntegratorConfig {
        target_stderr: Some(target),
        ..cfg(1 << 18, seed)
    }
}

pub fn lowdisc(n_samples: u64, seed: u64) -> IntegratorConfig {
    IntegratorConfig {
        sequence: Sequence::LowDiscrepancy,
        chunk_size: 1 << 13,
        ..cfg(n_samples, seed)
    }
}

/// `|a - b|` in units of the combined standard error.
pub fn sigmas(a: f64, sa: f64, b: f64, sb: f64) -> f64 {
    (a - b).abs() / (sa * sa + sb * sb).sqrt()
}

pub fn x8_sigmas(a: &AssignmentResult, b: &AssignmentResult) -> f64 {
    sigmas(a.x8(), a.x8_stderr(), b.x8(), b.x8_stderr())
}

/// States on the slice `x3 = m`: diagonal drawn uniformly, then coherences
/// uniformly within `|rho_ij| <= sqrt(rho_ii rho_jj)`, kept if positive.
pub fn slice_states(m: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 8]> {
    if m.abs() == 1.0 {
        // the slice is the single pure state
        return vec![[0.0, 0.0, m, 0.0, 0.0, 0.0, 0.0, X8_MAX]; count];
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let b = rng.random_range(0.0..=(1.0 - m.abs()));
        let a = 0.5 * (1.0 - b + m);
        let c = 0.5 * (1.0 - b - m);
        let mut x = [0.0; 8];
        x[2] = m;
        x[7] = (1.0 - 3.0 * b) / SQRT3;
        for (pair, (p, q)) in [(0, (a, b)), (3, (a, c)), (5, (b, c))] {
            let r = 2.0 * (p * q).sqrt();
            if r > 0.0 {
                x[pair] = rng.random_range(-r..=r);
                x[pair + 1] = rng.random_range(-r..=r);
            }
        }
        if psd_by_minors(&x) {
            out.push(x);
        }
    }
    out
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Exact posterior means `(x3, x8)` for `n` outcomes whose average lies in
/// `[lo, hi]`, under the flat prior. The diagonal prior density is
/// `(abc)^2`, i.e. Dirichlet(3, 3, 3), so each compatible frequency vector
/// contributes a Dirichlet(3 + N1, 3 + N2, 3 + N3) component weighted by its
/// multinomial coefficient times the Beta-function ratio.
pub fn finite_n_exact(n: u32, lo: f64, hi: f64) -> (f64, f64) {
    let mut terms = Vec::new();
    for n1 in 0..=n {
        for n3 in 0..=(n - n1) {
            let avg = (n1 as f64 - n3 as f64) / n as f64;
            if avg < lo - 1e-12 || avg > hi + 1e-12 {
                continue;
            }
            let n2 = n - n1 - n3;
            let ln_w = ln_factorial(n) - ln_factorial(n1) - ln_factorial(n2) - ln_factorial(n3)
                + ln_factorial(n1 + 2)
                + ln_factorial(n2 + 2)
                + ln_factorial(n3 + 2);
            terms.push((ln_w, n1, n2, n3));
        }
    }
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let total = (n + 9) as f64;
    let (mut z, mut x3, mut b) = (0.0, 0.0, 0.0);
    for (ln_w, n1, n2, n3) in terms {
        let w = (ln_w - top).exp();
        z += w;
        x3 += w * (n1 as f64 - n3 as f64) / total;
        b += w * (n2 as f64 + 3.0) / total;
    }
    (x3 / z, (1.0 - 3.0 * b / z) / SQRT3)
}
