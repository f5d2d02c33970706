//! Oracles and instance generators shared by the integration suites. Nothing
//! here calls into the FDR code paths it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact `p * m <= q * i` for positive finite doubles, by integer arithmetic
/// on the binary expansions.
pub fn exact_le(p: f64, m: usize, q: f64, i: usize) -> bool {
    let (pa, pe, _) = p.integer_decode();
    let (qa, qe, _) = q.integer_decode();
    let mut lhs = BigUint::from(pa) * BigUint::from(m);
    let mut rhs = BigUint::from(qa) * BigUint::from(i);
    if pe >= qe {
        lhs <<= (pe - qe) as usize;
    } else {
        rhs <<= (qe - pe) as usize;
    }
    lhs.cmp(&rhs) != Ordering::Greater
}

/// Brute force step-up: test every rank against `p_(i) <= q i / m` exactly
/// and return the largest passing rank (the maximal rejected prefix).
pub fn brute_force_k(sorted: &[f64], q: f64) -> usize {
    let m = sorted.len();
    let mut k = 0;
    for i in 1..=m {
        if exact_le(sorted[i - 1], m, q, i) {
            k = i;
        }
    }
    k
}

/// Standard normal CDF by composite Simpson integration of the density,
/// `Phi(x) = 1/2 + int_0^x phi`. Returns values on the grid
/// `x_k = -8 + k * step` for `k = 0..=n`.
pub fn normal_cdf_grid(n: usize, step: f64, sub: usize) -> Vec<(f64, f64)> {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let simpson = |a: f64, b: f64| {
        let h = (b - a) / sub as f64;
        let mut s = phi(a) + phi(b);
        for j in 1..sub {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            s += w * phi(a + j as f64 * h);
        }
        s * h / 3.0
    };
    // integrate outward from 0 in both directions so every grid value is
    // 1/2 +- a single accumulated integral
    let half = n / 2;
    let mut out = vec![(0.0, 0.0); n + 1];
    out[half] = (-8.0 + half as f64 * step, 0.5);
    let mut acc = 0.0;
    for k in half + 1..=n {
        let (a, b) = ((k - 1 - half) as f64 * step, (k - half) as f64 * step);
        acc += simpson(a, b);
        out[k] = (-8.0 + k as f64 * step, 0.5 + acc);
    }
    let mut acc = 0.0;
    for k in (0..half).rev() {
        let (a, b) = ((k + 1) as f64 * step - 8.0, k as f64 * step - 8.0);
        acc += simpson(b, a);
        out[k] = (-8.0 + k as f64 * step, 0.5 - acc);
    }
    out
}

/// Random p-values with a mix of uniform, concentrated-small, decimal-grid
/// and tied entries, all in (0, 1].
pub fn random_pvalues(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let shape: f64 = [1.0, 2.0, 4.0, 8.0][rng.gen_range(0..4)];
    let mut p: Vec<f64> = Vec::with_capacity(m);
    for _ in 0..m {
        if !p.is_empty() && rng.gen_bool(0.15) {
            let j = rng.gen_range(0..p.len());
            p.push(p[j]);
        } else if rng.gen_bool(0.2) {
            // decimal grid values land on thresholds like q i / m in decimal
            p.push(rng.gen_range(1..=20) as f64 / 20.0);
        } else {
            let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
            p.push(u.powf(shape).max(1e-300));
        }
    }
    p
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One-sample Kolmogorov–Smirnov distance from Uniform(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Read-off set: 136 tests at 0.199, then `0.35 i / 200`.
pub fn plateau_cut_set() -> Vec<f64> {
    (1..=200)
        .map(|i| {
            if i <= 136 {
                0.199
            } else {
                0.35 * i as f64 / 200.0
            }
        })
        .collect()
}

/// Minimum-FDR set: 70 tests at 0.089, then `0.3 i / 200`, so the
/// smallest `m p / i` sits at rank 70.
pub fn plateau_min_set() -> Vec<f64> {
    (1..=200)
        .map(|i| {
            if i <= 70 {
                0.089
            } else {
                0.3 * i as f64 / 200.0
            }
        })
        .collect()
}
