//! Seeded synthetic p-value sets.
//!
//! Statistics follow a one-factor Gaussian model
//!
//! ```text
//! z_i = sqrt(rho) * Z0 + sqrt(1 - rho) * e_i + effect * [i is non-null]
//! ```
//!
//! with two-sided p-values `p_i = 2 (1 - Phi(|z_i|))`. `rho = 0` gives
//! independent tests (strong, isolated signals stand clear of the null
//! line); `rho > 0` makes the tests move together, which pulls the smallest
//! p-values back toward the null line and flattens the q-value sequence.
//!
//! # Random stream
//!
//! Uniforms come from ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`).
//! Each 64-bit output `w` becomes `u = ((w >> 11) + 1) * 2^-53`, in (0, 1].
//! Pairs of uniforms `(u1, u2)` become two normals by Box–Muller,
//! `r = sqrt(-2 ln u1)`, `r cos(2 pi u2)` then `r sin(2 pi u2)`. The shared
//! factor `Z0` is the first variate of the stream, followed by `e_1..e_m`.
//! Tests `1..=round(pi1 * m)` are the non-null ones.

use libm::erfc;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::ingest::{synthetic_id, PValueSet, TestRecord};

/// Floor applied to simulated p-values so they stay inside (0, 1].
pub const P_FLOOR: f64 = 1e-300;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Independent,
    Equicorrelated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub m: usize,
    pub pattern: Pattern,
    /// Fraction of non-null tests.
    pub pi1: f64,
    /// Mean shift of the non-null statistics.
    pub effect: f64,
    /// Equicorrelation; must be 0 for [`Pattern::Independent`].
    pub rho: f64,
    pub seed: u64,
}

impl SimSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidSpec(msg));
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.pi1) {
            return bad(format!("pi1 must be in [0,1], got {}", self.pi1));
        }
        if !(self.effect.is_finite() && self.effect >= 0.0) {
            return bad(format!(
                "effect must be finite and >= 0, got {}",
                self.effect
            ));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return bad(format!("rho must be in [0,1), got {}", self.rho));
        }
        if self.pattern == Pattern::Independent && self.rho != 0.0 {
            return bad(format!(
                "rho must be 0 for the independent pattern, got {}",
                self.rho
            ));
        }
        Ok(())
    }

    pub fn non_null_count(&self) -> usize {
        (self.pi1 * self.m as f64).round() as usize
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Two-sided p-value of a standard normal statistic, `2 (1 - Phi(|z|))`,
/// evaluated as `erfc(|z| / sqrt 2)` so the tail keeps full precision.
pub fn two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Deterministic standard-normal variates; see the module docs for the
/// exact construction.
#[derive(Debug, Clone)]
pub struct StandardNormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

pub fn standard_normal_stream(seed: u64) -> StandardNormalStream {
    StandardNormalStream {
        rng: ChaCha20Rng::seed_from_u64(seed),
        spare: None,
    }
}

impl StandardNormalStream {
    fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl Iterator for StandardNormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if let Some(z) = self.spare.take() {
            return Some(z);
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        Some(r * theta.cos())
    }
}

pub fn simulate_pvalues(spec: &SimSpec) -> Result<PValueSet<f64>, SimError> {
    spec.validate()?;
    let mut normals = standard_normal_stream(spec.seed);
    let shared = normals.next().expect("infinite stream");
    let (load, own) = (spec.rho.sqrt(), (1.0 - spec.rho).sqrt());
    let non_null = spec.non_null_count();

    let records = (1..=spec.m)
        .zip(&mut normals)
        .map(|(row, noise)| {
            let shift = if row <= non_null { spec.effect } else { 0.0 };
            let z = load * shared + own * noise + shift;
            TestRecord {
                id: synthetic_id(row),
                p: two_sided_p(z).max(P_FLOOR),
            }
        })
        .collect();
    Ok(PValueSet::new(records).expect("simulated p-values lie in (0, 1]"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SimSpec {
        SimSpec {
            m: 200,
            pattern: Pattern::Independent,
            pi1: 0.05,
            effect: 3.5,
            rho: 0.0,
            seed: 42,
        }
    }

    #[test]
    fn cdf_fixed_points() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-12);
        for x in [0.1, 0.7, 1.3, 2.9, 4.4, 7.5] {
            assert!((normal_cdf(-x) - (1.0 - normal_cdf(x))).abs() <= 1e-12);
        }
        assert!(normal_cdf(-40.0) >= 0.0);
        assert!(normal_cdf(40.0) <= 1.0);
    }

    #[test]
    fn two_sided_bounds() {
        assert_eq!(two_sided_p(0.0), 1.0);
        assert!((two_sided_p(1.96) - 0.049_995_790_296_440_8).abs() < 1e-12);
        assert_eq!(two_sided_p(-2.5), two_sided_p(2.5));
    }

    #[test]
    fn stream_is_reproducible() {
        let a: Vec<f64> = standard_normal_stream(7).take(1000).collect();
        let b: Vec<f64> = standard_normal_stream(7).take(1000).collect();
        assert_eq!(a, b);
        let c: Vec<f64> = standard_normal_stream(8).take(1000).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn simulation_is_reproducible() {
        let a = simulate_pvalues(&spec()).unwrap();
        let b = simulate_pvalues(&spec()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), 200);
        assert_eq!(a.records()[0].id, "test_1");
    }

    #[test]
    fn spec_validation() {
        let mut s = spec();
        s.rho = 0.5;
        assert!(simulate_pvalues(&s).is_err());
        s.pattern = Pattern::Equicorrelated;
        assert!(simulate_pvalues(&s).is_ok());
        s.rho = 1.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.m = 0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.pi1 = 1.2;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.effect = -1.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.effect = f64::NAN;
        assert!(s.validate().is_err());
    }

    #[test]
    fn non_null_count_rounds() {
        let mut s = spec();
        assert_eq!(s.non_null_count(), 10);
        s.m = 7;
        s.pi1 = 0.5;
        assert_eq!(s.non_null_count(), 4);
    }

    #[test]
    fn huge_effect_hits_floor() {
        let mut s = spec();
        s.m = 3;
        s.pi1 = 1.0;
        s.effect = 60.0;
        let set = simulate_pvalues(&s).unwrap();
        assert!(set.pvalues().iter().all(|&p| p == P_FLOOR));
    }
}
