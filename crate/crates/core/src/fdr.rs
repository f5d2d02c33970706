//! Step-up procedures and q-values.
//!
//! The step-up inequality `p_(i) * m * c <= q * i` (with `c = 1` for
//! Benjamini–Hochberg and `c = H_m` for Benjamini–Yekutieli) is decided
//! exactly on the binary values of the operands by [`ratio_le`], so values
//! that sit on a threshold in decimal (`p = 0.1`, `q = 0.25`, `i/m = 2/5`)
//! are judged by what is actually stored rather than by how a product
//! happens to round. The per-rank ratio [`scaled_ratio`] is the exact
//! `p_(i) m c / i` rounded *up*, i.e. the smallest float `r` with
//! `ratio_le(.., r)`. For any float `q` that makes `ratio <= q` and
//! `ratio_le(.., q)` the same statement, so `{ i : q_i <= q }` equals the
//! step-up rejection set for every level.

use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::OrderedTests;
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum FdrError {
    #[error("q must be in (0,1], got {0}")]
    InvalidLevel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "BH")]
    Bh,
    #[serde(rename = "BY")]
    By,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bh => "BH",
            Method::By => "BY",
        })
    }
}

/// Outcome of one step-up analysis at level `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdrResult<T> {
    pub q: T,
    pub method: Method,
    /// Number of discoveries; ranks `1..=k_star` are rejected.
    pub k_star: usize,
    /// `p_(k_star)`, absent when nothing is rejected.
    pub alpha_implied: Option<T>,
    /// `k_star / m`.
    pub proportion_significant: T,
    /// Indexed by `rank - 1`.
    pub rejected: Vec<bool>,
}

impl<T: Scalar> FdrResult<T> {
    pub fn m(&self) -> usize {
        self.rejected.len()
    }
}

/// Per-rank q-values, nondecreasing and capped at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QValueVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> QValueVector<T> {
    /// Indexed by `rank - 1`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// The q-value at 1-based `rank`.
    pub fn get(&self, rank: usize) -> T {
        self.values[rank - 1]
    }
}

/// The harmonic number `H_m = 1 + 1/2 + ... + 1/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicCorrection<T> {
    pub m: usize,
    pub value: T,
}

/// Smallest achievable level and the number of discoveries made there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinFdr<T> {
    pub q_min: T,
    pub k_at_min: usize,
}

pub fn harmonic_number<T: Scalar>(m: usize) -> HarmonicCorrection<T> {
    let value = (1..=m).fold(T::zero(), |acc, j| acc + T::one() / T::from_count(j));
    HarmonicCorrection { m, value }
}

/// Exactly `p * m * correction <= q * rank`, for nonnegative finite
/// operands.
pub fn ratio_le<T: Scalar>(p: T, rank: usize, m: usize, correction: T, q: T) -> bool {
    let (pa, pe, _) = p.integer_decode();
    let (qa, qe, _) = q.integer_decode();
    let rhs = u128::from(qa) * rank as u128;
    if correction == T::one() {
        // 53-bit mantissa times a 64-bit count fits in 128 bits
        let lhs = u128::from(pa) * m as u128;
        shifted_le(lhs, i32::from(pe), rhs, i32::from(qe))
    } else {
        let (ca, ce, _) = correction.integer_decode();
        let lhs = BigUint::from(pa) * BigUint::from(m) * BigUint::from(ca);
        big_shifted_le(
            lhs,
            i32::from(pe) + i32::from(ce),
            BigUint::from(rhs),
            i32::from(qe),
        )
    }
}

/// `a * 2^ea <= b * 2^eb`.
fn shifted_le(a: u128, ea: i32, b: u128, eb: i32) -> bool {
    if a == 0 {
        return true;
    }
    if b == 0 {
        return false;
    }
    let d = ea - eb;
    if d >= 0 {
        let d = d.unsigned_abs();
        d <= a.leading_zeros() && (a << d) <= b
    } else {
        let d = d.unsigned_abs();
        d > b.leading_zeros() || a <= (b << d)
    }
}

fn big_shifted_le(a: BigUint, ea: i32, b: BigUint, eb: i32) -> bool {
    let d = ea - eb;
    if d >= 0 {
        (a << d.unsigned_abs()) <= b
    } else {
        a <= (b << d.unsigned_abs())
    }
}

/// `p * m * correction / rank`, rounded up to the next representable value:
/// the smallest `r` with `ratio_le(p, rank, m, correction, r)`. Never below
/// `p`, and exactly `p` at `rank == m` with no correction.
pub fn scaled_ratio<T: Scalar>(p: T, rank: usize, m: usize, correction: T) -> T {
    if p == T::zero() {
        return p;
    }
    let mut r = p * (T::from_count(m) / T::from_count(rank) * correction);
    // the rounded product is within a few ulps of the exact value
    while !ratio_le(p, rank, m, correction, r) {
        r = r.next_up();
    }
    loop {
        let below = r.next_down();
        if below > T::zero() && ratio_le(p, rank, m, correction, below) {
            r = below;
        } else {
            return r;
        }
    }
}

fn correction<T: Scalar>(method: Method, m: usize) -> T {
    match method {
        Method::Bh => T::one(),
        Method::By => harmonic_number::<T>(m).value,
    }
}

fn check_level<T: Scalar>(q: T) -> Result<(), FdrError> {
    if q > T::zero() && q <= T::one() {
        Ok(())
    } else {
        Err(FdrError::InvalidLevel(q.to_string()))
    }
}

/// Benjamini–Hochberg step-up at level `q`.
pub fn bh_stepup<T: Scalar>(ordered: &OrderedTests<T>, q: T) -> Result<FdrResult<T>, FdrError> {
    stepup(ordered, q, Method::Bh)
}

/// Benjamini–Yekutieli step-up: BH with thresholds divided by `H_m`.
pub fn by_stepup<T: Scalar>(ordered: &OrderedTests<T>, q: T) -> Result<FdrResult<T>, FdrError> {
    stepup(ordered, q, Method::By)
}

pub fn stepup<T: Scalar>(
    ordered: &OrderedTests<T>,
    q: T,
    method: Method,
) -> Result<FdrResult<T>, FdrError> {
    check_level(q)?;
    let m = ordered.m();
    let c = correction::<T>(method, m);
    let k_star = ordered
        .entries()
        .iter()
        .rev()
        .find(|e| ratio_le(e.p, e.rank, m, c, q))
        .map_or(0, |e| e.rank);
    let proportion_significant = if m == 0 {
        T::zero()
    } else {
        T::from_count(k_star) / T::from_count(m)
    };
    Ok(FdrResult {
        q,
        method,
        k_star,
        alpha_implied: (k_star > 0).then(|| ordered.p(k_star)),
        proportion_significant,
        rejected: (1..=m).map(|rank| rank <= k_star).collect(),
    })
}

/// Benjamini–Hochberg q-values: `q_i = min(1, min_{j >= i} m p_(j) / j)`.
pub fn q_values<T: Scalar>(ordered: &OrderedTests<T>) -> QValueVector<T> {
    q_values_with(ordered, Method::Bh)
}

/// q-values for either method. For BY the cap at 1 can bind, in which case
/// a rank with `q_i = 1` is not rejected by [`by_stepup`] at `q = 1`; below
/// 1 the two always agree.
pub fn q_values_with<T: Scalar>(ordered: &OrderedTests<T>, method: Method) -> QValueVector<T> {
    let m = ordered.m();
    let c = correction::<T>(method, m);
    let mut values = vec![T::zero(); m];
    let mut running = T::one();
    for e in ordered.entries().iter().rev() {
        running = running.min(scaled_ratio(e.p, e.rank, m, c));
        values[e.rank - 1] = running;
    }
    QValueVector { values }
}

/// The lowest level at which anything is rejected (`q_1`) and the BH cut at
/// that level.
pub fn min_attainable_fdr<T: Scalar>(ordered: &OrderedTests<T>) -> MinFdr<T> {
    min_attainable_fdr_with(ordered, Method::Bh)
}

pub fn min_attainable_fdr_with<T: Scalar>(ordered: &OrderedTests<T>, method: Method) -> MinFdr<T> {
    let q_min = q_values_with(ordered, method).get(1);
    let k_at_min = stepup(ordered, q_min, method)
        .expect("q_1 lies in (0, 1]")
        .k_star;
    MinFdr { q_min, k_at_min }
}
