//! Plot-space model of the FDR-annotated Q-Q plot.
//!
//! Rank `i` of `m` is placed at `x = -log10(i / m)` and its p-value at
//! `y = -log10(p_(i))`. The FDR line for level `q` has slope 1 and
//! intercept `-log10(q)`, so `y >= x + intercept` is the BH inequality
//! `p_(i) <= q i / m` rewritten. The plotting position is `i / m` rather
//! than `i / (m + 1)`; with the latter the lines no longer coincide with
//! the step-up thresholds.

use std::fmt;

use thiserror::Error;

use crate::fdr::{bh_stepup, ratio_le, FdrError, FdrResult, MinFdr, QValueVector};
use crate::ingest::OrderedTests;
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    InvalidLevel(#[from] FdrError),
    #[error("q-value vector has {qvals} entries but the dataset has {m}")]
    LengthMismatch { m: usize, qvals: usize },
    #[error("no discoveries at q={0}")]
    NoDiscoveries(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }
}

impl fmt::Display for Rgb {
    /// `#rrggbb`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

/// Color at (and above) q = 0.5.
pub const LIGHT_RED: Rgb = Rgb::new(255, 214, 214);
/// Color at (and below) q = 0.05.
pub const DEEP_RED: Rgb = Rgb::new(139, 0, 0);
/// `-log10` of the light anchor level, 0.5.
const LIGHT_ANCHOR: f64 = std::f64::consts::LOG10_2;
/// Distance in `-log10` units from the light anchor to the deep anchor (0.05).
const ANCHOR_SPAN: f64 = 1.0;
pub const AXIS_PADDING: f64 = 1.05;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint<T> {
    pub rank: usize,
    pub id: String,
    pub p: T,
    pub m: usize,
    pub x: T,
    pub y: T,
    pub q_value: T,
    pub color: Rgb,
    /// Rejected by BH at the model's reference level.
    pub significant: bool,
}

/// Line of slope 1 with intercept `-log10(q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrLine<T> {
    pub q: T,
    pub intercept: T,
}

impl<T: Scalar> FdrLine<T> {
    pub fn new(q: T) -> Result<Self, FdrError> {
        if !(q > T::zero() && q <= T::one()) {
            return Err(FdrError::InvalidLevel(q.to_string()));
        }
        Ok(Self {
            q,
            intercept: neg_log10(q),
        })
    }

    /// The null line `y = x`.
    pub fn h0() -> Self {
        Self {
            q: T::one(),
            intercept: T::zero(),
        }
    }

    pub fn slope(&self) -> T {
        T::one()
    }

    pub fn y_at(&self, x: T) -> T {
        x + self.intercept
    }
}

/// Read-offs at the step-up cut. Coordinates are absent when nothing is
/// rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Readouts<T> {
    pub k_star: usize,
    pub alpha_implied: Option<T>,
    pub proportion_significant: T,
    /// `-log10(k_star / m)`
    pub x_at_cut: Option<T>,
    /// `-log10(alpha_implied)`
    pub y_at_cut: Option<T>,
    pub q_min: T,
    pub k_at_min: usize,
}

impl<T: Scalar> Readouts<T> {
    pub fn new(result: &FdrResult<T>, min: MinFdr<T>) -> Self {
        let m = result.m();
        let cut = result.alpha_implied.filter(|_| result.k_star > 0);
        Self {
            k_star: result.k_star,
            alpha_implied: cut,
            proportion_significant: result.proportion_significant,
            x_at_cut: cut.map(|_| expected_position(result.k_star, m)),
            y_at_cut: cut.map(neg_log10),
            q_min: min.q_min,
            k_at_min: min.k_at_min,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QQPlotModel<T> {
    /// Ascending rank, i.e. descending x.
    pub points: Vec<PlotPoint<T>>,
    pub h0_line: FdrLine<T>,
    /// The reference line first, then any extra levels in the order given.
    pub fdr_lines: Vec<FdrLine<T>>,
    pub reference_q: T,
    pub readouts: Readouts<T>,
    pub axis_max_x: T,
    pub axis_max_y: T,
}

impl<T: Scalar> QQPlotModel<T> {
    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Points in reading order (ascending x).
    pub fn points_left_to_right(&self) -> impl Iterator<Item = &PlotPoint<T>> {
        self.points.iter().rev()
    }
}

fn neg_log10<T: Scalar>(v: T) -> T {
    // 0 - log10 keeps log10(1) at +0
    T::zero() - v.log10()
}

/// `-log10(i / m)`, the plotting position of rank `i`.
pub fn expected_position<T: Scalar>(rank: usize, m: usize) -> T {
    debug_assert!(rank >= 1 && rank <= m);
    neg_log10(T::from_count(rank) / T::from_count(m))
}

/// Whether the point lies on or above the line. Decided on the
/// untransformed inequality `p_(i) <= q i / m`, using the same expression as
/// the step-up code, so the answer never depends on `log10` rounding.
pub fn point_on_or_above<T: Scalar>(point: &PlotPoint<T>, line: &FdrLine<T>) -> bool {
    ratio_le(point.p, point.rank, point.m, T::one(), line.q)
}

/// The same test carried out in plot space, `y >= x + intercept`. Agrees
/// with [`point_on_or_above`] except within rounding of the line.
pub fn point_on_or_above_in_plot_space<T: Scalar>(point: &PlotPoint<T>, line: &FdrLine<T>) -> bool {
    point.y >= line.y_at(point.x)
}

/// Reading from the left, the rank of the first point on or above `line`,
/// or 0 when every point is below it. `points` must be in ascending x.
pub fn first_above_from_left<'a, T, I>(points: I, line: &FdrLine<T>) -> usize
where
    T: Scalar,
    I: IntoIterator<Item = &'a PlotPoint<T>>,
{
    let mut last_x = None;
    for point in points {
        debug_assert!(last_x.is_none_or(|x| point.x >= x), "points out of order");
        last_x = Some(point.x);
        if point_on_or_above(point, line) {
            return point.rank;
        }
    }
    0
}

/// Light red for `q >= 0.5`, deep red for `q <= 0.05`, linear in `-log10(q)`
/// in between.
pub fn color_for_q<T: Scalar>(q_value: T) -> Rgb {
    let t = ((-q_value.as_f64().log10() - LIGHT_ANCHOR) / ANCHOR_SPAN).clamp(0.0, 1.0);
    let mix = |light: u8, deep: u8| {
        let v = f64::from(light) + (f64::from(deep) - f64::from(light)) * t;
        v.round() as u8
    };
    Rgb::new(
        mix(LIGHT_RED.r, DEEP_RED.r),
        mix(LIGHT_RED.g, DEEP_RED.g),
        mix(LIGHT_RED.b, DEEP_RED.b),
    )
}

/// Assembles points, lines and read-offs. Significance comes from the BH
/// cut at `reference_q`: every rank up to the cut is significant even when
/// its own point falls below the line.
pub fn build_plot_model<T: Scalar>(
    ordered: &OrderedTests<T>,
    qvals: &QValueVector<T>,
    reference_q: T,
    extra_q_lines: &[T],
) -> Result<QQPlotModel<T>, GeometryError> {
    let m = ordered.m();
    if qvals.m() != m {
        return Err(GeometryError::LengthMismatch {
            m,
            qvals: qvals.m(),
        });
    }
    let mut fdr_lines = vec![FdrLine::new(reference_q)?];
    for &q in extra_q_lines {
        let line = FdrLine::new(q)?;
        if !fdr_lines.iter().any(|l| l.q == q) {
            fdr_lines.push(line);
        }
    }
    let result = bh_stepup(ordered, reference_q)?;

    let points: Vec<PlotPoint<T>> = ordered
        .entries()
        .iter()
        .map(|e| {
            let q_value = qvals.get(e.rank);
            PlotPoint {
                rank: e.rank,
                id: e.id.clone(),
                p: e.p,
                m,
                x: expected_position(e.rank, m),
                y: neg_log10(e.p),
                q_value,
                color: color_for_q(q_value),
                significant: result.rejected[e.rank - 1],
            }
        })
        .collect();

    let max_x = points.iter().fold(T::zero(), |acc, p| acc.max(p.x));
    let max_y = points.iter().fold(T::zero(), |acc, p| acc.max(p.y));
    let pad = T::of(AXIS_PADDING);
    // an axis with no spread borrows the other one's range
    let (axis_max_x, axis_max_y) = match (max_x > T::zero(), max_y > T::zero()) {
        (true, true) => (max_x * pad, max_y * pad),
        (true, false) => (max_x * pad, max_x * pad),
        (false, true) => (max_y * pad, max_y * pad),
        (false, false) => (T::zero(), T::zero()),
    };

    let points_min = MinFdr {
        q_min: T::zero(),
        k_at_min: 0,
    };
    let mut model = QQPlotModel {
        points,
        h0_line: FdrLine::h0(),
        fdr_lines,
        reference_q,
        readouts: Readouts::new(&result, points_min),
        axis_max_x,
        axis_max_y,
    };
    let min = min_from_points(&model);
    model.readouts = Readouts::new(&result, min);
    Ok(model)
}

fn min_from_points<T: Scalar>(model: &QQPlotModel<T>) -> MinFdr<T> {
    let q_min = model.points.first().map_or(T::one(), |p| p.q_value);
    // by duality, the ranks with q_i <= q_min are exactly the BH cut at q_min
    let k_at_min = model.points.iter().filter(|p| p.q_value <= q_min).count();
    MinFdr { q_min, k_at_min }
}

/// Reads the cut coordinates of `result` off the model.
pub fn annotate_readouts<T: Scalar>(
    model: &QQPlotModel<T>,
    result: &FdrResult<T>,
) -> Result<Readouts<T>, GeometryError> {
    if result.m() != model.m() {
        return Err(GeometryError::LengthMismatch {
            m: model.m(),
            qvals: result.m(),
        });
    }
    if result.k_star == 0 {
        return Err(GeometryError::NoDiscoveries(result.q.to_string()));
    }
    Ok(Readouts::new(result, min_from_points(model)))
}
