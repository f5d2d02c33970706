//! False discovery rate analysis drawn on a quantile-quantile plot.
//!
//! The crate turns a set of p-values into Benjamini–Hochberg quantities
//! (step-up cut, q-values, minimum attainable FDR, implied significance
//! threshold, discovery proportion) and into a plot model where each FDR
//! level `q` is a line of slope one with intercept `-log10(q)` in
//! `-log10` space. A point sits on or above that line exactly when
//! `p_(i) <= q * i / m`, so the step-up rule can be read straight off the
//! picture: the largest significant p-value is the first point on or above
//! the line reading from the left.
//!
//! Core math is generic over [`Scalar`] (`f32` or `f64`). The aliases at the
//! crate root fix the scalar to `f64`, which is what the renderer, the
//! simulator and the command-line tool use.
//!
//! ```
//! use qqfdr::{bh_stepup, order_tests, q_values, PValueSet};
//!
//! let set = PValueSet::from_pvalues(vec![0.04, 0.005, 0.03, 0.01]).unwrap();
//! let ordered = order_tests(&set);
//! let result = bh_stepup(&ordered, 0.05).unwrap();
//! assert_eq!(result.k_star, 4);
//! assert_eq!(result.alpha_implied, Some(0.04));
//! assert!((q_values(&ordered).values()[0] - 0.02).abs() < 1e-15);
//! ```

pub mod fdr;
pub mod geometry;
pub mod ingest;
pub mod render;
pub mod report;
pub mod scalar;
pub mod simulate;

pub use fdr::{
    bh_stepup, by_stepup, harmonic_number, min_attainable_fdr, min_attainable_fdr_with, q_values,
    q_values_with, stepup, FdrError, Method, MinFdr,
};
pub use geometry::{
    annotate_readouts, build_plot_model, color_for_q, expected_position, first_above_from_left,
    point_on_or_above, GeometryError, Rgb,
};
pub use ingest::{order_tests, parse_pvalues, Column, Format, IngestError};
pub use render::{render_svg, RenderError, RenderOptions, Viewport};
pub use report::{write_pvalues_csv, write_report};
pub use scalar::Scalar;
pub use simulate::{
    normal_cdf, simulate_pvalues, standard_normal_stream, two_sided_p, Pattern, SimError, SimSpec,
    StandardNormalStream,
};

/// A labeled p-value in double precision.
pub type TestRecord = ingest::TestRecord<f64>;
/// A validated dataset of p-values in double precision.
pub type PValueSet = ingest::PValueSet<f64>;
/// Ascending p-values with ranks `1..=m`, double precision.
pub type OrderedTests = ingest::OrderedTests<f64>;
/// Parsing options for double-precision input.
pub type ParseOptions = ingest::ParseOptions<f64>;
/// One step-up analysis in double precision.
pub type FdrResult = fdr::FdrResult<f64>;
/// Per-rank q-values in double precision.
pub type QValueVector = fdr::QValueVector<f64>;
/// Harmonic correction factor in double precision.
pub type HarmonicCorrection = fdr::HarmonicCorrection<f64>;
/// A plotted test in double precision.
pub type PlotPoint = geometry::PlotPoint<f64>;
/// An FDR line in double precision.
pub type FdrLine = geometry::FdrLine<f64>;
/// Cut-point read-offs in double precision.
pub type Readouts = geometry::Readouts<f64>;
/// The full plot model in double precision.
pub type QQPlotModel = geometry::QQPlotModel<f64>;
