//! Deterministic SVG rendering of a [`QQPlotModel`].
//!
//! Element order is fixed: background, axes with ticks and labels, the
//! dashed null line, the solid FDR lines with their labels, the points in
//! ascending rank, the cut-point callouts, then the legend. Numbers are
//! printed with a fixed number of decimals and `.` as the separator, and
//! nothing time- or environment-dependent is written.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{FdrLine, QQPlotModel};
use crate::report::{round_sig, shortest};
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("plot has no extent: every point sits at the origin (m = 1 and p = 1)")]
    DegenerateExtent,
    #[error("invalid render options: {0}")]
    InvalidOptions(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub width_px: u32,
    pub height_px: u32,
    pub margin_px: u32,
    pub point_radius_px: f64,
    /// Decimal places for coordinates.
    pub precision: usize,
    /// Upper end of the y axis. Points above it are drawn as upward
    /// triangles at the top edge. Defaults to the model's own bound.
    pub y_limit: Option<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width_px: 720,
            height_px: 720,
            margin_px: 60,
            point_radius_px: 3.0,
            precision: 4,
            y_limit: None,
        }
    }
}

impl RenderOptions {
    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: String| Err(RenderError::InvalidOptions(m));
        if self.width_px == 0 || self.height_px == 0 {
            return bad("width and height must be positive".into());
        }
        if 2 * self.margin_px >= self.width_px.min(self.height_px) {
            return bad("margin must be less than half the smaller dimension".into());
        }
        if !(self.point_radius_px.is_finite() && self.point_radius_px > 0.0) {
            return bad("point radius must be positive".into());
        }
        if let Some(y) = self.y_limit {
            if !(y.is_finite() && y > 0.0) {
                return bad("y limit must be positive".into());
            }
        }
        Ok(())
    }
}

/// Affine map between data coordinates and SVG pixels. The data box
/// `[0, x_max] x [0, y_max]` fills the area inside the margins, with y
/// pointing up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x_max: f64,
    pub y_max: f64,
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl Viewport {
    pub fn for_model<T: Scalar>(
        model: &QQPlotModel<T>,
        opts: &RenderOptions,
    ) -> Result<Self, RenderError> {
        opts.validate()?;
        let x_max = model.axis_max_x.as_f64();
        let y_max = opts.y_limit.unwrap_or(model.axis_max_y.as_f64());
        if !(x_max > 0.0 && y_max > 0.0) {
            return Err(RenderError::DegenerateExtent);
        }
        let margin = f64::from(opts.margin_px);
        Ok(Self {
            x_max,
            y_max,
            left: margin,
            right: f64::from(opts.width_px) - margin,
            top: margin,
            bottom: f64::from(opts.height_px) - margin,
        })
    }

    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.left + x / self.x_max * (self.right - self.left),
            self.bottom - y / self.y_max * (self.bottom - self.top),
        )
    }

    pub fn from_pixel(&self, px: f64, py: f64) -> (f64, f64) {
        (
            (px - self.left) / (self.right - self.left) * self.x_max,
            (self.bottom - py) / (self.bottom - self.top) * self.y_max,
        )
    }

    /// Visible part of `line` inside the data box, or `None`.
    fn clip(&self, line: &FdrLine<f64>) -> Option<((f64, f64), (f64, f64))> {
        let c = line.intercept;
        let x_end = self.x_max.min(self.y_max - c);
        (c < self.y_max && x_end > 0.0).then_some(((0.0, c), (x_end, x_end + c)))
    }
}

struct Svg {
    out: String,
    precision: usize,
}

impl Svg {
    fn num(&self, v: f64) -> String {
        let s = format!("{:.*}", self.precision, v);
        // -0.0000 -> 0.0000
        if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
            s[1..].to_string()
        } else {
            s
        }
    }

    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }
}

fn escape(text: &str) -> String {
    let mut s = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => s.push_str("&amp;"),
            '<' => s.push_str("&lt;"),
            '>' => s.push_str("&gt;"),
            '"' => s.push_str("&quot;"),
            _ => s.push(c),
        }
    }
    s
}

/// Four significant digits, shortest form.
fn readout(v: f64) -> String {
    shortest(round_sig(v, 4))
}

fn level(v: f64) -> String {
    shortest(round_sig(v, 6))
}

/// Ticks at a 1-2-5 step giving roughly five intervals.
fn ticks(max: f64) -> (Vec<f64>, usize) {
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let count = (max / step + 1e-9).floor() as usize;
    ((0..=count).map(|k| k as f64 * step).collect(), decimals)
}

const FONT: &str = r#"font-family="sans-serif""#;

pub fn render_svg<T: Scalar>(
    model: &QQPlotModel<T>,
    opts: &RenderOptions,
) -> Result<Vec<u8>, RenderError> {
    let vp = Viewport::for_model(model, opts)?;
    let mut svg = Svg {
        out: String::new(),
        precision: opts.precision,
    };
    let (w, h) = (opts.width_px, opts.height_px);

    svg.line(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    svg.line(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    ));
    svg.line(&format!(
        r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##
    ));

    // axes
    let (l, r, t, b) = (
        svg.num(vp.left),
        svg.num(vp.right),
        svg.num(vp.top),
        svg.num(vp.bottom),
    );
    svg.line(r##"<g id="axes" stroke="#000000" stroke-width="1" fill="none">"##);
    svg.line(&format!(r#"<path d="M{l} {b} H{r} M{l} {b} V{t}"/>"#));
    let (xticks, xdec) = ticks(vp.x_max);
    let (yticks, ydec) = ticks(vp.y_max);
    let mut d = String::new();
    for &x in &xticks {
        let (px, py) = vp.to_pixel(x, 0.0);
        let _ = write!(d, "M{} {} v5 ", svg.num(px), svg.num(py));
    }
    for &y in &yticks {
        let (px, py) = vp.to_pixel(0.0, y);
        let _ = write!(d, "M{} {} h-5 ", svg.num(px), svg.num(py));
    }
    svg.line(&format!(r#"<path d="{}"/>"#, d.trim_end()));
    svg.line("</g>");
    svg.line(&format!(
        r##"<g id="tick-labels" {FONT} font-size="11" fill="#000000">"##
    ));
    for &x in &xticks {
        let (px, py) = vp.to_pixel(x, 0.0);
        let line = format!(
            r#"<text x="{}" y="{}" text-anchor="middle">{:.*}</text>"#,
            svg.num(px),
            svg.num(py + 18.0),
            xdec,
            x
        );
        svg.line(&line);
    }
    for &y in &yticks {
        let (px, py) = vp.to_pixel(0.0, y);
        let line = format!(
            r#"<text x="{}" y="{}" text-anchor="end">{:.*}</text>"#,
            svg.num(px - 8.0),
            svg.num(py + 4.0),
            ydec,
            y
        );
        svg.line(&line);
    }
    svg.line("</g>");
    let mid_x = svg.num((vp.left + vp.right) / 2.0);
    let mid_y = svg.num((vp.top + vp.bottom) / 2.0);
    let xl_y = svg.num(vp.bottom + 42.0);
    let yl_x = svg.num(vp.left - 42.0);
    svg.line(&format!(
        r#"<text id="x-label" x="{mid_x}" y="{xl_y}" {FONT} font-size="13" text-anchor="middle">Expected −log10(p)</text>"#
    ));
    svg.line(&format!(
        r#"<text id="y-label" x="{yl_x}" y="{mid_y}" {FONT} font-size="13" text-anchor="middle" transform="rotate(-90 {yl_x} {mid_y})">Observed −log10(p)</text>"#
    ));

    // lines
    let h0 = FdrLine::<f64>::h0();
    if let Some(((x0, y0), (x1, y1))) = vp.clip(&h0) {
        let (a, b2) = (vp.to_pixel(x0, y0), vp.to_pixel(x1, y1));
        svg.line(&format!(
            r##"<line id="h0-line" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#555555" stroke-width="1" stroke-dasharray="6 4"/>"##,
            svg.num(a.0), svg.num(a.1), svg.num(b2.0), svg.num(b2.1)
        ));
    }
    let mut off_scale = Vec::new();
    for line in &model.fdr_lines {
        let line = FdrLine {
            q: line.q.as_f64(),
            intercept: line.intercept.as_f64(),
        };
        let label = format!("FDR q={}", level(line.q));
        match vp.clip(&line) {
            Some(((x0, y0), (x1, y1))) => {
                let (a, b2) = (vp.to_pixel(x0, y0), vp.to_pixel(x1, y1));
                svg.line(&format!(
                    r##"<line class="fdr-line" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#b22222" stroke-width="1.5"/>"##,
                    svg.num(a.0), svg.num(a.1), svg.num(b2.0), svg.num(b2.1)
                ));
                svg.line(&format!(
                    r##"<text class="fdr-label" x="{}" y="{}" {FONT} font-size="11" fill="#b22222" text-anchor="end">{label}</text>"##,
                    svg.num(b2.0 - 4.0),
                    svg.num(b2.1 - 6.0)
                ));
            }
            None => off_scale.push(label),
        }
    }

    // points
    let radius = svg.num(opts.point_radius_px);
    let mut clipped = 0usize;
    svg.line(r#"<g id="points">"#);
    for p in &model.points {
        let (x, y) = (p.x.as_f64(), p.y.as_f64());
        let stroke = if p.significant { "1.2" } else { "0.4" };
        let title = format!(
            "<title>{} p={} q={}</title>",
            escape(&p.id),
            readout(p.p.as_f64()),
            readout(p.q_value.as_f64())
        );
        if y > vp.y_max {
            clipped += 1;
            let (px, py) = vp.to_pixel(x, vp.y_max);
            let s = opts.point_radius_px * 1.5;
            svg.line(&format!(
                r##"<polygon class="clipped" points="{},{} {},{} {},{}" fill="{}" stroke="#000000" stroke-width="{stroke}">{title}</polygon>"##,
                svg.num(px), svg.num(py - s),
                svg.num(px - s), svg.num(py + s * 0.5),
                svg.num(px + s), svg.num(py + s * 0.5),
                p.color
            ));
        } else {
            let (px, py) = vp.to_pixel(x, y);
            svg.line(&format!(
                r##"<circle cx="{}" cy="{}" r="{radius}" fill="{}" stroke="#000000" stroke-width="{stroke}" data-rank="{}">{title}</circle>"##,
                svg.num(px),
                svg.num(py),
                p.color,
                p.rank
            ));
        }
    }
    svg.line("</g>");

    // callouts
    let ro = &model.readouts;
    let q_ref = level(model.reference_q.as_f64());
    if let (Some(alpha), Some(xc), Some(yc)) = (ro.alpha_implied, ro.x_at_cut, ro.y_at_cut) {
        let (xc, yc) = (xc.as_f64(), yc.as_f64().min(vp.y_max));
        let (o_x, o_y) = vp.to_pixel(0.0, yc);
        let (c_x, c_y) = vp.to_pixel(xc, yc);
        let (_, base_y) = vp.to_pixel(xc, 0.0);
        svg.line(r#"<g id="callouts">"#);
        svg.line(&format!(
            r##"<path d="M{} {} H{} V{}" fill="none" stroke="#1f4e79" stroke-width="1" stroke-dasharray="2 3"/>"##,
            svg.num(o_x),
            svg.num(o_y),
            svg.num(c_x),
            svg.num(base_y)
        ));
        svg.line(&format!(
            r##"<text id="alpha-callout" x="{}" y="{}" {FONT} font-size="11" fill="#1f4e79">α = {} (y = {})</text>"##,
            svg.num(o_x + 6.0),
            svg.num(c_y - 6.0),
            readout(alpha.as_f64()),
            readout(ro.y_at_cut.map_or(0.0, |v| v.as_f64()))
        ));
        svg.line(&format!(
            r##"<text id="proportion-callout" x="{}" y="{}" {FONT} font-size="11" fill="#1f4e79">discoveries = {}/{} = {} (x = {})</text>"##,
            svg.num(c_x + 6.0),
            svg.num(base_y - 6.0),
            ro.k_star,
            model.m(),
            readout(ro.proportion_significant.as_f64()),
            readout(xc)
        ));
        svg.line("</g>");
    }

    // legend
    let mut notes = Vec::new();
    if ro.k_star == 0 {
        notes.push(format!("no discoveries at q={q_ref}"));
    } else {
        notes.push(format!(
            "k*={} of m={} significant at FDR q={q_ref}",
            ro.k_star,
            model.m()
        ));
    }
    notes.push(format!(
        "minimum attainable FDR = {} ({} tests)",
        readout(ro.q_min.as_f64()),
        ro.k_at_min
    ));
    for label in off_scale {
        notes.push(format!("{label} is above the plotted range"));
    }
    if clipped > 0 {
        notes.push(format!(
            "▲ {clipped} point(s) above y = {} drawn at the top edge",
            readout(vp.y_max)
        ));
    }
    svg.line(&format!(
        r##"<g id="legend" {FONT} font-size="11" fill="#000000">"##
    ));
    let lx = vp.left + 10.0;
    for (i, note) in notes.iter().enumerate() {
        svg.line(&format!(
            r#"<text x="{}" y="{}">{}</text>"#,
            svg.num(lx),
            svg.num(vp.top + 14.0 * (i as f64 + 1.0)),
            escape(note)
        ));
    }
    let key_y = vp.top + 14.0 * (notes.len() as f64 + 1.0);
    let swatches = [(0.5, "q≥0.5"), (0.05, "q≤0.05")];
    for (i, (q, text)) in swatches.iter().enumerate() {
        let x = lx + 70.0 * i as f64;
        svg.line(&format!(
            r##"<rect x="{}" y="{}" width="8" height="8" fill="{}" stroke="#000000" stroke-width="0.4"/>"##,
            svg.num(x),
            svg.num(key_y - 8.0),
            crate::geometry::color_for_q(*q)
        ));
        svg.line(&format!(
            r#"<text x="{}" y="{}">{text}</text>"#,
            svg.num(x + 12.0),
            svg.num(key_y)
        ));
    }
    svg.line("</g>");
    svg.line("</svg>");
    Ok(svg.out.into_bytes())
}
