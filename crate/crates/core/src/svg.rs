//! Deterministic SVG rendering: fixed canvas, fixed styling, fixed
//! 3-decimal number formatting, so identical input yields identical bytes.

use crate::error::{Error, Result};

/// Fixed render style. The defaults match the committed golden figures.
#[derive(Debug, Clone)]
pub struct Style {
    pub width: u32,
    pub height: u32,
    pub margin: f64,
    pub background: String,
    pub stroke: String,
    pub stroke_width: f64,
    pub dot_radius: f64,
    pub axes: bool,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            width: 800,
            height: 600,
            margin: 40.0,
            background: "#ffffff".into(),
            stroke: "#1f77b4".into(),
            stroke_width: 1.5,
            dot_radius: 1.5,
            axes: true,
        }
    }
}

/// One plottable series: connected samples or a point cloud.
#[derive(Debug, Clone)]
pub enum Series {
    Polyline(Vec<(f64, f64)>),
    Dots(Vec<(f64, f64)>),
}

impl Series {
    fn points(&self) -> &[(f64, f64)] {
        match self {
            Series::Polyline(p) | Series::Dots(p) => p,
        }
    }
}

/// Fixed-precision coordinate formatting; negative zero is normalized so
/// byte output is stable.
fn fmt(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// Renders series onto the fixed canvas. Errors on empty input or
/// non-finite samples.
pub fn render_svg(series: &[Series], style: &Style) -> Result<Vec<u8>> {
    if series.is_empty() || series.iter().all(|s| s.points().is_empty()) {
        return Err(Error::InvalidArgument("nothing to render".into()));
    }
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points() {
            if !(x.is_finite() && y.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite sample ({x}, {y})"
                )));
            }
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    // Pad 5% on each side; degenerate spans widen to a unit box.
    let xpad = if xmax > xmin {
        0.05 * (xmax - xmin)
    } else {
        0.5
    };
    let ypad = if ymax > ymin {
        0.05 * (ymax - ymin)
    } else {
        0.5
    };
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    let w = style.width as f64;
    let h = style.height as f64;
    let m = style.margin;
    let sx = |x: f64| m + (x - xmin) / (xmax - xmin) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - ymin) / (ymax - ymin) * (h - 2.0 * m);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        style.width, style.height, style.width, style.height
    ));
    out.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
        style.width, style.height, style.background
    ));
    if style.axes {
        if ymin < 0.0 && 0.0 < ymax {
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\" stroke-width=\"1.000\"/>\n",
                fmt(m), fmt(sy(0.0)), fmt(w - m), fmt(sy(0.0))
            ));
        }
        if xmin < 0.0 && 0.0 < xmax {
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\" stroke-width=\"1.000\"/>\n",
                fmt(sx(0.0)), fmt(m), fmt(sx(0.0)), fmt(h - m)
            ));
        }
    }
    for s in series {
        match s {
            Series::Polyline(points) => {
                out.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"",
                    style.stroke,
                    fmt(style.stroke_width)
                ));
                for (i, &(x, y)) in points.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(&fmt(sx(x)));
                    out.push(',');
                    out.push_str(&fmt(sy(y)));
                }
                out.push_str("\"/>\n");
            }
            Series::Dots(points) => {
                for &(x, y) in points {
                    out.push_str(&format!(
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
                        fmt(sx(x)),
                        fmt(sy(y)),
                        fmt(style.dot_radius),
                        style.stroke
                    ));
                }
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}
