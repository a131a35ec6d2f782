//! Reproducible figures: fixed sampling plans rendered through the
//! deterministic SVG backend, each with a JSON sidecar recording its
//! parameters.

use serde::Serialize;

use crate::error::Result;
use crate::expr::Expr;
use crate::microscope::{self, Frame};
use crate::svg::{render_svg, Series, Style};

/// Parameters recorded next to every figure.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub function: String,
    pub center: f64,
    pub halfwidth: f64,
    pub n_points: usize,
    pub depth: Option<u32>,
}

/// The curve of `sin(1/x)` sampled on `[-0.5, -0.001]` and `[0.001, 0.5]`.
pub fn fig5() -> Result<(Vec<u8>, Sidecar)> {
    const PER_SIDE: usize = 8001;
    let sample_side = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
        (0..PER_SIDE)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (PER_SIDE - 1) as f64;
                (x, (1.0 / x).sin())
            })
            .collect()
    };
    let series = vec![
        Series::Polyline(sample_side(-0.5, -0.001)),
        Series::Polyline(sample_side(0.001, 0.5)),
    ];
    let bytes = render_svg(&series, &Style::default())?;
    Ok((
        bytes,
        Sidecar {
            function: "sin(1/x)".into(),
            center: 0.0,
            halfwidth: 0.5,
            n_points: 2 * PER_SIDE,
            depth: None,
        },
    ))
}

fn sin_terms(from: u64, to: u64) -> Vec<(f64, f64)> {
    (from..=to)
        .map(|n| (1.0 / n as f64, (n as f64).sin()))
        .collect()
}

/// The first twenty terms of `sin(n)` plotted at `x = 1/n`.
pub fn fig7a() -> Result<(Vec<u8>, Sidecar)> {
    let dots = sin_terms(1, 20);
    let n_points = dots.len();
    let bytes = render_svg(&[Series::Dots(dots)], &Style::default())?;
    Ok((
        bytes,
        Sidecar {
            function: "sin(n) at x = 1/n, n = 1..20".into(),
            center: 0.0,
            halfwidth: 0.5,
            n_points,
            depth: None,
        },
    ))
}

/// Terms 100 to 1000 of `sin(n)` plotted at `x = 1/n`: the dots pile up
/// against the vertical axis and appear to fill `[-1, 1]`.
pub fn fig7b() -> Result<(Vec<u8>, Sidecar)> {
    let dots = sin_terms(100, 1000);
    let n_points = dots.len();
    let bytes = render_svg(&[Series::Dots(dots)], &Style::default())?;
    Ok((
        bytes,
        Sidecar {
            function: "sin(n) at x = 1/n, n = 100..1000".into(),
            center: 0.005,
            halfwidth: 0.005,
            n_points,
            depth: None,
        },
    ))
}

/// A magnified window of an arbitrary expression, rendered as a polyline.
pub fn microscope_figure(
    f: &Expr,
    var: &str,
    center: f64,
    halfwidth: f64,
    n_points: usize,
) -> Result<(Vec<u8>, Sidecar)> {
    let fr: Frame = microscope::frame(f, var, center, halfwidth, n_points)?;
    let bytes = render_svg(&[Series::Polyline(fr.points.clone())], &Style::default())?;
    Ok((
        bytes,
        Sidecar {
            function: fr.label,
            center,
            halfwidth,
            n_points,
            depth: Some(microscope::DEFAULT_DEPTH),
        },
    ))
}
