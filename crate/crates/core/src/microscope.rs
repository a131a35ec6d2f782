//! Magnified graph windows and the local-straightness metric.
//!
//! A frame renormalizes the graph of `f` around a center `c`: the window
//! `[c - w, c + w]` is mapped to `t` in `[-1, 1]` and the values to
//! `y = (f(c + t*w) - f(c)) / w`, so a differentiable function looks like a
//! line of slope `f'(c)` regardless of `w`, and "looks straight" becomes a
//! scale-free statement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Default blancmange summation depth: `2^-40` is far below rendering
/// resolution, so partial sums are exact to every tolerance used here.
pub const DEFAULT_DEPTH: u32 = 40;

/// A normalized magnified window around a center, with the chord through
/// its endpoint samples.
#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub center: f64,
    pub halfwidth: f64,
    /// Normalized samples `(t, y)`, `t` strictly increasing from -1 to 1.
    pub points: Vec<(f64, f64)>,
    pub label: String,
    /// Chord through the endpoint samples, as `y = chord_mid + chord_slope * t`.
    pub chord_slope: f64,
    pub chord_mid: f64,
}

/// Samples a normalized window of `f` around `c`.
pub fn frame(f: &Expr, var: &str, c: f64, w: f64, n_points: usize) -> Result<Frame> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "halfwidth must be positive and finite, got {w}"
        )));
    }
    if n_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "a frame needs at least 3 points, got {n_points}"
        )));
    }
    let f_center = f.eval_real(var, c).map_err(|e| Error::SampleFailure {
        t: 0.0,
        message: e.to_string(),
    })?;
    let m = n_points;
    let mut points = Vec::with_capacity(m);
    for i in 0..m {
        let t = (2 * i) as f64 / (m - 1) as f64 - 1.0;
        let y = match f.eval_real(var, c + t * w) {
            Ok(v) => (v - f_center) / w,
            Err(e) => {
                return Err(Error::SampleFailure {
                    t,
                    message: e.to_string(),
                })
            }
        };
        points.push((t, y));
    }
    let y_first = points.first().unwrap().1;
    let y_last = points.last().unwrap().1;
    Ok(Frame {
        center: c,
        halfwidth: w,
        points,
        label: f.print(),
        chord_slope: (y_last - y_first) / 2.0,
        chord_mid: (y_last + y_first) / 2.0,
    })
}

/// Maximum deviation of the window from its chord, in normalized
/// coordinates (the raw deviation divided by the halfwidth).
pub fn straightness(fr: &Frame) -> f64 {
    fr.points
        .iter()
        .map(|&(t, y)| (y - (fr.chord_mid + fr.chord_slope * t)).abs())
        .fold(0.0, f64::max)
}

/// The blancmange function: `sum 2^-n * s(2^n x)` over `n < depth`, where
/// `s` is the distance to the nearest integer. Continuous everywhere,
/// differentiable nowhere; 1-periodic by construction.
pub fn blancmange(x: f64, depth: u32) -> f64 {
    let mut acc = 0.0;
    let mut scale = 1.0;
    let mut u = x;
    for _ in 0..depth.max(1) {
        acc += scale * (u - u.round()).abs();
        u *= 2.0;
        scale *= 0.5;
    }
    acc
}
