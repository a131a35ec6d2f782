//! Variable quantities: lazily evaluated sequences with kinetic limit
//! analysis.
//!
//! Every "for all n" claim here is checked up to a finite horizon and
//! reported as evidence at that horizon, never as proof. "Infinitely
//! often" is approximated by "hit beyond horizon/2", and persistence is
//! required into the last 10% of the scanned range.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::Laurent;

/// Default scan horizon.
pub const DEFAULT_HORIZON: u64 = 1_000_000;
/// A term beyond this magnitude counts as divergence evidence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e9;
/// The divergence ladder never probes indices beyond this.
const PROBE_INDEX_CAP: u64 = 10_000_000_000_000;

type Rule = Arc<dyn Fn(u64) -> Result<f64> + Send + Sync>;

/// A pure rule from index `n >= 1` to a real value, with a label for
/// reports. The rule must be deterministic; it is total on the scanned
/// range or fails with a per-index error.
#[derive(Clone)]
pub struct SeqQuantity {
    rule: Rule,
    label: String,
    default_horizon: u64,
}

impl std::fmt::Debug for SeqQuantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeqQuantity")
            .field("label", &self.label)
            .field("default_horizon", &self.default_horizon)
            .finish()
    }
}

impl SeqQuantity {
    pub fn new<F>(label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(u64) -> Result<f64> + Send + Sync + 'static,
    {
        SeqQuantity {
            rule: Arc::new(rule),
            label: label.into(),
            default_horizon: DEFAULT_HORIZON,
        }
    }

    /// A sequence given by an expression in one variable (usually `n`).
    pub fn from_expr(expr: Expr, var: &str) -> Result<Self> {
        for v in expr.variables() {
            if v != var {
                return Err(Error::UnboundVariable(v));
            }
        }
        let label = expr.print();
        let var = var.to_string();
        Ok(SeqQuantity::new(label, move |n| {
            expr.eval_real(&var, n as f64)
        }))
    }

    /// The realization of a field element as a variable quantity: the
    /// tracked window evaluated at `e = 1/n`.
    pub fn from_laurent(a: &Laurent) -> Self {
        let label = a.to_text();
        let a = a.clone();
        SeqQuantity::new(label, move |n| a.realize(n))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn default_horizon(&self) -> u64 {
        self.default_horizon
    }

    pub fn with_default_horizon(mut self, horizon: u64) -> Self {
        self.default_horizon = horizon;
        self
    }

    /// Evaluates the rule, tagging failures with the index.
    pub fn eval(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("sequence index starts at 1".into()));
        }
        (self.rule)(n).map_err(|e| match e {
            already @ Error::SeqRule { .. } => already,
            other => Error::SeqRule {
                index: n,
                message: other.to_string(),
            },
        })
    }

    /// The termwise absolute value.
    pub fn abs(&self) -> SeqQuantity {
        let rule = self.rule.clone();
        SeqQuantity {
            rule: Arc::new(move |n| rule(n).map(f64::abs)),
            label: format!("abs({})", self.label),
            default_horizon: self.default_horizon,
        }
    }
}

/// A closed interval of values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Outcome of limit detection.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum LimitKind {
    Converges(f64),
    DivergesPlusInfinity,
    DivergesMinusInfinity,
    Clusters(Vec<Interval>),
    Undetermined,
}

/// Limit evidence at a horizon. `tail_index` is the first index of the
/// certified tail: the band entry for `Converges`, the first index past the
/// divergence threshold for `Diverges`, and the infinitely-often boundary
/// `horizon/2 + 1` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    #[serde(flatten)]
    pub kind: LimitKind,
    pub tail_index: u64,
    pub tolerance: f64,
}

/// Outcome of the strip test: either the entry index after which every term
/// stays inside the band, or the witness that violations persist into the
/// last 10% of the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum StripOutcome {
    Entered { entry_index: u64 },
    Fail { first_violation_beyond: u64 },
}

/// Continuity probe outcome at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum ProbeOutcome {
    Continuous,
    Discontinuous { evidence: LimitReport },
    BecomesInfinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub x0: f64,
    #[serde(flatten)]
    pub outcome: ProbeOutcome,
}

/// Conjunction of probes over a grid inside an open interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalProbeReport {
    pub lo: f64,
    pub hi: f64,
    pub all_continuous: bool,
    pub samples: Vec<ProbeReport>,
}

/// Classified one-sided approach.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum SideLimit {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    Clusters(Interval),
}

/// Left and right approach classifications. The sides follow the standard
/// orientation: the left approach samples `x0 - 2^-k`, the right approach
/// `x0 + 2^-k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneSidedReport {
    pub left: SideLimit,
    pub right: SideLimit,
}

/// One row of the sum-theorem table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumTheoremRow {
    pub n: u64,
    pub x: f64,
    pub s_n: f64,
    pub s: f64,
    pub error: f64,
}

fn validate_scan(tol: f64, horizon: u64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if horizon < 100 {
        return Err(Error::InvalidArgument(format!(
            "horizon must be at least 100, got {horizon}"
        )));
    }
    Ok(())
}

/// Index after which violations are no longer tolerated: the last 10% of
/// the horizon must be clean for convergence and strip verdicts.
fn persistence_cut(horizon: u64) -> u64 {
    horizon - horizon / 10
}

/// Detects the limit behaviour of a sequence at a horizon.
///
/// Order of verdicts: convergence (the tail of the full scan stays within
/// `tol` of the tail mean, with no violation past the persistence cut),
/// then divergence (a same-sign growing tail confirmed by a geometric
/// ladder of probe indices beyond the horizon, until the threshold is
/// exceeded), then clustering (at least two occupied bins beyond
/// `horizon/2`), otherwise `Undetermined`.
pub fn limit_detect(seq: &SeqQuantity, tol: f64, horizon: u64) -> Result<LimitReport> {
    validate_scan(tol, horizon)?;
    let mut values = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        values.push(seq.eval(n)?);
    }
    let report = |kind, tail_index| LimitReport {
        kind,
        tail_index,
        tolerance: tol,
    };

    // Convergence against the tail mean.
    let tail_start = (horizon / 2) as usize; // values[tail_start..] are n > horizon/2
    let tail = &values[tail_start..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let last_violation = values
        .iter()
        .rposition(|v| (v - mean).abs() > tol)
        .map(|i| i as u64 + 1)
        .unwrap_or(0);
    let cut = persistence_cut(horizon);
    if last_violation <= cut {
        return Ok(report(LimitKind::Converges(mean), last_violation + 1));
    }

    // Divergence: cheap in-horizon growth check, then the probe ladder.
    if let Some((positive, first_index)) = divergence_ladder(seq, &values, horizon) {
        let kind = if positive {
            LimitKind::DivergesPlusInfinity
        } else {
            LimitKind::DivergesMinusInfinity
        };
        return Ok(report(kind, first_index));
    }

    // Clustering beyond horizon/2.
    let (min, max) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let resolution = tol.max((max - min) / 1000.0);
    let bins = collect_bins(tail.iter().copied(), resolution)?;
    if bins.len() >= 2 {
        return Ok(report(
            LimitKind::Clusters(merge_bins(&bins, resolution)),
            horizon / 2 + 1,
        ));
    }

    Ok(report(LimitKind::Undetermined, horizon / 2 + 1))
}

/// The growth precheck compares `|a|` along the dyadic chain
/// `horizon/4 -> horizon/2 -> horizon` and requires a same-sign final 10%.
/// Only then is the rule probed beyond the horizon, at doubling indices, so
/// sequences with expensive rules are not scanned pointlessly far out.
fn divergence_ladder(seq: &SeqQuantity, values: &[f64], horizon: u64) -> Option<(bool, u64)> {
    let h = horizon as usize;
    let tail = &values[h - h / 10..];
    let positive = tail[0] > 0.0;
    if tail.iter().any(|&v| v == 0.0 || (v > 0.0) != positive) {
        return None;
    }
    let q1 = values[h / 4 - 1].abs();
    let q2 = values[h / 2 - 1].abs();
    let q3 = values[h - 1].abs();
    if !(q2 >= 1.2 * q1 && q3 >= 1.2 * q2) {
        return None;
    }

    // Double the probe index until the threshold crossing has been
    // confirmed on three further scales (or the cap is hit).
    let mut samples: Vec<(u64, f64)> = Vec::new();
    let mut idx = horizon;
    let mut scales_after_cross = 0u32;
    while idx <= PROBE_INDEX_CAP {
        let mut crossed_here = false;
        for n in [idx, idx + 1] {
            match seq.eval(n) {
                Ok(v) if v.is_finite() => {
                    crossed_here |= v.abs() > DIVERGENCE_THRESHOLD;
                    samples.push((n, v));
                }
                _ => return None,
            }
        }
        if crossed_here || scales_after_cross > 0 {
            scales_after_cross += 1;
        }
        if scales_after_cross > 3 {
            break;
        }
        idx = idx.checked_mul(2)?;
    }
    // Certify: from some probe on, every sample is past the threshold with
    // a constant sign.
    let start = samples
        .iter()
        .position(|&(_, v)| v.abs() > DIVERGENCE_THRESHOLD)?;
    let certifying = &samples[start..];
    if certifying.len() < 3 {
        return None;
    }
    let sign_positive = certifying[0].1 > 0.0;
    if certifying
        .iter()
        .all(|&(_, v)| v.abs() > DIVERGENCE_THRESHOLD && (v > 0.0) == sign_positive)
    {
        Some((sign_positive, certifying[0].0))
    } else {
        None
    }
}

/// True when the absolute values are detected to converge to zero — the
/// operational reading of an infinitesimal variable quantity.
pub fn is_infinitesimal_quantity(seq: &SeqQuantity, tol: f64, horizon: u64) -> Result<bool> {
    let report = limit_detect(&seq.abs(), tol, horizon)?;
    Ok(matches!(report.kind, LimitKind::Converges(l) if l.abs() <= tol))
}

/// The strip test: all but finitely many terms must lie strictly inside the
/// band of halfwidth `eps` around `l`. At a finite horizon this means no
/// violation past the persistence cut; the entry index is one past the last
/// violation (1 when the sequence is inside from the start, as a constant
/// sequence is).
pub fn epsilon_strip(seq: &SeqQuantity, l: f64, eps: f64, horizon: u64) -> Result<StripOutcome> {
    validate_scan(eps, horizon)?;
    let cut = persistence_cut(horizon);
    let mut last_violation = 0u64;
    let mut first_beyond_cut = None;
    for n in 1..=horizon {
        let v = seq.eval(n)?;
        if (v - l).abs() >= eps {
            last_violation = n;
            if n > cut && first_beyond_cut.is_none() {
                first_beyond_cut = Some(n);
            }
        }
    }
    if let Some(first) = first_beyond_cut {
        return Ok(StripOutcome::Fail {
            first_violation_beyond: first,
        });
    }
    Ok(StripOutcome::Entered {
        entry_index: last_violation + 1,
    })
}

fn collect_bins<I: Iterator<Item = f64>>(
    values: I,
    resolution: f64,
) -> Result<std::collections::BTreeSet<i64>> {
    let mut bins = std::collections::BTreeSet::new();
    for v in values {
        let id = (v / resolution).floor();
        if !id.is_finite() || id.abs() > 4.0e15 {
            return Err(Error::InvalidArgument(format!(
                "resolution {resolution} is too fine for value {v}"
            )));
        }
        bins.insert(id as i64);
    }
    Ok(bins)
}

fn merge_bins(bins: &std::collections::BTreeSet<i64>, resolution: f64) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut run: Option<(i64, i64)> = None;
    for &id in bins {
        run = match run {
            None => Some((id, id)),
            Some((lo, hi)) if id == hi + 1 => Some((lo, id)),
            Some((lo, hi)) => {
                out.push(Interval {
                    lo: lo as f64 * resolution,
                    hi: (hi + 1) as f64 * resolution,
                });
                Some((id, id))
            }
        };
    }
    if let Some((lo, hi)) = run {
        out.push(Interval {
            lo: lo as f64 * resolution,
            hi: (hi + 1) as f64 * resolution,
        });
    }
    out
}

/// Width-`resolution` bins hit at some index beyond `horizon/2`, merged
/// into maximal intervals.
pub fn cluster_values(seq: &SeqQuantity, resolution: f64, horizon: u64) -> Result<Vec<Interval>> {
    validate_scan(resolution, horizon)?;
    let mut values = Vec::with_capacity((horizon - horizon / 2) as usize);
    for n in horizon / 2 + 1..=horizon {
        values.push(seq.eval(n)?);
    }
    let bins = collect_bins(values.into_iter(), resolution)?;
    Ok(merge_bins(&bins, resolution))
}

/// Probes continuity of `f` at `x0` along an infinitesimal increment
/// sequence: continuous when the difference sequence
/// `f(x0 + alpha_n) - f(x0)` is itself an infinitesimal quantity.
///
/// When `f` is undefined at `x0` but `f(x0 + alpha_n)` diverges, the point
/// is reported as `BecomesInfinite`; an undefined point without divergence
/// propagates the evaluation error.
pub fn continuity_probe(
    f: &Expr,
    var: &str,
    x0: f64,
    alpha: &SeqQuantity,
    tol: f64,
    horizon: u64,
) -> Result<ProbeReport> {
    validate_scan(tol, horizon)?;
    if !is_infinitesimal_quantity(alpha, tol, horizon)? {
        return Err(Error::InvalidArgument(format!(
            "increment sequence {} is not certified infinitesimal at tolerance {tol} within horizon {horizon}",
            alpha.label()
        )));
    }
    let shifted = |label: &str| -> SeqQuantity {
        let f = f.clone();
        let var = var.to_string();
        let alpha = alpha.clone();
        SeqQuantity::new(label.to_string(), move |n| {
            let a = alpha.eval(n)?;
            f.eval_real(&var, x0 + a)
        })
    };
    match f.eval_real(var, x0) {
        Ok(f0) => {
            let f = f.clone();
            let var_owned = var.to_string();
            let alpha_cl = alpha.clone();
            let diff = SeqQuantity::new(format!("f({} + a_n) - f({})", x0, x0), move |n| {
                let a = alpha_cl.eval(n)?;
                Ok(f.eval_real(&var_owned, x0 + a)? - f0)
            });
            let report = limit_detect(&diff, tol, horizon)?;
            let outcome = match report.kind {
                LimitKind::Converges(l) if l.abs() <= tol => ProbeOutcome::Continuous,
                LimitKind::DivergesPlusInfinity | LimitKind::DivergesMinusInfinity => {
                    ProbeOutcome::BecomesInfinite
                }
                _ => ProbeOutcome::Discontinuous { evidence: report },
            };
            Ok(ProbeReport { x0, outcome })
        }
        Err(err) => {
            let seq = shifted("f(x0 + a_n)");
            let report = limit_detect(&seq, tol, horizon)?;
            match report.kind {
                LimitKind::DivergesPlusInfinity | LimitKind::DivergesMinusInfinity => {
                    Ok(ProbeReport {
                        x0,
                        outcome: ProbeOutcome::BecomesInfinite,
                    })
                }
                _ => Err(err),
            }
        }
    }
}

/// Samples `grid` interior points of `(lo, hi)` and reports the conjunction
/// of the pointwise probes — continuity between the interval endpoints.
#[allow(clippy::too_many_arguments)]
pub fn continuity_probe_interval(
    f: &Expr,
    var: &str,
    lo: f64,
    hi: f64,
    grid: usize,
    alpha: &SeqQuantity,
    tol: f64,
    horizon: u64,
) -> Result<IntervalProbeReport> {
    if lo.is_nan() || hi.is_nan() || lo >= hi || grid == 0 {
        return Err(Error::InvalidArgument(
            "interval probe needs lo < hi and a nonempty grid".into(),
        ));
    }
    let mut samples = Vec::with_capacity(grid);
    for i in 0..grid {
        let x0 = lo + (hi - lo) * (i as f64 + 1.0) / (grid as f64 + 1.0);
        samples.push(continuity_probe(f, var, x0, alpha, tol, horizon)?);
    }
    let all_continuous = samples
        .iter()
        .all(|p| matches!(p.outcome, ProbeOutcome::Continuous));
    Ok(IntervalProbeReport {
        lo,
        hi,
        all_continuous,
        samples,
    })
}

/// Classifies both one-sided approaches to `x0` along the geometric
/// sequence `x0 -+ 2^-k`, `k = 1..=max_exponent`. Standard orientation:
/// left means approach from below.
pub fn one_sided_limits(
    f: &Expr,
    var: &str,
    x0: f64,
    max_exponent: u32,
    tol: f64,
) -> Result<OneSidedReport> {
    if tol.is_nan() || tol <= 0.0 || max_exponent < 8 {
        return Err(Error::InvalidArgument(
            "one-sided probe needs tol > 0 and max_exponent >= 8".into(),
        ));
    }
    let side = |sign: f64, name: &str| -> Result<SideLimit> {
        let mut values = Vec::with_capacity(max_exponent as usize);
        for k in 1..=max_exponent {
            let x = x0 + sign * 2f64.powi(-(k as i32));
            let v = f.eval_real(var, x).map_err(|e| Error::SeqRule {
                index: k as u64,
                message: format!("{name} approach: {e}"),
            })?;
            values.push(v);
        }
        let tail = &values[values.len() - (values.len() / 4).max(5)..];
        if tail.iter().all(|&v| v.abs() > DIVERGENCE_THRESHOLD) {
            if tail.iter().all(|&v| v > 0.0) {
                return Ok(SideLimit::PlusInfinity);
            }
            if tail.iter().all(|&v| v < 0.0) {
                return Ok(SideLimit::MinusInfinity);
            }
        }
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        if tail.iter().all(|&v| (v - mean).abs() <= tol) {
            return Ok(SideLimit::Finite(mean));
        }
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Ok(SideLimit::Clusters(Interval { lo, hi }))
    };
    Ok(OneSidedReport {
        left: side(-1.0, "left")?,
        right: side(1.0, "right")?,
    })
}

// ---------------------------------------------------------------------------
// The 1853 sum-theorem probe
// ---------------------------------------------------------------------------

/// Partial sum of the Fourier series `sum_{k=1}^{n} sin(kx)/k`.
pub fn fourier_partial_sum(x: f64, terms: u64) -> f64 {
    let mut acc = 0.0;
    for k in 1..=terms {
        acc += (k as f64 * x).sin() / k as f64;
    }
    acc
}

/// True once the closed form `(pi - x)/2` has been verified against the
/// one-million-term partial sum at `x = 1` within 1e-3. Verified once per
/// process; on failure every limit falls back to explicit partial sums.
fn closed_form_verified() -> bool {
    static VERIFIED: OnceLock<bool> = OnceLock::new();
    *VERIFIED.get_or_init(|| {
        let oracle = fourier_partial_sum(1.0, 1_000_000);
        ((PI - 1.0) / 2.0 - oracle).abs() < 1e-3
    })
}

/// The series limit `s(x)` on `(0, 2*pi)`: the verified closed form, or the
/// `m_oracle`-term partial sum when verification failed.
pub fn series_limit(x: f64, m_oracle: u64) -> Result<f64> {
    if !(0.0 < x && x < 2.0 * PI) {
        return Err(Error::DomainViolation {
            func: "sum-theorem series".into(),
            value: x,
            domain: "(0, 2*pi)".into(),
        });
    }
    if closed_form_verified() {
        Ok((PI - x) / 2.0)
    } else {
        Ok(fourier_partial_sum(x, m_oracle))
    }
}

/// The error table along the variable quantity `x = 1/n`: one row per
/// requested `n` with the partial sum, the series limit and their gap.
pub fn sum_theorem_probe(ns: &[u64], m_oracle: u64) -> Result<Vec<SumTheoremRow>> {
    let rows: Result<Vec<_>> = ns
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument("n must be >= 1".into()));
            }
            sum_theorem_row(1.0 / n as f64, n, m_oracle)
        })
        .collect();
    rows
}

/// The same table at a fixed ordinary point `x`.
pub fn sum_theorem_probe_at(x: f64, ns: &[u64], m_oracle: u64) -> Result<Vec<SumTheoremRow>> {
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument("n must be >= 1".into()));
            }
            sum_theorem_row(x, n, m_oracle)
        })
        .collect()
}

fn sum_theorem_row(x: f64, n: u64, m_oracle: u64) -> Result<SumTheoremRow> {
    if m_oracle < n {
        return Err(Error::InvalidArgument(format!(
            "oracle term count {m_oracle} must dominate n = {n}"
        )));
    }
    let s_n = fourier_partial_sum(x, n);
    let s = series_limit(x, m_oracle)?;
    Ok(SumTheoremRow {
        n,
        x,
        s_n,
        s,
        error: s - s_n,
    })
}
