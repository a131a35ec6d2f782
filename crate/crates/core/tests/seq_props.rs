//! Cross-cutting sequence properties: limit/strip consistency, alternating
//! series, the field bridge, and the continuity catalog between interval
//! endpoints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use petit_core::expr::Expr;
use petit_core::field::{Classification, Laurent, DEFAULT_ORDER};
use petit_core::seq::{
    continuity_probe, continuity_probe_interval, epsilon_strip, is_infinitesimal_quantity,
    limit_detect, LimitKind, ProbeOutcome, SeqQuantity, StripOutcome,
};

const H: u64 = 100_000;
const TOL: f64 = 1e-3;

fn seq_expr(text: &str) -> SeqQuantity {
    SeqQuantity::from_expr(Expr::parse(text).unwrap(), "n").unwrap()
}

#[test]
fn convergence_report_survives_the_strip_test() {
    for text in ["1/n", "1/(n^2)", "5 + 1/n", "1/n^2 - 3"] {
        let seq = seq_expr(text);
        let report = limit_detect(&seq, TOL, H).unwrap();
        let l = match report.kind {
            LimitKind::Converges(l) => l,
            other => panic!("{text}: expected convergence, got {other:?}"),
        };
        let mut prev_entry = 0u64;
        for eps in [0.1, 0.01, 0.001] {
            match epsilon_strip(&seq, l, eps, H).unwrap() {
                StripOutcome::Entered { entry_index } => {
                    assert!(
                        entry_index >= prev_entry,
                        "{text}: entry {entry_index} shrank at eps {eps}"
                    );
                    prev_entry = entry_index;
                }
                StripOutcome::Fail { .. } => panic!("{text}: strip failed at eps {eps}"),
            }
        }
    }
}

#[test]
fn strip_wider_band_enters_no_later() {
    let seqs = [seq_expr("1/n"), seq_expr("(-1)^n/n"), seq_expr("1/(n^2)")];
    for seq in &seqs {
        let narrow = epsilon_strip(seq, 0.0, 0.01, H).unwrap();
        let wide = epsilon_strip(seq, 0.0, 0.05, H).unwrap();
        match (wide, narrow) {
            (
                StripOutcome::Entered { entry_index: w },
                StripOutcome::Entered { entry_index: n },
            ) => {
                assert!(w <= n, "wider band entered later: {w} > {n}");
            }
            other => panic!("expected both strips to enter, got {other:?}"),
        }
    }
}

/// Partial sums of the alternating series sum (-1)^(k+1) a_k, evaluated in
/// O(n) per index; used only at modest horizons.
fn alternating_partial_sums(label: &str, term: fn(u64) -> f64) -> SeqQuantity {
    SeqQuantity::new(label.to_string(), move |n| {
        let mut acc = 0.0;
        for k in 1..=n {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * term(k);
        }
        Ok(acc)
    })
}

#[test]
fn alternating_series_converge_between_consecutive_partial_sums() {
    let horizon = 10_000u64;
    type Case = (&'static str, fn(u64) -> f64, f64);
    let cases: [Case; 3] = [
        ("1/n", |n| 1.0 / n as f64, 0.01),
        ("1/n^2", |n| 1.0 / (n * n) as f64, 0.001),
        ("1/sqrt(n)", |n| 1.0 / (n as f64).sqrt(), 0.02),
    ];
    for (label, term, tol) in cases {
        let partials = alternating_partial_sums(label, term);
        let report = limit_detect(&partials, tol, horizon).unwrap();
        let l = match report.kind {
            LimitKind::Converges(l) => l,
            other => panic!("alternating {label}: expected convergence, got {other:?}"),
        };
        // Leibniz: the limit is bracketed by consecutive partial sums.
        for m in [horizon - 3, horizon - 2, horizon - 1] {
            let s0 = partials.eval(m).unwrap();
            let s1 = partials.eval(m + 1).unwrap();
            let (lo, hi) = if s0 < s1 { (s0, s1) } else { (s1, s0) };
            assert!(
                lo <= l && l <= hi,
                "alternating {label}: limit {l} outside [{lo}, {hi}] at m = {m}"
            );
        }
    }
}

#[test]
fn field_bridge_realizations_match_classification() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..40 {
        let valuation = rng.gen_range(-2i64..=3);
        let mut coeffs: Vec<f64> = (0..DEFAULT_ORDER)
            .map(|_| rng.gen_range(-10.0..10.0))
            .collect();
        // Keep the leading coefficient well away from the snap threshold so
        // the classification is unambiguous.
        if coeffs[0].abs() < 0.1 {
            coeffs[0] = 1.0;
        }
        let a = Laurent::new(valuation, coeffs).unwrap();
        let seq = SeqQuantity::from_laurent(&a);
        let is_null = is_infinitesimal_quantity(&seq, TOL, H).unwrap();
        let expected = matches!(
            a.classify(),
            Classification::Zero | Classification::Infinitesimal
        );
        assert_eq!(
            is_null,
            expected,
            "bridge mismatch for {} (classify {:?})",
            a.to_text(),
            a.classify()
        );
    }
}

#[test]
fn fig4_catalog_is_continuous_between_its_limits() {
    // Deep enough that the tail mean of a difference sequence with slope
    // around 8 (the steepest case, 0.7/x near the inner grid points) falls
    // inside the tolerance band.
    let horizon = 100_000u64;
    let alpha = seq_expr("1/n");
    // a + x, a - x, ax, A^x, sin x, cos x between -inf and +inf, sampled on
    // a finite window.
    for text in ["0.7 + x", "0.7 - x", "0.7*x", "2^x", "sin(x)", "cos(x)"] {
        let f = Expr::parse(text).unwrap();
        let report =
            continuity_probe_interval(&f, "x", -2.0, 2.0, 9, &alpha, TOL, horizon).unwrap();
        assert!(report.all_continuous, "{text}: {:?}", report.samples);
    }

    // a/x is continuous on each side of 0 and becomes infinite at 0.
    let f = Expr::parse("0.7/x").unwrap();
    for (lo, hi) in [(-2.0, -0.05), (0.05, 2.0)] {
        let report = continuity_probe_interval(&f, "x", lo, hi, 7, &alpha, TOL, horizon).unwrap();
        assert!(
            report.all_continuous,
            "0.7/x on ({lo}, {hi}): {:?}",
            report.samples
        );
    }
    let at_zero = continuity_probe(&f, "x", 0.0, &alpha, TOL, horizon).unwrap();
    assert_eq!(at_zero.outcome, ProbeOutcome::BecomesInfinite);
}

#[test]
fn blancmange_probes_continuous_at_sampled_points() {
    // Continuous everywhere despite being nowhere differentiable.
    let alpha = seq_expr("1/n");
    let f = Expr::parse("blancmange(x)").unwrap();
    for x0 in [0.1, 1.0 / 3.0, 0.5, 0.77] {
        let p = continuity_probe(&f, "x", x0, &alpha, TOL, 100_000).unwrap();
        assert_eq!(p.outcome, ProbeOutcome::Continuous, "at {x0}");
    }
}
