//! End-to-end tests of the binary: exit codes, output formats, figure
//! determinism against the committed goldens.

use std::process::{Command, Output};

fn petit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_petit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = petit(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn derive_log_at_two() {
    assert_eq!(stdout(&["derive", "log(x)", "--at", "x=2"]).trim(), "0.5");
}

#[test]
fn help_exits_zero() {
    let out = petit(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
}

#[test]
fn missing_at_is_a_usage_error() {
    let out = petit(&["derive", "log(x)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_violation_is_a_math_error_with_diagnostic() {
    let out = petit(&["derive", "log(x)", "--at", "x=-1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("ERROR DOMAIN: "), "diagnostic line: {err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn no_standard_part_is_a_math_error() {
    let out = petit(&["decompose", "e^-1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("ERROR NO_STANDARD_PART: "), "got {err}");
}

#[test]
fn syntax_error_prints_the_grammar_reference() {
    let out = petit(&["eval", "2 +"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("syntax error"));
    assert!(err.contains("expression grammar"));
}

#[test]
fn eval_binds_the_infinitesimal() {
    let out = stdout(&["eval", "((x+e)^3 - x^3)/e", "--at", "x=2"]);
    assert_eq!(out.trim(), "12 + 6e^1 + 1e^2");
    let out = petit(&["eval", "e", "--at", "e=0.5"]);
    assert_eq!(out.status.code(), Some(2), "e must not be rebindable");
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["limit", "1/n", "--horizon", "100000"],
        vec!["sumtheorem", "--n", "10,100", "--format", "csv"],
        vec!["decompose", "2 + 3e^1", "--format", "json"],
        vec!["figure", "fig7a"],
    ] {
        let a = petit(&args);
        let b = petit(&args);
        assert_eq!(a.stdout, b.stdout, "nondeterministic stdout for {args:?}");
    }
}

#[test]
fn eval_accepts_multiple_bindings() {
    let out = stdout(&["eval", "x^2 + y^2", "--at", "x=3", "--at", "y=4"]);
    assert_eq!(out.trim(), "25");
    let out = stdout(&["eval", "x + y", "--at", "x=1 - e^1", "--at", "y=2"]);
    assert_eq!(out.trim(), "3 - 1e^1");
}

#[test]
fn sequence_rule_failures_exit_one_with_the_index() {
    let out = petit(&["limit", "log(100 - n)", "--horizon", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("ERROR SEQ_RULE: "), "got {err}");
    assert!(err.contains("index 100"), "got {err}");
}

#[test]
fn figures_match_committed_goldens() {
    let fig5 = include_bytes!("golden/fig5.svg");
    let fig7b = include_bytes!("golden/fig7b.svg");
    assert_eq!(petit(&["figure", "fig5"]).stdout, fig5.to_vec());
    assert_eq!(petit(&["figure", "fig7b"]).stdout, fig7b.to_vec());
}

#[test]
fn figure_out_writes_svg_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("window.svg");
    let out = petit(&[
        "figure",
        "microscope",
        "--fn",
        "sin(x)",
        "--center",
        "0.3",
        "--width",
        "0.001",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read(&path).unwrap();
    assert!(svg.starts_with(b"<svg"));
    let sidecar: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("window.json")).unwrap()).unwrap();
    assert_eq!(sidecar["function"], "sin(x)");
    assert_eq!(sidecar["center"], 0.3);
    assert_eq!(sidecar["halfwidth"], 0.001);
    assert_eq!(sidecar["n_points"], 257);
}

#[test]
fn figure_microscope_requires_its_params() {
    let out = petit(&["figure", "microscope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sumtheorem_csv_has_locale_independent_decimal_points() {
    let out = stdout(&["sumtheorem", "--n", "100", "--format", "csv"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,x,s_n,s,error"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("100,0.01,"));
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 5, "{row}");
    for f in &fields[1..] {
        f.parse::<f64>()
            .unwrap_or_else(|_| panic!("unparseable field {f} in {row}"));
    }
}

#[test]
fn strip_reports_the_exact_entry_index() {
    let out = stdout(&["strip", "1/n", "--L", "0", "--eps", "0.01"]);
    assert!(out.contains("from index 101"), "{out}");
}

#[test]
fn config_show_prints_defaults() {
    let text = stdout(&["config", "show"]);
    assert!(text.contains("order    = 12"));
    assert!(text.contains("horizon  = 1000000"));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["config", "show", "--format", "json"])).unwrap();
    assert_eq!(json["order"], 12);
    assert_eq!(json["tol"], 1e-9);
    assert_eq!(json["seq_tol"], 1e-4);
    assert_eq!(json["horizon"], 1000000);
}

#[test]
fn order_flag_bounds_are_enforced() {
    let out = petit(&["decompose", "1", "--order", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = petit(&["decompose", "1", "--order", "65"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_rejected_where_unsupported() {
    let out = petit(&["derive", "sin(x)", "--at", "x=0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}
