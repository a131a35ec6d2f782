//! Command-line front end: every engine capability as a subcommand with
//! deterministic, machine-readable output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use petit_core::analytic;
use petit_core::error::Error as CoreError;
use petit_core::expr::{Env, Expr, Value};
use petit_core::field::Laurent;
use petit_core::figures::{self, Sidecar};
use petit_core::seq::{self, SeqQuantity};

const GRAMMAR_REF: &str = "expression grammar: expr := term (('+'|'-') term)* ; \
    term := factor (('*'|'/') factor)* ; factor := '-' factor | power ; \
    power := atom ('^' factor)? ; atom := number | ident | ident '(' expr ')' | '(' expr ')'";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Parser)]
#[command(
    name = "petit",
    version,
    about = "Infinitesimal arithmetic, kinetic limit analysis, and graph microscopes"
)]
struct Cli {
    /// Field truncation order (number of tracked coefficients, 4..=64)
    #[arg(long, global = true, default_value_t = 12)]
    order: usize,

    /// Numeric and field comparison tolerance
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Detection tolerance for sequence scans (limit, continuity, onesided)
    #[arg(long = "seq-tol", global = true, default_value_t = 1e-4)]
    seq_tol: f64,

    /// Scan horizon for sequence analyses
    #[arg(long, global = true, default_value_t = 1_000_000)]
    horizon: u64,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed recorded in the configuration for randomized suites; the CLI
    /// commands themselves are deterministic
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate an expression; `e` denotes the infinitesimal
    Eval {
        expr: String,
        /// Variable bindings, `name=value` with a real or element literal
        #[arg(long = "at")]
        at: Vec<String>,
    },
    /// Derivative at a point as the standard part of an infinitesimal quotient
    Derive {
        expr: String,
        /// Point binding, `name=value` with a real value
        #[arg(long = "at")]
        at: String,
        /// Derivative order (k-th derivative instead of the first)
        #[arg(long)]
        k: Option<usize>,
    },
    /// Detect the limit behaviour of a sequence in `n`
    Limit {
        /// Sequence rule, an expression in `n`
        seq: String,
    },
    /// Strip test: all but finitely many terms inside a band around L
    Strip {
        seq: String,
        #[arg(long = "L")]
        l: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Value bins hit beyond horizon/2, merged into intervals
    Clusters {
        seq: String,
        #[arg(long)]
        res: f64,
    },
    /// Continuity probe at a point (or across an interval grid)
    Continuity {
        expr: String,
        /// Point binding, `name=value`
        #[arg(long = "at", conflicts_with = "interval")]
        at: Option<String>,
        /// Interval mode: `lo,hi` sampled on a grid
        #[arg(long)]
        interval: Option<String>,
        /// Grid size for interval mode
        #[arg(long, default_value_t = 9)]
        grid: usize,
        /// Infinitesimal increment sequence (expression in n)
        #[arg(long, default_value = "1/n")]
        alpha: String,
        /// Variable name when using --interval
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Classify the left and right approach to a point
    Onesided {
        expr: String,
        #[arg(long = "at")]
        at: String,
        /// Deepest dyadic scale 2^-k sampled on each side
        #[arg(long, default_value_t = 40)]
        exponent: u32,
    },
    /// Error table s(x) - s_n(x) for the Fourier series sum sin(kx)/k
    Sumtheorem {
        /// Values of n (comma separated); rows are evaluated at x = 1/n
        #[arg(long = "n", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        /// Partial-sum length backing the series limit oracle
        #[arg(long, default_value_t = 1_000_000)]
        oracle: u64,
        /// Evaluate every row at this fixed x instead of x = 1/n
        #[arg(long)]
        x: Option<f64>,
    },
    /// Split an element into standard part plus infinitesimal
    Decompose { element: String },
    /// Microscope map (x - center)/e^power applied to an element
    Magnify {
        element: String,
        #[arg(long)]
        center: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// Emit a reproducible SVG figure
    Figure {
        #[arg(value_enum)]
        which: FigureKind,
        /// Expression to magnify (microscope figure only)
        #[arg(long = "fn")]
        function: Option<String>,
        #[arg(long)]
        center: Option<f64>,
        #[arg(long)]
        width: Option<f64>,
        #[arg(long, default_value_t = 257)]
        points: usize,
        /// Write the SVG here (plus a .json sidecar) instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Configuration inspection
    Config {
        #[command(subcommand)]
        action: ConfigCmd,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureKind {
    Fig5,
    Fig7a,
    Fig7b,
    Microscope,
}

#[derive(Subcommand)]
enum ConfigCmd {
    /// Print the active configuration
    Show,
}

enum AppError {
    Math(CoreError),
    Usage(String),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Syntax { .. } => AppError::Usage(format!("{e}\n{GRAMMAR_REF}")),
            other => AppError::Math(other),
        }
    }
}

fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Math(e)) => {
            eprintln!("ERROR {}: {e}", e.code());
            ExitCode::from(1)
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

struct Ctx {
    order: usize,
    tol: f64,
    seq_tol: f64,
    horizon: u64,
    format: Format,
    seed: u64,
}

impl Ctx {
    fn reject_csv_svg(&self) -> Result<(), AppError> {
        match self.format {
            Format::Csv => Err(usage("--format csv is not supported for this command")),
            Format::Svg => Err(usage("--format svg is only produced by `figure`")),
            _ => Ok(()),
        }
    }

    fn emit<T: serde::Serialize>(&self, value: &T, text: String) -> Result<(), AppError> {
        match self.format {
            Format::Json => println!(
                "{}",
                serde_json::to_string_pretty(value).expect("report serialization")
            ),
            _ => println!("{text}"),
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    if !(4..=64).contains(&cli.order) {
        return Err(usage(format!(
            "--order must be in 4..=64, got {}",
            cli.order
        )));
    }
    if cli.tol.is_nan() || cli.tol <= 0.0 || cli.seq_tol.is_nan() || cli.seq_tol <= 0.0 {
        return Err(usage("--tol and --seq-tol must be positive"));
    }
    if cli.horizon < 100 {
        return Err(usage("--horizon must be at least 100"));
    }
    let ctx = Ctx {
        order: cli.order,
        tol: cli.tol,
        seq_tol: cli.seq_tol,
        horizon: cli.horizon,
        format: cli.format,
        seed: cli.seed,
    };
    match cli.cmd {
        Cmd::Eval { expr, at } => cmd_eval(&ctx, &expr, &at),
        Cmd::Derive { expr, at, k } => cmd_derive(&ctx, &expr, &at, k),
        Cmd::Limit { seq } => cmd_limit(&ctx, &seq),
        Cmd::Strip { seq, l, eps } => cmd_strip(&ctx, &seq, l, eps),
        Cmd::Clusters { seq, res } => cmd_clusters(&ctx, &seq, res),
        Cmd::Continuity {
            expr,
            at,
            interval,
            grid,
            alpha,
            var,
        } => cmd_continuity(
            &ctx,
            &expr,
            at.as_deref(),
            interval.as_deref(),
            grid,
            &alpha,
            &var,
        ),
        Cmd::Onesided { expr, at, exponent } => cmd_onesided(&ctx, &expr, &at, exponent),
        Cmd::Sumtheorem { ns, oracle, x } => cmd_sumtheorem(&ctx, &ns, oracle, x),
        Cmd::Decompose { element } => cmd_decompose(&ctx, &element),
        Cmd::Magnify {
            element,
            center,
            power,
        } => cmd_magnify(&ctx, &element, &center, power),
        Cmd::Figure {
            which,
            function,
            center,
            width,
            points,
            out,
        } => cmd_figure(&ctx, which, function.as_deref(), center, width, points, out),
        Cmd::Config { action } => match action {
            ConfigCmd::Show => cmd_config_show(&ctx),
        },
    }
}

/// Parses `name=value`, where value is a real literal or an element literal
/// in the field text form (so `x=e` binds the infinitesimal).
fn parse_binding(text: &str, order: usize) -> Result<(String, Value), AppError> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| usage(format!("binding `{text}` must look like name=value")))?;
    let name = name.trim().to_string();
    if name.is_empty() {
        return Err(usage(format!(
            "binding `{text}` has an empty variable name"
        )));
    }
    let value = value.trim();
    if let Ok(r) = value.parse::<f64>() {
        return Ok((name, Value::Real(r)));
    }
    let element = Laurent::from_text(value, order)?;
    Ok((name, Value::Field(element)))
}

fn parse_real_binding(text: &str) -> Result<(String, f64), AppError> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| usage(format!("binding `{text}` must look like name=value")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| usage(format!("binding `{text}` needs a real value")))?;
    Ok((name.trim().to_string(), value))
}

fn parse_seq(text: &str) -> Result<SeqQuantity, AppError> {
    let expr = Expr::parse(text)?;
    Ok(SeqQuantity::from_expr(expr, "n")?)
}

fn element_json(x: &Laurent) -> serde_json::Value {
    json!({ "element": x, "text": x.to_text() })
}

fn cmd_eval(ctx: &Ctx, expr: &str, at: &[String]) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let parsed = Expr::parse(expr)?;
    let mut env = Env::new();
    for binding in at {
        let (name, value) = parse_binding(binding, ctx.order)?;
        if name == "e" {
            return Err(usage(
                "`e` is reserved for the infinitesimal and cannot be rebound",
            ));
        }
        env.insert(name, value);
    }
    if parsed.variables().contains("e") {
        env.insert("e".into(), Value::Field(Laurent::epsilon(ctx.order)?));
    }
    match parsed.eval(&env)? {
        Value::Real(v) => ctx.emit(&json!({ "kind": "real", "value": v }), format!("{v}")),
        Value::Field(x) => {
            let text = x.to_text();
            ctx.emit(
                &json!({ "kind": "field", "element": x, "text": text.clone() }),
                text,
            )
        }
    }
}

fn cmd_derive(ctx: &Ctx, expr: &str, at: &str, k: Option<usize>) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let parsed = Expr::parse(expr)?;
    let (var, x0) = parse_real_binding(at)?;
    let value = match k {
        None | Some(1) => analytic::derivative(&parsed, &var, x0, ctx.order)?,
        Some(k) => analytic::nth_derivative(&parsed, &var, x0, k, ctx.order)?,
    };
    ctx.emit(
        &json!({ "expr": expr, "var": var, "x0": x0, "k": k.unwrap_or(1), "value": value }),
        format!("{value}"),
    )
}

fn describe_limit(report: &seq::LimitReport) -> String {
    match &report.kind {
        seq::LimitKind::Converges(l) => format!(
            "converges to {l} (in band from index {}, tolerance {})",
            report.tail_index, report.tolerance
        ),
        seq::LimitKind::DivergesPlusInfinity => format!(
            "diverges to +infinity (beyond {} from index {})",
            seq::DIVERGENCE_THRESHOLD,
            report.tail_index
        ),
        seq::LimitKind::DivergesMinusInfinity => format!(
            "diverges to -infinity (beyond {} from index {})",
            seq::DIVERGENCE_THRESHOLD,
            report.tail_index
        ),
        seq::LimitKind::Clusters(bins) => {
            let parts: Vec<String> = bins
                .iter()
                .map(|b| format!("[{}, {}]", b.lo, b.hi))
                .collect();
            format!(
                "clusters in {} (hits beyond index {})",
                parts.join(", "),
                report.tail_index
            )
        }
        seq::LimitKind::Undetermined => "undetermined at this horizon".to_string(),
    }
}

fn cmd_limit(ctx: &Ctx, seq_text: &str) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let seq = parse_seq(seq_text)?;
    let report = seq::limit_detect(&seq, ctx.seq_tol, ctx.horizon)?;
    ctx.emit(&report, describe_limit(&report))
}

fn cmd_strip(ctx: &Ctx, seq_text: &str, l: f64, eps: f64) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let seq = parse_seq(seq_text)?;
    let outcome = seq::epsilon_strip(&seq, l, eps, ctx.horizon)?;
    let text = match outcome {
        seq::StripOutcome::Entered { entry_index } => {
            format!("inside the strip from index {entry_index}")
        }
        seq::StripOutcome::Fail {
            first_violation_beyond,
        } => format!(
            "fails: violations persist into the final 10% (first at index {first_violation_beyond})"
        ),
    };
    ctx.emit(&outcome, text)
}

fn cmd_clusters(ctx: &Ctx, seq_text: &str, res: f64) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let seq = parse_seq(seq_text)?;
    let bins = seq::cluster_values(&seq, res, ctx.horizon)?;
    let text = bins
        .iter()
        .map(|b| format!("[{}, {}]", b.lo, b.hi))
        .collect::<Vec<_>>()
        .join("\n");
    ctx.emit(&bins, text)
}

fn describe_probe(report: &seq::ProbeReport) -> String {
    match &report.outcome {
        seq::ProbeOutcome::Continuous => format!("continuous at x0 = {}", report.x0),
        seq::ProbeOutcome::Discontinuous { evidence } => format!(
            "discontinuous at x0 = {}: difference sequence {}",
            report.x0,
            describe_limit(evidence)
        ),
        seq::ProbeOutcome::BecomesInfinite => format!("becomes infinite at x0 = {}", report.x0),
    }
}

fn cmd_continuity(
    ctx: &Ctx,
    expr: &str,
    at: Option<&str>,
    interval: Option<&str>,
    grid: usize,
    alpha_text: &str,
    var_flag: &str,
) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let parsed = Expr::parse(expr)?;
    let alpha = parse_seq(alpha_text)?;
    match (at, interval) {
        (Some(at), None) => {
            let (var, x0) = parse_real_binding(at)?;
            let report =
                seq::continuity_probe(&parsed, &var, x0, &alpha, ctx.seq_tol, ctx.horizon)?;
            let text = describe_probe(&report);
            ctx.emit(&report, text)
        }
        (None, Some(interval)) => {
            let (lo, hi) = interval
                .split_once(',')
                .and_then(|(a, b)| {
                    Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?))
                })
                .ok_or_else(|| usage("--interval must look like lo,hi"))?;
            let report = seq::continuity_probe_interval(
                &parsed,
                var_flag,
                lo,
                hi,
                grid,
                &alpha,
                ctx.seq_tol,
                ctx.horizon,
            )?;
            let mut lines: Vec<String> = report.samples.iter().map(describe_probe).collect();
            lines.push(format!(
                "{} on ({lo}, {hi}) at {grid} interior points",
                if report.all_continuous {
                    "continuous"
                } else {
                    "NOT continuous"
                }
            ));
            ctx.emit(&report, lines.join("\n"))
        }
        _ => Err(usage("continuity needs exactly one of --at or --interval")),
    }
}

fn cmd_onesided(ctx: &Ctx, expr: &str, at: &str, exponent: u32) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let parsed = Expr::parse(expr)?;
    let (var, x0) = parse_real_binding(at)?;
    let report = seq::one_sided_limits(&parsed, &var, x0, exponent, ctx.seq_tol)?;
    let describe = |side: &seq::SideLimit| match side {
        seq::SideLimit::Finite(l) => format!("finite limit {l}"),
        seq::SideLimit::PlusInfinity => "+infinity".to_string(),
        seq::SideLimit::MinusInfinity => "-infinity".to_string(),
        seq::SideLimit::Clusters(iv) => format!("clusters in [{}, {}]", iv.lo, iv.hi),
    };
    let text = format!(
        "left:  {}\nright: {}",
        describe(&report.left),
        describe(&report.right)
    );
    ctx.emit(&report, text)
}

fn cmd_sumtheorem(ctx: &Ctx, ns: &[u64], oracle: u64, x: Option<f64>) -> Result<(), AppError> {
    if ctx.format == Format::Svg {
        return Err(usage("--format svg is only produced by `figure`"));
    }
    let rows = match x {
        Some(x) => seq::sum_theorem_probe_at(x, ns, oracle)?,
        None => seq::sum_theorem_probe(ns, oracle)?,
    };
    match ctx.format {
        Format::Csv => {
            let mut out = String::from("n,x,s_n,s,error\n");
            for r in &rows {
                out.push_str(&format!("{},{},{},{},{}\n", r.n, r.x, r.s_n, r.s, r.error));
            }
            print!("{out}");
            Ok(())
        }
        _ => {
            let text = rows
                .iter()
                .map(|r| {
                    format!(
                        "n = {:<8} x = {:<12.6} s_n(x) = {:<12.6} s(x) = {:<12.6} error = {:.6}",
                        r.n, r.x, r.s_n, r.s, r.error
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            ctx.emit(&rows, text)
        }
    }
}

fn cmd_decompose(ctx: &Ctx, element: &str) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let x = Laurent::from_text(element, ctx.order)?;
    let (standard, infinitesimal) = x.decompose()?;
    let text = format!(
        "standard part:      {standard}\ninfinitesimal part: {}",
        infinitesimal.to_text()
    );
    ctx.emit(
        &json!({
            "standard": standard,
            "infinitesimal": element_json(&infinitesimal),
            "classification": format!("{}", x.classify()),
        }),
        text,
    )
}

fn cmd_magnify(ctx: &Ctx, element: &str, center: &str, power: u32) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let x = Laurent::from_text(element, ctx.order)?;
    let c = Laurent::from_text(center, ctx.order)?;
    let image = x.magnify(&c, power)?;
    let text = image.to_text();
    ctx.emit(&element_json(&image), text)
}

fn cmd_figure(
    _ctx: &Ctx,
    which: FigureKind,
    function: Option<&str>,
    center: Option<f64>,
    width: Option<f64>,
    points: usize,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    let (bytes, sidecar): (Vec<u8>, Sidecar) = match which {
        FigureKind::Fig5 => figures::fig5()?,
        FigureKind::Fig7a => figures::fig7a()?,
        FigureKind::Fig7b => figures::fig7b()?,
        FigureKind::Microscope => {
            let function = function.ok_or_else(|| usage("figure microscope requires --fn EXPR"))?;
            let center = center.ok_or_else(|| usage("figure microscope requires --center C"))?;
            let width = width.ok_or_else(|| usage("figure microscope requires --width W"))?;
            let parsed = Expr::parse(function)?;
            figures::microscope_figure(&parsed, "x", center, width, points)?
        }
    };
    match out {
        Some(path) => {
            std::fs::write(&path, &bytes)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            let sidecar_path = path.with_extension("json");
            let sidecar_bytes = serde_json::to_string_pretty(&sidecar).expect("sidecar");
            std::fs::write(&sidecar_path, sidecar_bytes)
                .map_err(|e| usage(format!("cannot write {}: {e}", sidecar_path.display())))?;
            println!("wrote {} and {}", path.display(), sidecar_path.display());
            Ok(())
        }
        None => {
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| usage(format!("stdout: {e}")))?;
            Ok(())
        }
    }
}

fn cmd_config_show(ctx: &Ctx) -> Result<(), AppError> {
    ctx.reject_csv_svg()?;
    let text = format!(
        "order    = {}\ntol      = {}\nseq-tol  = {}\nhorizon  = {}\nformat   = {}\nseed     = {}",
        ctx.order,
        ctx.tol,
        ctx.seq_tol,
        ctx.horizon,
        format!("{:?}", ctx.format).to_lowercase(),
        ctx.seed
    );
    ctx.emit(
        &json!({
            "order": ctx.order,
            "tol": ctx.tol,
            "seq_tol": ctx.seq_tol,
            "horizon": ctx.horizon,
            "format": format!("{:?}", ctx.format).to_lowercase(),
            "seed": ctx.seed,
        }),
        text,
    )
}
