//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebraic::{parse_rational, AlgebraicNumber};
use crate::asymptotics::ratio_table;
use crate::counting::{brute_force_oracle, collisions_of, count_real_power_pairs, fast_hits, summarize, RealBase};
use crate::heights::height_constant_probe;
use crate::matveev::{effective_upper_bounds, matveev_lower_bound, MatveevInput};
use crate::numeric::Poly;
use crate::spectral::{analyze, multiplicative_independence, verify_envelope, SequenceAnalysis};
use crate::{parse_sequence_config, Error, LinearRecurrence, Result};

#[derive(Debug, Parser)]
#[command(name = "recdiff", version, about = "Counting small differences of linear recurrence sequences")]
pub struct Cli {
    /// Write the report to this path instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp header line.
    #[arg(long, global = true)]
    pub no_header: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots, dominance certificate and growth envelope of one or two sequences.
    Analyze(AnalyzeArgs),
    /// Exact counts T(x) and S(x).
    Count(CountArgs),
    /// Ratio table over a grid of x values.
    Scan(ScanArgs),
    /// Values c with more than one representation U_n - V_m = c.
    Collisions(PairArgs),
    /// Matveev lower bound for a linear form in logarithms.
    Matveev(MatveevArgs),
    /// Multiplicative independence of two algebraic numbers.
    Independence(IndependenceArgs),
    /// Absolute logarithmic heights and the compound-height probe.
    Heights(HeightsArgs),
    /// Effective upper bounds for solutions of U_n - V_m = c.
    Bounds(BoundsArgs),
    /// Pairs with |alpha^n - beta^m| <= x for real bases.
    Problem1(Problem1Args),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Config path or built-in name (fib, lucas, pow2, pow3, tribonacci).
    #[arg(long)]
    pub seq_u: String,
    #[arg(long)]
    pub seq_v: Option<String>,
    /// Last index of the exact envelope check.
    #[arg(long, default_value_t = 500)]
    pub check_to: usize,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub seq_u: String,
    #[arg(long)]
    pub seq_v: String,
    #[arg(long)]
    pub x: String,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Also run the brute-force oracle and compare.
    #[arg(long)]
    pub oracle: bool,
    /// Include collision records.
    #[arg(long)]
    pub collisions: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Structured,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value = "fib")]
    pub seq_u: String,
    #[arg(long, default_value = "pow2")]
    pub seq_v: String,
    /// Comma-separated x values, e.g. "1e3,1e6,1e9".
    #[arg(long)]
    pub x_grid: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Structured)]
    pub output: OutputFormat,
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct MatveevArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long = "D")]
    pub d: u32,
    #[arg(long = "B")]
    pub b: f64,
    #[arg(long = "A", required = true)]
    pub a: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct IndependenceArgs {
    /// `7`, `-3/2`, `phi`, `sqrt(N)`, `i` or `poly:c_d,...,c_0@re[,im]`.
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
}

#[derive(Debug, Args)]
pub struct HeightsArgs {
    /// Numbers whose height is reported.
    #[arg(long)]
    pub value: Vec<String>,
    /// Probe min h(alpha^n/beta^m)/max(n,m) over a grid.
    #[arg(long, requires = "beta")]
    pub alpha: Option<String>,
    #[arg(long, requires = "alpha")]
    pub beta: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub range: u64,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub seq_u: String,
    #[arg(long)]
    pub seq_v: String,
    /// Values of |c| at which the bounds are evaluated.
    #[arg(long)]
    pub c: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct Problem1Args {
    /// `pi`, `e` or a rational.
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    #[arg(long)]
    pub x: String,
    /// Starting precision in bits.
    #[arg(long, default_value_t = 128)]
    pub precision: u32,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(body) => {
            let mut text = String::new();
            if !cli.no_header {
                let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                text.push_str(&format!("# recdiff {} unix_time={t}\n", env!("CARGO_PKG_VERSION")));
            }
            text.push_str(&body);
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write report: {e}");
                    4
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one subcommand and renders its report.
pub fn dispatch(command: &Command) -> Result<String> {
    match command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Count(a) => cmd_count(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Collisions(a) => cmd_collisions(a),
        Command::Matveev(a) => cmd_matveev(a),
        Command::Independence(a) => cmd_independence(a),
        Command::Heights(a) => cmd_heights(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Problem1(a) => cmd_problem1(a),
    }
}

/// A built-in name or a config file path.
pub fn load_sequence(arg: &str) -> Result<LinearRecurrence> {
    if let Some(seq) = LinearRecurrence::builtin(arg) {
        return Ok(seq);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::MalformedConfig(format!("{arg}: {e}")))?;
    parse_sequence_config(&text)
}

/// Non-negative integer, also accepting `1e6`-style input.
fn parse_x(text: &str) -> Result<BigInt> {
    let bad = || Error::InvalidParameters(format!("x must be a non-negative integer, got '{text}'"));
    let r = parse_decimal(text).ok_or_else(bad)?;
    if !r.is_integer() || r.is_negative() {
        return Err(bad());
    }
    Ok(r.to_integer())
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((mant, exp)) = t.split_once(['e', 'E']) {
        let m = parse_rational(mant)?;
        let e: i32 = exp.parse().ok()?;
        let p = BigRational::from_integer(BigInt::from(10).pow(e.unsigned_abs()));
        return Some(if e >= 0 { m * p } else { m / p });
    }
    parse_rational(t)
}

fn analyzed(arg: &str) -> Result<(LinearRecurrence, SequenceAnalysis)> {
    let seq = load_sequence(arg)?;
    let a = analyze(&seq)?;
    Ok((seq, a))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn strs<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn sequence_report(seq: &LinearRecurrence, a: &SequenceAnalysis, check_to: usize) -> Value {
    let cert = &a.certificate;
    let roots: Vec<Value> = cert
        .decomposition
        .spectrum
        .roots
        .iter()
        .map(|r| {
            let (re, im) = r.value.mid_f64();
            json!({
                "value": r.value.describe(),
                "re": re,
                "im": im,
                "radius": r.value.rad_f64(),
                "multiplicity": r.multiplicity,
                "active_multiplicity": r.active_multiplicity,
                "min_poly": Poly::from_ints(&r.min_poly).to_string(),
                "exact": r.exact.as_ref().map(ToString::to_string),
            })
        })
        .collect();
    let check = verify_envelope(seq, cert, &a.envelope, check_to);
    json!({
        "name": seq.name(),
        "order": seq.order(),
        "coefficients": strs(seq.coefficients()),
        "initial_terms": strs(seq.initial_terms()),
        "characteristic_polynomial": seq.characteristic_polynomial().to_string(),
        "minimal_polynomial": seq.minimal_polynomial().to_string(),
        "roots": roots,
        "dominant": {
            "root": cert.root.describe(),
            "modulus": [cert.modulus.lo_f64(), cert.modulus.hi_f64()],
            "log_modulus": to_value(&cert.log_modulus),
            "sigma": cert.sigma,
            "margin": cert.margin,
            "min_poly": cert.algebraic().min_poly_string(),
            "irreducible_verified": cert.irreducible_verified,
            "exact_root": cert.exact_root.as_ref().map(ToString::to_string),
            "precision_bits": cert.precision(),
        },
        "envelope": to_value(&a.envelope),
        "envelope_check": {"from": a.envelope.n0, "to": check_to, "checked": check.checked, "ok": check.ok()},
    })
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<String> {
    let (u, au) = analyzed(&args.seq_u)?;
    let mut report = json!({ "u": sequence_report(&u, &au, args.check_to) });
    if let Some(sv) = &args.seq_v {
        let (v, av) = analyzed(sv)?;
        report["v"] = sequence_report(&v, &av, args.check_to);
        let ind = multiplicative_independence(&au.certificate.algebraic(), &av.certificate.algebraic())?;
        report["independence"] = to_value(&ind);
    }
    Ok(render_json(&report))
}

fn cmd_count(args: &CountArgs) -> Result<String> {
    let (u, au) = analyzed(&args.pair.seq_u)?;
    let (v, av) = analyzed(&args.pair.seq_v)?;
    let x = parse_x(&args.pair.x)?;
    let fast = fast_hits(&u, &au, &v, &av, &x)?;
    let report_c = collisions_of(&fast.hits);
    let (t, s) = summarize(&x, &fast.hits);
    let mut report = json!({
        "x": x.to_string(),
        "T": t,
        "S": s,
        "n_cut": fast.n_cut,
        "m_cut": fast.m_cut,
        "gap_margin": fast.gap_margin.to_string(),
        "sequence_u": u.name(),
        "sequence_v": v.name(),
    });
    if args.collisions {
        report["collisions"] = to_value(&report_c.records);
    }
    if args.oracle {
        let o = brute_force_oracle(&u, &v, &x, 3 * fast.n_cut.max(1), 3 * fast.m_cut.max(1))?;
        report["oracle"] = json!({"T": o.t, "S": o.s, "n_cap": o.n_cut, "m_cap": o.m_cut, "agrees": o.t == t && o.s == s});
    }
    Ok(format!("# T={t} S={s}\n{}", render_json(&report)))
}

fn cmd_scan(args: &ScanArgs) -> Result<String> {
    let u = load_sequence(&args.seq_u)?;
    let v = load_sequence(&args.seq_v)?;
    let grid: Vec<f64> = args
        .x_grid
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidParameters(format!("bad grid value '{s}'"))))
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(Error::InvalidParameters("empty x grid".into()));
    }
    let report = ratio_table(&u, &v, &grid, args.oracle)?;
    match args.output {
        OutputFormat::Structured => Ok(render_json(&to_value(&report))),
        OutputFormat::Csv => {
            let mut out = String::from("x,T,S,main,T_ratio,S_ratio,grid,excess\n");
            for r in &report.rows {
                let grid = r.grid.map(|g| g.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt_real(r.x),
                    r.t,
                    r.s,
                    fmt_real(r.main),
                    fmt_real(r.t_ratio),
                    fmt_real(r.s_ratio),
                    grid,
                    r.excess
                ));
            }
            Ok(out)
        }
    }
}

fn cmd_collisions(args: &PairArgs) -> Result<String> {
    let (u, au) = analyzed(&args.seq_u)?;
    let (v, av) = analyzed(&args.seq_v)?;
    let x = parse_x(&args.x)?;
    let fast = fast_hits(&u, &au, &v, &av, &x)?;
    let report = collisions_of(&fast.hits);
    let mut value = to_value(&report);
    value["x"] = json!(x.to_string());
    value["surplus"] = json!(report.surplus());
    Ok(render_json(&value))
}

fn cmd_matveev(args: &MatveevArgs) -> Result<String> {
    let input = MatveevInput::new(args.t, args.d, args.b, args.a.clone())?;
    let bound = matveev_lower_bound(&input)?;
    Ok(render_json(&json!({
        "bound": bound,
        "t": args.t,
        "D": args.d,
        "B": args.b,
        "A": args.a,
    })))
}

fn number_report(text: &str, a: &AlgebraicNumber) -> Result<Value> {
    let h = a.log_height()?;
    Ok(json!({
        "input": text,
        "min_poly": a.min_poly_string(),
        "degree": a.degree(),
        "exact": a.exact().map(ToString::to_string),
        "height": h.mid(),
        "height_interval": [h.lo, h.hi],
    }))
}

fn cmd_independence(args: &IndependenceArgs) -> Result<String> {
    let alpha = AlgebraicNumber::parse(&args.alpha)?;
    let beta = AlgebraicNumber::parse(&args.beta)?;
    let verdict = multiplicative_independence(&alpha, &beta)?;
    Ok(render_json(&json!({
        "alpha": number_report(&args.alpha, &alpha)?,
        "beta": number_report(&args.beta, &beta)?,
        "independence": to_value(&verdict),
    })))
}

fn cmd_heights(args: &HeightsArgs) -> Result<String> {
    let mut out = String::new();
    if !args.value.is_empty() {
        let values: Vec<Value> =
            args.value.iter().map(|t| AlgebraicNumber::parse(t).and_then(|a| number_report(t, &a))).collect::<Result<_>>()?;
        out.push_str(&render_json(&json!({ "values": values })));
    }
    if let (Some(a), Some(b)) = (&args.alpha, &args.beta) {
        let alpha = AlgebraicNumber::parse(a)?;
        let beta = AlgebraicNumber::parse(b)?;
        let probe = height_constant_probe(&alpha, &beta, args.range, None)?;
        out.push_str(&format!(
            "# alpha={a} beta={b} range={} c0_emp={} label={}\n",
            probe.range_bound,
            fmt_real(probe.c0_emp),
            probe.label
        ));
        out.push_str("n,m,height,ratio\n");
        for r in &probe.rows {
            out.push_str(&format!("{},{},{},{}\n", r.n, r.m, fmt_real(r.height), fmt_real(r.ratio)));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameters("pass --value or --alpha/--beta".into()));
    }
    Ok(out)
}

fn cmd_bounds(args: &BoundsArgs) -> Result<String> {
    let (u, au) = analyzed(&args.seq_u)?;
    let (v, av) = analyzed(&args.seq_v)?;
    let b = effective_upper_bounds(&u, &au, &v, &av)?;
    let width = b.ledger.iter().map(|e| e.name.chars().count()).max().unwrap_or(8).max(8);
    let mut out = format!("{:<width$}  value\n", "constant");
    for e in &b.ledger {
        out.push_str(&format!("{:<width$}  {}\n", e.name, fmt_real(e.value)));
    }
    let evaluations: Vec<Value> =
        args.c.iter().map(|&c| json!({"c": c, "n_max": b.n_bound(c.abs()), "m_max": b.m_bound(c.abs())})).collect();
    let report = json!({
        "n_max": to_value(&b.n_max),
        "m_max": to_value(&b.m_max),
        "c0": b.c0,
        "field_degree": b.field_degree,
        "branches": to_value(&b.branches),
        "zero_set": to_value(&b.zero_set),
        "rigorous": b.rigorous,
        "notes": b.notes,
        "evaluations": evaluations,
    });
    out.push_str(&render_json(&report));
    Ok(out)
}

fn cmd_problem1(args: &Problem1Args) -> Result<String> {
    let alpha = RealBase::parse(&args.alpha)?;
    let beta = RealBase::parse(&args.beta)?;
    let x = parse_decimal(&args.x).ok_or_else(|| Error::InvalidParameters(format!("bad x '{}'", args.x)))?;
    if x <= BigRational::zero() {
        return Err(Error::InvalidParameters("x must be positive".into()));
    }
    let r = count_real_power_pairs(&alpha, &beta, &x, args.precision)?;
    Ok(render_json(&to_value(&r)))
}

/// Twelve significant digits, shortest form.
pub fn fmt_real(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let a = r.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Pretty JSON with sorted keys and [`fmt_real`] for non-integral numbers.
pub fn render_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().expect("f64 number");
                let s = fmt_real(f);
                if f.is_finite() {
                    out.push_str(&s);
                } else {
                    out.push_str(&Value::String(s).to_string());
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*key], indent + 1, out);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["recdiff"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(0.1405681855741), "0.140568185574");
        assert_eq!(fmt_real(-6.100600000000123e15), "-6.1006e15");
        assert_eq!(fmt_real(2.0), "2");
        assert_eq!(fmt_real(1.5e-7), "1.5e-7");
    }

    #[test]
    fn count_prints_totals() {
        let (code, out, _) = run_capture(&["--no-header", "count", "--seq-u", "fib", "--seq-v", "pow2", "--x", "10"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# T=35 S=18\n"), "{out}");
    }

    #[test]
    fn usage_errors_and_help() {
        assert_eq!(run_capture(&["--help"]).0, 0);
        assert_eq!(run_capture(&["count", "--bogus"]).0, 1);
        assert_eq!(run_capture(&[]).0, 1);
    }

    #[test]
    fn matveev_command() {
        let (code, out, _) =
            run_capture(&["--no-header", "matveev", "--t", "3", "--D", "2", "--B", "100", "--A", "1", "--A", "1", "--A", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"bound\": -6.1006"), "{out}");
    }

    #[test]
    fn sorted_keys() {
        let v = json!({"b": 1, "a": [1.5, 2], "c": {"z": null, "y": "s"}});
        assert_eq!(render_json(&v), "{\n  \"a\": [1.5, 2],\n  \"b\": 1,\n  \"c\": {\n    \"y\": \"s\",\n    \"z\": null\n  }\n}\n");
    }
}
