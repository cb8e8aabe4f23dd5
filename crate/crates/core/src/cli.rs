//! The `raux` command line: `eval`, `validate`, `bounds` and `xray`.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error, 3 accuracy error
//! or failed check. Tolerances come from the flag, then `RAUX_TOL`, then the
//! built-in default.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::integrand::KernelId;
use crate::quad::{EvalResult, DEFAULT_TOL};
use crate::repr::{self, ReprId, ReprOptions, DEFAULT_RHO};
use crate::verify::{self, LemmaSelector};
use crate::xray::{self, GridSpec, RenderFormat, Target};
use crate::zeta_ref::zeta_em;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_ACCURACY: i32 = 3;

/// Default check tolerance of `validate`.
pub const VALIDATE_TOL: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(name = "raux", version, about = "Evaluate and cross-check the Riemann auxiliary function R(s)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate R(s) by one representation.
    Eval(EvalArgs),
    /// Run the cross-representation and zeta suites.
    Validate(ValidateArgs),
    /// Scan the bound lemmas.
    Bounds(BoundsArgs),
    /// Render the zero curves of F or R.
    Xray(XrayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Point `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: Complex64,
    /// Representation; routed by `Re s` when omitted.
    #[arg(long)]
    pub repr: Option<ReprId>,
    /// Relative quadrature tolerance.
    #[arg(long, env = "RAUX_TOL", default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_RHO)]
    pub rho: f64,
    /// Corner `re,im` of the contour path.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5,0.5")]
    pub a: Complex64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridChoice {
    Default,
    Dense,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = GridChoice::Default)]
    pub grid: GridChoice,
    /// Base relative tolerance of the checks.
    #[arg(long, env = "RAUX_TOL", default_value_t = VALIDATE_TOL, value_parser = parse_tol)]
    pub tol: f64,
}

#[derive(Debug, clap::Args)]
pub struct BoundsArgs {
    #[arg(long, default_value = "all")]
    pub lemma: LemmaSelector,
    /// Quadrature tolerance of the integral-based scans.
    #[arg(long, env = "RAUX_TOL", default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XrayFn {
    #[value(name = "F")]
    F,
    #[value(name = "R")]
    R,
}

#[derive(Debug, clap::Args)]
pub struct XrayArgs {
    #[arg(long = "fn", value_enum, default_value = "F")]
    pub function: XrayFn,
    /// `x0,x1,y0,y1`
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-10,10,-10,10")]
    pub window: [f64; 4],
    /// Grid nodes per side.
    #[arg(long, default_value_t = 400)]
    pub res: usize,
    /// Output path without extension.
    #[arg(long, default_value = "xray")]
    pub out: PathBuf,
    #[arg(long, default_value = "svg", value_parser = parse_format)]
    pub format: RenderFormat,
    /// Quadrature tolerance when x-raying R.
    #[arg(long, env = "RAUX_TOL", default_value_t = 1e-8, value_parser = parse_tol)]
    pub tol: f64,
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{p}` is not a finite number"))
        })
        .collect()
}

/// `re,im`
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let v = parse_floats(s, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

fn parse_window(s: &str) -> Result<[f64; 4], String> {
    let v = parse_floats(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("tolerance must be a positive number, got `{s}`")),
    }
}

fn parse_format(s: &str) -> Result<RenderFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Complex number as `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Cplx { re: z.re, im: z.im }
    }
}

/// One evaluation. `wall_time` is kept out of the serialized form so that
/// identical invocations print identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub s: Cplx,
    pub repr: ReprId,
    pub value: Cplx,
    pub abs_err: f64,
    pub n_evals: usize,
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1: Option<Cplx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<Cplx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl OutputRecord {
    fn new(s: Complex64, repr: ReprId, r: &EvalResult, wall_time: Duration) -> Self {
        OutputRecord {
            s: s.into(),
            repr,
            value: r.value.into(),
            abs_err: r.abs_err,
            n_evals: r.n_evals,
            wall_time,
            k1: None,
            k1_err: None,
            k2: None,
            k2_err: None,
            rho: None,
        }
    }

    fn csv_header() -> &'static str {
        "s_re,s_im,repr,value_re,value_im,abs_err,n_evals,k1_re,k1_im,k2_re,k2_im,rho"
    }

    fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.s.re,
            self.s.im,
            self.repr,
            self.value.re,
            self.value.im,
            self.abs_err,
            self.n_evals,
            opt(self.k1.map(|z| z.re)),
            opt(self.k1.map(|z| z.im)),
            opt(self.k2.map(|z| z.re)),
            opt(self.k2.map(|z| z.im)),
            opt(self.rho),
        )
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_ACCURACY
    }
}

/// Parse `args` (program name first) and run, writing results to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Xray(a) => cmd_xray(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Eval(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ACCURACY
        }
    }
}

#[derive(Debug)]
enum CliError {
    Eval(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Eval(e)
    }
}

fn io_err(what: impl std::fmt::Display) -> impl Fn(std::io::Error) -> CliError {
    move |e| CliError::Io(format!("{what}: {e}"))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(io_err("stdout"))
}

pub fn cmd_eval_record(a: &EvalArgs) -> crate::Result<OutputRecord> {
    let repr = match a.repr {
        Some(r) => r,
        None => repr::route(a.s)?,
    };
    let start = Instant::now();
    if repr == ReprId::K1K2 {
        if a.s.re != 0.5 || a.s.im <= 0.0 {
            return Err(Error::Domain {
                op: "r_k1k2",
                reason: format!("needs s = 1/2 + it with t > 0, got s = {}", a.s),
            });
        }
        let k = repr::r_k1k2(a.s.im, a.rho, a.tol)?;
        let mut rec = OutputRecord::new(a.s, repr, &k.eval_result(), start.elapsed());
        rec.k1 = Some(k.k1.into());
        rec.k1_err = Some(k.k1_err);
        rec.k2 = Some(k.k2.into());
        rec.k2_err = Some(k.k2_err);
        rec.rho = Some(k.rho);
        return Ok(rec);
    }
    let opts = ReprOptions {
        tol: a.tol,
        rho: a.rho,
        a: a.a,
    };
    let r = repr::eval(repr, a.s, &opts)?;
    Ok(OutputRecord::new(a.s, repr, &r, start.elapsed()))
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let rec = cmd_eval_record(a)?;
    match a.output {
        OutputFormat::Json => emit_json(out, &rec)?,
        OutputFormat::Csv => writeln!(out, "{}\n{}", OutputRecord::csv_header(), rec.csv_row())
            .map_err(io_err("stdout"))?,
    }
    Ok(EXIT_OK)
}

/// One comparison of `validate`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub s: Cplx,
    pub lhs: String,
    pub rhs: String,
    /// Relative difference, or absolute for the zeta suite.
    pub diff: f64,
    pub tol: f64,
    pub lhs_abs_err: f64,
    pub rhs_abs_err: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidateReport {
    pub grid: GridChoice,
    pub tol: f64,
    pub n_checks: usize,
    pub n_failed: usize,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug)]
enum Job {
    Coherence(Complex64, ReprId),
    Left(Complex64),
    Zeta(Complex64),
    Critical(f64),
    K1K2(f64, f64),
}

/// Quadrature tolerance used by `validate` for every evaluation.
pub const VALIDATE_QUAD_TOL: f64 = 1e-10;

fn validate_jobs(grid: GridChoice) -> Vec<Job> {
    let (sigmas, ts): (Vec<f64>, Vec<f64>) = match grid {
        GridChoice::Default => (vec![0.25, 0.5, 1.0, 2.0], vec![0.0, 1.0, 5.0, 10.0, 20.0]),
        GridChoice::Dense => (
            (1..=8).map(|k| 0.25 * k as f64).collect(),
            (0..=12).map(|k| 2.5 * k as f64).collect(),
        ),
    };
    let mut jobs = Vec::new();
    for &sigma in &sigmas {
        for &t in &ts {
            for r in [ReprId::Direct, ReprId::Gabcke, ReprId::Contour] {
                jobs.push(Job::Coherence(Complex64::new(sigma, t), r));
            }
        }
    }
    for s in [Complex64::new(-1.0, 0.0), Complex64::new(-2.0, 5.0), Complex64::new(-0.5, -3.0)] {
        jobs.push(Job::Left(s));
    }
    for sigma in [-1.0, -0.5, 0.3, 0.5, 1.5, 2.0] {
        for t in [0.0, 2.0, 10.0, 20.0] {
            jobs.push(Job::Zeta(Complex64::new(sigma, t)));
        }
    }
    for t in [1.0, 5.0, 10.0, 14.134725, 20.0] {
        jobs.push(Job::Critical(t));
    }
    for t in [5.0, 10.0, 20.0] {
        for rho in [1.5, 2.0, 3.0] {
            jobs.push(Job::K1K2(t, rho));
        }
    }
    jobs
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.norm().max(b.norm())
    }
}

fn run_job(job: Job, base: f64) -> Check {
    let qt = VALIDATE_QUAD_TOL;
    let opts = ReprOptions {
        tol: qt,
        ..ReprOptions::default()
    };
    type Pair = crate::Result<(EvalResult, EvalResult)>;
    let (suite, s, lhs, rhs, tol, absolute, pair): (&str, Complex64, String, String, f64, bool, Pair) = match job {
        Job::Coherence(s, r) => {
            let tol = if s.im >= 20.0 { 100.0 * base } else { base };
            let pair = repr::eval(r, s, &opts).and_then(|a| Ok((a, repr::r_main(s, qt)?)));
            ("coherence", s, r.to_string(), "main".into(), tol, false, pair)
        }
        Job::Left(s) => {
            let pair = repr::r_left(s, qt).and_then(|a| Ok((a, repr::r_siegel_sin(s, qt)?)));
            ("left", s, "left".into(), "siegel-sin".into(), 0.1 * base, false, pair)
        }
        Job::Zeta(s) => {
            let pair = repr::zeta_from_r_eval(s, qt).and_then(|a| {
                let z = zeta_em(s)?;
                Ok((
                    a,
                    EvalResult {
                        value: z,
                        abs_err: 0.0,
                        n_evals: 0,
                        truncated_at: None,
                    },
                ))
            });
            ("zeta", s, "zeta_from_r".into(), "zeta_em".into(), base, true, pair)
        }
        Job::Critical(t) => {
            let s = Complex64::new(0.5, t);
            let pair = repr::r_critical(t, qt).and_then(|a| Ok((a, repr::r_main(s, qt)?)));
            ("critical", s, "critical".into(), "main".into(), 10.0 * base, false, pair)
        }
        Job::K1K2(t, rho) => {
            let s = Complex64::new(0.5, t);
            let pair = repr::r_k1k2(t, rho, qt).and_then(|a| Ok((a.eval_result(), repr::r_main(s, qt)?)));
            ("k1k2", s, format!("k1k2(rho={rho})"), "main".into(), 10.0 * base, false, pair)
        }
    };
    match pair {
        Ok((a, b)) => {
            let diff = if absolute {
                (a.value - b.value).norm()
            } else {
                rel_diff(a.value, b.value)
            };
            Check {
                suite,
                s: s.into(),
                lhs,
                rhs,
                diff,
                tol,
                lhs_abs_err: a.abs_err,
                rhs_abs_err: b.abs_err,
                pass: diff <= tol,
                error: None,
            }
        }
        Err(e) => Check {
            suite,
            s: s.into(),
            lhs,
            rhs,
            diff: f64::NAN,
            tol,
            lhs_abs_err: f64::NAN,
            rhs_abs_err: f64::NAN,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Run the `validate` suites. Per-suite tolerances are multiples of `tol`:
/// coherence 1 (100 for `t >= 20`), left 0.1, zeta 1 (absolute), critical 10,
/// k1k2 10.
pub fn validate(grid: GridChoice, tol: f64) -> ValidateReport {
    let checks: Vec<Check> = validate_jobs(grid).into_par_iter().map(|j| run_job(j, tol)).collect();
    let n_failed = checks.iter().filter(|c| !c.pass).count();
    ValidateReport {
        grid,
        tol,
        n_checks: checks.len(),
        n_failed,
        pass: n_failed == 0,
        checks,
    }
}

fn cmd_validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = validate(a.grid, a.tol);
    emit_json(out, &report)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_ACCURACY })
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let reports = verify::run(a.lemma, a.tol)?;
    emit_json(out, &reports)?;
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_ACCURACY
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XraySummary {
    pub file: String,
    pub grid: GridSpec,
    pub zeros: usize,
    pub re_curves: usize,
    pub im_curves: usize,
    pub missing: usize,
}

fn cmd_xray(a: &XrayArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let [x0, x1, y0, y1] = a.window;
    let grid = GridSpec::new(x0, x1, y0, y1, a.res, a.res)?;
    let target = match a.function {
        XrayFn::F => Target::Kernel(KernelId::FMain),
        XrayFn::R => Target::RAuto,
    };
    let (field, curves) = xray::xray(target, &grid, a.tol)?;
    let bytes = xray::render(&curves, &grid, a.format)?;
    let mut path = a.out.clone().into_os_string();
    path.push(".");
    path.push(a.format.extension());
    let path = PathBuf::from(path);
    std::fs::write(&path, bytes).map_err(io_err(path.display()))?;
    emit_json(
        out,
        &XraySummary {
            file: path.display().to_string(),
            grid,
            zeros: curves.zeros.len(),
            re_curves: curves.re_zero.len(),
            im_curves: curves.im_zero.len(),
            missing: field.n_missing(),
        },
    )?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("raux").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2,0").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex(" -0.5 , 3").unwrap(), Complex64::new(-0.5, 3.0));
        assert!(parse_complex("2").is_err());
        assert!(parse_complex("2,x").is_err());
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("nan,0").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["eval", "--s", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["eval", "--s", "2,0", "--repr", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["bounds", "--lemma", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["xray", "--format", "png"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn eval_record_shape() {
        let (code, out, _) = run_args(&["eval", "--s", "2,0", "--repr", "main"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["repr"], "main");
        assert_eq!(v["s"]["re"], 2.0);
        assert!(v["value"]["re"].is_f64() && v["value"]["im"].is_f64());
        assert!(v.get("wall_time").is_none() && v.get("k1").is_none());
    }

    #[test]
    fn eval_domain_error() {
        let (code, _, err) = run_args(&["eval", "--s", "2,0", "--repr", "left"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.contains("domain"));
        assert_eq!(run_args(&["eval", "--s", "1,3", "--repr", "k1k2"]).0, EXIT_DOMAIN);
    }

    #[test]
    fn eval_csv() {
        let (code, out, _) = run_args(&["eval", "--s=-1,0", "--output", "csv"]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], OutputRecord::csv_header());
        assert!(lines[1].starts_with("-1,0,left,"));
    }

    #[test]
    fn validate_unattainable_tolerance() {
        let r = validate(GridChoice::Default, 1e-20);
        assert!(!r.pass && r.n_failed > 0);
        let failed = r.checks.iter().find(|c| !c.pass).unwrap();
        assert!(failed.diff > failed.tol);
    }
}
