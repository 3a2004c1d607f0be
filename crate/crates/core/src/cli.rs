//! Command-line front end: curves as CSV, reports and scans as JSON.
//!
//! Exit codes: 2 on a usage error, 1 when a check fails or the numerics
//! break down, 0 otherwise.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error as ThisError;

use crate::assumptions::AssumptionFlags;
use crate::conformal::{
    bochner_residual, mean_curvature_relations, phi_laplace_residual, quasi_einstein_residual,
    trace_identity_residual, w_equation_residual,
};
use crate::error::Error;
use crate::geometry::{static_residual, surface_gravity, LambdaSign, StaticTriple};
use crate::identities::{bgh_boundary_inequality, IdentityCheck, DEFAULT_TOLERANCE};
use crate::inequalities::{
    area_bound, expansion_constraint, gradient_bound, lp_gradient_bound, mon_glob_bound, n3_uniqueness_inequality,
    overdetermined_condition, scalar_average_bound, willmore_bound,
};
use crate::levelset::{uniform_grid, Branches, Foliation, UpCurve};
use crate::models::{anti_de_sitter, de_sitter, nariai, schwarzschild_de_sitter, sds_horizons, SdsParams};
use crate::odegen::{birkhoff_check, expected_family, shoot_from_horizon, HorizonData, ShootConfig};
use crate::report::{IdentityReport, Status};

/// Environment variable overriding the tolerance of the residual checks.
pub const TOLERANCE_VAR: &str = "STATICLAB_TOL";
const SIGNIFICANT_DIGITS: usize = 12;
const STATIC_TOLERANCE: f64 = 1e-9;
const CONFORMAL_TOLERANCE: f64 = 1e-7;
const SURFACE_GRAVITY_TOLERANCE: f64 = 1e-6;
const BIRKHOFF_TOLERANCE: f64 = 1e-5;
const MONITOR_TOLERANCE: f64 = 1e-8;
const RESIDUAL_SAMPLES: usize = 100;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerics(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerics(_) | CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "staticlab", version, about = "Monotone level-set quantities of static metrics with Λ ≠ 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Desitter,
    #[value(alias = "ads")]
    AntiDesitter,
    Sds,
    Nariai,
}

#[derive(Debug, Clone, clap::Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelName,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Mass parameter, required for `sds`.
    #[arg(long)]
    m: Option<f64>,
    /// Restrict level sets to one monotone branch of `u` (index from the
    /// inner boundary).
    #[arg(long)]
    branch: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Static,
    Conformal,
    Identities,
    Inequalities,
    Liminf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanEmit {
    /// `m, r1, r2, kappa1, kappa2`
    Kappa,
    /// adds the maximizer `r0` and the normalization `√f(r0)`
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summaries of the model solutions in dimension `n`.
    Models {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        m: f64,
    },
    /// `U_p(t)` on a uniform grid of levels, as CSV.
    UpCurve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        t1: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `Φ_p(s)` on a uniform grid of conformal levels `s = φ`, as CSV.
    PhiCurve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        s0: f64,
        #[arg(long)]
        s1: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a suite of checks and prints the reports as JSON.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Horizons and surface gravities of SdS over a mass grid `start:stop:step`.
    ScanSds {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_parser = parse_grid)]
        m_grid: Grid,
        #[arg(long, value_enum, default_value_t = ScanEmit::Kappa)]
        emit: ScanEmit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shoots the reduced system from horizon data (Λ > 0) and compares the
    /// result with the expected model.
    Shoot {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        h0: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Values `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, h] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got {s:?}"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let (a, b, h) = (num(a)?, num(b)?, num(h)?);
    if !(h > 0.0) || b < a {
        return Err(format!("empty or ill-formed grid {s:?}"));
    }
    let count = ((b - a) / h + 1e-9).floor() as usize;
    Ok(Grid((0..=count).map(|i| a + h * i as f64).collect()))
}

/// Parses `args` (program name first), writes the primary output to `stdout`
/// or the `--out` file and diagnostics to `stderr`; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(cli.command, stdout) {
        Ok(outcome) => i32::from(outcome == Outcome::Failed),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Done,
    Failed,
}

fn execute(command: Command, stdout: &mut dyn Write) -> CliResult<Outcome> {
    match command {
        Command::Models { n, m } => {
            let mut list = Vec::new();
            for (name, triple) in [
                ("desitter", de_sitter(n)),
                ("anti-desitter", anti_de_sitter(n)),
                ("sds", SdsParams::new(n, m).and_then(schwarzschild_de_sitter)),
                ("nariai", nariai(n)),
            ] {
                list.push(model_summary(name, &triple.map_err(usage)?)?);
            }
            emit(&None, &json_text(&Value::Array(list)), stdout)?;
            Ok(Outcome::Done)
        }
        Command::UpCurve {
            model,
            p,
            t0,
            t1,
            steps,
            out,
        } => {
            let triple = build_model(&model)?;
            let fol = foliation(&triple, &model)?;
            let curve = fol.up_curve(p, &uniform_grid(t0, t1, steps))?;
            emit(&out, &curve_csv(&curve, &AssumptionFlags::of(&triple)), stdout)?;
            Ok(Outcome::Done)
        }
        Command::PhiCurve {
            model,
            p,
            s0,
            s1,
            steps,
            out,
        } => {
            let triple = build_model(&model)?;
            let fol = foliation(&triple, &model)?;
            let curve = fol.phi_curve(p, &uniform_grid(s0, s1, steps))?;
            emit(&out, &curve_csv(&curve, &AssumptionFlags::of(&triple)), stdout)?;
            Ok(Outcome::Done)
        }
        Command::Check { model, suite, out } => {
            let triple = build_model(&model)?;
            let mut reports = run_suite(&triple, &model, suite)?;
            reports.sort_by(|a, b| a.name.cmp(&b.name));
            let failed = reports.iter().any(IdentityReport::failed);
            let doc = json!({
                "model": model_label(&model),
                "suite": format!("{suite:?}").to_lowercase(),
                "reports": reports,
            });
            emit(&out, &json_text(&doc), stdout)?;
            Ok(if failed { Outcome::Failed } else { Outcome::Done })
        }
        Command::ScanSds { n, m_grid, emit: kind, out } => {
            let mut csv = String::from(match kind {
                ScanEmit::Kappa => "m,r1,r2,kappa1,kappa2\n",
                ScanEmit::Full => "m,r1,r2,kappa1,kappa2,r0,normalization\n",
            });
            for m in m_grid.0 {
                let h = sds_horizons(&SdsParams::new(n, m).map_err(usage)?)?;
                let mut row = vec![m, h.r1, h.r2, h.kappa1, h.kappa2];
                if kind == ScanEmit::Full {
                    row.extend([h.r0, h.normalization]);
                }
                let cells: Vec<String> = row.into_iter().map(format_float).collect();
                let _ = writeln!(csv, "{}", cells.join(","));
            }
            emit(&out, &csv, stdout)?;
            Ok(Outcome::Done)
        }
        Command::Shoot { n, h0, kappa, out } => {
            let data = HorizonData::new(n, LambdaSign::Positive, h0, kappa).map_err(usage)?;
            let config = ShootConfig::default();
            let shot = shoot_from_horizon(data, &config)?;
            let matched = birkhoff_check(n, h0, kappa, &config)?;
            let reports = vec![
                IdentityReport::equality(
                    "birkhoff_match",
                    "shot agrees with the de Sitter / SdS / Nariai member fixed by h0",
                    matched.deviation,
                    0.0,
                    BIRKHOFF_TOLERANCE,
                ),
                IdentityReport::equality(
                    "laplace_monitor",
                    "Δu + (2Λ/(n−1)) u = 0 along the trajectory",
                    shot.monitor_max,
                    0.0,
                    MONITOR_TOLERANCE,
                ),
            ];
            let failed = reports.iter().any(IdentityReport::failed);
            let doc = json!({
                "data": data,
                "stop": shot.stop,
                "length": shot.length,
                "steps": shot.steps,
                "u_max": shot.u_max,
                "monitor_max": shot.monitor_max,
                "boundaries": shot.triple.boundaries(),
                "extremum": shot.triple.extremum(),
                "expected": expected_family(n, h0),
                "deviation": matched.deviation,
                "reports": reports,
            });
            emit(&out, &json_text(&doc), stdout)?;
            Ok(if failed { Outcome::Failed } else { Outcome::Done })
        }
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn build_model(args: &ModelArgs) -> CliResult<StaticTriple> {
    let n = args.n;
    let triple = match args.model {
        ModelName::Desitter => de_sitter(n),
        ModelName::AntiDesitter => anti_de_sitter(n),
        ModelName::Nariai => nariai(n),
        ModelName::Sds => {
            let m = args
                .m
                .ok_or_else(|| CliError::Usage("--m is required for the sds model".into()))?;
            SdsParams::new(n, m).and_then(schwarzschild_de_sitter)
        }
    };
    triple.map_err(usage)
}

fn foliation<'a>(triple: &'a StaticTriple, args: &ModelArgs) -> CliResult<Foliation<'a>> {
    match args.branch {
        None => Ok(Foliation::new(triple)),
        Some(i) if i < triple.branches().len() => Ok(Foliation::restricted(triple, Branches::Only(i))),
        Some(i) => Err(CliError::Usage(format!(
            "branch {i} does not exist; the model has {} branch(es)",
            triple.branches().len()
        ))),
    }
}

fn model_label(args: &ModelArgs) -> Value {
    json!({
        "name": format!("{:?}", args.model).to_lowercase(),
        "n": args.n,
        "m": args.m,
        "branch": args.branch,
    })
}

fn model_summary(name: &str, triple: &StaticTriple) -> CliResult<Value> {
    let worst = triple
        .sample_points(RESIDUAL_SAMPLES)
        .into_iter()
        .map(|x| static_residual(triple, x).map(|r| r.max()))
        .collect::<crate::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let (lo, hi) = triple.domain();
    Ok(json!({
        "name": name,
        "n": triple.n(),
        "lambda_sign": triple.lambda_sign(),
        "chart": triple.chart(),
        "domain": [lo, hi],
        "boundaries": triple.boundaries(),
        "extremum": triple.extremum(),
        "branches": triple.branches(),
        "normalization_factor": triple.normalization_factor(),
        "assumptions": AssumptionFlags::of(triple),
        "max_static_residual": worst,
    }))
}

/// Tolerance from the environment, or `default`.
fn tolerance(default: f64) -> CliResult<f64> {
    match std::env::var(TOLERANCE_VAR) {
        Err(_) => Ok(default),
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0)
            .ok_or_else(|| CliError::Usage(format!("{TOLERANCE_VAR}={s:?} is not a positive number"))),
    }
}

/// A numerical failure inside one check of a suite becomes a failed report.
fn broken(name: &str, reference: &str, e: Error) -> IdentityReport {
    let mut r = IdentityReport::refused(name, reference, &e.to_string());
    r.status = Status::Fail;
    r
}

fn collect(name: &str, reference: &str, r: crate::Result<IdentityReport>) -> IdentityReport {
    match r {
        Ok(mut r) => {
            r.name = name.into();
            r
        }
        Err(e) => broken(name, reference, e),
    }
}

fn run_suite(triple: &StaticTriple, args: &ModelArgs, suite: Suite) -> CliResult<Vec<IdentityReport>> {
    Ok(match suite {
        Suite::Static => static_suite(triple)?,
        Suite::Conformal => conformal_suite(triple)?,
        Suite::Identities => identity_suite(triple, args)?,
        Suite::Inequalities => inequality_suite(triple),
        Suite::Liminf => {
            let fol = foliation(triple, args)?;
            (0..triple.n())
                .map(|p| {
                    let name = format!("liminf_up[p={p}]");
                    collect(&name, "liminf of U_p at the extremum", fol.liminf_check(p as f64))
                })
                .collect()
        }
    })
}

fn static_suite(triple: &StaticTriple) -> CliResult<Vec<IdentityReport>> {
    let tol = tolerance(STATIC_TOLERANCE)?;
    let reference = "u Ric = D²u + (2Λ/(n−1)) u g₀ and Δu = −(2Λ/(n−1)) u";
    let mut out = Vec::new();
    let mut worst = 0.0_f64;
    let mut error = None;
    for x in triple.sample_points(RESIDUAL_SAMPLES) {
        match static_residual(triple, x) {
            Ok(r) => worst = worst.max(r.max()),
            Err(e) => error = error.or(Some(e)),
        }
    }
    out.push(match error {
        None => IdentityReport::equality("static_residual", reference, worst, 0.0, tol),
        Some(e) => broken("static_residual", reference, e),
    });
    for (i, b) in triple.boundaries().iter().enumerate() {
        let Some(kappa) = b.surface_gravity() else { continue };
        let name = format!("surface_gravity[{i}]");
        let reference = "|Du| on the horizon equals its recorded surface gravity";
        out.push(match surface_gravity(triple, b) {
            Ok(k) => IdentityReport::equality(&name, reference, k, kappa, tol.max(SURFACE_GRAVITY_TOLERANCE)),
            Err(e) => broken(&name, reference, e),
        });
    }
    Ok(out)
}

type PointResidual = fn(&StaticTriple, f64) -> crate::Result<f64>;

fn conformal_suite(triple: &StaticTriple) -> CliResult<Vec<IdentityReport>> {
    let tol = tolerance(CONFORMAL_TOLERANCE)?;
    let checks: [(&str, &str, PointResidual); 5] = [
        ("quasi_einstein", "quasi-Einstein equation for g = g₀/|1−u²| with drift in φ", quasi_einstein_residual),
        ("phi_laplace", "Laplace equation for φ in g", phi_laplace_residual),
        ("trace_identity", "trace of the quasi-Einstein equation", trace_identity_residual),
        ("bochner", "Bochner formula for |∇φ|² in g", bochner_residual),
        ("w_equation", "elliptic equation for w = |∇φ|²", w_equation_residual),
    ];
    let points = triple.sample_points(RESIDUAL_SAMPLES);
    let mut out = Vec::new();
    for (name, reference, f) in checks {
        let mut worst = 0.0_f64;
        let mut error = None;
        for &x in &points {
            match f(triple, x) {
                Ok(r) => worst = worst.max(r),
                // the conformal metric degenerates on the extremal set
                Err(Error::NearExtremum { .. }) | Err(Error::SingularLevel { .. }) => {}
                Err(e) => error = error.or(Some(e)),
            }
        }
        out.push(match error {
            None => IdentityReport::equality(name, reference, worst, 0.0, tol),
            Some(e) => broken(name, reference, e),
        });
    }
    let mut worst: Option<IdentityReport> = None;
    for &x in &points {
        match mean_curvature_relations(triple, x) {
            Ok(r) => {
                if worst.as_ref().is_none_or(|w| r.abs_residual > w.abs_residual) {
                    worst = Some(r);
                }
            }
            Err(Error::NearExtremum { .. }) | Err(Error::SingularLevel { .. }) => {}
            Err(e) => {
                worst = Some(broken("mean_curvature_relation", "H_g from H", e));
                break;
            }
        }
    }
    out.extend(worst);
    Ok(out)
}

/// Levels `(s, S)` in `φ` and `(t, T)` in `u` for the identity suite.
fn identity_levels(triple: &StaticTriple) -> ((f64, f64), (f64, Option<f64>)) {
    match triple.lambda_sign() {
        LambdaSign::Positive => ((0.3, 1.5), (0.3, None)),
        LambdaSign::Negative => ((0.5, 3.0), (2.0, None)),
    }
}

fn identity_suite(triple: &StaticTriple, args: &ModelArgs) -> CliResult<Vec<IdentityReport>> {
    let tol = tolerance(DEFAULT_TOLERANCE)?;
    let ((s, upper), (t, t_upper)) = identity_levels(triple);
    // identities in φ are checked on each monotone branch separately
    let branches: Vec<Option<usize>> = match (args.branch, triple.branches().len()) {
        (Some(i), _) => vec![Some(i)],
        (None, 1) => vec![None],
        (None, k) => (0..k).map(Some).collect(),
    };
    let mut out = Vec::new();
    for b in branches {
        let fol = match b {
            None => Foliation::new(triple),
            Some(i) => foliation(triple, &ModelArgs { branch: Some(i), ..args.clone() })?,
        };
        let tag = b.map(|i| format!(",branch={i}")).unwrap_or_default();
        for p in [1.0, 3.0, 5.0] {
            let name = format!("first_identity[p={p}{tag}]");
            let r = IdentityCheck::first(&fol, p, s, upper).and_then(|c| c.with_tolerance(tol).report());
            out.push(collect(&name, "first integral identity", r));
        }
        for p in [3.0, 5.0] {
            let name = format!("second_identity[p={p}{tag}]");
            let r = IdentityCheck::second(&fol, p, s, upper).and_then(|c| c.with_tolerance(tol).report());
            out.push(collect(&name, "second integral identity", r));
        }
    }
    let fol = foliation(triple, args)?;
    let r = IdentityCheck::bgh(&fol, t, t_upper).and_then(|c| c.with_tolerance(tol).report());
    out.push(collect("bgh_identity", "traceless Hessian identity", r));
    if !(triple.lambda_sign() == LambdaSign::Negative && triple.boundaries().is_empty()) {
        out.push(collect(
            "bgh_boundary_inequality",
            "boundary inequality",
            bgh_boundary_inequality(triple),
        ));
    }
    Ok(out)
}

fn inequality_suite(triple: &StaticTriple) -> Vec<IdentityReport> {
    let level = match triple.lambda_sign() {
        LambdaSign::Positive => 0.5,
        LambdaSign::Negative => 2.0,
    };
    let mut out = vec![
        collect("gradient_bound", "gradient bound", gradient_bound(triple)),
        collect("area_bound", "area bound", area_bound(triple)),
        collect("willmore_bound", "Willmore-type bound", willmore_bound(triple)),
        collect("scalar_average_bound", "scalar curvature average", scalar_average_bound(triple)),
        collect("lp_gradient_bound[p=3]", "L^p gradient bound", lp_gradient_bound(triple, 3.0, level)),
        collect(
            "overdetermined_condition",
            "overdetermined condition",
            overdetermined_condition(triple, level),
        ),
        collect("mon_glob_bound[p=1]", "global monotonicity chain", mon_glob_bound(triple, 1.0)),
        collect("expansion_constraint", "sum of squared eigenvalues at the maximum", expansion_constraint(triple)),
    ];
    if triple.n() == 3 && triple.lambda_sign() == LambdaSign::Positive {
        out.push(collect(
            "n3_uniqueness_inequality",
            "uniqueness inequality in dimension 3",
            n3_uniqueness_inequality(triple),
        ));
    }
    if triple.lambda_sign() == LambdaSign::Negative {
        out.retain(|r| r.name != "expansion_constraint");
    }
    out
}

/// `x` rounded to 12 significant digits, printed in its shortest form.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded = round_significant(x);
    let a = rounded.abs();
    if a == 0.0 || (1e-4..1e12).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn round_significant(x: f64) -> f64 {
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn curve_csv(curve: &UpCurve, flags: &AssumptionFlags) -> String {
    let flags = flags.compact();
    let mut s = String::from("level,value,d_analytic,d_numeric,assumption_flags\n");
    for i in 0..curve.grid.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            format_float(curve.grid[i]),
            format_float(curve.values[i]),
            format_float(curve.d_analytic[i]),
            format_float(curve.d_numeric[i]),
            flags
        );
    }
    s
}

/// Rounds every float in `v` to 12 significant digits; objects keep their
/// sorted key order.
fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_significant(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

fn json_text<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).map(canonical).unwrap_or(Value::Null);
    let mut s = serde_json::to_string_pretty(&v).unwrap_or_default();
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
