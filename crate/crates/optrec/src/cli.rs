//! Command-line front end.
//!
//! One thin binary, `optrec`, exposes the library over subcommands:
//! `ideal`, `interp`, `recover-point`, `recover-function`, `errors`,
//! `nodes-check`, `verify` and `plot-data`. Results are JSON objects tagged
//! `"schema": "optrec/1"` carrying the resolved configuration for
//! reproducibility; `plot-data` and `--csv` emit CSV samples. Exit codes:
//! 0 success, 1 verify-suite failure, 2 validation error, 3 solver
//! non-convergence.
//!
//! Angles are accepted as decimal radians or as fractions of π in the
//! `[k]pi[/m]` form: `pi/2`, `3pi/4`, `2pi`, `0.25`.

use crate::classes::{ClassSpec, ClassVariant};
use crate::ideal::{self, solve, IdealError, IdealSpline, SolverOptions};
use crate::interp::{self, SplineSpace};
use crate::piecewise::PERIOD;
use crate::recovery::{
    self, node_optimality_gap, uniform_nodes, RecoveryEngine, RecoveryError, RecoveryReport,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;

pub const SCHEMA: &str = "optrec/1";

#[derive(Parser)]
#[command(
    name = "optrec",
    version,
    about = "Optimal recovery of periodic functions from point samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct and validate the ideal spline vanishing at the given nodes
    Ideal(IdealArgs),
    /// Interpolate sampled values in the spline space of a saved ideal spline
    Interp(InterpArgs),
    /// Optimal pointwise recovery from sampled values
    RecoverPoint(RecoverPointArgs),
    /// Optimal global recovery from sampled values
    RecoverFunction(RecoverFunctionArgs),
    /// Best-possible recovery errors (pointwise and in L_p) with method weights
    Errors(ErrorsArgs),
    /// Compare the worst-case error of the nodes against the uniform mesh
    NodesCheck(NodesCheckArgs),
    /// Run the verification suite; exits 1 on any failure
    Verify(VerifyArgs),
    /// Sample the ideal spline and its derivatives as CSV
    PlotData(PlotDataArgs),
}

#[derive(Args)]
struct ClassArgs {
    /// Class variant: rm1, rm2 or rm1m2
    #[arg(long = "class")]
    class: String,
    /// Order r of the top bounded derivative
    #[arg(long)]
    r: u32,
    /// Bound on the lower constrained derivative
    #[arg(long = "M")]
    m: f64,
    /// Bound on x^(r−1) (rm1m2 only)
    #[arg(long = "N")]
    n: Option<f64>,
}

impl ClassArgs {
    fn spec(&self) -> Result<ClassSpec, CliError> {
        let variant = ClassVariant::parse(&self.class)
            .ok_or_else(|| CliError::validation(format!("unknown class '{}'", self.class)))?;
        ClassSpec::new(variant, self.r, self.m, self.n)
            .map_err(|e| CliError::validation(e.to_string()))
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Convergence tolerance on ‖η‖_∞ (default 1e-10·(1+M))
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the deterministic multistart
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct IdealArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// Comma-separated nodes in [0, 2π), e.g. `0,pi` or `0,pi/2,pi,3pi/2`
    #[arg(long)]
    nodes: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the JSON result here instead of stdout
    #[arg(long, alias = "json")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InterpArgs {
    /// JSON file produced by `optrec ideal`
    #[arg(long)]
    spline: PathBuf,
    /// Comma-separated sampled values at the spline's prescribed zeros
    #[arg(long)]
    values: String,
    /// Evaluate the interpolant (and the method weights) at this point
    #[arg(long = "at")]
    at: Option<String>,
    #[arg(long, alias = "json")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverPointArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    nodes: String,
    /// Comma-separated sampled values at the nodes
    #[arg(long)]
    values: String,
    #[arg(long)]
    tau: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, alias = "json")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverFunctionArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    nodes: String,
    #[arg(long)]
    values: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Also write `t,value` samples of the recovered function here
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Number of CSV sample points
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    #[arg(long, alias = "json")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ErrorsArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    nodes: String,
    /// Pointwise error location(s), comma separated
    #[arg(long)]
    tau: Option<String>,
    /// Norm exponent(s): numbers or `inf`, comma separated
    #[arg(long)]
    p: Option<String>,
    /// Also estimate each method's worst error over this many sampled class
    /// members (0 = skip the empirical comparison)
    #[arg(long, default_value_t = 0)]
    samples: u32,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, alias = "json")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NodesCheckArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    nodes: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, alias = "json")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the randomized parts of the suite
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smaller sample counts for a fast smoke run
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct PlotDataArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    nodes: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of sample points over one period
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    /// Highest derivative column to include (defaults to r)
    #[arg(long)]
    derivatives: Option<u32>,
    /// Write CSV here instead of stdout
    #[arg(long, alias = "csv")]
    out: Option<PathBuf>,
}

/// Errors carrying their process exit code.
#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
    code: i32,
}

impl CliError {
    fn validation(message: String) -> Self {
        CliError {
            kind: "validation",
            message,
            code: 2,
        }
    }

    fn io(message: String) -> Self {
        CliError {
            kind: "io",
            message,
            code: 2,
        }
    }
}

impl From<IdealError> for CliError {
    fn from(e: IdealError) -> Self {
        match e {
            IdealError::NonConvergence { .. } => CliError {
                kind: "non-convergence",
                message: e.to_string(),
                code: 3,
            },
            _ => CliError::validation(e.to_string()),
        }
    }
}

impl From<RecoveryError> for CliError {
    fn from(e: RecoveryError) -> Self {
        match e {
            RecoveryError::Ideal(inner) => inner.into(),
            _ => CliError::validation(e.to_string()),
        }
    }
}

impl From<interp::InterpError> for CliError {
    fn from(e: interp::InterpError) -> Self {
        CliError::validation(e.to_string())
    }
}

/// Parse an angle given as decimal radians or as a fraction of π
/// (`pi`, `pi/2`, `3pi/4`, `2pi`, `-pi/6`).
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let mut t = s.trim().to_ascii_lowercase();
    t.retain(|c| c != ' ' && c != '*');
    if let Some((pre, post)) = t.split_once("pi") {
        let num: f64 = match pre {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse()
                .map_err(|_| format!("bad angle '{s}': cannot parse '{other}'"))?,
        };
        let den: f64 = match post.strip_prefix('/') {
            None if post.is_empty() => 1.0,
            None => return Err(format!("bad angle '{s}': unexpected '{post}'")),
            Some(d) => d
                .parse()
                .map_err(|_| format!("bad angle '{s}': cannot parse denominator '{d}'"))?,
        };
        if den == 0.0 {
            return Err(format!("bad angle '{s}': zero denominator"));
        }
        Ok(num * std::f64::consts::PI / den)
    } else {
        t.parse().map_err(|_| format!("bad angle '{s}'"))
    }
}

fn parse_angle_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| parse_angle(part).map_err(CliError::validation))
        .collect()
}

fn parse_value_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("bad value '{part}'")))
        })
        .collect()
}

fn parse_p(s: &str) -> Result<f64, CliError> {
    let t = s.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinity" || t == "∞" {
        return Ok(f64::INFINITY);
    }
    let p: f64 = t
        .parse()
        .map_err(|_| CliError::validation(format!("bad exponent '{s}'")))?;
    if p < 1.0 {
        return Err(CliError::validation(format!("p must be ≥ 1, got {p}")));
    }
    Ok(p)
}

fn spec_json(spec: &ClassSpec) -> Value {
    serde_json::to_value(spec).expect("spec serializes")
}

fn emit(out: &Option<PathBuf>, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_text(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Run the CLI on the given argv (including the program name); returns the
/// process exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            let payload = json!({
                "schema": SCHEMA,
                "error": { "kind": err.kind, "message": err.message },
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            err.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Ideal(args) => cmd_ideal(args),
        Command::Interp(args) => cmd_interp(args),
        Command::RecoverPoint(args) => cmd_recover_point(args),
        Command::RecoverFunction(args) => cmd_recover_function(args),
        Command::Errors(args) => cmd_errors(args),
        Command::NodesCheck(args) => cmd_nodes_check(args),
        Command::Verify(args) => cmd_verify(args),
        Command::PlotData(args) => cmd_plot_data(args),
    }
}

fn cmd_ideal(args: IdealArgs) -> Result<i32, CliError> {
    let spec = args.class.spec()?;
    let nodes = parse_angle_list(&args.nodes)?;
    let opts = args.solver.options();
    let out = solve(&nodes, &spec, &opts)?;
    let payload = json!({
        "schema": SCHEMA,
        "config": {
            "subcommand": "ideal",
            "spec": spec_json(&spec),
            "nodes": nodes,
            "tol": opts.tol,
            "seed": opts.seed,
        },
        "spline": serde_json::to_value(&out.spline).unwrap(),
        "validation": serde_json::to_value(&out.report).unwrap(),
        "residual": out.spline.residual,
        "trace_len": out.trace_len,
        "restarts": out.restarts_used,
    });
    emit(&args.out, &payload)?;
    Ok(0)
}

fn load_spline(path: &PathBuf) -> Result<IdealSpline, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("bad JSON in {}: {e}", path.display())))?;
    let spline_value = value.get("spline").cloned().unwrap_or(value);
    serde_json::from_value(spline_value)
        .map_err(|e| CliError::validation(format!("not an ideal spline: {e}")))
}

fn cmd_interp(args: InterpArgs) -> Result<i32, CliError> {
    let spline = load_spline(&args.spline)?;
    let report = ideal::validate_ideal_spline(&spline);
    if !report.passed() {
        let names: Vec<_> = report.failures().iter().map(|c| c.name).collect();
        return Err(CliError::validation(format!(
            "loaded spline fails validation: {names:?}"
        )));
    }
    let values = parse_value_list(&args.values)?;
    let space = SplineSpace::from_ideal(&spline)?;
    let interpolant = interp::interpolate(&space, &spline.zeros, &values)?;
    let mut payload = json!({
        "schema": SCHEMA,
        "config": {
            "subcommand": "interp",
            "spline_file": args.spline.display().to_string(),
            "spec": spec_json(&spline.spec),
            "nodes": spline.zeros,
            "values": values,
        },
        "interpolant": serde_json::to_value(&interpolant.spline).unwrap(),
        "condition": interpolant.condition,
        "space_dimension": space.dim(),
    });
    if let Some(at) = &args.at {
        let tau = parse_angle(at).map_err(CliError::validation)?;
        let weights = interp::method_weights(&space, &spline.zeros, tau)?;
        payload["at"] = json!(tau);
        payload["value_at"] = json!(interpolant.spline.evaluate(tau, 0));
        payload["weights"] = json!(weights);
    }
    emit(&args.out, &payload)?;
    Ok(0)
}

fn cmd_recover_point(args: RecoverPointArgs) -> Result<i32, CliError> {
    let spec = args.class.spec()?;
    let nodes = parse_angle_list(&args.nodes)?;
    let values = parse_value_list(&args.values)?;
    let tau = parse_angle(&args.tau).map_err(CliError::validation)?;
    let opts = args.solver.options();
    let engine = RecoveryEngine::new(&spec, &nodes, &opts)?;
    let value = engine.recover_point(&values, tau)?;
    let payload = json!({
        "schema": SCHEMA,
        "config": {
            "subcommand": "recover-point",
            "spec": spec_json(&spec),
            "nodes": nodes,
            "values": values,
            "tau": tau,
            "seed": opts.seed,
        },
        "value": value,
        "weights": engine.weights(tau)?,
        "best_error": engine.best_error_point(tau),
    });
    emit(&args.out, &payload)?;
    Ok(0)
}

fn cmd_recover_function(args: RecoverFunctionArgs) -> Result<i32, CliError> {
    let spec = args.class.spec()?;
    let nodes = parse_angle_list(&args.nodes)?;
    let values = parse_value_list(&args.values)?;
    let opts = args.solver.options();
    let engine = RecoveryEngine::new(&spec, &nodes, &opts)?;
    let recovered = engine.recover_function(&values)?;
    if let Some(csv) = &args.csv {
        emit_text(&Some(csv.clone()), &recovered.sample_csv(args.resolution))?;
    }
    let payload = json!({
        "schema": SCHEMA,
        "config": {
            "subcommand": "recover-function",
            "spec": spec_json(&spec),
            "nodes": nodes,
            "values": values,
            "seed": opts.seed,
            "resolution": args.resolution,
        },
        "recovered": serde_json::to_value(&recovered).unwrap(),
        "best_error_sup": engine.best_error_norm(f64::INFINITY),
    });
    emit(&args.out, &payload)?;
    Ok(0)
}

fn cmd_errors(args: ErrorsArgs) -> Result<i32, CliError> {
    let spec = args.class.spec()?;
    let nodes = parse_angle_list(&args.nodes)?;
    let taus = match &args.tau {
        Some(s) => parse_angle_list(s)?,
        None => vec![],
    };
    let ps = match &args.p {
        Some(s) => s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(parse_p)
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![],
    };
    if taus.is_empty() && ps.is_empty() {
        return Err(CliError::validation(
            "give at least one of --tau or --p".into(),
        ));
    }
    let opts = args.solver.options();
    let engine = RecoveryEngine::new(&spec, &nodes, &opts)?;
    let mut report = RecoveryReport::compute(&engine, &taus, &ps, false, &opts)?;
    if args.samples > 0 {
        use recovery::{empirical_worst_error, EmpiricalEntry, ErrorMetric, Method};
        let methods = [
            Method::Optimal,
            Method::PiecewiseLinear,
            Method::Trigonometric,
            Method::Zero,
        ];
        let mut metrics: Vec<(String, ErrorMetric, f64)> = Vec::new();
        for &tau in &taus {
            metrics.push((
                format!("tau={tau}"),
                ErrorMetric::Point(tau),
                engine.best_error_point(tau),
            ));
        }
        for &p in &ps {
            let label = if p.is_infinite() {
                "p=inf".to_string()
            } else {
                format!("p={p}")
            };
            metrics.push((label, ErrorMetric::Norm(p), engine.best_error_norm(p)));
        }
        for (label, metric, bound) in metrics {
            for method in methods {
                let worst = empirical_worst_error(
                    method,
                    &spec,
                    &nodes,
                    metric,
                    args.samples,
                    opts.seed,
                    &opts,
                )?;
                report.empirical.push(EmpiricalEntry {
                    method,
                    metric: label.clone(),
                    samples: args.samples,
                    worst_error: worst,
                    bound,
                });
            }
        }
    }
    let payload = json!({
        "schema": SCHEMA,
        "config": {
            "subcommand": "errors",
            "spec": spec_json(&spec),
            "nodes": nodes,
            "tau": taus,
            "p": ps.iter().map(|p| if p.is_infinite() { "inf".to_string() } else { p.to_string() }).collect::<Vec<_>>(),
            "samples": args.samples,
            "seed": opts.seed,
        },
        "report": serde_json::to_value(&report).unwrap(),
    });
    emit(&args.out, &payload)?;
    Ok(0)
}

fn cmd_nodes_check(args: NodesCheckArgs) -> Result<i32, CliError> {
    let spec = args.class.spec()?;
    let nodes = parse_angle_list(&args.nodes)?;
    let opts = args.solver.options();
    let gap = node_optimality_gap(&spec, &nodes, &opts)?;
    let payload = json!({
        "schema": SCHEMA,
        "config": {
            "subcommand": "nodes-check",
            "spec": spec_json(&spec),
            "nodes": nodes,
            "seed": opts.seed,
        },
        "gap": serde_json::to_value(&gap).unwrap(),
    });
    emit(&args.out, &payload)?;
    Ok(0)
}

fn cmd_plot_data(args: PlotDataArgs) -> Result<i32, CliError> {
    let spec = args.class.spec()?;
    let nodes = parse_angle_list(&args.nodes)?;
    let opts = args.solver.options();
    let spline = ideal::find_ideal_spline(&nodes, &spec, &opts)?;
    let top = args.derivatives.unwrap_or(spec.r) as usize;
    let mut text = String::from("t,phi");
    for d in 1..=top {
        text.push_str(&format!(",phi_d{d}"));
    }
    text.push('\n');
    for g in 0..args.resolution {
        let t = PERIOD * g as f64 / args.resolution as f64;
        text.push_str(&format!("{t}"));
        for d in 0..=top {
            text.push_str(&format!(",{}", spline.body.evaluate(t, d)));
        }
        text.push('\n');
    }
    emit_text(&args.out, &text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let checks = verify_suite(args.seed, args.quick);
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", c.name, c.detail);
        if !c.passed {
            failed += 1;
        }
    }
    println!(
        "verify: {} checks, {} failed{}",
        checks.len(),
        failed,
        if args.quick { " (quick mode)" } else { "" }
    );
    Ok(if failed > 0 { 1 } else { 0 })
}

fn verify_suite(seed: u64, quick: bool) -> Vec<Check> {
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;
    let mut checks = Vec::new();
    let opts = SolverOptions {
        seed,
        ..Default::default()
    };

    // closed-form oracles
    match recovery::best_error_point(
        &ClassSpec::rm1(2, 10.0).unwrap(),
        &[0.0, PI],
        PI / 2.0,
        &opts,
    ) {
        Ok(e) => {
            let expected = PI * PI / 8.0;
            checks.push(check(
                "euler-point-error",
                (e - expected).abs() <= 1e-6,
                format!("E = {e:.10}, expected {expected:.10}"),
            ));
        }
        Err(e) => checks.push(check("euler-point-error", false, e.to_string())),
    }
    match recovery::best_error_point(
        &ClassSpec::rm1(2, 1.0).unwrap(),
        &[0.0, PI],
        PI / 2.0,
        &opts,
    ) {
        Ok(e) => {
            let expected = (PI - 1.0) / 2.0;
            checks.push(check(
                "truncated-point-error",
                (e - expected).abs() <= 1e-6,
                format!("E = {e:.10}, expected {expected:.10}"),
            ));
        }
        Err(e) => checks.push(check("truncated-point-error", false, e.to_string())),
    }
    match recovery::best_error_norm(&ClassSpec::rm1(2, 10.0).unwrap(), &[0.0, PI], 1.0, &opts) {
        Ok(e) => {
            let expected = PI.powi(3) / 6.0;
            checks.push(check(
                "l1-error",
                (e - expected).abs() <= 1e-6,
                format!("E = {e:.10}, expected {expected:.10}"),
            ));
        }
        Err(e) => checks.push(check("l1-error", false, e.to_string())),
    }

    // randomized construction / validation sweep
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    let per_variant = if quick { 2 } else { 6 };
    let mut sweep_ok = true;
    let mut sweep_detail = String::new();
    let mut sweep_count = 0;
    for variant in [ClassVariant::Rm1, ClassVariant::Rm2, ClassVariant::Rm1m2] {
        for i in 0..per_variant {
            let n = 1 + i % 3;
            let r = match variant {
                ClassVariant::Rm1 => [2, 3, 4][i % 3],
                _ => [3, 4][i % 2],
            };
            let m = [0.5, 1.0, 10.0][i % 3];
            let spec = match variant {
                ClassVariant::Rm1 => ClassSpec::rm1(r, m).unwrap(),
                ClassVariant::Rm2 => ClassSpec::rm2(r, m).unwrap(),
                ClassVariant::Rm1m2 => ClassSpec::rm1m2(r, m, [1.0, 5.0][i % 2]).unwrap(),
            };
            let nodes = random_nodes(&mut rng, 2 * n);
            sweep_count += 1;
            match solve(&nodes, &spec, &opts) {
                Ok(out) => {
                    let worst = out
                        .spline
                        .zeros
                        .iter()
                        .map(|&u| out.spline.body.evaluate(u, 0).abs())
                        .fold(0.0, f64::max);
                    if !out.report.passed() || worst > 1e-8 {
                        sweep_ok = false;
                        sweep_detail =
                            format!(
                            "{:?} r={r} M={m} nodes={nodes:?}: residual {worst:.2e}, failures {:?}",
                            variant,
                            out.report.failures().iter().map(|c| c.name).collect::<Vec<_>>()
                        );
                    }
                }
                Err(e) => {
                    sweep_ok = false;
                    sweep_detail = format!("{variant:?} r={r} M={m}: {e}");
                }
            }
        }
    }
    checks.push(check(
        "zero-residuals",
        sweep_ok,
        if sweep_ok {
            format!("{sweep_count} randomized constructions validated")
        } else {
            sweep_detail
        },
    ));

    // extremal inequality of the optimal method
    let samples = if quick { 10 } else { 50 };
    let grid = if quick { 256 } else { 1000 };
    let configs = [
        (ClassSpec::rm1(2, 1.0).unwrap(), vec![0.3, 1.8, 3.4, 5.0]),
        (ClassSpec::rm2(3, 1.0).unwrap(), vec![0.5, 2.0, 3.7, 5.2]),
        (
            ClassSpec::rm1m2(3, 1.0, 1.0).unwrap(),
            vec![0.4, 1.7, 2.9, 4.6],
        ),
    ];
    let mut worst_excess = f64::NEG_INFINITY;
    let mut extremal_err = None;
    for (spec, nodes) in &configs {
        match recovery::extremal_inequality_excess(spec, nodes, samples, grid, seed, &opts) {
            Ok(e) => worst_excess = worst_excess.max(e),
            Err(e) => extremal_err = Some(e.to_string()),
        }
    }
    checks.push(match extremal_err {
        None => check(
            "extremal-inequality",
            worst_excess <= 1e-7,
            format!("max(|x−s| − |φ|) = {worst_excess:+.3e} over {samples} samples × 3 configs"),
        ),
        Some(e) => check("extremal-inequality", false, e),
    });

    // node optimality around the uniform mesh
    let mut gap_ok = true;
    let mut gap_detail = String::new();
    let deltas: &[f64] = if quick { &[0.2] } else { &[0.05, 0.2, 0.5] };
    for (spec, n) in [
        (ClassSpec::rm1(2, 1.0).unwrap(), 1usize),
        (ClassSpec::rm2(3, 1.0).unwrap(), 1),
    ] {
        match node_optimality_gap(&spec, &uniform_nodes(n), &opts) {
            Ok(g) if g.gap.abs() <= 1e-9 => {}
            Ok(g) => {
                gap_ok = false;
                gap_detail = format!("uniform mesh gap {:.3e} ≠ 0", g.gap);
            }
            Err(e) => {
                gap_ok = false;
                gap_detail = e.to_string();
            }
        }
        for &delta in deltas {
            for j in 0..2 * n {
                let mut u = uniform_nodes(n);
                u[j] += delta;
                if j + 1 < u.len() && u[j] >= u[j + 1] {
                    continue;
                }
                match node_optimality_gap(&spec, &u, &opts) {
                    Ok(g) if g.gap > 0.0 => {}
                    Ok(g) => {
                        gap_ok = false;
                        gap_detail =
                            format!("perturbed mesh (j={j}, δ={delta}) gap {:.3e} ≤ 0", g.gap);
                    }
                    Err(e) => {
                        gap_ok = false;
                        gap_detail = e.to_string();
                    }
                }
            }
        }
    }
    checks.push(check(
        "node-optimality",
        gap_ok,
        if gap_ok {
            "uniform mesh optimal, perturbations strictly worse".into()
        } else {
            gap_detail
        },
    ));

    // interpolation contract
    let contract = (|| -> Result<(f64, usize, f64), CliError> {
        let spec = ClassSpec::rm2(3, 1.0).unwrap();
        let nodes = [0.5, 2.0, 3.7, 5.2];
        let out = solve(&nodes, &spec, &opts)?;
        let space = SplineSpace::from_ideal(&out.spline)?;
        let hom = interp::interpolate(&space, &nodes, &[0.0; 4])?
            .spline
            .sup_norm(0)
            .0;
        let scaled_norm =
            interp::scaled_top_norm_bound(&space, &out.spline, if quick { 10 } else { 50 }, seed);
        Ok((hom, space.dim(), scaled_norm))
    })();
    checks.push(match contract {
        Ok((hom, dim, scaled_norm)) => check(
            "interpolation-contract",
            hom <= 1e-10 && dim == 4 && scaled_norm <= 1.0 + 1e-8,
            format!("homogeneous sup {hom:.2e}, dim {dim}, scaled top-norm {scaled_norm:.9}"),
        ),
        Err(e) => check("interpolation-contract", false, e.message),
    });

    // oddness of η
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x0DD);
    let trials = if quick { 25 } else { 100 };
    let mut odd_worst = 0.0f64;
    let mut odd_err = None;
    for i in 0..trials {
        let spec = match i % 3 {
            0 => ClassSpec::rm1(2, 1.0).unwrap(),
            1 => ClassSpec::rm2(3, 0.8).unwrap(),
            _ => ClassSpec::rm1m2(3, 0.8, 0.6).unwrap(),
        };
        let raw: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0f64)).collect();
        if raw.iter().map(|x| x.abs()).sum::<f64>() < 0.2 {
            continue;
        }
        let xi = ideal::SphereVector::project(&raw).unwrap();
        let phase = rng.random_range(0.0..PERIOD);
        let nodes = [0.3, 2.0, 3.3, 5.1];
        match (
            ideal::eta(&xi, phase, &nodes, &spec),
            ideal::eta(&xi.negated(), phase, &nodes, &spec),
        ) {
            (Ok(e1), Ok(e2)) => {
                for (a, b) in e1.iter().zip(e2.iter()) {
                    odd_worst = odd_worst.max((a + b).abs());
                }
            }
            _ => odd_err = Some("eta evaluation failed".to_string()),
        }
    }
    checks.push(match odd_err {
        None => check(
            "eta-oddness",
            odd_worst <= 1e-10,
            format!("max |η(−ξ) + η(ξ)| = {odd_worst:.3e} over {trials} draws"),
        ),
        Some(e) => check("eta-oddness", false, e),
    });

    // determinism
    let det = (|| -> Result<bool, CliError> {
        let spec = ClassSpec::rm2(3, 1.0).unwrap();
        let nodes = [0.4, 1.9, 3.6, 5.0];
        let a = solve(&nodes, &spec, &opts)?;
        let b = solve(&nodes, &spec, &opts)?;
        let same = a.spline.residual == b.spline.residual
            && a.spline.knots == b.spline.knots
            && (0..200).all(|k| {
                let t = 0.031 * k as f64;
                a.spline.body.evaluate(t, 0) == b.spline.body.evaluate(t, 0)
            });
        Ok(same)
    })();
    checks.push(match det {
        Ok(same) => check(
            "determinism",
            same,
            if same {
                "repeated solves are bitwise identical".into()
            } else {
                "repeated solves differ".into()
            },
        ),
        Err(e) => check("determinism", false, e.message),
    });

    checks
}

fn random_nodes(rng: &mut rand_chacha::ChaCha8Rng, two_n: usize) -> Vec<f64> {
    use rand::Rng;
    loop {
        let mut u: Vec<f64> = (0..two_n).map(|_| rng.random_range(0.0..PERIOD)).collect();
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut min_gap = u[0] + PERIOD - u[two_n - 1];
        for w in u.windows(2) {
            min_gap = min_gap.min(w[1] - w[0]);
        }
        if min_gap > 0.2 {
            return u;
        }
    }
}
