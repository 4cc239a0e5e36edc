//! Command-line driver: parse problem files, dispatch the solvers and
//! verifiers, and emit canonical JSON or CSV.
//!
//! Exit codes partition outcomes for CI: 0 on success, 2 on numeric
//! failure (an error report is still written to the output target), 3 on
//! invalid input or arguments.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gmink::discrete::{solve_gaussian_minkowski, solve_normalized, SolveOptions};
use gmink::formats::{
    body_from_spec, measure_from_spec, measure_to_spec, parse_json, to_canonical_json, BodySpec,
    ProblemSpec, SmoothProblemSpec,
};
use gmink::gauss::{ball_roots, GaussScalarConfig};
use gmink::geometry::{wulff_shape_2d, AnyBody, Direction, HBody, SymBox};
use gmink::inequalities::{
    check_ehrhard, check_isoperimetric, check_log_concavity, check_minkowski,
    rectangle_two_preimages, rectangle_sweep,
};
use gmink::measure::{
    facet_measures, gaussian_volume, monte_carlo_volume, MeasureVector, QuadratureConfig,
};
use gmink::smooth::{curvature_radii, solve_smooth};

#[derive(Parser)]
#[command(
    name = "gmink",
    version,
    about = "Gaussian volumes, surface area measures, and Minkowski-type solvers \
             for origin-symmetric convex bodies"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutArgs {
    /// Output file, or "-" for standard output.
    #[arg(short = 'o', long, default_value = "-")]
    output: String,
    /// Report format. Numeric-failure reports are always JSON.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct IoArgs {
    /// Input file, or "-" for standard input.
    #[arg(short = 'i', long, default_value = "-")]
    input: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SolveFlags {
    /// Override the residual tolerance from the problem file.
    #[arg(long)]
    residual_tol: Option<f64>,
    /// Override the Newton iteration cap per continuation stage.
    #[arg(long)]
    max_newton_iters: Option<usize>,
    /// Override the continuation grid size.
    #[arg(long)]
    continuation_steps: Option<usize>,
    /// Override the support number of the starting body.
    #[arg(long)]
    initial_support: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Ehrhard,
    LogConcavity,
    Minkowski,
    Isoperimetric,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Facet atoms of the Gaussian surface area measure of a body.
    Measure(IoArgs),
    /// Gaussian volume of a body, optionally cross-checked by Monte Carlo.
    Volume {
        #[command(flatten)]
        io: IoArgs,
        /// Add a Monte Carlo estimate with this many samples.
        #[arg(long)]
        mc_samples: Option<u64>,
        /// Seed for the Monte Carlo stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the discrete even problem for a prescribed measure.
    Solve {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        flags: SolveFlags,
        /// Seek the small branch (gaussian volume <= 1/2).
        #[arg(long)]
        start_small: bool,
        /// Attempt the solve even when the total mass reaches 1/sqrt(2 pi).
        #[arg(long)]
        force_mass: bool,
    },
    /// Maximize the normalized objective and report the stationary body.
    SolveNormalized {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        flags: SolveFlags,
        /// Volume exponent in (0, 1/dim); overrides the problem file.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Solve the smooth planar problem from a density on the half period.
    SolveSmooth {
        #[command(flatten)]
        io: IoArgs,
        /// Override the residual tolerance from the problem file.
        #[arg(long)]
        residual_tol: Option<f64>,
        /// Override the homotopy step count.
        #[arg(long)]
        homotopy_steps: Option<usize>,
    },
    /// Check an inequality suite over a generated family of body pairs.
    Verify {
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Number of generated body pairs.
        #[arg(long, default_value_t = 24)]
        pairs: usize,
    },
    /// Trace the rectangle family whose second measure coordinate collides.
    SweepRectangles {
        #[command(flatten)]
        out: OutArgs,
        /// Defect of the first coordinate below 1/sqrt(2 pi).
        #[arg(long, default_value_t = 0.01)]
        epsilon0: f64,
        /// Sample count across the admissible interval.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Radii at which the ball measure density hits a level.
    BallRoots {
        #[command(flatten)]
        out: OutArgs,
        /// Density level to invert.
        #[arg(long)]
        level: f64,
        /// Ambient dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

impl Cmd {
    fn destination(&self) -> (String, Format) {
        let out = match self {
            Cmd::Measure(io) => &io.out,
            Cmd::Volume { io, .. } => &io.out,
            Cmd::Solve { io, .. } => &io.out,
            Cmd::SolveNormalized { io, .. } => &io.out,
            Cmd::SolveSmooth { io, .. } => &io.out,
            Cmd::Verify { out, .. } => out,
            Cmd::SweepRectangles { out, .. } => out,
            Cmd::BallRoots { out, .. } => out,
        };
        (out.output.clone(), out.format)
    }
}

enum Failure {
    /// Exit 3: malformed input, bad arguments, unreadable or unwritable paths.
    Input(String),
    /// Exit 2: a numeric method gave up; an error report gets written.
    Numeric(gmink::Error),
    /// Exit 2: the requested report was written but flags a finding.
    Flagged(String),
}

type CResult<T> = Result<T, Failure>;

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

impl From<gmink::Error> for Failure {
    fn from(e: gmink::Error) -> Self {
        match e {
            gmink::Error::InvalidInput(_) | gmink::Error::Domain(_) | gmink::Error::Unbounded => {
                Failure::Input(e.to_string())
            }
            other => Failure::Numeric(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(3) };
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(3);
    }
    let (output, _) = cli.cmd.destination();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Flagged(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            if let Ok(text) = to_canonical_json(&error_report(&e)) {
                let _ = write_output(&output, &text);
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn init_threads() -> Result<(), String> {
    match std::env::var("GMINK_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(()),
            Ok(n) => {
                // A pool may already exist inside tests; that is fine.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                Ok(())
            }
            Err(_) => Err(format!("GMINK_THREADS must be a nonnegative integer, got '{v}'")),
        },
    }
}

fn dispatch(cmd: Cmd) -> CResult<()> {
    match cmd {
        Cmd::Measure(io) => cmd_measure(io),
        Cmd::Volume { io, mc_samples, seed } => cmd_volume(io, mc_samples, seed),
        Cmd::Solve { io, flags, start_small, force_mass } => {
            cmd_solve(io, flags, start_small, force_mass)
        }
        Cmd::SolveNormalized { io, flags, alpha } => cmd_solve_normalized(io, flags, alpha),
        Cmd::SolveSmooth { io, residual_tol, homotopy_steps } => {
            cmd_solve_smooth(io, residual_tol, homotopy_steps)
        }
        Cmd::Verify { out, suite, pairs } => cmd_verify(out, suite, pairs),
        Cmd::SweepRectangles { out, epsilon0, samples } => cmd_sweep(out, epsilon0, samples),
        Cmd::BallRoots { out, level, dim } => cmd_ball_roots(out, level, dim),
    }
}

// ---------------------------------------------------------------- plumbing

fn read_input(path: &str) -> CResult<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input_err(format!("could not read standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| input_err(format!("could not read '{path}': {e}")))
    }
}

fn write_output(path: &str, text: &str) -> CResult<()> {
    if path == "-" {
        let mut out = std::io::stdout();
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| input_err(format!("could not write standard output: {e}")))
    } else {
        std::fs::write(path, text)
            .map_err(|e| input_err(format!("could not write '{path}': {e}")))
    }
}

/// Float text identical to the canonical JSON encoding, so CSV and JSON
/// outputs carry the same numeric content.
fn fnum(v: f64) -> String {
    serde_json::Number::from_f64(v).map(|n| n.to_string()).unwrap_or_else(|| "null".into())
}

fn canonical(v: &Value) -> CResult<String> {
    Ok(to_canonical_json(v)?)
}

fn emit(out: &OutArgs, jsonv: &Value, csv: String) -> CResult<()> {
    match out.format {
        Format::Json => write_output(&out.output, &canonical(jsonv)?),
        Format::Csv => write_output(&out.output, &csv),
    }
}

fn error_report(e: &gmink::Error) -> Value {
    use gmink::Error as E;
    let (kind, mut fields) = match e {
        E::QuadratureNoConvergence { estimate, bound, tol } => (
            "quadrature_no_convergence",
            json!({"estimate": estimate, "error_bound": bound, "tol": tol}),
        ),
        E::BisectionNoConvergence { lo, hi } => {
            ("bisection_no_convergence", json!({"lo": lo, "hi": hi}))
        }
        E::FacetCollapse { index } => ("facet_collapse", json!({"index": index})),
        E::BranchLoss { volume, last_good_t } => (
            "branch_loss",
            json!({"gaussian_volume": volume, "last_good_t": last_good_t}),
        ),
        E::NoConvergence { residual, iterations, tol, best } => (
            "no_convergence",
            json!({
                "residual": residual,
                "iterations": iterations,
                "tol": tol,
                "best_iterate": best,
            }),
        ),
        E::MassTooLarge { mass, bound } => {
            ("mass_too_large", json!({"mass": mass, "bound": bound}))
        }
        E::StepCollapse => ("step_collapse", json!({})),
        E::ConvexityLoss { min_curvature, index } => (
            "convexity_loss",
            json!({"min_curvature": min_curvature, "index": index}),
        ),
        E::InvalidInput(_) | E::Domain(_) | E::Unbounded => ("input", json!({})),
    };
    fields["kind"] = json!(kind);
    fields["message"] = json!(e.to_string());
    json!({ "error": fields })
}

fn branch_name(on_large_branch: bool) -> &'static str {
    if on_large_branch {
        "gamma>1/2"
    } else {
        "gamma<=1/2"
    }
}

fn csv_table(header: &str, rows: Vec<String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn direction_header(dim: usize, tail: &str) -> String {
    let mut cols: Vec<String> = (1..=dim).map(|i| format!("v{i}")).collect();
    cols.push(tail.into());
    cols.join(",")
}

// ---------------------------------------------------------------- commands

fn cmd_measure(io: IoArgs) -> CResult<()> {
    let spec: BodySpec = parse_json(&read_input(&io.input)?, "body")?;
    let body = body_from_spec(&spec)?;
    let mv = facet_measures(&body, &QuadratureConfig::default())?;
    let jsonv = serde_json::to_value(measure_to_spec(&mv))
        .map_err(|e| input_err(format!("serialization failed: {e}")))?;
    let rows = mv
        .directions
        .iter()
        .zip(&mv.weights)
        .map(|(d, c)| {
            let mut cells: Vec<String> = d.as_slice().iter().map(|x| fnum(*x)).collect();
            cells.push(fnum(*c));
            cells.join(",")
        })
        .collect();
    emit(&io.out, &jsonv, csv_table(&direction_header(mv.dim, "c"), rows))
}

fn cmd_volume(io: IoArgs, mc_samples: Option<u64>, seed: u64) -> CResult<()> {
    let spec: BodySpec = parse_json(&read_input(&io.input)?, "body")?;
    let body = body_from_spec(&spec)?;
    let v = gaussian_volume(&body, &QuadratureConfig::default())?;
    let mut jsonv = json!({"value": v.value, "error_bound": v.error_bound});
    let mut header = "value,error_bound".to_string();
    let mut row = format!("{},{}", fnum(v.value), fnum(v.error_bound));
    if let Some(samples) = mc_samples {
        let mc = monte_carlo_volume(&body, samples, seed)?;
        jsonv["monte_carlo"] = json!({
            "estimate": mc.estimate,
            "std_error": mc.std_error,
            "samples": mc.samples,
            "seed": mc.seed,
        });
        header.push_str(",mc_estimate,mc_std_error,mc_samples,mc_seed");
        row.push_str(&format!(
            ",{},{},{},{}",
            fnum(mc.estimate),
            fnum(mc.std_error),
            mc.samples,
            mc.seed
        ));
    }
    emit(&io.out, &jsonv, csv_table(&header, vec![row]))
}

fn apply_flags(opts: &mut SolveOptions, flags: &SolveFlags) {
    if let Some(v) = flags.residual_tol {
        opts.residual_tol = v;
    }
    if let Some(v) = flags.max_newton_iters {
        opts.max_newton_iters = v;
    }
    if let Some(v) = flags.continuation_steps {
        opts.continuation_steps = v;
    }
    if let Some(v) = flags.initial_support {
        opts.initial_support = v;
    }
}

/// Rows pairing each prescribed atom with the solved support number.
fn solution_csv(mv: &MeasureVector, solution: &HBody) -> String {
    let rows = mv
        .directions
        .iter()
        .zip(&mv.weights)
        .zip(solution.support())
        .map(|((d, c), h)| {
            let mut cells: Vec<String> = d.as_slice().iter().map(|x| fnum(*x)).collect();
            cells.push(fnum(*c));
            cells.push(fnum(*h));
            cells.join(",")
        })
        .collect();
    csv_table(&direction_header(mv.dim, "c,h"), rows)
}

fn cmd_solve(io: IoArgs, flags: SolveFlags, start_small: bool, force_mass: bool) -> CResult<()> {
    let spec: ProblemSpec = parse_json(&read_input(&io.input)?, "problem")?;
    if spec.mode()? != "plain" {
        return Err(input_err(
            "field 'mode' requests the normalized problem; use solve-normalized",
        ));
    }
    let mv = measure_from_spec(&spec.measure)?;
    let mut opts = spec.solve_options();
    apply_flags(&mut opts, &flags);
    if start_small {
        opts.start_small = true;
    }
    if force_mass {
        opts.force_mass = true;
    }
    let report = solve_gaussian_minkowski(&mv, &opts)?;
    let mut jsonv = serde_json::to_value(&report)
        .map_err(|e| input_err(format!("serialization failed: {e}")))?;
    jsonv["branch"] = json!(branch_name(report.on_large_branch));
    emit(&io.out, &jsonv, solution_csv(&mv, &report.solution))
}

fn cmd_solve_normalized(io: IoArgs, flags: SolveFlags, alpha_flag: Option<f64>) -> CResult<()> {
    let spec: ProblemSpec = parse_json(&read_input(&io.input)?, "problem")?;
    if let Some(mode) = &spec.mode {
        if mode != "normalized" {
            return Err(input_err(format!(
                "field 'mode' is \"{mode}\"; solve-normalized expects \"normalized\""
            )));
        }
    }
    let alpha = alpha_flag
        .or(spec.alpha)
        .ok_or_else(|| input_err("the normalized problem needs 'alpha' (field or --alpha)"))?;
    let mv = measure_from_spec(&spec.measure)?;
    let mut opts = spec.solve_options();
    apply_flags(&mut opts, &flags);
    let report = solve_normalized(&mv, alpha, &opts)?;
    let mut jsonv = serde_json::to_value(&report)
        .map_err(|e| input_err(format!("serialization failed: {e}")))?;
    jsonv["branch"] = json!(branch_name(report.gaussian_volume > 0.5));
    emit(&io.out, &jsonv, solution_csv(&mv, &report.solution))
}

fn cmd_solve_smooth(
    io: IoArgs,
    residual_tol: Option<f64>,
    homotopy_steps: Option<usize>,
) -> CResult<()> {
    let spec: SmoothProblemSpec = parse_json(&read_input(&io.input)?, "smooth problem")?;
    let f = spec.density()?;
    let mut opts = spec.options();
    if let Some(v) = residual_tol {
        opts.residual_tol = v;
    }
    if let Some(v) = homotopy_steps {
        opts.homotopy_steps = v;
    }
    let report = solve_smooth(&f, &opts)?;
    let n = report.profile.values.len();
    let diagnostics = serde_json::to_value(report.diagnostics)
        .map_err(|e| input_err(format!("serialization failed: {e}")))?;
    let stages = serde_json::to_value(&report.stages)
        .map_err(|e| input_err(format!("serialization failed: {e}")))?;
    let jsonv = json!({
        "N": n,
        "h": report.profile.values,
        "gamma2": report.gaussian_volume,
        "residual": report.residual,
        "total_mass": report.total_mass,
        "min_curvature_radius": report.min_curvature_radius,
        "max_curvature_radius": report.max_curvature_radius,
        "branch": branch_name(report.on_large_branch),
        "stages": stages,
        "diagnostics": diagnostics,
    });
    let rho = curvature_radii(&report.profile)?;
    let rows = (0..n)
        .map(|j| {
            [
                fnum(PI * j as f64 / n as f64),
                fnum(report.profile.values[j]),
                fnum(f.values[j]),
                fnum(rho[j]),
            ]
            .join(",")
        })
        .collect();
    emit(&io.out, &jsonv, csv_table("theta,h,f,curvature_radius", rows))
}

// ------------------------------------------------------------------ verify

/// Golden-ratio low-discrepancy stream; deterministic across platforms.
struct Lds(u64);

impl Lds {
    fn next(&mut self) -> f64 {
        self.0 += 1;
        (0.618_033_988_749_894_9 * self.0 as f64).fract()
    }
}

fn verify_polygon(k: usize, lds: &mut Lds) -> CResult<AnyBody> {
    let dirs: Vec<Direction> = (0..k)
        .map(|j| Direction::from_angle(PI * (j as f64 + 0.25 + 0.5 * lds.next()) / k as f64))
        .collect();
    let hs: Vec<f64> = (0..k).map(|_| 1.2 + 1.2 * lds.next()).collect();
    Ok(AnyBody::Polygon(wulff_shape_2d(&HBody::new(dirs, hs)?)?.polytope))
}

fn verify_box(dim: usize, lds: &mut Lds) -> CResult<AnyBody> {
    let widths: Vec<f64> = (0..dim).map(|_| 0.4 + 2.0 * lds.next()).collect();
    Ok(AnyBody::Box(SymBox::new(widths)?))
}

/// Like-kind body pairs cycling through polygons and boxes of dimension
/// two through six.
fn verify_pairs(pairs: usize) -> CResult<Vec<(AnyBody, AnyBody, String)>> {
    let mut lds = Lds(0);
    let mut out = Vec::with_capacity(pairs);
    for m in 0..pairs {
        let (a, b, kind) = match m % 4 {
            0 => {
                let k = 3 + (m / 4) % 3;
                (verify_polygon(k, &mut lds)?, verify_polygon(k, &mut lds)?, "polygon".into())
            }
            1 => (verify_box(2, &mut lds)?, verify_box(2, &mut lds)?, "box2".into()),
            2 => (verify_box(3, &mut lds)?, verify_box(3, &mut lds)?, "box3".into()),
            _ => {
                let d = 2 + (m / 4) % 5;
                (verify_box(d, &mut lds)?, verify_box(d, &mut lds)?, format!("box{d}"))
            }
        };
        out.push((a, b, kind));
    }
    Ok(out)
}

struct CheckRow {
    suite: &'static str,
    pair: usize,
    kind: String,
    t: Option<f64>,
    lhs: f64,
    rhs: f64,
    slack: f64,
}

const COMBINATION_TS: [f64; 3] = [0.25, 0.5, 0.75];

fn run_suite(
    suite: &'static str,
    bodies: &[(AnyBody, AnyBody, String)],
    quad: &QuadratureConfig,
) -> CResult<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (m, (a, b, kind)) in bodies.iter().enumerate() {
        let mut push = |t: Option<f64>, lhs: f64, rhs: f64, slack: f64| {
            rows.push(CheckRow { suite, pair: m, kind: kind.clone(), t, lhs, rhs, slack });
        };
        match suite {
            "ehrhard" => {
                for s in check_ehrhard(a, b, &COMBINATION_TS, quad)? {
                    push(Some(s.t), s.lhs, s.rhs, s.slack);
                }
            }
            "log-concavity" => {
                for s in check_log_concavity(a, b, &COMBINATION_TS, quad)? {
                    push(Some(s.t), s.lhs, s.rhs, s.slack);
                }
            }
            "minkowski" => {
                let c = check_minkowski(a, b, quad)?;
                push(None, c.lhs, c.rhs, c.slack);
                let c = check_minkowski(b, a, quad)?;
                push(None, c.lhs, c.rhs, c.slack);
            }
            "isoperimetric" => {
                for body in [a, b] {
                    let c = check_isoperimetric(body, quad)?;
                    push(None, c.lhs, c.rhs, c.slack);
                }
            }
            _ => unreachable!("unknown suite"),
        }
    }
    Ok(rows)
}

const SLACK_FLOOR: f64 = -1e-8;

fn suite_json(name: &str, rows: &[CheckRow], pairs: usize) -> Value {
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|r| r.slack < SLACK_FLOOR).count();
    json!({
        "suite": name,
        "pairs": pairs,
        "checks": rows.len(),
        "min_slack": min_slack,
        "violations": violations,
        "samples": rows
            .iter()
            .map(|r| {
                json!({
                    "pair": r.pair,
                    "kind": r.kind,
                    "t": r.t,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "slack": r.slack,
                })
            })
            .collect::<Vec<_>>(),
    })
}

fn cmd_verify(out: OutArgs, suite: Suite, pairs: usize) -> CResult<()> {
    if pairs == 0 {
        return Err(input_err("--pairs must be at least 1"));
    }
    let quad = QuadratureConfig::default();
    let bodies = verify_pairs(pairs)?;
    let names: &[&'static str] = match suite {
        Suite::Ehrhard => &["ehrhard"],
        Suite::LogConcavity => &["log-concavity"],
        Suite::Minkowski => &["minkowski"],
        Suite::Isoperimetric => &["isoperimetric"],
        Suite::All => &["ehrhard", "log-concavity", "minkowski", "isoperimetric"],
    };
    let mut all_rows = Vec::new();
    let mut suite_objs = Vec::new();
    for name in names {
        let rows = run_suite(name, &bodies, &quad)?;
        suite_objs.push(suite_json(name, &rows, pairs));
        all_rows.extend(rows);
    }
    let min_slack = all_rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let violations = all_rows.iter().filter(|r| r.slack < SLACK_FLOOR).count();
    let jsonv = if suite_objs.len() == 1 {
        suite_objs.pop().unwrap()
    } else {
        json!({"min_slack": min_slack, "violations": violations, "suites": suite_objs})
    };
    let rows = all_rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.suite,
                r.pair,
                r.kind,
                r.t.map(fnum).unwrap_or_default(),
                fnum(r.lhs),
                fnum(r.rhs),
                fnum(r.slack)
            )
        })
        .collect();
    emit(&out, &jsonv, csv_table("suite,pair,kind,t,lhs,rhs,slack", rows))?;
    if violations > 0 {
        return Err(Failure::Flagged(format!(
            "verification flagged {violations} check(s): min slack {min_slack:e} below {SLACK_FLOOR:e}"
        )));
    }
    Ok(())
}

// ----------------------------------------------------- rectangles and balls

fn cmd_sweep(out: OutArgs, epsilon0: f64, samples: usize) -> CResult<()> {
    let sweep = rectangle_sweep(epsilon0, samples)?;
    let (first, second) = rectangle_two_preimages(epsilon0, 0.5)?;
    let mut jsonv = serde_json::to_value(&sweep)
        .map_err(|e| input_err(format!("serialization failed: {e}")))?;
    jsonv["preimages"] = serde_json::to_value([first, second])
        .map_err(|e| input_err(format!("serialization failed: {e}")))?;
    let rows: Vec<String> = sweep
        .samples
        .iter()
        .map(|s| ("sample", s))
        .chain([("preimage", &first), ("preimage", &second)])
        .map(|(role, s)| {
            format!(
                "{role},{},{},{},{},{}",
                fnum(s.a1),
                fnum(s.a2),
                fnum(s.mu1),
                fnum(s.mu2),
                fnum(s.gaussian_volume)
            )
        })
        .collect();
    emit(&out, &jsonv, csv_table("role,a1,a2,mu1,mu2,gaussian_volume", rows))
}

fn cmd_ball_roots(out: OutArgs, level: f64, dim: usize) -> CResult<()> {
    let roots = ball_roots(level, dim, &GaussScalarConfig::default())?;
    let jsonv = json!({
        "level": level,
        "dim": dim,
        "roots": roots
            .map(|r| serde_json::to_value(r).unwrap_or(Value::Null))
            .unwrap_or(Value::Null),
    });
    let row = match &roots {
        Some(r) => format!(
            "{},{dim},{},{},{},{}",
            fnum(level),
            fnum(r.r_small),
            fnum(r.r_large),
            fnum(r.r_peak),
            r.at_peak
        ),
        None => format!("{},{dim},,,,", fnum(level)),
    };
    emit(&out, &jsonv, csv_table("level,dim,r_small,r_large,r_peak,at_peak", vec![row]))
}
