//! Command implementations. Every command echoes its resolved
//! configuration beside each artifact and writes atomically; exit code 0
//! means success, 2 a verification failure, 1 a usage or runtime error.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use isolab_core::bryant::{
    integrate_unstable, reconstruct_metric, saddle_linearization, verify_ratio_limit, BryantParams,
};
use isolab_core::experiments::{check_inequality, DEFICIT_TOL};
use isolab_core::fiber::FiberGrid;
use isolab_core::flow::{log_oscillation_slope, run, FlowParams, GraphState};
use isolab_core::profile::build_profile;
use isolab_core::warp::WarpModel;
use isolab_core::Error as CoreError;

use crate::artifacts::write_with_config;
use crate::models::resolve_model;
use crate::series_parse::parse_cosine_series;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

fn fmt_csv(values: &[f64]) -> String {
    let mut line = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        let _ = write!(line, "{v}");
    }
    line
}

// ---------------------------------------------------------------- cigar

#[derive(Debug, Args, Serialize)]
pub struct CigarVerifyArgs {
    /// Truncation of the radial domain [0, s_max].
    #[arg(long, default_value_t = 6.0)]
    pub s_max: f64,
    /// Residual/condition grid size.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    /// Report path (JSON).
    #[arg(long, default_value = "cigar-verify.json")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct CigarReport {
    model: &'static str,
    s_max: f64,
    grid: usize,
    soliton_max_abs: f64,
    q_at_inner: f64,
    q_min: f64,
    q_max: f64,
    admissible: bool,
    strict: bool,
    q_strictly_decreasing: bool,
    pass: bool,
}

pub fn cigar_verify(args: &CigarVerifyArgs) -> Result<i32> {
    let model = WarpModel::cigar_truncated(args.s_max);
    let residual = model.soliton_residual(args.grid)?;
    let cond = model.check_condition(1.0, args.grid)?;
    let decreasing = cond.q_values.windows(2).all(|w| w[1] < w[0]);
    let pass = residual.max_abs <= 1e-10
        && cond.admissible
        && (cond.q_max - 1.0).abs() <= 1e-12
        && (cond.q_values[0] - 1.0).abs() <= 1e-12
        && decreasing;
    let report = CigarReport {
        model: "cigar",
        s_max: args.s_max,
        grid: args.grid,
        soliton_max_abs: residual.max_abs,
        q_at_inner: cond.q_values[0],
        q_min: cond.q_min,
        q_max: cond.q_max,
        admissible: cond.admissible,
        strict: cond.strict,
        q_strictly_decreasing: decreasing,
        pass,
    };
    write_with_config(&args.out, &serde_json::to_string_pretty(&report)?, args)?;
    println!(
        "cigar-verify: residual max {:.3e}, Q in [{:.6}, {:.6}], {}",
        report.soliton_max_abs,
        report.q_min,
        report.q_max,
        if pass { "pass" } else { "FAIL" }
    );
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

// --------------------------------------------------------------- bryant

#[derive(Debug, Args, Serialize)]
pub struct BryantCommonArgs {
    /// Ambient dimension n >= 3.
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub x_stop: f64,
    /// Gauge value of phi at the inner sample.
    #[arg(long, default_value_t = 1e-6)]
    pub phi0: f64,
}

impl BryantCommonArgs {
    fn params(&self) -> BryantParams {
        BryantParams {
            eps0: self.eps0,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            x_stop: self.x_stop,
            t_max: 1e7,
            phi0: self.phi0,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BryantBuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: BryantCommonArgs,
    /// Trajectory CSV path (header t,x,y,s,X,Y,r,phi,dphi,fprime).
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// Reconstructed model path (interchange JSON schema).
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

pub fn bryant_build(args: &BryantBuildArgs) -> Result<i32> {
    let n = args.common.dim;
    let traj = integrate_unstable(n, &args.common.params())?;
    let model = reconstruct_metric(&traj, args.common.phi0)?;
    let csv_path = args
        .csv_out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("bryant{n}-trajectory.csv")));
    let model_path = args
        .model_out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("bryant{n}.json")));

    let mut csv = String::from("t,x,y,s,X,Y,r,phi,dphi,fprime\n");
    for i in 0..traj.phase.len() {
        let p = &traj.phase[i];
        let q = &traj.rescaled[i];
        let rec = &traj.reconstruction[i];
        csv.push_str(&fmt_csv(&[
            p.t, p.x, p.y, q.s, q.x_cap, q.y_cap, rec.r, rec.phi, rec.dphi, rec.fprime,
        ]));
        csv.push('\n');
    }
    write_with_config(&csv_path, &csv, args)?;
    write_with_config(&model_path, &model.to_json(0)?, args)?;
    println!(
        "bryant-build n={n}: {} accepted steps, {} stored rows, model domain [{:.4e}, {:.4e}]",
        traj.stats.accepted,
        traj.stats.stored,
        model.r_lo(),
        model.r_hi()
    );
    Ok(EXIT_OK)
}

#[derive(Debug, Args, Serialize)]
pub struct BryantLemmasArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: BryantCommonArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct LemmasReport {
    n: usize,
    eigenvalues: (f64, f64),
    unstable_direction: [f64; 2],
    fixed_point_residual: f64,
    alpha: f64,
    bound: f64,
    tail_ratio: f64,
    tail_gap: f64,
    tail_xy_gap: f64,
    initial_ratio: f64,
    strict_bound_held: bool,
    derivative_rel_err: f64,
    xy_bounds_held: bool,
    monotone: bool,
    pass: bool,
}

pub fn bryant_lemmas(args: &BryantLemmasArgs) -> Result<i32> {
    let n = args.common.dim;
    let nf = n as f64;
    let traj = integrate_unstable(n, &args.common.params())?;
    let rep = verify_ratio_limit(&traj)?;
    let saddle = saddle_linearization(n)?;
    let fp = {
        let (dx, dy) = isolab_core::bryant::vector_field(n, 1.0, nf - 1.0);
        let (dx2, dy2) = isolab_core::bryant::vector_field(n, -1.0, -(nf - 1.0));
        dx.abs().max(dy.abs()).max(dx2.abs()).max(dy2.abs())
    };
    let k0 = traj.past_saddle_index();
    let xy_bounds_held = traj.phase.iter().enumerate().all(|(i, p)| {
        let xy = p.x * p.y;
        xy > nf - 2.0 && (i < k0 || xy < nf - 1.0) && xy <= (nf - 1.0) * (1.0 + 8.0 * f64::EPSILON)
    });
    let pass = fp <= 1e-14
        && xy_bounds_held
        && rep.tail_xy_gap <= 1e-3
        && rep.tail_gap <= 5e-3
        && rep.strict_bound_held
        && rep.derivative_rel_err <= 1e-2
        && traj.stats.monotone;
    let report = LemmasReport {
        n,
        eigenvalues: saddle.eigenvalues,
        unstable_direction: saddle.unstable_direction,
        fixed_point_residual: fp,
        alpha: rep.alpha,
        bound: rep.bound,
        tail_ratio: rep.tail_ratio,
        tail_gap: rep.tail_gap,
        tail_xy_gap: rep.tail_xy_gap,
        initial_ratio: rep.initial_ratio,
        strict_bound_held: rep.strict_bound_held,
        derivative_rel_err: rep.derivative_rel_err,
        xy_bounds_held,
        monotone: traj.stats.monotone,
        pass,
    };
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("bryant{n}-lemmas.json")));
    write_with_config(&out, &serde_json::to_string_pretty(&report)?, args)?;
    println!(
        "bryant-lemmas n={n}: tail X/Y^2 gap {:.2e}, tail xy gap {:.2e}, {}",
        report.tail_gap,
        report.tail_xy_gap,
        if pass { "pass" } else { "FAIL" }
    );
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

// -------------------------------------------------------------- profile

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[command(subcommand)]
    #[serde(skip)]
    pub action: Option<ProfileAction>,
    /// Builtin model name or path to an interchange JSON file.
    #[arg(long, default_value = "cigar")]
    pub model: String,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// CSV output (header r,A,V).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON sidecar with interpolation metadata.
    #[arg(long)]
    pub meta_out: Option<PathBuf>,
    #[arg(long, default_value = ".isolab-cache")]
    pub cache_dir: PathBuf,
}

#[derive(Debug, Clone, clap::Subcommand)]
pub enum ProfileAction {
    /// Evaluate xi at a volume and print the area.
    Eval {
        #[arg(long)]
        v: f64,
    },
}

#[derive(Serialize)]
struct ProfileMeta {
    model_ref: String,
    n: usize,
    grid: usize,
    omega: f64,
    r_lo: f64,
    r_hi: f64,
    v_max: f64,
    interpolation: &'static str,
}

pub fn profile_cmd(args: &ProfileArgs) -> Result<i32> {
    let model = resolve_model(&args.model, &args.cache_dir)?;
    let prof = build_profile(&model, args.grid)?;
    if let Some(ProfileAction::Eval { v }) = &args.action {
        match prof.xi(*v) {
            Ok(area) => {
                println!("{area}");
                return Ok(EXIT_OK);
            }
            Err(e) => {
                eprintln!("profile eval: {e}");
                return Ok(EXIT_USAGE);
            }
        }
    }
    let tag = args.model.replace(['/', '.'], "-");
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{tag}-profile.csv")));
    let meta_out = args
        .meta_out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{tag}-profile.meta.json")));
    let mut csv = String::from("r,A,V\n");
    for i in 0..prof.r_grid.len() {
        csv.push_str(&fmt_csv(&[
            prof.r_grid[i],
            prof.a_values[i],
            prof.v_values[i],
        ]));
        csv.push('\n');
    }
    write_with_config(&out, &csv, args)?;
    let meta = ProfileMeta {
        model_ref: prof.model_ref.clone(),
        n: prof.n,
        grid: args.grid,
        omega: prof.omega,
        r_lo: prof.r_grid[0],
        r_hi: *prof.r_grid.last().unwrap(),
        v_max: prof.v_max(),
        interpolation: "monotone cubic (limited exact-slope Hermite), linear clamp at table ends",
    };
    write_with_config(&meta_out, &serde_json::to_string_pretty(&meta)?, args)?;
    println!(
        "profile: {} rows for {}, V range [0, {:.6e}]",
        prof.r_grid.len(),
        prof.model_ref,
        prof.v_max()
    );
    Ok(EXIT_OK)
}

// ----------------------------------------------------------------- flow

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    #[arg(long, default_value = "cigar")]
    pub model: String,
    /// Initial graph as a cosine series, e.g. "1 + 0.1 cos(2theta)".
    #[arg(long)]
    pub init: String,
    #[arg(long, default_value_t = 256)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.2)]
    pub cfl: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub osc_tol: f64,
    #[arg(long, default_value_t = 5_000_000)]
    pub max_steps: u64,
    /// Diagnostics CSV (header time,area,volume,oscillation,max_speed).
    #[arg(long, default_value = "flow-diagnostics.csv")]
    pub diag_out: PathBuf,
    /// Run summary JSON.
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    #[arg(long, default_value = ".isolab-cache")]
    pub cache_dir: PathBuf,
}

#[derive(Serialize)]
struct FlowSummary {
    model: String,
    nodes: usize,
    steps: u64,
    time: f64,
    initial_area: f64,
    final_area: f64,
    initial_volume: f64,
    final_volume: f64,
    volume_drift_rel: f64,
    final_oscillation: f64,
    log_oscillation_slope: Option<f64>,
    converged: bool,
}

pub fn flow_cmd(args: &FlowArgs) -> Result<i32> {
    let model = resolve_model(&args.model, &args.cache_dir)?;
    let series = parse_cosine_series(&args.init).context("parsing --init")?;
    let grid = if model.n() == 2 {
        FiberGrid::circle(args.nodes)?
    } else {
        FiberGrid::polar(model.n(), args.nodes)?
    };
    let rho: Vec<f64> = grid
        .theta()
        .iter()
        .map(|&t| isolab_core::fiber::GraphFn::eval(&series, t))
        .collect();
    let state = GraphState::new(&model, grid, rho)?;
    let params = FlowParams {
        cfl: args.cfl,
        osc_tol: args.osc_tol,
        max_steps: args.max_steps,
        ..Default::default()
    };
    let outcome = run(&model, state, &params);
    let (converged, out) = match outcome {
        Ok(out) => (true, out),
        Err(CoreError::NoConvergence { steps, oscillation }) => {
            eprintln!("flow did not converge within {steps} steps (oscillation {oscillation:.3e})");
            return Ok(EXIT_VERIFY);
        }
        Err(CoreError::FlowEscape { node, rho, lo, hi }) => {
            eprintln!("flow escaped the domain at node {node}: rho = {rho} outside [{lo}, {hi}]");
            return Ok(EXIT_VERIFY);
        }
        Err(e) => return Err(e.into()),
    };
    let mut csv = String::from("time,area,volume,oscillation,max_speed\n");
    for d in &out.diagnostics {
        csv.push_str(&fmt_csv(&[
            d.time,
            d.area,
            d.volume,
            d.oscillation,
            d.max_speed,
        ]));
        csv.push('\n');
    }
    write_with_config(&args.diag_out, &csv, args)?;
    let first = out.diagnostics.first().unwrap();
    let last = out.diagnostics.last().unwrap();
    let drift = out
        .diagnostics
        .iter()
        .map(|d| (d.volume - first.volume).abs())
        .fold(0.0_f64, f64::max)
        / first.volume;
    let summary = FlowSummary {
        model: args.model.clone(),
        nodes: args.nodes,
        steps: out.steps,
        time: out.state.time,
        initial_area: first.area,
        final_area: last.area,
        initial_volume: first.volume,
        final_volume: last.volume,
        volume_drift_rel: drift,
        final_oscillation: last.oscillation,
        log_oscillation_slope: log_oscillation_slope(&out.diagnostics),
        converged,
    };
    if let Some(path) = &args.summary_out {
        write_with_config(path, &serde_json::to_string_pretty(&summary)?, args)?;
    }
    println!(
        "flow: {} steps to oscillation {:.3e}; area {:.8} -> {:.8}; volume drift {:.3e}",
        out.steps, last.oscillation, first.area, last.area, drift
    );
    Ok(EXIT_OK)
}

// -------------------------------------------------------------- isocheck

#[derive(Debug, Args, Serialize)]
pub struct IsocheckArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Master seed; per-sample seeds are seed+1 ..= seed+samples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFICIT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 8)]
    pub max_mode: u32,
    #[arg(long, default_value_t = 0.1)]
    pub amplitude: f64,
    #[arg(long, default_value = "isocheck-report.json")]
    pub report: PathBuf,
    #[arg(long, default_value = ".isolab-cache")]
    pub cache_dir: PathBuf,
}

#[derive(Serialize)]
struct IsocheckReport {
    model: String,
    admissible: bool,
    q_min: f64,
    q_max: f64,
    samples: usize,
    violations: usize,
    min_deficit: f64,
    equality_cases: usize,
    report: isolab_core::experiments::InequalityReport,
}

pub fn isocheck_cmd(args: &IsocheckArgs) -> Result<i32> {
    let model = resolve_model(&args.model, &args.cache_dir)?;
    let cond = model.check_condition(1.0, 2048)?;
    let rep = check_inequality(
        &model,
        args.samples,
        args.tol,
        args.seed,
        args.max_mode,
        args.amplitude,
    )?;
    let pass = rep.violations == 0;
    let report = IsocheckReport {
        model: args.model.clone(),
        admissible: cond.admissible,
        q_min: cond.q_min,
        q_max: cond.q_max,
        samples: rep.samples,
        violations: rep.violations,
        min_deficit: rep.min_deficit,
        equality_cases: rep.equality_cases.len(),
        report: rep,
    };
    write_with_config(&args.report, &serde_json::to_string_pretty(&report)?, args)?;
    println!(
        "isocheck {}: {} samples, {} violations, min deficit {:.3e}, {}",
        args.model,
        report.samples,
        report.violations,
        report.min_deficit,
        if pass { "pass" } else { "FAIL" }
    );
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}
