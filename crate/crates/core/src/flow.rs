//! The volume-preserving, area-decreasing normal flow
//! dF/dt = ((n-1) phi' - u H) nu for radial graphs, in graph form
//! rho_t = ((n-1) phi'(rho) - u H) v with v = sqrt(1 + |grad rho|^2/phi^2).
//!
//! Explicit midpoint stepping under a parabolic CFL cap. Level sets are
//! stationary; admissible warps drive graphs exponentially to level sets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::{FiberGrid, FiberKind};
use crate::profile::{graph_area, graph_volume};
use crate::warp::WarpModel;

/// Default distance the graph must keep from the domain ends.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// A radial graph at a flow time.
#[derive(Debug, Clone)]
pub struct GraphState {
    pub grid: FiberGrid,
    pub rho: Vec<f64>,
    pub time: f64,
}

impl GraphState {
    /// Validates that rho lives strictly inside the model domain (margin
    /// guard); pole regularity for polar grids comes from the grid's even
    /// reflection stencils.
    pub fn new(model: &WarpModel, grid: FiberGrid, rho: Vec<f64>) -> Result<Self> {
        if rho.len() != grid.len() {
            return Err(Error::InvalidParameter(
                "rho length does not match grid".into(),
            ));
        }
        let state = Self {
            grid,
            rho,
            time: 0.0,
        };
        state.check_inside(model, DEFAULT_MARGIN)?;
        Ok(state)
    }

    pub fn oscillation(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &r in &self.rho {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        hi - lo
    }

    fn check_inside(&self, model: &WarpModel, margin: f64) -> Result<()> {
        let (lo, hi) = (model.r_lo() + margin, model.r_hi() - margin);
        for (i, &r) in self.rho.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::NumericalBlowup { node: i });
            }
            if r < lo || r > hi {
                return Err(Error::FlowEscape {
                    node: i,
                    rho: r,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }
}

/// Per-node slope factor v, support function u = phi/v, mean curvature H.
#[derive(Debug, Clone)]
pub struct GeometricQuantities {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub h_mean: Vec<f64>,
}

struct NodePass {
    v: Vec<f64>,
    u: Vec<f64>,
    h_mean: Vec<f64>,
    speed: Vec<f64>,
    rho_t: Vec<f64>,
    /// CFL majorant: second-order coefficient plus h times the advective one.
    cfl_coeff: f64,
}

fn node_pass(model: &WarpModel, state: &GraphState) -> Result<NodePass> {
    let grid = &state.grid;
    let n = model.n() as f64;
    let len = grid.len();
    let d1 = grid.deriv(&state.rho);
    let d2 = grid.second_deriv(&state.rho);
    let h = grid.spacing();
    let mut v = Vec::with_capacity(len);
    let mut u = Vec::with_capacity(len);
    let mut h_mean = Vec::with_capacity(len);
    let mut speed = Vec::with_capacity(len);
    let mut rho_t = Vec::with_capacity(len);
    let mut cfl_coeff = 1.0_f64;
    let polar = grid.kind() == FiberKind::Polar;
    for i in 0..len {
        let r = state.rho[i];
        model.check_domain(r)?;
        let e = model.warp_unchecked(r);
        if e.phi < crate::warp::EPSILON_PHI {
            return Err(Error::PhiTooSmall {
                r,
                phi: e.phi,
                guard: crate::warp::EPSILON_PHI,
            });
        }
        let (phi, dphi) = (e.phi, e.dphi);
        let w2 = d1[i] * d1[i] + phi * phi;
        let w = w2.sqrt();
        let vi = w / phi;
        let ui = phi / vi;
        let kappa_prof = (-d2[i] + phi * dphi + 2.0 * dphi * d1[i] * d1[i] / phi) / (vi * w2);
        let mut hi = kappa_prof;
        let mut c1 = 0.0;
        if polar {
            let kappa_orb = if grid.is_pole(i) {
                // rho' cot(theta) -> rho'' at the poles
                (dphi / phi - d2[i] / (phi * phi)) / vi
            } else {
                let cot = 1.0 / grid.theta()[i].tan();
                c1 = (n - 2.0) * cot.abs() / (vi * phi);
                (dphi / phi - d1[i] * cot / (phi * phi)) / vi
            };
            hi += (n - 2.0) * kappa_orb;
        }
        let si = (n - 1.0) * dphi - ui * hi;
        let c2 = 1.0 / (phi * vi * vi * vi);
        cfl_coeff = cfl_coeff.max(c2 + h * c1);
        v.push(vi);
        u.push(ui);
        h_mean.push(hi);
        speed.push(si);
        rho_t.push(vi * si);
    }
    Ok(NodePass {
        v,
        u,
        h_mean,
        speed,
        rho_t,
        cfl_coeff,
    })
}

/// Slope factor, support function, and mean curvature per node.
pub fn geometric_quantities(model: &WarpModel, state: &GraphState) -> Result<GeometricQuantities> {
    let p = node_pass(model, state)?;
    Ok(GeometricQuantities {
        v: p.v,
        u: p.u,
        h_mean: p.h_mean,
    })
}

/// The normal speed (n-1) phi'(rho) - u H per node.
pub fn flow_speed(model: &WarpModel, state: &GraphState) -> Result<Vec<f64>> {
    Ok(node_pass(model, state)?.speed)
}

/// Largest stable explicit step: cfl * h^2 / max(1, parabolic coefficient).
pub fn stable_dt(model: &WarpModel, state: &GraphState, cfl: f64) -> Result<f64> {
    let p = node_pass(model, state)?;
    let h = state.grid.spacing();
    Ok(cfl * h * h / p.cfl_coeff)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowParams {
    pub cfl: f64,
    pub osc_tol: f64,
    pub max_steps: u64,
    pub margin: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            cfl: 0.2,
            osc_tol: 1e-6,
            max_steps: 5_000_000,
            margin: DEFAULT_MARGIN,
        }
    }
}

/// One explicit midpoint step of the graph flow.
pub fn step(model: &WarpModel, state: &GraphState, dt: f64) -> Result<GraphState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt}")));
    }
    let k1 = node_pass(model, state)?;
    step_with_pass(model, state, &k1, dt, DEFAULT_MARGIN)
}

fn step_with_pass(
    model: &WarpModel,
    state: &GraphState,
    k1: &NodePass,
    dt: f64,
    margin: f64,
) -> Result<GraphState> {
    let len = state.rho.len();
    let mut mid = state.clone();
    for i in 0..len {
        mid.rho[i] = state.rho[i] + 0.5 * dt * k1.rho_t[i];
    }
    mid.check_inside(model, margin)?;
    let k2 = node_pass(model, &mid)?;
    let mut next = state.clone();
    for i in 0..len {
        next.rho[i] = state.rho[i] + dt * k2.rho_t[i];
    }
    next.time = state.time + dt;
    next.check_inside(model, margin)?;
    Ok(next)
}

/// One diagnostics row per accepted step (and one for the final state).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowDiagnostics {
    pub time: f64,
    pub area: f64,
    pub volume: f64,
    pub oscillation: f64,
    pub max_speed: f64,
}

#[derive(Debug, Clone)]
pub struct FlowRun {
    pub state: GraphState,
    pub diagnostics: Vec<FlowDiagnostics>,
    pub steps: u64,
}

/// Runs the flow until the oscillation max rho - min rho falls below
/// params.osc_tol. Level-set data returns immediately; exceeding
/// max_steps is an error carrying the final oscillation.
pub fn run(model: &WarpModel, state: GraphState, params: &FlowParams) -> Result<FlowRun> {
    let mut state = state;
    state.check_inside(model, params.margin)?;
    let mut diagnostics = Vec::new();
    let mut steps = 0u64;
    loop {
        let pass = node_pass(model, &state)?;
        let osc = state.oscillation();
        let max_speed = pass.speed.iter().fold(0.0_f64, |m, &s| m.max(s.abs()));
        diagnostics.push(FlowDiagnostics {
            time: state.time,
            area: graph_area(model, &state.grid, &state.rho)?,
            volume: graph_volume(model, &state.grid, &state.rho)?,
            oscillation: osc,
            max_speed,
        });
        if osc < params.osc_tol {
            return Ok(FlowRun {
                state,
                diagnostics,
                steps,
            });
        }
        if steps >= params.max_steps {
            return Err(Error::NoConvergence {
                steps,
                oscillation: osc,
            });
        }
        let h = state.grid.spacing();
        let dt = params.cfl * h * h / pass.cfl_coeff;
        state = step_with_pass(model, &state, &pass, dt, params.margin)?;
        steps += 1;
    }
}

/// Least-squares slope of ln(oscillation) against time over the last half
/// of a diagnostics series: negative for exponentially converging runs.
pub fn log_oscillation_slope(diagnostics: &[FlowDiagnostics]) -> Option<f64> {
    let half = &diagnostics[diagnostics.len() / 2..];
    let pts: Vec<(f64, f64)> = half
        .iter()
        .filter(|d| d.oscillation > 0.0)
        .map(|d| (d.time, d.oscillation.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in &pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    (den > 0.0).then(|| num / den)
}
