//! Phase-plane construction of the rotationally symmetric steady soliton
//! for n >= 3: the vector field
//!
//!   dx/dt = x(x - y) + (n - 2),   dy/dt = x(y - (n-1)x)
//!
//! with x = phi', y = (n-1)phi' - phi f', dt = dr/phi, has a saddle at
//! (1, n-1); the soliton is the trajectory leaving it along the unstable
//! eigendirection, and the warp is recovered by integrating dphi/dt = x phi,
//! dr/dt = phi alongside.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{dopri45_step, step_factor};
use crate::warp::WarpModel;

/// Deviation 1 - x past which second-order quantities (xy - (n-1) and the
/// X/Y^2 bound gap, both O((1-x)^2) near the saddle) rise above roundoff;
/// strict-inequality checks start here.
pub const PAST_SADDLE_DX: f64 = 1e-6;

/// Reconstructed models are truncated where phi' falls below this value.
/// Beyond it the admissibility quantity Q = xy - (n-2) shrinks to ~x^2
/// while the identity phi phi'' = x^2 - Q cancels catastrophically, so
/// interpolated Q between nodes is integrator-noise-limited; at this floor
/// the signal still exceeds the noise by two orders of magnitude.
pub const TAIL_DPHI_FLOOR: f64 = 2e-3;

/// Accepted steps stored densely before switching to ln(x)-spaced storage.
const STORE_DENSE_ROWS: usize = 4096;
/// ln(x) spacing of stored samples after the dense prefix (~2000 per decade).
const STORE_LNX_SPACING: f64 = core::f64::consts::LN_10 / 2000.0;

/// The t-parametrized phase-plane field of the soliton system.
pub fn vector_field(n: usize, x: f64, y: f64) -> (f64, f64) {
    let nf = n as f64;
    (x * (x - y) + (nf - 2.0), x * (y - (nf - 1.0) * x))
}

/// Jacobian of `vector_field` at (x, y).
fn jacobian(n: usize, x: f64, y: f64) -> [[f64; 2]; 2] {
    let nf = n as f64;
    [[2.0 * x - y, -x], [y - 2.0 * (nf - 1.0) * x, x]]
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SaddleInfo {
    /// (unstable, stable) eigenvalues of the Jacobian at (1, n-1).
    pub eigenvalues: (f64, f64),
    /// Unit unstable eigendirection, oriented with negative x-component
    /// (x decreases, y increases along the soliton trajectory).
    pub unstable_direction: [f64; 2],
}

/// Eigen-decomposition of the linearization at the saddle (1, n-1).
pub fn saddle_linearization(n: usize) -> Result<SaddleInfo> {
    if n < 3 {
        return Err(Error::BadDimension(n, 3));
    }
    let j = jacobian(n, 1.0, n as f64 - 1.0);
    let trace = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = trace * trace - 4.0 * det;
    if det >= 0.0 || disc <= 0.0 {
        return Err(Error::IntegrationDiverged(format!(
            "(1, n-1) is not a saddle for n = {n}"
        )));
    }
    let sq = disc.sqrt();
    let (l_plus, l_minus) = (0.5 * (trace + sq), 0.5 * (trace - sq));
    // eigenvector of l_plus from the first Jacobian row: (a - l) v1 + b v2 = 0
    let (mut vx, mut vy) = (-j[0][1], j[0][0] - l_plus);
    let norm = vx.hypot(vy);
    vx /= norm;
    vy /= norm;
    if vx > 0.0 {
        vx = -vx;
        vy = -vy;
    }
    Ok(SaddleInfo {
        eigenvalues: (l_plus, l_minus),
        unstable_direction: [vx, vy],
    })
}

/// One sample of the trajectory in the t parametrization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhasePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// The same sample in the rescaled coordinates X = sqrt(n-1) x/y,
/// Y = sqrt((n-1)(n-2))/y, with s accumulated from ds = y dt.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RescaledPoint {
    pub s: f64,
    pub x_cap: f64,
    pub y_cap: f64,
}

/// A reconstruction row (r, phi, phi', f') aligned with the phase samples.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReconPoint {
    pub r: f64,
    pub phi: f64,
    pub dphi: f64,
    pub fprime: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegratorStats {
    pub accepted: u64,
    pub rejected: u64,
    pub stored: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// x strictly decreased and y strictly increased at every accepted step.
    pub monotone: bool,
}

#[derive(Debug, Clone)]
pub struct BryantTrajectory {
    pub n: usize,
    pub eps0: f64,
    /// Gauge value of phi at the first sample (see `BryantParams::phi0`).
    pub phi0: f64,
    pub alpha: f64,
    pub phase: Vec<PhasePoint>,
    pub rescaled: Vec<RescaledPoint>,
    pub reconstruction: Vec<ReconPoint>,
    pub stats: IntegratorStats,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BryantParams {
    /// Shooting offset along the unstable eigendirection.
    pub eps0: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integration stops once x falls below this value.
    pub x_stop: f64,
    /// Hard cap on the t span.
    pub t_max: f64,
    /// Gauge value of phi at the first sample; the augmented system is
    /// linear in (phi, r), so this only fixes the soliton's scale.
    pub phi0: f64,
}

impl Default for BryantParams {
    fn default() -> Self {
        Self {
            eps0: 1e-8,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            x_stop: 1e-4,
            t_max: 1e7,
            phi0: 1e-6,
        }
    }
}

impl BryantParams {
    fn validate(&self) -> Result<()> {
        if !(1e-10..=1e-4).contains(&self.eps0) {
            return Err(Error::InvalidParameter(format!(
                "eps0 = {} outside [1e-10, 1e-4]",
                self.eps0
            )));
        }
        if self.rel_tol < 1e-12 || self.abs_tol < 1e-15 {
            return Err(Error::InvalidParameter(
                "tolerances below supported range".into(),
            ));
        }
        if !(self.x_stop > 0.0 && self.x_stop < 1.0) {
            return Err(Error::InvalidParameter(format!("x_stop = {}", self.x_stop)));
        }
        if !(self.phi0 > 0.0) {
            return Err(Error::InvalidParameter(format!("phi0 = {}", self.phi0)));
        }
        Ok(())
    }
}

/// Integrates the trajectory leaving the saddle along its unstable
/// direction until x <= x_stop (or t_max), with embedded DP45 step control.
///
/// The augmented state is (x, y, phi, r); phi and r ride along in the
/// gauge phi(0) = phi0, r(0) = 0. Storage is decimated (dense prefix, then
/// ln x spacing); s accumulates by the trapezoid rule over every accepted
/// step, stored or not.
pub fn integrate_unstable(n: usize, params: &BryantParams) -> Result<BryantTrajectory> {
    params.validate()?;
    let saddle = saddle_linearization(n)?;
    let nf = n as f64;
    let [vx, vy] = saddle.unstable_direction;
    let mut u = [
        1.0 + params.eps0 * vx,
        (nf - 1.0) + params.eps0 * vy,
        params.phi0,
        0.0,
    ];
    let mut t = 0.0;
    let mut s = 0.0;
    let mut h = 1e-6;
    let mut rhs = |_t: f64, u: &[f64; 4]| -> [f64; 4] {
        let (dx, dy) = vector_field(n, u[0], u[1]);
        [dx, dy, u[0] * u[2], u[2]]
    };
    let mut f1 = rhs(t, &u);

    let mut points: Vec<(f64, f64, [f64; 4])> = Vec::with_capacity(STORE_DENSE_ROWS + 8192);
    points.push((t, s, u));
    let mut lnx_last = u[0].ln();
    let mut stats = IntegratorStats {
        accepted: 0,
        rejected: 0,
        stored: 1,
        rel_tol: params.rel_tol,
        abs_tol: params.abs_tol,
        monotone: true,
    };
    let mut y_drops: u32 = 0;

    while u[0] > params.x_stop && t < params.t_max {
        let trial = dopri45_step(&mut rhs, t, &u, &f1, h, params.rel_tol, params.abs_tol);
        if !trial.err_norm.is_finite() {
            return Err(Error::StepFailure(format!(
                "non-finite error estimate at t = {t}"
            )));
        }
        if trial.err_norm <= 1.0 {
            let un = trial.y_new;
            if un[0] <= 0.0 {
                return Err(Error::IntegrationDiverged(format!(
                    "x crossed zero at t = {t} before reaching x_stop = {}",
                    params.x_stop
                )));
            }
            if un[1] < u[1] {
                y_drops += 1;
                if y_drops > 50 {
                    return Err(Error::IntegrationDiverged(
                        "y decreasing persistently".into(),
                    ));
                }
            } else {
                y_drops = 0;
            }
            if !(un[0] < u[0] && un[1] > u[1]) {
                stats.monotone = false;
            }
            s += 0.5 * (u[1] + un[1]) * h;
            t += h;
            u = un;
            f1 = trial.f_new;
            stats.accepted += 1;
            let store =
                points.len() < STORE_DENSE_ROWS || u[0].ln() <= lnx_last - STORE_LNX_SPACING;
            if store {
                points.push((t, s, u));
                lnx_last = u[0].ln();
                stats.stored += 1;
            }
        } else {
            stats.rejected += 1;
        }
        h *= step_factor(trial.err_norm);
        if h < 1e-14 * t.max(1.0) {
            return Err(Error::StepFailure(format!(
                "step size underflow at t = {t}"
            )));
        }
    }
    if points.last().map(|p| p.0) != Some(t) {
        points.push((t, s, u));
        stats.stored += 1;
    }

    let alpha = 1.0 / (nf - 1.0).sqrt();
    let sq1 = (nf - 1.0).sqrt();
    let sq12 = ((nf - 1.0) * (nf - 2.0)).sqrt();
    // shift r so the linear back-extrapolation of phi hits zero at r = 0
    let (_, _, u0) = points[0];
    let r_shift = u0[3] - u0[2] / u0[0];
    let mut phase = Vec::with_capacity(points.len());
    let mut rescaled = Vec::with_capacity(points.len());
    let mut reconstruction = Vec::with_capacity(points.len());
    for &(t, s, u) in &points {
        let [x, y, phi, r] = u;
        phase.push(PhasePoint { t, x, y });
        rescaled.push(RescaledPoint {
            s,
            x_cap: sq1 * x / y,
            y_cap: sq12 / y,
        });
        reconstruction.push(ReconPoint {
            r: r - r_shift,
            phi,
            dphi: x,
            fprime: ((nf - 1.0) * x - y) / phi,
        });
    }
    Ok(BryantTrajectory {
        n,
        eps0: params.eps0,
        phi0: params.phi0,
        alpha,
        phase,
        rescaled,
        reconstruction,
        stats,
    })
}

impl BryantTrajectory {
    /// Index of the first sample past the saddle (1 - x >= PAST_SADDLE_DX).
    pub fn past_saddle_index(&self) -> usize {
        self.phase
            .iter()
            .position(|p| 1.0 - p.x >= PAST_SADDLE_DX)
            .unwrap_or(self.phase.len())
    }

    pub fn final_phase(&self) -> &PhasePoint {
        self.phase.last().unwrap()
    }
}

/// Tail behavior of X/Y^2 against the limit alpha = 1/sqrt(n-1) and the
/// strict bound X/Y^2 < 1/((n-2) alpha), plus the discrete check of
/// d/ds (X/Y^2) = alpha - (X/Y^2)(X^2 - 2 alpha X + 1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioLimitReport {
    pub alpha: f64,
    pub bound: f64,
    pub tail_ratio: f64,
    pub tail_gap: f64,
    pub tail_xy_gap: f64,
    pub initial_ratio: f64,
    pub max_ratio_past_saddle: f64,
    /// X/Y^2 < bound at every past-saddle sample.
    pub strict_bound_held: bool,
    /// sup |d/ds(X/Y^2) - rhs| / sup |rhs| over interior samples.
    pub derivative_rel_err: f64,
}

pub fn verify_ratio_limit(traj: &BryantTrajectory) -> Result<RatioLimitReport> {
    let required = 1e-3;
    let x_final = traj.final_phase().x;
    if x_final > required {
        return Err(Error::TrajectoryTooShort { x_final, required });
    }
    let nf = traj.n as f64;
    let alpha = traj.alpha;
    let bound = 1.0 / ((nf - 2.0) * alpha);
    let m = traj.rescaled.len();
    let ratio: Vec<f64> = traj
        .rescaled
        .iter()
        .map(|p| p.x_cap / (p.y_cap * p.y_cap))
        .collect();
    let s: Vec<f64> = traj.rescaled.iter().map(|p| p.s).collect();
    let k0 = traj.past_saddle_index();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut strict = true;
    for i in k0..m {
        max_ratio = max_ratio.max(ratio[i]);
        if ratio[i] >= bound {
            strict = false;
        }
    }
    // nonuniform central difference of ratio(s) vs the closed-form rhs
    let mut sup_err = 0.0_f64;
    let mut sup_rhs = 0.0_f64;
    for i in 1..m - 1 {
        let (h0, h1) = (s[i] - s[i - 1], s[i + 1] - s[i]);
        let d = (ratio[i + 1] * h0 * h0 - ratio[i - 1] * h1 * h1 + ratio[i] * (h1 * h1 - h0 * h0))
            / (h0 * h1 * (h0 + h1));
        let xc = traj.rescaled[i].x_cap;
        let rhs = alpha - ratio[i] * (xc * xc - 2.0 * alpha * xc + 1.0);
        sup_err = sup_err.max((d - rhs).abs());
        sup_rhs = sup_rhs.max(rhs.abs());
    }
    let last = traj.final_phase();
    Ok(RatioLimitReport {
        alpha,
        bound,
        tail_ratio: ratio[m - 1],
        tail_gap: (ratio[m - 1] - alpha).abs(),
        tail_xy_gap: (last.x * last.y - (nf - 2.0)).abs(),
        initial_ratio: ratio[0],
        max_ratio_past_saddle: max_ratio,
        strict_bound_held: strict,
        derivative_rel_err: sup_err / sup_rhs,
    })
}

/// Builds the tabulated warp model from a trajectory, rescaled to the
/// requested gauge phi0 at the inner sample. The augmented system is
/// linear in (phi, r), so regauging is the exact map
/// (r, phi, f') -> (lambda r, lambda phi, f'/lambda).
///
/// The outer end is truncated at phi' >= TAIL_DPHI_FLOOR (the trajectory
/// itself keeps the full range for the limit lemmas).
pub fn reconstruct_metric(traj: &BryantTrajectory, phi0: f64) -> Result<WarpModel> {
    if !(phi0 > 0.0) {
        return Err(Error::InvalidParameter(format!("phi0 = {phi0}")));
    }
    let scale = phi0 / traj.phi0;
    let mut r = Vec::with_capacity(traj.reconstruction.len());
    let mut phi = Vec::with_capacity(traj.reconstruction.len());
    let mut dphi = Vec::with_capacity(traj.reconstruction.len());
    let mut fprime = Vec::with_capacity(traj.reconstruction.len());
    for p in &traj.reconstruction {
        if p.dphi < TAIL_DPHI_FLOOR {
            break;
        }
        if !(p.phi > 0.0) {
            return Err(Error::IntegrationDiverged(format!(
                "phi = {} not positive at r = {}",
                p.phi, p.r
            )));
        }
        r.push(scale * p.r);
        phi.push(scale * p.phi);
        dphi.push(p.dphi);
        fprime.push(p.fprime / scale);
    }
    if !r.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::NonMonotone("reconstructed radii"));
    }
    WarpModel::from_reconstruction(traj.n, &r, &phi, &dphi, None, Some(&fprime))
}
