//! Level-set areas A(r), enclosed volumes V(r), the isoperimetric profile
//! xi = A o V^{-1} (F in two dimensions), and area/volume functionals for
//! radial graphs.
//!
//! Volumes are measured from the inner boundary S(r_lo). For the cigar and
//! flat models with r_lo = 0 the inner boundary degenerates to a point and
//! contributes nothing.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::{unit_sphere_area, FiberGrid, GraphFn};
use crate::interp::{hermite_eval, hermite_invert, limit_slopes_monotone};
use crate::quad::{adaptive_simpson, adaptive_simpson_min_depth};
use crate::warp::WarpModel;

/// Relative tolerance for the adaptive volume quadrature.
pub const VOLUME_QUAD_TOL: f64 = 1e-12;

/// Relative tolerance of graph functionals evaluated from closed-form
/// graphs (the route used for deficits).
pub const SERIES_QUAD_TOL: f64 = 1e-12;

/// Nodes used for cumulative-volume tables of analytic warps.
const VOLUME_TABLE_NODES: usize = 4097;

/// Fixed node count of the periodic trapezoid rule used for closed-form
/// graph functionals on the circle (spectrally accurate for smooth data).
const CIRCLE_SERIES_NODES: usize = 2048;

/// W(r) = int_{r_lo}^r phi^{n-1}, tabulated once per model as a cubic
/// Hermite with exact nodal derivatives W' = phi^{n-1}; cell integrals are
/// adaptive, so evaluations are quadrature-accurate at interpolation cost.
#[derive(Debug, Clone)]
pub struct CumulativeVolume {
    r: Vec<f64>,
    w: Vec<f64>,
    dw: Vec<f64>,
}

impl CumulativeVolume {
    pub(crate) fn build(model: &WarpModel) -> Self {
        let r = model.natural_nodes(VOLUME_TABLE_NODES);
        let p = (model.n() - 1) as i32;
        let integrand = |x: f64| model.warp_unchecked(x).phi.powi(p);
        let mut w = vec![0.0; r.len()];
        for i in 1..r.len() {
            w[i] = w[i - 1] + adaptive_simpson(&integrand, r[i - 1], r[i], VOLUME_QUAD_TOL);
        }
        let dw: Vec<f64> = r.iter().map(|&x| integrand(x)).collect();
        Self { r, w, dw }
    }

    /// int_{r_lo}^r phi^{n-1}.
    pub fn eval(&self, r: f64) -> f64 {
        hermite_eval(&self.r, &self.w, &self.dw, r)
    }

    pub fn total(&self) -> f64 {
        self.w[self.w.len() - 1]
    }
}

/// Area of the level set S(r): omega_{n-1} phi(r)^{n-1} (2 pi phi for n=2).
pub fn level_area(model: &WarpModel, r: f64) -> Result<f64> {
    let e = model.warp(r)?;
    let n = model.n();
    Ok(unit_sphere_area(n - 1) * e.phi.powi(n as i32 - 1))
}

/// Volume enclosed between S(r_lo) and S(r):
/// omega_{n-1} int_{r_lo}^r phi^{n-1}.
pub fn level_volume(model: &WarpModel, r: f64) -> Result<f64> {
    model.check_domain(r)?;
    Ok(unit_sphere_area(model.n() - 1) * model.volume_table().eval(r))
}

/// Largest volume representable on the model domain.
pub fn volume_range(model: &WarpModel) -> f64 {
    unit_sphere_area(model.n() - 1) * model.volume_table().total()
}

/// Exact-profile evaluation: solves level_volume(r) = v by monotone
/// inversion of the cumulative table, then returns level_area(r).
/// Quadrature-limited (~1e-11 relative); this is the route deficits use.
pub fn xi_exact(model: &WarpModel, v: f64) -> Result<f64> {
    let omega = unit_sphere_area(model.n() - 1);
    let table = model.volume_table();
    let r = hermite_invert(&table.r, &table.w, &table.dw, v / omega).map_err(|_| {
        Error::ProfileRange {
            v,
            v_max: omega * table.total(),
        }
    })?;
    level_area(model, r)
}

/// Tabulated isoperimetric profile: A and V sampled on a radial grid with
/// monotone cubic interpolation in between. xi(v) inverts the V table and
/// looks up A; for n = 2 the same object is the length/area function F.
#[derive(Debug, Clone, Serialize)]
pub struct IsoProfile {
    pub model_ref: String,
    pub n: usize,
    pub omega: f64,
    pub r_grid: Vec<f64>,
    pub a_values: Vec<f64>,
    pub v_values: Vec<f64>,
    a_slopes: Vec<f64>,
    v_slopes: Vec<f64>,
}

/// Tabulates A and V on `grid_size` radial nodes (>= 16). Analytic warps
/// use a uniform grid; tabulated warps follow their own nodes, which are
/// dense where the warp actually varies.
pub fn build_profile(model: &WarpModel, grid_size: usize) -> Result<IsoProfile> {
    if grid_size < 16 {
        return Err(Error::InvalidParameter(format!(
            "grid_size = {grid_size} < 16"
        )));
    }
    let nodes = model.natural_nodes(grid_size);
    let r_grid: Vec<f64> = if nodes.len() <= grid_size {
        nodes
    } else {
        // decimate, always keeping both ends
        let last = nodes.len() - 1;
        (0..grid_size)
            .map(|i| nodes[i * last / (grid_size - 1)])
            .collect()
    };
    let n = model.n();
    let omega = unit_sphere_area(n - 1);
    let mut a_values = Vec::with_capacity(r_grid.len());
    let mut a_slopes = Vec::with_capacity(r_grid.len());
    let mut v_values = Vec::with_capacity(r_grid.len());
    let mut v_slopes = Vec::with_capacity(r_grid.len());
    for &r in &r_grid {
        let e = model.warp(r)?;
        let a = omega * e.phi.powi(n as i32 - 1);
        a_values.push(a);
        a_slopes.push(omega * (n as f64 - 1.0) * e.phi.powi(n as i32 - 2) * e.dphi);
        v_values.push(omega * model.volume_table().eval(r));
        v_slopes.push(a); // dV/dr = A(r)
    }
    if !v_values.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::NonMonotone("volume table"));
    }
    // Exact slopes limited Fritsch-Carlson style: keeps O(h^4) accuracy on
    // resolved data while guaranteeing monotone interpolants, so deficit
    // signs can be trusted.
    limit_slopes_monotone(&r_grid, &a_values, &mut a_slopes);
    limit_slopes_monotone(&r_grid, &v_values, &mut v_slopes);
    Ok(IsoProfile {
        model_ref: format!("{}(n={})", model.kind().as_str(), n),
        n,
        omega,
        r_grid,
        a_values,
        v_values,
        a_slopes,
        v_slopes,
    })
}

impl IsoProfile {
    /// xi(v): area of the level set enclosing volume v.
    pub fn xi(&self, v: f64) -> Result<f64> {
        let r = self.invert_volume(v)?;
        Ok(hermite_eval(
            &self.r_grid,
            &self.a_values,
            &self.a_slopes,
            r,
        ))
    }

    /// Radius of the level set enclosing volume v (V^{-1}).
    pub fn invert_volume(&self, v: f64) -> Result<f64> {
        hermite_invert(&self.r_grid, &self.v_values, &self.v_slopes, v)
    }

    pub fn v_max(&self) -> f64 {
        *self.v_values.last().unwrap()
    }
}

fn check_rho(model: &WarpModel, rho: &[f64], grid: &FiberGrid) -> Result<()> {
    if grid.len() != rho.len() {
        return Err(Error::InvalidParameter(
            "rho length does not match fiber grid".into(),
        ));
    }
    for &r in rho {
        model.check_domain(r)?;
    }
    Ok(())
}

/// Induced area of the radial graph r = rho(p), discretized on the fiber
/// grid with second-order central slopes:
/// int phi^{n-2} sqrt(phi^2 + |grad rho|^2) d mu.
pub fn graph_area(model: &WarpModel, grid: &FiberGrid, rho: &[f64]) -> Result<f64> {
    check_rho(model, rho, grid)?;
    let slopes = grid.deriv(rho);
    let p = model.n() as i32 - 2;
    let mut total = 0.0;
    for i in 0..rho.len() {
        let phi = model.warp_unchecked(rho[i]).phi;
        total += grid.weights()[i] * phi.powi(p) * (phi * phi + slopes[i] * slopes[i]).sqrt();
    }
    Ok(grid.orbit_factor() * total)
}

/// Volume enclosed between the graph and S(r_lo), discretized on the
/// fiber grid: int W(rho(p)) d mu with W the cumulative volume table.
pub fn graph_volume(model: &WarpModel, grid: &FiberGrid, rho: &[f64]) -> Result<f64> {
    check_rho(model, rho, grid)?;
    for &r in rho {
        if r < model.r_lo() {
            return Err(Error::OutOfDomain {
                r,
                lo: model.r_lo(),
                hi: model.r_hi(),
            });
        }
    }
    let table = model.volume_table();
    let mut total = 0.0;
    for i in 0..rho.len() {
        total += grid.weights()[i] * table.eval(rho[i]);
    }
    Ok(grid.orbit_factor() * total)
}

/// Area of a closed-form graph, using its exact slope. The circle case
/// integrates with a fixed periodic trapezoid rule (spectrally accurate);
/// the axisymmetric case uses adaptive Simpson with the sin^{n-2} weight.
pub fn graph_area_fn(model: &WarpModel, graph: &impl GraphFn) -> Result<f64> {
    let n = model.n();
    let p = n as i32 - 2;
    let integrand = |t: f64| {
        let r = graph.eval(t);
        let phi = model.warp_unchecked(r).phi;
        let dr = graph.slope(t);
        phi.powi(p) * (phi * phi + dr * dr).sqrt()
    };
    fiber_integral(model, graph, integrand)
}

/// Volume below a closed-form graph.
pub fn graph_volume_fn(model: &WarpModel, graph: &impl GraphFn) -> Result<f64> {
    let table = model.volume_table();
    let integrand = |t: f64| table.eval(graph.eval(t));
    fiber_integral(model, graph, integrand)
}

fn fiber_integral(
    model: &WarpModel,
    graph: &impl GraphFn,
    integrand: impl Fn(f64) -> f64,
) -> Result<f64> {
    use std::f64::consts::{PI, TAU};
    let n = model.n();
    let span = if n == 2 { TAU } else { PI };
    // domain check at dense samples
    for i in 0..=256 {
        model.check_domain(graph.eval(i as f64 / 256.0 * span))?;
    }
    if n == 2 {
        let h = TAU / CIRCLE_SERIES_NODES as f64;
        Ok((0..CIRCLE_SERIES_NODES)
            .map(|i| integrand(i as f64 * h))
            .sum::<f64>()
            * h)
    } else {
        let k = n as i32 - 2;
        let weighted = |t: f64| integrand(t) * t.sin().powi(k);
        // forced subdivision defeats dyadic aliasing of high modes
        Ok(unit_sphere_area(n - 2)
            * adaptive_simpson_min_depth(&weighted, 0.0, PI, SERIES_QUAD_TOL, 7))
    }
}

/// Area, volume, and isoperimetric deficit of one graph.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GraphFunctional {
    pub area: f64,
    pub volume: f64,
    /// area - xi(volume); nonnegative for admissible models.
    pub deficit: f64,
}

impl GraphFunctional {
    /// Evaluates a closed-form graph against the exact profile.
    pub fn of_graph(model: &WarpModel, graph: &impl GraphFn) -> Result<Self> {
        let area = graph_area_fn(model, graph)?;
        let volume = graph_volume_fn(model, graph)?;
        let deficit = area - xi_exact(model, volume)?;
        Ok(Self {
            area,
            volume,
            deficit,
        })
    }

    /// Evaluates a grid graph with the discrete functionals.
    pub fn of_grid(model: &WarpModel, grid: &FiberGrid, rho: &[f64]) -> Result<Self> {
        let area = graph_area(model, grid, rho)?;
        let volume = graph_volume(model, grid, rho)?;
        let deficit = area - xi_exact(model, volume)?;
        Ok(Self {
            area,
            volume,
            deficit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::CosineSeries;
    use std::f64::consts::{PI, TAU};

    const TWO_PI_TANH_1: f64 = 4.785237210735100498; // 2 pi tanh 1
    const TWO_PI_LOGCOSH_1: f64 = 2.725525340627115306; // 2 pi log cosh 1

    #[test]
    fn level_area_values() {
        let flat2 = WarpModel::euclidean(2).unwrap();
        assert!((level_area(&flat2, 1.0).unwrap() - TAU).abs() < 1e-14);
        let cigar = WarpModel::cigar();
        assert!((level_area(&cigar, 1.0).unwrap() - TWO_PI_TANH_1).abs() < 1e-13);
        let flat3 = WarpModel::euclidean(3).unwrap();
        assert!((level_area(&flat3, 2.0).unwrap() - 16.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn level_volume_values() {
        let flat2 = WarpModel::euclidean(2).unwrap();
        assert!((level_volume(&flat2, 1.0).unwrap() - PI).abs() < 1e-11);
        let cigar = WarpModel::cigar();
        assert!((level_volume(&cigar, 1.0).unwrap() - TWO_PI_LOGCOSH_1).abs() < 1e-10);
        assert_eq!(level_volume(&cigar, 0.0).unwrap(), 0.0);
        assert!(level_volume(&cigar, 7.0).is_err());
    }

    #[test]
    fn euclidean_profile_is_sqrt_4pi_v() {
        let m = WarpModel::euclidean(2).unwrap();
        let prof = build_profile(&m, 1024).unwrap();
        for i in 0..=500 {
            let v = prof.v_max() * i as f64 / 500.0;
            let xi = prof.xi(v).unwrap();
            let exact = (4.0 * PI * v).sqrt();
            assert!((xi - exact).abs() <= 1e-6, "v={v} xi={xi} exact={exact}");
        }
    }

    #[test]
    fn cigar_f_matches_closed_form() {
        let m = WarpModel::cigar();
        let prof = build_profile(&m, 1024).unwrap();
        for i in 0..=500 {
            let a = prof.v_max() * i as f64 / 500.0;
            let f = prof.xi(a).unwrap();
            let exact = TAU * (1.0 - (-a / PI).exp()).sqrt();
            assert!((f - exact).abs() <= 1e-6, "a={a} F={f} exact={exact}");
        }
        // spot value: at a = 2 pi log cosh 1 the profile returns 2 pi tanh 1
        let f1 = prof.xi(TWO_PI_LOGCOSH_1).unwrap();
        assert!((f1 - TWO_PI_TANH_1).abs() < 1e-7);
    }

    #[test]
    fn profile_reproduces_nodes() {
        let m = WarpModel::cigar();
        let prof = build_profile(&m, 64).unwrap();
        for i in 0..prof.r_grid.len() {
            let xi = prof.xi(prof.v_values[i]).unwrap();
            assert!((xi - prof.a_values[i]).abs() <= 1e-12 * (1.0 + prof.a_values[i]));
        }
    }

    #[test]
    fn profile_out_of_range_is_error() {
        let m = WarpModel::cigar();
        let prof = build_profile(&m, 64).unwrap();
        assert!(prof.xi(prof.v_max() * 1.01).is_err());
        assert!(prof.xi(-0.1).is_err());
        assert!(xi_exact(&m, volume_range(&m) * 1.01).is_err());
    }

    #[test]
    fn xi_exact_matches_level_sets() {
        for m in [WarpModel::cigar(), WarpModel::euclidean(3).unwrap()] {
            for i in 1..=20 {
                let r = m.r_lo() + (m.r_hi() - m.r_lo()) * i as f64 / 20.0;
                let v = level_volume(&m, r).unwrap();
                let a = level_area(&m, r).unwrap();
                let xi = xi_exact(&m, v).unwrap();
                assert!((xi - a).abs() <= 1e-9 * (1.0 + a), "r={r} xi={xi} a={a}");
            }
        }
    }

    #[test]
    fn constant_graph_matches_level_set() {
        let cases: Vec<(WarpModel, FiberGrid)> = vec![
            (WarpModel::cigar(), FiberGrid::circle(256).unwrap()),
            (
                WarpModel::euclidean(3).unwrap(),
                FiberGrid::polar(3, 129).unwrap(),
            ),
            (
                WarpModel::euclidean(5).unwrap(),
                FiberGrid::polar(5, 129).unwrap(),
            ),
        ];
        for (m, g) in cases {
            let r = 1.0;
            let rho = vec![r; g.len()];
            let a = graph_area(&m, &g, &rho).unwrap();
            let v = graph_volume(&m, &g, &rho).unwrap();
            let la = level_area(&m, r).unwrap();
            let lv = level_volume(&m, r).unwrap();
            assert!((a - la).abs() <= 1e-8 * (1.0 + la), "area {a} vs {la}");
            assert!((v - lv).abs() <= 1e-8 * (1.0 + lv), "volume {v} vs {lv}");
        }
    }

    #[test]
    fn cigar_constant_graph_value() {
        let m = WarpModel::cigar();
        let g = FiberGrid::circle(256).unwrap();
        let a = graph_area(&m, &g, &vec![1.0; 256]).unwrap();
        assert!((a - TWO_PI_TANH_1).abs() < 1e-8);
    }

    #[test]
    fn wavy_flat_graph_volume_and_strictness() {
        let m = WarpModel::euclidean(2).unwrap();
        let series = CosineSeries::single(1.0, 1, 0.1);
        // volume: int rho^2/2 = pi(1 + 0.005)
        let v = graph_volume_fn(&m, &series).unwrap();
        assert!((v - PI * 1.005).abs() < 1e-6, "v={v}");
        // area strictly above the level set of equal volume
        let f = GraphFunctional::of_graph(&m, &series).unwrap();
        // mode 1 on the flat model is nearly a translation, so the
        // deficit is fourth-order small but still strictly positive
        assert!(f.deficit > 1e-6, "deficit={}", f.deficit);
    }

    #[test]
    fn graph_volume_at_inner_boundary_is_zero() {
        let m = WarpModel::cigar();
        let g = FiberGrid::circle(64).unwrap();
        let v = graph_volume(&m, &g, &vec![0.0; 64]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn grid_and_specialized_curve_length_agree() {
        // n = 2: general weighted formula vs the plain curve-length formula
        // on identical grids.
        let m = WarpModel::cigar();
        let g = FiberGrid::circle(128).unwrap();
        let rho: Vec<f64> = g
            .theta()
            .iter()
            .map(|&t| 1.0 + 0.1 * (2.0 * t).cos())
            .collect();
        let a = graph_area(&m, &g, &rho).unwrap();
        let d = g.deriv(&rho);
        let mut length = 0.0;
        for i in 0..g.len() {
            let phi = m.warp(rho[i]).unwrap().phi;
            length += g.weights()[i] * (d[i] * d[i] + phi * phi).sqrt();
        }
        assert!((a - length).abs() <= 1e-10 * length.max(1.0));
    }

    #[test]
    fn quadrature_second_order_convergence() {
        let m = WarpModel::cigar();
        let vals: Vec<f64> = [128usize, 256, 512]
            .iter()
            .map(|&nn| {
                let g = FiberGrid::circle(nn).unwrap();
                let rho: Vec<f64> = g
                    .theta()
                    .iter()
                    .map(|&t| 1.0 + 0.2 * (3.0 * t).cos())
                    .collect();
                graph_area(&m, &g, &rho).unwrap()
            })
            .collect();
        let d1 = (vals[1] - vals[0]).abs();
        let d2 = (vals[2] - vals[1]).abs();
        let order = (d1 / d2).log2();
        assert!(order > 1.7, "order={order} d1={d1:.3e} d2={d2:.3e}");
    }

    #[test]
    fn profile_identity_random_radii() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in [WarpModel::cigar(), WarpModel::euclidean(3).unwrap()] {
            let prof = build_profile(&m, 2048).unwrap();
            for _ in 0..100 {
                let r = rng.gen_range(m.r_lo()..m.r_hi());
                let a = level_area(&m, r).unwrap();
                let v = level_volume(&m, r).unwrap();
                let xi = prof.xi(v).unwrap();
                assert!((xi - a).abs() <= 1e-6 * (1.0 + a), "r={r}");
            }
        }
    }

    #[test]
    fn xi_monotone_on_grid() {
        for m in [WarpModel::cigar(), WarpModel::euclidean(3).unwrap()] {
            let prof = build_profile(&m, 512).unwrap();
            let mut prev = -1.0;
            for i in 0..=2000 {
                let v = prof.v_max() * i as f64 / 2000.0;
                let xi = prof.xi(v).unwrap();
                assert!(xi >= prev - 1e-12, "v={v}");
                prev = xi;
            }
        }
    }
}
