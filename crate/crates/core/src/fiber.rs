//! Fiber grids for radial graphs: the full circle for n = 2 and the
//! polar-angle arc [0, pi] for axisymmetric graphs over S^{n-1}, n >= 3.
//!
//! Polar grids use even-reflection ghost nodes at both poles, so smooth
//! axisymmetric data automatically satisfies d(rho)/d(theta) = 0 there.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberKind {
    /// Periodic theta in [0, 2pi); ambient dimension 2.
    Circle,
    /// Polar angle theta in [0, pi] including both poles; ambient n >= 3.
    Polar,
}

#[derive(Debug, Clone)]
pub struct FiberGrid {
    kind: FiberKind,
    ambient_n: usize,
    theta: Vec<f64>,
    weight: Vec<f64>,
    h: f64,
}

impl FiberGrid {
    /// Uniform periodic grid on S^1 (n = 2 graphs).
    pub fn circle(nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::GridTooCoarse {
                nodes,
                min: MIN_NODES,
            });
        }
        let h = TAU / nodes as f64;
        let theta = (0..nodes).map(|i| i as f64 * h).collect();
        let weight = vec![h; nodes];
        Ok(Self {
            kind: FiberKind::Circle,
            ambient_n: 2,
            theta,
            weight,
            h,
        })
    }

    /// Closed polar grid on [0, pi] with the sin^{n-2} fiber measure.
    /// Weights are trapezoidal and rescaled so constants integrate exactly
    /// to int_0^pi sin^{n-2}.
    pub fn polar(ambient_n: usize, nodes: usize) -> Result<Self> {
        if ambient_n < 3 {
            return Err(Error::BadDimension(ambient_n, 3));
        }
        if nodes < MIN_NODES {
            return Err(Error::GridTooCoarse {
                nodes,
                min: MIN_NODES,
            });
        }
        let h = PI / (nodes - 1) as f64;
        let theta: Vec<f64> = (0..nodes).map(|i| i as f64 * h).collect();
        let mut weight: Vec<f64> = theta
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let c = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
                c * t.sin().powi(ambient_n as i32 - 2) * h
            })
            .collect();
        let total: f64 = weight.iter().sum();
        let scale = sin_power_integral(ambient_n - 2) / total;
        for w in &mut weight {
            *w *= scale;
        }
        Ok(Self {
            kind: FiberKind::Polar,
            ambient_n,
            theta,
            weight,
            h,
        })
    }

    pub fn kind(&self) -> FiberKind {
        self.kind
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Quadrature weights for the fiber measure (d theta on the circle,
    /// sin^{n-2} theta d theta on the polar arc).
    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    /// Area of the reduced orbit sphere multiplying fiber integrals:
    /// 1 for the circle, omega_{n-2} for axisymmetric grids.
    pub fn orbit_factor(&self) -> f64 {
        match self.kind {
            FiberKind::Circle => 1.0,
            FiberKind::Polar => unit_sphere_area(self.ambient_n - 2),
        }
    }

    /// Neighbor values of a grid function, with periodic wrap on the
    /// circle and even reflection across the poles.
    fn neighbors(&self, f: &[f64], i: usize) -> (f64, f64) {
        let n = f.len();
        match self.kind {
            FiberKind::Circle => (f[(i + n - 1) % n], f[(i + 1) % n]),
            FiberKind::Polar => {
                let prev = if i == 0 { f[1] } else { f[i - 1] };
                let next = if i == n - 1 { f[n - 2] } else { f[i + 1] };
                (prev, next)
            }
        }
    }

    /// Second-order central first derivative.
    pub fn deriv(&self, f: &[f64]) -> Vec<f64> {
        (0..f.len())
            .map(|i| {
                let (fm, fp) = self.neighbors(f, i);
                (fp - fm) / (2.0 * self.h)
            })
            .collect()
    }

    /// Second-order central second derivative.
    pub fn second_deriv(&self, f: &[f64]) -> Vec<f64> {
        (0..f.len())
            .map(|i| {
                let (fm, fp) = self.neighbors(f, i);
                (fp - 2.0 * f[i] + fm) / (self.h * self.h)
            })
            .collect()
    }

    pub fn is_pole(&self, i: usize) -> bool {
        self.kind == FiberKind::Polar && (i == 0 || i == self.len() - 1)
    }
}

/// Surface area of the unit k-sphere S^k in R^{k+1}.
/// omega_0 = 2, omega_1 = 2pi, omega_k = omega_{k-2} * 2pi / (k - 1).
pub fn unit_sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => TAU,
        _ => unit_sphere_area(k - 2) * TAU / (k - 1) as f64,
    }
}

/// int_0^pi sin^k theta d theta by the standard reduction.
pub fn sin_power_integral(k: usize) -> f64 {
    match k {
        0 => PI,
        1 => 2.0,
        _ => sin_power_integral(k - 2) * (k - 1) as f64 / k as f64,
    }
}

/// A radial graph given in closed form: used wherever quadrature wants the
/// exact slope rather than a finite difference.
pub trait GraphFn {
    fn eval(&self, theta: f64) -> f64;
    fn slope(&self, theta: f64) -> f64;

    fn sample(&self, grid: &FiberGrid) -> Vec<f64> {
        grid.theta().iter().map(|&t| self.eval(t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CosineTerm {
    pub mode: u32,
    pub amplitude: f64,
    pub phase: f64,
}

/// rho(theta) = mean + sum_k a_k cos(k theta + b_k).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CosineSeries {
    pub mean: f64,
    pub terms: Vec<CosineTerm>,
}

impl CosineSeries {
    pub fn constant(mean: f64) -> Self {
        Self {
            mean,
            terms: Vec::new(),
        }
    }

    pub fn single(mean: f64, mode: u32, amplitude: f64) -> Self {
        Self {
            mean,
            terms: vec![CosineTerm {
                mode,
                amplitude,
                phase: 0.0,
            }],
        }
    }

    /// Bounds of the realized graph, by dense scan (exact for constants).
    pub fn range(&self) -> (f64, f64) {
        if self.terms.is_empty() {
            return (self.mean, self.mean);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..4096 {
            let v = self.eval(i as f64 / 4096.0 * TAU);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

impl GraphFn for CosineSeries {
    fn eval(&self, theta: f64) -> f64 {
        self.mean
            + self
                .terms
                .iter()
                .map(|t| t.amplitude * (t.mode as f64 * theta + t.phase).cos())
                .sum::<f64>()
    }

    fn slope(&self, theta: f64) -> f64 {
        -self
            .terms
            .iter()
            .map(|t| t.amplitude * t.mode as f64 * (t.mode as f64 * theta + t.phase).sin())
            .sum::<f64>()
    }
}

/// Boundary circle of an off-center round disk in the flat plane,
/// as a radial graph about the origin: the classic equality case that is
/// not a level set when the warp is exactly Euclidean.
#[derive(Debug, Clone, Copy)]
pub struct TranslatedCircle {
    pub radius: f64,
    pub offset: f64,
}

impl GraphFn for TranslatedCircle {
    fn eval(&self, theta: f64) -> f64 {
        let (r, d) = (self.radius, self.offset);
        d * theta.cos() + (r * r - d * d * theta.sin().powi(2)).sqrt()
    }

    fn slope(&self, theta: f64) -> f64 {
        let (r, d) = (self.radius, self.offset);
        let root = (r * r - d * d * theta.sin().powi(2)).sqrt();
        -d * theta.sin() - d * d * theta.sin() * theta.cos() / root
    }
}
