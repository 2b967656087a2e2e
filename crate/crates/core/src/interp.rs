//! Piecewise cubic Hermite interpolation on strictly increasing node tables.
//!
//! Tables store nodal values together with nodal derivatives. When the
//! derivatives are exact the interpolant is O(h^4); when they come from
//! the Fritsch–Carlson limiter the interpolant is monotone on monotone
//! data.

use crate::error::{Error, Result};

/// Index of the cell [xs[i], xs[i+1]] containing x, clamped to the table.
pub fn locate(xs: &[f64], x: f64) -> usize {
    match xs.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(xs.len() - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(xs.len() - 2),
    }
}

/// Cubic Hermite value at x.
pub fn hermite_eval(xs: &[f64], ys: &[f64], ds: &[f64], x: f64) -> f64 {
    let i = locate(xs, x);
    let h = xs[i + 1] - xs[i];
    let u = (x - xs[i]) / h;
    let (u2, u3) = (u * u, u * u * u);
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    h00 * ys[i] + h10 * h * ds[i] + h01 * ys[i + 1] + h11 * h * ds[i + 1]
}

/// Derivative of the cubic Hermite interpolant at x.
pub fn hermite_deriv(xs: &[f64], ys: &[f64], ds: &[f64], x: f64) -> f64 {
    let i = locate(xs, x);
    let h = xs[i + 1] - xs[i];
    let u = (x - xs[i]) / h;
    let u2 = u * u;
    let dh00 = (6.0 * u2 - 6.0 * u) / h;
    let dh10 = 3.0 * u2 - 4.0 * u + 1.0;
    let dh01 = (-6.0 * u2 + 6.0 * u) / h;
    let dh11 = 3.0 * u2 - 2.0 * u;
    dh00 * ys[i] + dh10 * ds[i] + dh01 * ys[i + 1] + dh11 * ds[i + 1]
}

/// Exact integral of the Hermite interpolant over one full cell.
pub fn hermite_cell_integral(xs: &[f64], ys: &[f64], ds: &[f64], i: usize) -> f64 {
    let h = xs[i + 1] - xs[i];
    // int_0^1 h00 = 1/2, h10 = 1/12, h01 = 1/2, h11 = -1/12
    h * (0.5 * (ys[i] + ys[i + 1]) + h * (ds[i] - ds[i + 1]) / 12.0)
}

/// Fritsch–Carlson slope limiter: clamps candidate slopes so the Hermite
/// interpolant of monotone data stays monotone. Slopes that already lie
/// inside the monotonicity region are untouched, so exact derivatives of
/// well-resolved data keep their O(h^4) accuracy.
pub fn limit_slopes_monotone(xs: &[f64], ys: &[f64], ds: &mut [f64]) {
    let m = xs.len() - 1;
    for i in 0..m {
        let delta = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        if delta == 0.0 {
            ds[i] = 0.0;
            ds[i + 1] = 0.0;
            continue;
        }
        for j in [i, i + 1] {
            let a = ds[j] / delta;
            if a < 0.0 {
                ds[j] = 0.0;
            } else if a > 3.0 {
                ds[j] = 3.0 * delta;
            }
        }
    }
}

/// Three-point slope estimates for tabulated data (no derivatives known),
/// limited per Fritsch–Carlson. This is the classic PCHIP construction.
pub fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut ds = vec![0.0; n];
    if n == 2 {
        let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        ds[0] = d;
        ds[1] = d;
        return ds;
    }
    for i in 1..n - 1 {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        let d0 = (ys[i] - ys[i - 1]) / h0;
        let d1 = (ys[i + 1] - ys[i]) / h1;
        if d0 * d1 <= 0.0 {
            ds[i] = 0.0;
        } else {
            // weighted harmonic mean (Fritsch–Butland)
            let w0 = 2.0 * h1 + h0;
            let w1 = h1 + 2.0 * h0;
            ds[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
        }
    }
    ds[0] = edge_slope(
        xs[1] - xs[0],
        xs[2] - xs[1],
        (ys[1] - ys[0]) / (xs[1] - xs[0]),
        (ys[2] - ys[1]) / (xs[2] - xs[1]),
    );
    ds[n - 1] = edge_slope(
        xs[n - 1] - xs[n - 2],
        xs[n - 2] - xs[n - 3],
        (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]),
        (ys[n - 2] - ys[n - 3]) / (xs[n - 2] - xs[n - 3]),
    );
    limit_slopes_monotone(xs, ys, &mut ds);
    ds
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Solves y(x) = target on a strictly increasing Hermite table by cell
/// bisection followed by safeguarded Newton within the cell.
pub fn hermite_invert(xs: &[f64], ys: &[f64], ds: &[f64], target: f64) -> Result<f64> {
    let n = xs.len();
    let span = ys[n - 1] - ys[0];
    let slack = 1e-12 * span.abs().max(1.0);
    if target < ys[0] - slack || target > ys[n - 1] + slack {
        return Err(Error::ProfileRange {
            v: target,
            v_max: ys[n - 1],
        });
    }
    if target <= ys[0] {
        return Ok(xs[0]);
    }
    if target >= ys[n - 1] {
        return Ok(xs[n - 1]);
    }
    let i = match ys.binary_search_by(|a| a.partial_cmp(&target).unwrap()) {
        Ok(i) => return Ok(xs[i]),
        Err(i) => i - 1,
    };
    let (mut lo, mut hi) = (xs[i], xs[i + 1]);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = hermite_eval(xs, ys, ds, x) - target;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let df = hermite_deriv(xs, ys, ds, x);
        let mut next = if df > 0.0 { x - f / df } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
        n: usize,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64 * 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let ds: Vec<f64> = xs.iter().map(|&x| df(x)).collect();
        (xs, ys, ds)
    }

    #[test]
    fn reproduces_nodes_exactly() {
        let (xs, ys, ds) = table(|x| x.tanh(), |x| 1.0 / x.cosh().powi(2), 33);
        for (i, &x) in xs.iter().enumerate() {
            assert_eq!(hermite_eval(&xs, &ys, &ds, x), ys[i]);
        }
    }

    #[test]
    fn exact_slope_hermite_is_fourth_order() {
        let (xs1, ys1, ds1) = table(|x| x.sin(), |x| x.cos(), 65);
        let (xs2, ys2, ds2) = table(|x| x.sin(), |x| x.cos(), 129);
        let err = |xs: &[f64], ys: &[f64], ds: &[f64]| {
            (0..1000)
                .map(|i| {
                    let x = i as f64 / 999.0 * 2.0;
                    (hermite_eval(xs, ys, ds, x) - x.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(&xs1, &ys1, &ds1), err(&xs2, &ys2, &ds2));
        assert!(e2 < e1 / 12.0, "e1={e1:.3e} e2={e2:.3e}");
    }

    #[test]
    fn invert_roundtrip() {
        let (xs, ys, ds) = table(|x| x + 0.2 * x * x, |x| 1.0 + 0.4 * x, 40);
        for i in 0..200 {
            let x = i as f64 / 199.0 * 2.0;
            let y = hermite_eval(&xs, &ys, &ds, x);
            let back = hermite_invert(&xs, &ys, &ds, y).unwrap();
            assert!((back - x).abs() < 1e-12, "x={x} back={back}");
        }
    }

    #[test]
    fn invert_rejects_out_of_range() {
        let (xs, ys, ds) = table(|x| x, |_| 1.0, 8);
        assert!(hermite_invert(&xs, &ys, &ds, -0.5).is_err());
        assert!(hermite_invert(&xs, &ys, &ds, 2.5).is_err());
    }

    #[test]
    fn pchip_is_monotone_on_monotone_data() {
        let xs: Vec<f64> = vec![0.0, 0.1, 0.5, 0.6, 2.0, 2.05, 3.0];
        let ys: Vec<f64> = xs.iter().map(|&x| x.powi(3) + x).collect();
        let ds = pchip_slopes(&xs, &ys);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=600 {
            let x = i as f64 / 200.0;
            let y = hermite_eval(&xs, &ys, &ds, x);
            assert!(y >= prev - 1e-12);
            prev = y;
        }
    }

    #[test]
    fn cell_integral_matches_quadrature() {
        let (xs, ys, ds) = table(|x| x.exp(), |x| x.exp(), 20);
        let total: f64 = (0..xs.len() - 1)
            .map(|i| hermite_cell_integral(&xs, &ys, &ds, i))
            .sum();
        let exact = 2.0_f64.exp() - 1.0;
        assert!((total - exact).abs() < 1e-5, "total={total} exact={exact}");
    }
}
