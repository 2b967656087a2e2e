//! Adaptive Simpson quadrature for smooth one-dimensional integrands.

/// Integrates f over [a, b] to the requested relative tolerance
/// (with a small absolute floor so integrals near zero terminate).
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    adaptive_simpson_min_depth(f, a, b, rel_tol, 0)
}

/// Adaptive Simpson with `min_depth` unconditional subdivision levels.
/// The guard defeats aliasing: an oscillation whose period divides the
/// dyadic sample spacing looks converged to the plain scheme and is
/// silently integrated as its mean.
pub fn adaptive_simpson_min_depth(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    min_depth: u32,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let abs_floor = 1e-300_f64.max(rel_tol * whole.abs());
    simpson_rec(
        f, a, b, fa, fm, fb, whole, rel_tol, abs_floor, 52, min_depth,
    )
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_floor: f64,
    depth: u32,
    min_depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let tol = (rel_tol * whole.abs()).max(abs_floor);
    if depth == 0 || (min_depth == 0 && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    let md = min_depth.saturating_sub(1);
    simpson_rec(
        f,
        a,
        m,
        fa,
        flm,
        fm,
        left,
        rel_tol,
        0.5 * abs_floor,
        depth - 1,
        md,
    ) + simpson_rec(
        f,
        m,
        b,
        fm,
        frm,
        fb,
        right,
        rel_tol,
        0.5 * abs_floor,
        depth - 1,
        md,
    )
}
