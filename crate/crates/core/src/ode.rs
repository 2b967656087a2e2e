//! Embedded Dormand–Prince 5(4) step for small fixed-size systems.
//!
//! The caller owns the accept/reject loop; this module provides one trial
//! step (with FSAL reuse) and the standard step-size controller factor.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub struct TrialStep<const N: usize> {
    pub y_new: [f64; N],
    /// RMS of the embedded error against atol + rtol*|y|; accept when <= 1.
    pub err_norm: f64,
    /// Derivative at the new point (valid if the step is accepted; FSAL).
    pub f_new: [f64; N],
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, pairs: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in pairs {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One trial Dormand–Prince 5(4) step from (t, y) with derivative f1 = f(t, y).
pub fn dopri45_step<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    f1: &[f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
) -> TrialStep<N> {
    let k1 = *f1;
    let k2 = f(t + h / 5.0, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(t + 3.0 * h / 10.0, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(
        t + 4.0 * h / 5.0,
        &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
    );
    let k5 = f(
        t + 8.0 * h / 9.0,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(
            y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = f(t + h, &y_new);
    let mut err_norm = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
        err_norm += (e / sc) * (e / sc);
    }
    err_norm = (err_norm / N as f64).sqrt();
    TrialStep {
        y_new,
        err_norm,
        f_new: k7,
    }
}

/// Step-size multiplier after a trial with the given error norm.
pub fn step_factor(err_norm: f64) -> f64 {
    let fac = if err_norm > 0.0 {
        0.9 * err_norm.powf(-0.2)
    } else {
        5.0
    };
    fac.clamp(0.2, 5.0)
}
