//! Embedded Runge–Kutta 5(4) of Dormand and Prince with PI step control.
//!
//! The integrator records every accepted step together with the derivative at
//! that node; callers build dense output on top of the recorded mesh.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed |h|; `f64::INFINITY` for no limit.
    pub h_max: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
    /// Abort with a numerical-failure error if any |y_i| exceeds this.
    pub blowup_guard: f64,
    /// Scale the error by `atol + rtol * max_i |y_i|` instead of per component.
    pub scale_by_norm: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: f64::INFINITY,
            h_init: None,
            max_steps: 2_000_000,
            blowup_guard: 1e100,
            scale_by_norm: false,
        }
    }
}

/// Accepted mesh of an integration, in integration order.
#[derive(Debug, Clone)]
pub struct OdeTrajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
}

impl<const N: usize> OdeTrajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        let i = self.t.len() - 1;
        (self.t[i], self.y[i])
    }

    /// Reorders the mesh so that `t` is increasing.
    pub fn into_ascending(mut self) -> Self {
        if self.t.len() > 1 && self.t[0] > self.t[self.t.len() - 1] {
            self.t.reverse();
            self.y.reverse();
            self.dy.reverse();
        }
        self
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
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
// Error coefficients: fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates y' = f(t, y) from `t0` to `t1` (either direction).
pub fn dormand_prince<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
) -> Result<OdeTrajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut k1 = f(t0, &y0);
    let mut traj = OdeTrajectory {
        t: vec![t0],
        y: vec![y0],
        dy: vec![k1],
    };
    if span == 0.0 {
        return Ok(traj);
    }

    let mut h = opts.h_init.unwrap_or_else(|| {
        let ynorm = y0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let dnorm = k1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let guess = if dnorm > 0.0 {
            0.01 * (ynorm.max(opts.atol) / dnorm)
        } else {
            1e-3 * span
        };
        guess.min(1e-2 * span).max(1e-12 * span)
    });
    h = h.min(opts.h_max).min(span);

    let (mut t, mut y) = (t0, y0);
    let mut err_prev = 1e-4_f64;
    let h_min = 1e-14 * span.max(t0.abs()).max(1.0);

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-15 * span {
            break;
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;

        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + hs,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            hs,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y_new);

        let norm = if opts.scale_by_norm {
            y.iter().chain(y_new.iter()).fold(0.0_f64, |m, v| m.max(v.abs()))
        } else {
            0.0
        };
        let mut err = 0.0_f64;
        for i in 0..N {
            let e = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let mag = if opts.scale_by_norm {
                norm
            } else {
                y[i].abs().max(y_new[i].abs())
            };
            let sc = (opts.atol + opts.rtol * mag).max(f64::MIN_POSITIVE);
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            err = 1e10;
        }

        if err <= 1.0 {
            if y_new.iter().any(|v| !v.is_finite() || v.abs() > opts.blowup_guard) {
                return Err(Error::NumericalFailure(format!(
                    "solution exceeded the blow-up guard {} near t = {t_new}",
                    opts.blowup_guard
                )));
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k1);
            if last {
                return Ok(traj);
            }
            // PI controller (Hairer–Wanner, alpha = 0.7/5, beta = 0.4/5).
            let fac = 0.9 * err.max(1e-10).powf(-0.14) * err_prev.powf(0.08);
            h = (h * fac.clamp(0.2, 5.0)).min(opts.h_max);
            err_prev = err.max(1e-4);
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            h *= fac;
        }
        if h < h_min {
            return Err(Error::NumericalFailure(format!(
                "step size collapsed to {h:e} at t = {t}"
            )));
        }
    }
    if (t1 - t).abs() <= 1e-15 * span {
        return Ok(traj);
    }
    Err(Error::NumericalFailure(format!(
        "step budget of {} exhausted at t = {t}",
        opts.max_steps
    )))
}
