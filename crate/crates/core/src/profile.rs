//! Travelling-wave profiles F(z) of F'' = g0 z^m F + h0 F^3.
//!
//! For m = 0 the equation has the first integral
//! F'^2 = g0 F^2 + h0 F^4 / 2 + C0 and the bounded real solutions are Jacobi
//! elliptic functions (with the sech and tanh solitons as limits). For m = 1 the
//! scaling F(z) = s sqrt(2/h0) w(s z), s = g0^(1/3), reduces the equation to
//! Painlevé II, w'' = ζ w + 2 w^3, whose bounded solutions decay like k Ai(ζ).

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::numerics::{dormand_prince, OdeOptions, QuinticHermite};
use crate::specfun::{airy_ai_with_derivative, arg_gamma_one_plus_iy, jacobi_elliptic, EllipticModulus};

/// Relative tolerance used to recognise the soliton limits of the elliptic forms.
const LIMIT_RTOL: f64 = 1e-14;

/// Default left end of the Painlevé II table.
pub const DEFAULT_ZETA_MIN: f64 = -40.0;
/// Default seed point of the Painlevé II integration.
pub const DEFAULT_ZETA_MAX: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    GeneralCn,
    GeneralSn,
    Bright,
    Dark,
    PainleveII,
}

#[derive(Debug, Clone)]
enum Shape {
    /// F = amp * cn(omega z, k), evaluated through the reciprocal modulus when k > 1.
    Cn { amp: f64, omega: f64, k: f64 },
    /// F = amp * sn(omega z, k).
    Sn { amp: f64, omega: f64, k: f64 },
    Sech { amp: f64, w: f64 },
    Tanh { amp: f64, w: f64 },
    /// F = scale * amp * w(scale z).
    Painleve { scale: f64, amp: f64, w: Arc<Painleve2Solution> },
}

/// A solution of F'' = g0 z^m F + h0 F^3.
#[derive(Debug, Clone)]
pub struct SolitonProfile {
    m: u8,
    g0: f64,
    h0: f64,
    c0: f64,
    kind: ProfileKind,
    shape: Shape,
}

impl SolitonProfile {
    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    /// First-integral constant; zero and meaningless for m = 1.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// Painlevé parameter k for the m = 1 family.
    pub fn k_p2(&self) -> Option<f64> {
        match &self.shape {
            Shape::Painleve { w, .. } => Some(w.k()),
            _ => None,
        }
    }

    pub fn painleve(&self) -> Option<&Painleve2Solution> {
        match &self.shape {
            Shape::Painleve { w, .. } => Some(w),
            _ => None,
        }
    }

    /// Range of z on which the profile can be evaluated.
    pub fn z_range(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Painleve { scale, w, .. } => {
                let (lo, _) = w.domain();
                if *scale > 0.0 {
                    (lo / scale, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, lo / scale)
                }
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Returns (F(z), F'(z)).
    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        ensure_finite("z", z)?;
        Ok(match &self.shape {
            Shape::Cn { amp, omega, k } => {
                let u = omega * z;
                let (sn, cn, dn) = if *k > 1.0 {
                    // cn(u,k) = dn(ku,1/k), sn(u,k) = sn(ku,1/k)/k, dn(u,k) = cn(ku,1/k)
                    let j = jacobi_elliptic(k * u, EllipticModulus::new(1.0 / k)?)?;
                    (j.sn / k, j.dn, j.cn)
                } else {
                    let j = jacobi_elliptic(u, EllipticModulus::new(*k)?)?;
                    (j.sn, j.cn, j.dn)
                };
                (amp * cn, -amp * omega * sn * dn)
            }
            Shape::Sn { amp, omega, k } => {
                let j = jacobi_elliptic(omega * z, EllipticModulus::new(*k)?)?;
                (amp * j.sn, amp * omega * j.cn * j.dn)
            }
            Shape::Sech { amp, w } => {
                let s = 1.0 / (w * z).cosh();
                (amp * s, -amp * w * s * (w * z).tanh())
            }
            Shape::Tanh { amp, w } => {
                let t = (w * z).tanh();
                (amp * t, amp * w * (1.0 - t * t))
            }
            Shape::Painleve { scale, amp, w } => {
                let (v, dv) = w.eval(scale * z)?;
                (scale * amp * v, scale * scale * amp * dv)
            }
        })
    }

    /// F'^2 - g0 F^2 - h0 F^4 / 2, which equals C0 for every z.
    pub fn first_integral(&self, z: f64) -> Result<f64> {
        if self.m != 0 {
            return Err(Error::Unsupported(
                "the first integral is only available for m = 0".into(),
            ));
        }
        let (f, fp) = self.eval(z)?;
        Ok(fp * fp - self.g0 * f * f - 0.5 * self.h0 * f.powi(4))
    }

    /// F''(z) from the profile equation itself.
    pub fn second_derivative(&self, z: f64) -> Result<f64> {
        let (f, _) = self.eval(z)?;
        let zm = if self.m == 0 { 1.0 } else { z };
        Ok(self.g0 * zm * f + self.h0 * f.powi(3))
    }
}

/// Free-function form of [`SolitonProfile::eval`].
pub fn profile_eval(p: &SolitonProfile, z: f64) -> Result<(f64, f64)> {
    p.eval(z)
}

/// Free-function form of [`SolitonProfile::first_integral`].
pub fn first_integral(p: &SolitonProfile, z: f64) -> Result<f64> {
    p.first_integral(z)
}

/// Bounded m = 0 profile for (g0, h0, C0).
///
/// The sech and tanh limits are recognised first; otherwise the cn form is used
/// for h0 < 0 and the sn form for g0 < 0 < h0.
pub fn build_profile_m0(g0: f64, h0: f64, c0: f64) -> Result<SolitonProfile> {
    ensure_finite("g0", g0)?;
    ensure_finite("h0", h0)?;
    ensure_finite("C0", c0)?;
    let make = |kind, shape| SolitonProfile {
        m: 0,
        g0,
        h0,
        c0,
        kind,
        shape,
    };
    if h0 == 0.0 {
        return Err(Error::UnsupportedRegime(
            "h0 = 0: the profile equation is linear".into(),
        ));
    }
    let disc = g0 * g0 - 2.0 * c0 * h0;
    let scale = g0 * g0;

    if h0 < 0.0 && g0 > 0.0 && c0.abs() * h0.abs() <= LIMIT_RTOL * scale {
        return Ok(make(
            ProfileKind::Bright,
            Shape::Sech {
                amp: (2.0 * g0 / -h0).sqrt(),
                w: g0.sqrt(),
            },
        ));
    }
    if h0 > 0.0 && g0 < 0.0 && disc.abs() <= LIMIT_RTOL * scale {
        return Ok(make(
            ProfileKind::Dark,
            Shape::Tanh {
                amp: (-g0 / h0).sqrt(),
                w: (-g0 / 2.0).sqrt(),
            },
        ));
    }
    if disc <= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "no bounded real profile: requires g0^2 - 2 C0 h0 > 0, got {disc}"
        )));
    }
    let root = disc.sqrt();

    if h0 < 0.0 {
        if g0 + root <= 0.0 {
            return Err(Error::UnsupportedRegime(format!(
                "cn profile requires g0 + sqrt(g0^2 - 2 C0 h0) > 0, got {}",
                g0 + root
            )));
        }
        let k = ((g0 + root) / (2.0 * root)).sqrt();
        return Ok(make(
            ProfileKind::GeneralCn,
            Shape::Cn {
                amp: ((g0 + root) / -h0).sqrt(),
                omega: root.sqrt(),
                k,
            },
        ));
    }
    if g0 >= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "h0 > 0 requires g0 < 0 for a bounded profile, got g0 = {g0}"
        )));
    }
    if -g0 - root <= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "sn profile requires 0 < C0 < g0^2/(2 h0), got C0 = {c0}"
        )));
    }
    Ok(make(
        ProfileKind::GeneralSn,
        Shape::Sn {
            amp: ((-g0 - root) / h0).sqrt(),
            omega: ((-g0 + root) / 2.0).sqrt(),
            k: ((-g0 - root) / (-g0 + root)).sqrt(),
        },
    ))
}

/// m = 1 profile built from the Painlevé II solution with parameter `k`,
/// tabulated on the default range.
pub fn build_profile_m1(g0: f64, h0: f64, k: f64) -> Result<SolitonProfile> {
    build_profile_m1_on(g0, h0, k, DEFAULT_ZETA_MIN, DEFAULT_ZETA_MAX)
}

pub fn build_profile_m1_on(
    g0: f64,
    h0: f64,
    k: f64,
    zeta_min: f64,
    zeta_max: f64,
) -> Result<SolitonProfile> {
    ensure_finite("g0", g0)?;
    ensure_finite("h0", h0)?;
    if h0 <= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "m = 1 requires h0 > 0 for a real scaling to Painlevé II, got h0 = {h0}"
        )));
    }
    if g0 == 0.0 {
        return Err(Error::UnsupportedRegime("m = 1 requires g0 != 0".into()));
    }
    let w = solve_painleve2(k, zeta_min, zeta_max)?;
    Ok(SolitonProfile {
        m: 1,
        g0,
        h0,
        c0: 0.0,
        kind: ProfileKind::PainleveII,
        shape: Shape::Painleve {
            scale: g0.cbrt(),
            amp: (2.0 / h0).sqrt(),
            w: Arc::new(w),
        },
    })
}

/// Bounded solution A_k of w'' = ζ w + 2 w^3 on a finite table.
#[derive(Debug, Clone)]
pub struct Painleve2Solution {
    k: f64,
    w: QuinticHermite,
    dw: QuinticHermite,
    r: f64,
    theta0: f64,
}

impl Painleve2Solution {
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Amplitude of the oscillatory tail, r^2 = -ln(1 - k^2)/π.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// Tabulated range [ζ_min, ζ_max].
    pub fn domain(&self) -> (f64, f64) {
        self.w.domain()
    }

    /// Phase of the oscillatory tail.
    pub fn s(&self, zeta: f64) -> f64 {
        let a = zeta.abs();
        2.0 / 3.0 * a.powf(1.5) - 0.75 * self.r * self.r * a.ln()
    }

    /// Leading-order tail r |ζ|^(-1/4) sin(s(ζ) - θ0), meaningful for ζ → -∞.
    pub fn asymptotic(&self, zeta: f64) -> f64 {
        self.r * zeta.abs().powf(-0.25) * (self.s(zeta) - self.theta0).sin()
    }

    /// (w, w') at ζ; beyond the seed point the linear tail k Ai(ζ) is used.
    pub fn eval(&self, zeta: f64) -> Result<(f64, f64)> {
        ensure_finite("zeta", zeta)?;
        let (lo, hi) = self.domain();
        if zeta > hi {
            let (a, ap) = airy_ai_with_derivative(zeta)?;
            return Ok((self.k * a, self.k * ap));
        }
        if zeta < lo {
            return Err(Error::Range {
                what: "zeta",
                value: zeta,
                min: lo,
                max: f64::INFINITY,
            });
        }
        Ok((self.w.eval(zeta), self.dw.eval(zeta)))
    }

    /// (w, w', w'') at ζ inside the table, from the quintic interpolant.
    pub fn eval3(&self, zeta: f64) -> Result<(f64, f64, f64)> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&zeta) {
            return Err(Error::Range {
                what: "zeta",
                value: zeta,
                min: lo,
                max: hi,
            });
        }
        Ok(self.w.eval3(zeta))
    }
}

/// Integrates Painlevé II leftward from `zeta_max`, seeded with k Ai.
pub fn solve_painleve2(k: f64, zeta_min: f64, zeta_max: f64) -> Result<Painleve2Solution> {
    ensure_finite("k", k)?;
    if k == 0.0 || k.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "Painlevé parameter must satisfy 0 < |k| < 1, got {k}"
        )));
    }
    if !(8.0..=40.0).contains(&zeta_max) {
        return Err(Error::Range {
            what: "zeta_max",
            value: zeta_max,
            min: 8.0,
            max: 40.0,
        });
    }
    if !(-40.0..zeta_max).contains(&zeta_min) {
        return Err(Error::Range {
            what: "zeta_min",
            value: zeta_min,
            min: -40.0,
            max: zeta_max,
        });
    }
    let (a, ap) = airy_ai_with_derivative(zeta_max)?;
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 0.0,
        scale_by_norm: true,
        h_max: 0.05,
        blowup_guard: 1e3,
        ..OdeOptions::default()
    };
    let tr = dormand_prince(
        |z, y: &[f64; 2]| [y[1], z * y[0] + 2.0 * y[0].powi(3)],
        zeta_max,
        [k * a, k * ap],
        zeta_min,
        &opts,
    )
    .map_err(|e| match e {
        Error::NumericalFailure(m) => Error::NumericalFailure(format!(
            "Painlevé II integration for k = {k} failed: {m}"
        )),
        e => e,
    })?
    .into_ascending();

    let w: Vec<f64> = tr.y.iter().map(|y| y[0]).collect();
    let dw: Vec<f64> = tr.y.iter().map(|y| y[1]).collect();
    let ddw: Vec<f64> = tr.dy.iter().map(|d| d[1]).collect();
    let dddw: Vec<f64> = tr
        .t
        .iter()
        .zip(&tr.y)
        .map(|(z, y)| y[0] + z * y[1] + 6.0 * y[0] * y[0] * y[1])
        .collect();

    let r = (-(1.0 - k * k).ln() / PI).sqrt();
    let r2 = r * r;
    let theta0 =
        1.5 * r2 * 2f64.ln() + arg_gamma_one_plus_iy(-0.5 * r2) + 0.25 * PI * (1.0 - 2.0 * k.signum());

    Ok(Painleve2Solution {
        k,
        w: QuinticHermite::new(tr.t.clone(), w, dw.clone(), ddw.clone())?,
        dw: QuinticHermite::new(tr.t, dw, ddw, dddw)?,
        r,
        theta0,
    })
}
