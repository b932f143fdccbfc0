//! Quadratic Hamiltonian coefficients and the characteristic equation
//!
//! ```text
//! μ″ − τ(t) μ′ + 4σ(t) μ = 0,
//! τ = a′/a − 2c + 4d,
//! σ = ab − cd + d² + (d·a′/a − d′)/2.
//! ```
//!
//! The standard solutions are fixed at an origin `t0` (zero unless a kernel is
//! re-seeded): μ₀(t0) = 0, μ₀′(t0) = 2a(t0), μ₁(t0) = 1, μ₁′(t0) = 0.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::numerics::{dormand_prince, OdeOptions, QuinticHermite};
use crate::timefn::TimeFunction;

/// Which family a coefficient set belongs to; informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    FreeParticle,
    FiberOptic,
    HarmonicTrap,
    BecTrap,
    PlasmaLinear,
    Custom,
}

/// Coefficients of
/// `iψ_t = −aψ_xx + bx²ψ − icxψ_x − idψ − fxψ + igψ_x + (nonlinear and forcing terms)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoefficients {
    pub preset: Preset,
    pub a: TimeFunction,
    pub b: TimeFunction,
    pub c: TimeFunction,
    pub d: TimeFunction,
    pub f: TimeFunction,
    pub g: TimeFunction,
}

/// Value and first derivative of all six coefficients at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffValues {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
    pub g: f64,
    pub da: f64,
    pub dc: f64,
    pub dd: f64,
    pub dg: f64,
}

impl QuadraticCoefficients {
    /// a = −1, everything else zero.
    pub fn free_particle() -> Self {
        Self::custom(
            TimeFunction::constant(-1.0),
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
        )
        .with_preset(Preset::FreeParticle)
    }

    /// Dispersion a(t) and gain/loss d(t); b = c = 0.
    pub fn fiber_optic(a: TimeFunction, d: TimeFunction) -> Self {
        Self::custom(
            a,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            d,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
        )
        .with_preset(Preset::FiberOptic)
    }

    /// a = b = 1/2.
    pub fn harmonic_trap() -> Self {
        Self::custom(
            TimeFunction::constant(0.5),
            TimeFunction::constant(0.5),
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
        )
        .with_preset(Preset::HarmonicTrap)
    }

    /// a = 1/2, b = ω²(τ)/2.
    pub fn bec_trap(omega_sq: TimeFunction) -> Self {
        Self::custom(
            TimeFunction::constant(0.5),
            omega_sq.scaled(0.5),
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
        )
        .with_preset(Preset::BecTrap)
    }

    /// `iψ_t + ψ_xx + 2kxψ + ... = 0`: a = 1, f = 2k.
    pub fn plasma_linear(k: f64) -> Self {
        Self::custom(
            TimeFunction::constant(1.0),
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::ZERO,
            TimeFunction::constant(2.0 * k),
            TimeFunction::ZERO,
        )
        .with_preset(Preset::PlasmaLinear)
    }

    pub fn custom(
        a: TimeFunction,
        b: TimeFunction,
        c: TimeFunction,
        d: TimeFunction,
        f: TimeFunction,
        g: TimeFunction,
    ) -> Self {
        Self {
            preset: Preset::Custom,
            a,
            b,
            c,
            d,
            f,
            g,
        }
    }

    pub fn with_preset(mut self, preset: Preset) -> Self {
        self.preset = preset;
        self
    }

    pub fn functions(&self) -> [(&'static str, &TimeFunction); 6] {
        [
            ("a", &self.a),
            ("b", &self.b),
            ("c", &self.c),
            ("d", &self.d),
            ("f", &self.f),
            ("g", &self.g),
        ]
    }

    /// Intersection of the tabulated domains, if any coefficient is tabulated.
    pub fn domain(&self) -> Option<(f64, f64)> {
        self.functions()
            .iter()
            .filter_map(|(_, f)| f.domain())
            .reduce(|x, y| (x.0.max(y.0), x.1.min(y.1)))
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        ensure_finite("t", t)?;
        if let Some((lo, hi)) = self.domain() {
            let slack = 1e-12 * (hi - lo).abs().max(1.0);
            if t < lo - slack || t > hi + slack {
                return Err(Error::Range {
                    what: "t",
                    value: t,
                    min: lo,
                    max: hi,
                });
            }
        }
        Ok(())
    }

    /// Checks finiteness and that a(t) keeps one sign on [t0, t1].
    pub fn validate(&self, t0: f64, t1: f64) -> Result<()> {
        for (name, f) in self.functions() {
            f.validate(name)?;
        }
        self.check_time(t0)?;
        self.check_time(t1)?;
        let n = 2000;
        let a0 = self.a.value(t0);
        for i in 0..=n {
            let t = t0 + (t1 - t0) * i as f64 / n as f64;
            let a = self.a.value(t);
            if !a.is_finite() || a == 0.0 || a.signum() != a0.signum() {
                return Err(Error::Domain(format!(
                    "a(t) must be nonzero on [{t0}, {t1}], fails near t = {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> CoeffValues {
        CoeffValues {
            a: self.a.value(t),
            b: self.b.value(t),
            c: self.c.value(t),
            d: self.d.value(t),
            f: self.f.value(t),
            g: self.g.value(t),
            da: self.a.derivative(t),
            dc: self.c.derivative(t),
            dd: self.d.derivative(t),
            dg: self.g.derivative(t),
        }
    }

    /// True when the linear terms f and g vanish identically.
    pub fn is_purely_quadratic(&self) -> bool {
        self.f.is_zero() && self.g.is_zero()
    }

    /// ∫_{t0}^{t} τ(s) ds = ln|a(t)/a(t0)| − 2∫c + 4∫d.
    pub fn tau_integral(&self, t0: f64, t: f64) -> f64 {
        (self.a.value(t) / self.a.value(t0)).abs().ln() - 2.0 * (self.c.integral(t) - self.c.integral(t0))
            + 4.0 * (self.d.integral(t) - self.d.integral(t0))
    }

    /// λ(t) = exp(−∫_{t0}^{t} (c − 2d) ds).
    pub fn lambda(&self, t0: f64, t: f64) -> f64 {
        (-(self.c.integral(t) - self.c.integral(t0)) + 2.0 * (self.d.integral(t) - self.d.integral(t0)))
            .exp()
    }
}

/// τ(t) and σ(t) of the characteristic equation.
pub fn tau_sigma(coeffs: &QuadraticCoefficients, t: f64) -> Result<(f64, f64)> {
    coeffs.check_time(t)?;
    let v = coeffs.at(t);
    if v.a == 0.0 {
        return Err(Error::Domain(format!("a(t) vanishes at t = {t}")));
    }
    Ok(tau_sigma_values(&v))
}

pub(crate) fn tau_sigma_values(v: &CoeffValues) -> (f64, f64) {
    let ra = v.da / v.a;
    let tau = ra - 2.0 * v.c + 4.0 * v.d;
    let sigma = v.a * v.b - v.c * v.d + v.d * v.d + 0.5 * (v.d * ra - v.dd);
    (tau, sigma)
}

/// Closed-form standard solutions for constant a, b with c = d = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// ab = 0: μ₀ = 2a s, μ₁ = 1.
    Linear { a: f64 },
    /// ab > 0: μ₀ = (2a/ω) sin ωs, μ₁ = cos ωs with ω = 2√(ab).
    Trigonometric { a: f64, omega: f64 },
    /// ab < 0: μ₀ = (2a/ω) sinh ωs, μ₁ = cosh ωs with ω = 2√(−ab).
    Hyperbolic { a: f64, omega: f64 },
}

impl ClosedForm {
    pub fn detect(coeffs: &QuadraticCoefficients) -> Option<Self> {
        let (a, b) = match (&coeffs.a, &coeffs.b) {
            (TimeFunction::Constant { value: a }, TimeFunction::Constant { value: b }) => (*a, *b),
            _ => return None,
        };
        if !(coeffs.c.is_zero() && coeffs.d.is_zero()) {
            return None;
        }
        let ab = a * b;
        Some(if ab == 0.0 {
            ClosedForm::Linear { a }
        } else if ab > 0.0 {
            ClosedForm::Trigonometric {
                a,
                omega: 2.0 * ab.sqrt(),
            }
        } else {
            ClosedForm::Hyperbolic {
                a,
                omega: 2.0 * (-ab).sqrt(),
            }
        })
    }

    /// (μ₀, μ₀′, μ₁, μ₁′) at elapsed time `s` from the origin.
    pub fn eval(&self, s: f64) -> BasisValue {
        match *self {
            ClosedForm::Linear { a } => BasisValue {
                mu0: 2.0 * a * s,
                dmu0: 2.0 * a,
                ddmu0: 0.0,
                mu1: 1.0,
                dmu1: 0.0,
                ddmu1: 0.0,
            },
            ClosedForm::Trigonometric { a, omega } => {
                let (sn, cs) = (omega * s).sin_cos();
                BasisValue {
                    mu0: 2.0 * a * sn / omega,
                    dmu0: 2.0 * a * cs,
                    ddmu0: -2.0 * a * omega * sn,
                    mu1: cs,
                    dmu1: -omega * sn,
                    ddmu1: -omega * omega * cs,
                }
            }
            ClosedForm::Hyperbolic { a, omega } => {
                let (sh, ch) = ((omega * s).sinh(), (omega * s).cosh());
                BasisValue {
                    mu0: 2.0 * a * sh / omega,
                    dmu0: 2.0 * a * ch,
                    ddmu0: 2.0 * a * omega * sh,
                    mu1: ch,
                    dmu1: omega * sh,
                    ddmu1: omega * omega * ch,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValue {
    pub mu0: f64,
    pub dmu0: f64,
    pub ddmu0: f64,
    pub mu1: f64,
    pub dmu1: f64,
    pub ddmu1: f64,
}

/// Numerically integrated standard solutions with C² dense output.
#[derive(Debug, Clone)]
pub struct CharacteristicBasis {
    t0: f64,
    t_end: f64,
    a0: f64,
    d0: f64,
    mu0: QuinticHermite,
    mu1: QuinticHermite,
    closed: Option<ClosedForm>,
}

pub(crate) fn characteristic_options() -> OdeOptions {
    OdeOptions {
        rtol: 1e-12,
        atol: 1e-14,
        ..OdeOptions::default()
    }
}

/// Standard basis on [0, t_end].
pub fn solve_basis(coeffs: &QuadraticCoefficients, t_end: f64) -> Result<CharacteristicBasis> {
    solve_basis_from(coeffs, 0.0, t_end)
}

/// Standard basis with origin `t0`, valid on [t0, t_end].
pub fn solve_basis_from(
    coeffs: &QuadraticCoefficients,
    t0: f64,
    t_end: f64,
) -> Result<CharacteristicBasis> {
    ensure_finite("t0", t0)?;
    ensure_finite("T", t_end)?;
    if t_end <= t0 {
        return Err(Error::Domain(format!(
            "basis interval must have T > t0, got [{t0}, {t_end}]"
        )));
    }
    coeffs.validate(t0, t_end)?;
    let v0 = coeffs.at(t0);

    let rhs = |t: f64, y: &[f64; 4]| {
        let (tau, sigma) = tau_sigma_values(&coeffs.at(t));
        [
            y[1],
            tau * y[1] - 4.0 * sigma * y[0],
            y[3],
            tau * y[3] - 4.0 * sigma * y[2],
        ]
    };
    let opts = OdeOptions {
        h_max: (t_end - t0) / 64.0,
        ..characteristic_options()
    };
    let tr = dormand_prince(rhs, t0, [0.0, 2.0 * v0.a, 1.0, 0.0], t_end, &opts)?;

    let col = |i: usize| tr.y.iter().map(|y| y[i]).collect::<Vec<_>>();
    let dcol = |i: usize| tr.dy.iter().map(|y| y[i]).collect::<Vec<_>>();
    let mu0 = QuinticHermite::new(tr.t.clone(), col(0), col(1), dcol(1))?;
    let mu1 = QuinticHermite::new(tr.t.clone(), col(2), col(3), dcol(3))?;
    Ok(CharacteristicBasis {
        t0,
        t_end,
        a0: v0.a,
        d0: v0.d,
        mu0,
        mu1,
        closed: ClosedForm::detect(coeffs),
    })
}

impl CharacteristicBasis {
    pub fn origin(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t_end
    }

    /// a and d at the origin.
    pub fn origin_coefficients(&self) -> (f64, f64) {
        (self.a0, self.d0)
    }

    /// Accepted integration steps; used as quadrature break points.
    pub fn mesh(&self) -> &[f64] {
        self.mu0.nodes()
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed
    }

    pub fn check(&self, t: f64) -> Result<()> {
        ensure_finite("t", t)?;
        if !self.mu0.contains(t) {
            return Err(Error::Range {
                what: "t",
                value: t,
                min: self.t0,
                max: self.t_end,
            });
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<BasisValue> {
        self.check(t)?;
        let (mu0, dmu0, ddmu0) = self.mu0.eval3(t);
        let (mu1, dmu1, ddmu1) = self.mu1.eval3(t);
        Ok(BasisValue {
            mu0,
            dmu0,
            ddmu0,
            mu1,
            dmu1,
            ddmu1,
        })
    }

    /// Closed-form values, when the coefficients admit them.
    pub fn eval_closed(&self, t: f64) -> Option<BasisValue> {
        self.closed.map(|c| c.eval(t - self.t0))
    }

    /// μ₀μ₁′ − μ₁μ₀′ from the numerical basis.
    pub fn wronskian(&self, t: f64) -> Result<f64> {
        let v = self.eval(t)?;
        Ok(v.mu0 * v.dmu1 - v.mu1 * v.dmu0)
    }
}

/// −2a(t0)·exp(∫τ), the value the Wronskian must take.
pub fn wronskian_expected(coeffs: &QuadraticCoefficients, t0: f64, t: f64) -> f64 {
    -2.0 * coeffs.a.value(t0) * coeffs.tau_integral(t0, t).exp()
}

/// Integrates the characteristic equation for one solution between any two
/// times (either direction), starting from (μ, μ′).
pub fn integrate_characteristic(
    coeffs: &QuadraticCoefficients,
    t_from: f64,
    state: [f64; 2],
    t_to: f64,
) -> Result<[f64; 2]> {
    let rhs = |t: f64, y: &[f64; 2]| {
        let (tau, sigma) = tau_sigma_values(&coeffs.at(t));
        [y[1], tau * y[1] - 4.0 * sigma * y[0]]
    };
    let tr = dormand_prince(rhs, t_from, state, t_to, &characteristic_options())?;
    Ok(tr.last().1)
}
