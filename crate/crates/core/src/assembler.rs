//! Assembly of the solitary wave
//!
//! ```text
//! ψ(x,t) = e^{iφ} |μ|^{-1/2} exp(i(αx² + βxy + γy² + δx + εy + κ + ξ)) F(βx + 2γy + ε)
//! ```
//!
//! together with the coefficient laws that make it an exact solution, the
//! change of variables to the autonomous equation, and the classical
//! trajectory of the wave centre.
//!
//! For m = 0 the forcing g₀aβ² is carried by the phase ξ = g₀(γ(0) − γ(t)), so
//! the PDE has no potential term beyond the quadratic Hamiltonian. For m = 1
//! ξ is zero and the forcing g₀aβ²z enters the PDE.

use std::sync::Arc;

use num_complex::Complex64;

use crate::characteristic::QuadraticCoefficients;
use crate::error::{ensure_finite, Error, Result};
use crate::kernels::{PhaseKernels, PhaseState, PhaseTrajectory};
use crate::numerics::diff::{d1, d2};
use crate::numerics::quad::{gauss_kronrod, QuadOptions};
use crate::numerics::roots::brent;
use crate::par::{try_map_range, Execution};
use crate::profile::SolitonProfile;

/// A soliton of the nonautonomous NLS with variable quadratic Hamiltonian.
#[derive(Debug, Clone)]
pub struct SolitonSolution {
    traj: Arc<PhaseTrajectory>,
    profile: Arc<SolitonProfile>,
    phi: f64,
    y: f64,
}

impl SolitonSolution {
    pub fn new(
        kernels: PhaseKernels,
        init: PhaseState,
        profile: SolitonProfile,
        phi: f64,
        y: f64,
    ) -> Result<Self> {
        ensure_finite("phi", phi)?;
        ensure_finite("y", y)?;
        if init.mu == 0.0 {
            return Err(Error::FocalPoint { t: init.t });
        }
        if init.beta == 0.0 {
            return Err(Error::Domain("beta(0) must be nonzero".into()));
        }
        let g0 = if profile.m() == 0 { profile.g0() } else { 0.0 };
        let traj = PhaseTrajectory::new(kernels, init, g0)?;
        Ok(Self {
            traj: Arc::new(traj),
            profile: Arc::new(profile),
            phi,
            y,
        })
    }

    pub fn trajectory(&self) -> &Arc<PhaseTrajectory> {
        &self.traj
    }

    pub fn profile(&self) -> &SolitonProfile {
        &self.profile
    }

    pub fn coefficients(&self) -> &QuadraticCoefficients {
        self.traj.kernels().coefficients()
    }

    pub fn init(&self) -> &PhaseState {
        self.traj.init()
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn origin(&self) -> f64 {
        self.traj.kernels().origin()
    }

    /// End of the validity interval (first caustic or end of the kernels).
    pub fn valid_until(&self) -> f64 {
        self.traj.valid_until()
    }

    /// True when μ < 0, so that |μ| is used in the amplitude.
    pub fn negative_branch(&self) -> bool {
        self.traj.negative_branch()
    }

    pub fn state(&self, t: f64) -> Result<PhaseState> {
        self.traj.state(t)
    }

    /// z = βx + 2γy + ε.
    pub fn travelling_argument(&self, x: f64, s: &PhaseState) -> f64 {
        s.beta * x + 2.0 * s.gamma * self.y + s.epsilon
    }

    /// Real phase S(x,t) without the constant φ.
    pub fn phase(&self, x: f64, s: &PhaseState) -> f64 {
        let y = self.y;
        s.alpha * x * x + s.beta * x * y + s.gamma * y * y + s.delta * x + s.epsilon * y + s.kappa + s.xi
    }

    /// ψ at `x` for a precomputed state.
    pub fn psi_at(&self, x: f64, s: &PhaseState) -> Result<Complex64> {
        let (f, _) = self.profile.eval(self.travelling_argument(x, s))?;
        let amp = f / s.mu.abs().sqrt();
        Ok(Complex64::from_polar(1.0, self.phi + self.phase(x, s)) * amp)
    }

    pub fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        ensure_finite("x", x)?;
        self.psi_at(x, &self.state(t)?)
    }

    /// Samples ψ on `xs` at every time in `ts` (time-major).
    pub fn sample(&self, xs: &[f64], ts: &[f64], exec: Execution) -> Result<Vec<Complex64>> {
        let states: Vec<PhaseState> = ts.iter().map(|&t| self.state(t)).collect::<Result<_>>()?;
        let nx = xs.len();
        try_map_range(exec, nx * ts.len(), |i| self.psi_at(xs[i % nx], &states[i / nx]))
    }

    /// The coefficient laws under which this solution is exact.
    pub fn balance_laws(&self) -> BalanceLaws {
        BalanceLaws {
            source: Some(LawSource {
                traj: self.traj.clone(),
                g0: self.profile.g0(),
                h0: self.profile.h0(),
                m: self.profile.m(),
                y: self.y,
            }),
            h_scale: 1.0,
            gauged: false,
        }
    }
}

/// Free-function form of [`SolitonSolution::psi`].
pub fn evaluate_psi(sol: &SolitonSolution, x: f64, t: f64) -> Result<Complex64> {
    sol.psi(x, t)
}

#[derive(Debug, Clone)]
struct LawSource {
    traj: Arc<PhaseTrajectory>,
    g0: f64,
    h0: f64,
    m: u8,
    y: f64,
}

/// The forcing g(x,t) and nonlinearity h(t) required by a soliton.
#[derive(Debug, Clone)]
pub struct BalanceLaws {
    source: Option<LawSource>,
    h_scale: f64,
    gauged: bool,
}

/// Balance laws frozen at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawsAt {
    pub t: f64,
    pub h: f64,
    /// g₀aβ², the coefficient of z^m in the forcing.
    pub g_coef: f64,
    pub beta: f64,
    /// 2γy + ε, so that z = βx + shift.
    pub shift: f64,
    pub m: u8,
    /// For m = 0 the forcing is carried by the phase ξ, not by the PDE.
    pub absorbed: bool,
    /// The x-independent part g₀aβ²·shift is carried by a gauge phase.
    pub gauged: bool,
}

impl LawsAt {
    /// g(x,t) = g₀aβ² z^m.
    pub fn g(&self, x: f64) -> f64 {
        match self.m {
            0 => self.g_coef,
            _ => self.g_coef * (self.beta * x + self.shift),
        }
    }

    /// Potential that appears in the PDE.
    pub fn forcing(&self, x: f64) -> f64 {
        if self.absorbed {
            0.0
        } else if self.gauged {
            self.g_coef * self.beta * x
        } else {
            self.g(x)
        }
    }
}

/// Balance laws for a phase trajectory; m must be 0 or 1.
pub fn make_balance_laws(
    traj: Arc<PhaseTrajectory>,
    y: f64,
    g0: f64,
    h0: f64,
    m: u32,
) -> Result<BalanceLaws> {
    if m > 1 {
        return Err(Error::Unsupported(format!(
            "m = {m}: only m = 0 and m = 1 admit the soliton reduction"
        )));
    }
    ensure_finite("g0", g0)?;
    ensure_finite("h0", h0)?;
    ensure_finite("y", y)?;
    Ok(BalanceLaws {
        source: Some(LawSource {
            traj,
            g0,
            h0,
            m: m as u8,
            y,
        }),
        h_scale: 1.0,
        gauged: false,
    })
}

impl BalanceLaws {
    /// h ≡ 0 and no forcing: the linear equation.
    pub fn linear() -> Self {
        Self {
            source: None,
            h_scale: 1.0,
            gauged: false,
        }
    }

    /// The same laws with h multiplied by `factor` (for sensitivity runs).
    pub fn with_h_scale(mut self, factor: f64) -> Self {
        self.h_scale *= factor;
        self
    }

    /// The laws seen by the gauged field of [`GaugedSolution`].
    pub fn gauged(mut self) -> Self {
        self.gauged = true;
        self
    }

    pub fn m(&self) -> Option<u8> {
        self.source.as_ref().map(|s| s.m)
    }

    pub fn at(&self, t: f64) -> Result<LawsAt> {
        let Some(src) = &self.source else {
            return Ok(LawsAt {
                t,
                h: 0.0,
                g_coef: 0.0,
                beta: 0.0,
                shift: 0.0,
                m: 0,
                absorbed: true,
                gauged: false,
            });
        };
        let s = src.traj.state(t)?;
        let a = src.traj.kernels().coefficients().a.value(t);
        let ab2 = a * s.beta * s.beta;
        Ok(LawsAt {
            t,
            h: self.h_scale * src.h0 * ab2 * s.mu,
            g_coef: src.g0 * ab2,
            beta: s.beta,
            shift: 2.0 * s.gamma * src.y + s.epsilon,
            m: src.m,
            absorbed: src.m == 0 && src.traj.g0() == src.g0,
            gauged: self.gauged && src.m == 1,
        })
    }

    /// h(t) = h₀aβ²μ.
    pub fn h(&self, t: f64) -> Result<f64> {
        Ok(self.at(t)?.h)
    }

    /// h(t) = h₀β(0)²μ(0)² aλ²/μ, the form that needs only μ.
    pub fn h_from_lambda(&self, t: f64) -> Result<f64> {
        let Some(src) = &self.source else {
            return Ok(0.0);
        };
        let i = src.traj.init();
        let k = src.traj.kernels();
        let mu = src.traj.state(t)?.mu;
        let lam = k.lambda(t);
        Ok(self.h_scale * src.h0 * i.beta * i.beta * i.mu * i.mu * k.coefficients().a.value(t) * lam * lam
            / mu)
    }

    /// g(x,t) = g₀aβ² z^m.
    pub fn g(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.at(t)?.g(x))
    }

    /// The potential term of the PDE (zero for m = 0, where ξ carries it).
    pub fn forcing(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.at(t)?.forcing(x))
    }
}

/// χ = e^{iθ(t)}ψ with θ′ = g₀aβ²(2γy + ε).
///
/// For m = 1 this moves the x-independent part of the forcing g₀aβ²z into a
/// phase, leaving the potential g₀aβ³x.
#[derive(Debug, Clone)]
pub struct GaugedSolution {
    sol: SolitonSolution,
}

impl GaugedSolution {
    pub fn new(sol: SolitonSolution) -> Result<Self> {
        if sol.profile().m() != 1 {
            return Err(Error::Unsupported("the forcing gauge applies to m = 1".into()));
        }
        Ok(Self { sol })
    }

    pub fn solution(&self) -> &SolitonSolution {
        &self.sol
    }

    pub fn laws(&self) -> BalanceLaws {
        self.sol.balance_laws().gauged()
    }

    /// θ′(t) = g₀aβ²(2γy + ε).
    pub fn theta_rate(&self, t: f64) -> Result<f64> {
        let l = self.sol.balance_laws().at(t)?;
        Ok(l.g_coef * l.shift)
    }

    /// θ(t) = ∫ θ′ from the origin.
    pub fn theta(&self, t: f64) -> Result<f64> {
        let t0 = self.sol.origin();
        if t == t0 {
            return Ok(0.0);
        }
        self.sol.state(t)?;
        gauss_kronrod(
            |s| self.theta_rate(s).unwrap_or(f64::NAN),
            t0,
            t,
            &QuadOptions {
                abs_tol: 1e-14,
                rel_tol: 1e-13,
                ..QuadOptions::default()
            },
        )
    }

    pub fn chi(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.sol.psi(x, t)? * Complex64::from_polar(1.0, self.theta(t)?))
    }
}

/// Point of the autonomous frame (ξ, τ) = (βx, γ) with the rescaled field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutonomousPoint {
    pub xi: f64,
    pub tau: f64,
    pub chi: Complex64,
}

fn require_autonomous_form(sol: &SolitonSolution) -> Result<()> {
    if sol.profile().m() != 0 {
        return Err(Error::Unsupported("autonomization is defined for m = 0".into()));
    }
    let i = sol.init();
    if !sol.coefficients().is_purely_quadratic() || i.delta != 0.0 || i.epsilon != 0.0 || i.kappa != 0.0
    {
        return Err(Error::Unsupported(
            "autonomization requires delta = epsilon = kappa = 0".into(),
        ));
    }
    Ok(())
}

/// χ = √μ e^{-i(αx² + ξ)} ψ at (ξ, τ) = (βx, γ).
pub fn to_autonomous(sol: &SolitonSolution, x: f64, t: f64) -> Result<AutonomousPoint> {
    require_autonomous_form(sol)?;
    let s = sol.state(t)?;
    autonomous_at(sol, x, &s)
}

fn autonomous_at(sol: &SolitonSolution, x: f64, s: &PhaseState) -> Result<AutonomousPoint> {
    let psi = sol.psi_at(x, s)?;
    let chi = psi * Complex64::from_polar(s.mu.abs().sqrt(), -(s.alpha * x * x + s.xi));
    Ok(AutonomousPoint {
        xi: s.beta * x,
        tau: s.gamma,
        chi,
    })
}

/// Residual of iχ_τ + g₀χ + h₀|χ|²χ − χ_ξξ on a mapped grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutonomousReport {
    pub max_abs: f64,
    /// max_abs over the largest term of the equation.
    pub rel_to_scale: f64,
    /// Worst point as (ξ, τ).
    pub worst: (f64, f64),
    pub tau_range: (f64, f64),
}

/// Evaluates the autonomous residual on an n × n grid of (ξ, τ).
///
/// τ runs over γ([t0, t1]); each τ is mapped back to t by root finding, which
/// requires γ to be strictly monotone on the window.
pub fn autonomous_residual(
    sol: &SolitonSolution,
    xi_range: (f64, f64),
    t_range: (f64, f64),
    n: usize,
    exec: Execution,
) -> Result<AutonomousReport> {
    require_autonomous_form(sol)?;
    let (t0, t1) = t_range;
    if !(t1 > t0) || n < 2 {
        return Err(Error::Domain("need t1 > t0 and n >= 2".into()));
    }
    // γ′ = −aβ² has a fixed sign exactly when β stays away from zero.
    let samples = 256;
    let mut gammas = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let t = t0 + (t1 - t0) * i as f64 / samples as f64;
        gammas.push(sol.state(t)?.gamma);
    }
    let increasing = gammas[samples] > gammas[0];
    if gammas.windows(2).any(|w| (w[1] > w[0]) != increasing || w[1] == w[0]) {
        return Err(Error::Reparameterization(format!(
            "gamma is not monotone on [{t0}, {t1}]"
        )));
    }
    let (tau0, tau1) = (gammas[0], gammas[samples]);
    let h_tau = 1e-3 * (tau1 - tau0).abs();
    let h_xi = 1e-3 * (xi_range.1 - xi_range.0).abs().max(1e-3);
    // The stencil reaches 2h beyond the τ window; widen the bracket for it.
    let margin = 0.05 * (t1 - t0);
    let (lo, hi) = (t0 - margin, t1 + margin);
    let lo = lo.max(sol.origin() + 1e-12);
    let hi = hi.min(sol.valid_until());
    let (g0, h0) = (sol.profile().g0(), sol.profile().h0());

    let invert = |tau: f64| -> Result<PhaseState> {
        let t = brent(
            |t| sol.state(t).map(|s| s.gamma - tau).unwrap_or(f64::NAN),
            lo,
            hi,
            1e-15,
        )?;
        sol.state(t)
    };
    let chi = |xi: f64, s: &PhaseState| -> Result<Complex64> {
        Ok(autonomous_at(sol, xi / s.beta, s)?.chi)
    };

    let points = try_map_range(exec, n * n, |idx| -> Result<(f64, f64, f64, f64)> {
        let (i, j) = (idx % n, idx / n);
        let xi = xi_range.0 + (xi_range.1 - xi_range.0) * i as f64 / (n - 1) as f64;
        let tau = tau0 + (tau1 - tau0) * j as f64 / (n - 1) as f64;
        let s = invert(tau)?;
        let c = chi(xi, &s)?;
        let along_tau = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|k| invert(tau + k * h_tau).and_then(|s| chi(xi, &s)))
            .collect::<Result<Vec<_>>>()?;
        let chi_tau = ((along_tau[0] - along_tau[3]) + (along_tau[2] - along_tau[1]) * 8.0)
            * (1.0 / (12.0 * h_tau));
        let chi_xixi = d2(|q| chi(q, &s).unwrap_or(Complex64::new(f64::NAN, f64::NAN)), xi, h_xi);
        let terms = [
            (Complex64::i() * chi_tau).norm(),
            g0.abs() * c.norm(),
            h0.abs() * c.norm().powi(3),
            chi_xixi.norm(),
        ];
        let r = Complex64::i() * chi_tau + c * g0 + c * (h0 * c.norm_sqr()) - chi_xixi;
        let scale = terms.iter().fold(0.0_f64, |m, v| m.max(*v));
        Ok((r.norm(), scale, xi, tau))
    })?;

    let mut report = AutonomousReport {
        max_abs: 0.0,
        rel_to_scale: 0.0,
        worst: (f64::NAN, f64::NAN),
        tau_range: (tau0, tau1),
    };
    let mut scale = 0.0_f64;
    for (r, s, xi, tau) in points {
        if !r.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "non-finite autonomous residual at (xi, tau) = ({xi}, {tau})"
            )));
        }
        scale = scale.max(s);
        if r > report.max_abs {
            report.max_abs = r;
            report.worst = (xi, tau);
        }
    }
    report.rel_to_scale = if scale > 0.0 { report.max_abs / scale } else { 0.0 };
    Ok(report)
}

/// Path of the wave centre z(x_c(t), t) = z₀ with its law-of-motion checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub z0: f64,
    /// max |z(x_c(t), t) − z₀|.
    pub z_drift: f64,
    /// Relative residual of x′ + (β′/β)x = 2aβy + 2aδ − g.
    pub velocity_residual: f64,
    /// Relative residual of the second-order law of motion.
    pub motion_residual: f64,
}

/// Follows the point of constant travelling argument that starts at `x0`.
///
/// The path is sampled at `n + 1` uniform times on [origin, t_end]; the laws
/// of motion are checked with five-point differences at interior samples.
pub fn classical_trajectory(
    sol: &SolitonSolution,
    x0: f64,
    t_end: f64,
    n: usize,
) -> Result<ClassicalTrajectory> {
    ensure_finite("x0", x0)?;
    let t0 = sol.origin();
    if !(t_end > t0) || n < 8 {
        return Err(Error::Domain("need t_end > origin and n >= 8".into()));
    }
    let z0 = sol.travelling_argument(x0, sol.init());
    let y = sol.y();
    let coeffs = sol.coefficients();
    let h = (t_end - t0) / n as f64;

    let xc = |t: f64| -> Result<f64> {
        let s = sol.state(t)?;
        if s.beta.abs() < 1e-12 * sol.init().beta.abs() {
            return Err(Error::TrajectoryUndefined { t });
        }
        Ok((z0 - 2.0 * s.gamma * y - s.epsilon) / s.beta)
    };

    let mut ts = Vec::with_capacity(n + 1);
    let mut xs = Vec::with_capacity(n + 1);
    let mut z_drift = 0.0_f64;
    for i in 0..=n {
        let t = t0 + h * i as f64;
        let x = xc(t)?;
        let s = sol.state(t)?;
        z_drift = z_drift.max((sol.travelling_argument(x, &s) - z0).abs());
        ts.push(t);
        xs.push(x);
    }

    let nan = |r: Result<f64>| r.unwrap_or(f64::NAN);
    let beta = |t: f64| nan(sol.state(t).map(|s| s.beta));
    let (mut v_res, mut v_scale, mut m_res, mut m_scale) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for &t in ts.iter().skip(2).take(n.saturating_sub(3)) {
        let s = sol.state(t)?;
        let c = coeffs.at(t);
        let x = xc(t)?;
        let dx = d1(|q| nan(xc(q)), t, h);
        let ddx = d2(|q| nan(xc(q)), t, h);
        let dbeta = d1(beta, t, h);

        let v_terms = [
            dx,
            dbeta / s.beta * x,
            2.0 * c.a * s.beta * y,
            2.0 * c.a * s.delta,
            c.g,
        ];
        v_res = v_res.max((v_terms[0] + v_terms[1] - v_terms[2] - v_terms[3] + v_terms[4]).abs());
        v_scale = v_terms.iter().fold(v_scale, |m, v| m.max(v.abs()));

        // x″ − (a′/a)x′ + (4ab − c² + c a′/a − c′)x = 2af + (a′/a − c)g − g′
        let ra = c.da / c.a;
        let m_terms = [
            ddx,
            ra * dx,
            (4.0 * c.a * c.b - c.c * c.c + c.c * ra - c.dc) * x,
            2.0 * c.a * c.f,
            (ra - c.c) * c.g,
            c.dg,
        ];
        m_res = m_res
            .max((m_terms[0] - m_terms[1] + m_terms[2] - m_terms[3] - m_terms[4] + m_terms[5]).abs());
        m_scale = m_terms.iter().fold(m_scale, |m, v| m.max(v.abs()));
    }
    // Uniform motion makes every term vanish; fall back to the velocity scale.
    let vmax = xs.windows(2).fold(0.0_f64, |m, w| m.max((w[1] - w[0]).abs() / h));
    let (v_scale, m_scale) = (v_scale.max(vmax), m_scale.max(vmax / (t_end - t0)));
    let rel = |r: f64, s: f64| if s > 0.0 { r / s } else { r };
    Ok(ClassicalTrajectory {
        t: ts,
        x: xs,
        z0,
        z_drift,
        velocity_residual: rel(v_res, v_scale),
        motion_residual: rel(m_res, m_scale),
    })
}
