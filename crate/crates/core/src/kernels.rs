//! Phase kernels and propagation of the soliton phase data.
//!
//! With D(t) = α(0)μ₀ + μ₁/(2μ₁(0)) + d(0)μ₀/(2a(0)) (so that D(t0) = ½ and
//! α(0) + γ₀ = D/μ₀), every propagated quantity is written with D in the
//! denominator:
//!
//! ```text
//! μ = 2μ(0) D
//! α = D′/(4aD) − d/(2a)
//! β = β(0) λ/(2D)
//! γ = γ(0) − β(0)² μ₀/(4D)
//! δ = δ₀ + λ (δ(0) + ε₀)/(2D)
//! ε = ε(0) − β(0) μ₀ (δ(0) + ε₀)/(2D)
//! κ = κ(0) + κ₀ − μ₀ (δ(0) + ε₀)²/(4D)
//! ```
//!
//! These forms are finite at the origin, where the classical kernel forms
//! α₀, β₀, γ₀ have poles; the latter are kept for cross-checks.

use std::sync::Arc;

use crate::characteristic::{CharacteristicBasis, QuadraticCoefficients};
use crate::error::{ensure_finite, Error, Result};
use crate::numerics::diff::d1_uniform;
use crate::numerics::quad::{gauss_kronrod, kronrod15, QuadOptions};
use crate::numerics::roots::brent;

/// Time-dependent phase data of the solitary wave.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub t: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub xi: f64,
}

impl PhaseState {
    /// Initial data at `t` with δ = ε = κ = ξ = 0.
    pub fn quadratic(t: f64, mu: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            t,
            mu,
            alpha,
            beta,
            gamma,
            ..Self::default()
        }
    }

    pub fn with_linear(mut self, delta: f64, epsilon: f64, kappa: f64) -> Self {
        self.delta = delta;
        self.epsilon = epsilon;
        self.kappa = kappa;
        self
    }

    pub fn as_array(&self) -> [f64; 9] {
        [
            self.t,
            self.mu,
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.epsilon,
            self.kappa,
            self.xi,
        ]
    }

    fn validate(&self) -> Result<()> {
        for (n, v) in ["t", "mu", "alpha", "beta", "gamma", "delta", "epsilon", "kappa", "xi"]
            .iter()
            .zip(self.as_array())
        {
            ensure_finite(n, v)?;
        }
        if self.mu == 0.0 {
            return Err(Error::Domain("initial mu must be nonzero".into()));
        }
        Ok(())
    }
}

/// Cumulative integral of one integrand, tabulated on the basis mesh.
#[derive(Debug, Clone)]
struct Cumulative {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Cumulative {
    fn build<F: Fn(f64) -> f64>(nodes: &[f64], f: F, opts: &QuadOptions) -> Result<Self> {
        let mut values = Vec::with_capacity(nodes.len());
        values.push(0.0);
        for w in nodes.windows(2) {
            let piece = gauss_kronrod(&f, w[0], w[1], opts)?;
            values.push(values.last().unwrap() + piece);
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            values,
        })
    }

    /// Integral up to `t`: tabulated part plus a fixed Kronrod rule on the
    /// partial step. Past the last node the remainder is integrated adaptively.
    fn eval<F: Fn(f64) -> f64>(&self, t: f64, f: F, opts: &QuadOptions) -> Result<f64> {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|&v| v <= t).clamp(1, n) - 1;
        if t == self.nodes[i] {
            return Ok(self.values[i]);
        }
        if i + 1 < n {
            return Ok(self.values[i] + kronrod15(f, self.nodes[i], t).0);
        }
        Ok(self.values[i] + gauss_kronrod(f, self.nodes[i], t, opts)?)
    }
}

#[derive(Debug, Clone)]
struct LinearIntegrals {
    /// Kernels valid on [t0, t_limit); beyond it μ₀′ has a zero.
    t_limit: f64,
    i1: Cumulative,
    eps: Cumulative,
    kap: Cumulative,
}

/// The base kernels α₀, β₀, γ₀, λ, δ₀, ε₀, κ₀ for one basis.
#[derive(Debug, Clone)]
pub struct PhaseKernels {
    coeffs: QuadraticCoefficients,
    basis: Arc<CharacteristicBasis>,
    linear: Option<LinearIntegrals>,
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_intervals: 2000,
    }
}

/// Builds the kernels; the integrals for δ₀, ε₀, κ₀ are tabulated once.
pub fn base_kernels(
    basis: Arc<CharacteristicBasis>,
    coeffs: &QuadraticCoefficients,
) -> Result<PhaseKernels> {
    let mut k = PhaseKernels {
        coeffs: coeffs.clone(),
        basis,
        linear: None,
    };
    if !coeffs.is_purely_quadratic() {
        k.build_linear()?;
    }
    Ok(k)
}

impl PhaseKernels {
    pub fn basis(&self) -> &CharacteristicBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &QuadraticCoefficients {
        &self.coeffs
    }

    pub fn origin(&self) -> f64 {
        self.basis.origin()
    }

    /// End of the interval on which all kernels are defined.
    pub fn valid_until(&self) -> f64 {
        self.linear.as_ref().map_or(self.basis.end(), |l| l.t_limit)
    }

    fn first_dmu0_zero(&self) -> Result<Option<f64>> {
        let b = &*self.basis;
        let mesh = b.mesh();
        let dmu0 = |t: f64| b.eval(t).map(|v| v.dmu0).unwrap_or(f64::NAN);
        for w in mesh.windows(2) {
            // Sample inside the step as well: μ₀′ may dip through zero and back.
            let mut lo = w[0];
            let mut flo = dmu0(lo);
            for j in 1..=4 {
                let hi = w[0] + (w[1] - w[0]) * j as f64 / 4.0;
                let fhi = dmu0(hi);
                if fhi == 0.0 {
                    return Ok(Some(hi));
                }
                if fhi.signum() != flo.signum() {
                    return brent(dmu0, lo, hi, 1e-14).map(Some);
                }
                lo = hi;
                flo = fhi;
            }
        }
        Ok(None)
    }

    /// Tabulates the cumulative integrals in dependency order: the δ₀ table
    /// is installed first because the ε₀ and κ₀ integrands need μ₀δ₀.
    fn build_linear(&mut self) -> Result<()> {
        let t_limit = self.first_dmu0_zero()?.unwrap_or(self.basis.end());
        let opts = quad_opts();
        let nodes: Vec<f64> = self
            .basis
            .mesh()
            .iter()
            .copied()
            .take_while(|&t| t < t_limit - 1e-3 * (t_limit - self.origin()))
            .collect();
        let i1 = Cumulative::build(&nodes, |s| self.i1_integrand(s), &opts)?;
        let empty = Cumulative {
            nodes: Vec::new(),
            values: Vec::new(),
        };
        self.linear = Some(LinearIntegrals {
            t_limit,
            i1,
            eps: empty.clone(),
            kap: empty,
        });
        let eps = Cumulative::build(&nodes, |s| self.eps_integrand(s), &opts)?;
        let kap = Cumulative::build(&nodes, |s| self.kap_integrand(s), &opts)?;
        let lin = self.linear.as_mut().expect("installed above");
        lin.eps = eps;
        lin.kap = kap;
        Ok(())
    }

    fn i1_integrand(&self, s: f64) -> f64 {
        let v = self.coeffs.at(s);
        let b = self.basis.eval(s).unwrap();
        ((v.f - v.d * v.g / v.a) * b.mu0 + v.g * b.dmu0 / (2.0 * v.a)) / self.lambda(s)
    }

    fn check(&self, t: f64) -> Result<()> {
        self.basis.check(t)
    }

    fn check_pole(&self, t: f64, what: &'static str) -> Result<()> {
        self.check(t)?;
        if t <= self.origin() {
            return Err(Error::Pole { what, t });
        }
        Ok(())
    }

    fn check_linear(&self, t: f64) -> Result<Option<&LinearIntegrals>> {
        self.check(t)?;
        match &self.linear {
            Some(l) if t >= l.t_limit => Err(Error::Integrability { t: l.t_limit }),
            other => Ok(other.as_ref()),
        }
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.coeffs.lambda(self.origin(), t)
    }

    pub fn alpha0(&self, t: f64) -> Result<f64> {
        self.check_pole(t, "alpha0")?;
        let (v, b) = (self.coeffs.at(t), self.basis.eval(t)?);
        Ok(b.dmu0 / (4.0 * v.a * b.mu0) - v.d / (2.0 * v.a))
    }

    pub fn beta0(&self, t: f64) -> Result<f64> {
        self.check_pole(t, "beta0")?;
        Ok(-self.lambda(t) / self.basis.eval(t)?.mu0)
    }

    pub fn gamma0(&self, t: f64) -> Result<f64> {
        self.check_pole(t, "gamma0")?;
        let (a0, d0) = self.basis.origin_coefficients();
        let b = self.basis.eval(t)?;
        Ok(b.mu1 / (2.0 * b.mu0) + d0 / (2.0 * a0))
    }

    /// μ₀δ₀ = λ·∫ [(f − dg/a)μ₀ + gμ₀′/(2a)]/λ, regular at the origin.
    fn mu0_delta0(&self, t: f64) -> Result<f64> {
        match self.check_linear(t)? {
            None => Ok(0.0),
            Some(l) => Ok(self.lambda(t) * l.i1.eval(t, |s| self.i1_integrand(s), &quad_opts())?),
        }
    }

    pub fn delta0(&self, t: f64) -> Result<f64> {
        if self.check_linear(t)?.is_none() {
            return Ok(0.0);
        }
        if t == self.origin() {
            let v = self.coeffs.at(t);
            return Ok(v.g / (2.0 * v.a));
        }
        Ok(self.mu0_delta0(t)? / self.basis.eval(t)?.mu0)
    }

    pub fn epsilon0(&self, t: f64) -> Result<f64> {
        let Some(l) = self.check_linear(t)? else {
            return Ok(0.0);
        };
        let v = self.coeffs.at(t);
        let b = self.basis.eval(t)?;
        let integral = l.eps.eval(t, |s| self.eps_integrand(s), &quad_opts())?;
        Ok(-2.0 * v.a * self.lambda(t) * self.delta0(t)? / b.dmu0 + integral)
    }

    pub fn kappa0(&self, t: f64) -> Result<f64> {
        let Some(l) = self.check_linear(t)? else {
            return Ok(0.0);
        };
        let v = self.coeffs.at(t);
        let b = self.basis.eval(t)?;
        let d0 = self.delta0(t)?;
        let integral = l.kap.eval(t, |s| self.kap_integrand(s), &quad_opts())?;
        Ok(v.a * b.mu0 * d0 * d0 / b.dmu0 + integral)
    }

    fn eps_integrand(&self, s: f64) -> f64 {
        let (v, b) = (self.coeffs.at(s), self.basis.eval(s).unwrap());
        let sigma = crate::characteristic::tau_sigma_values(&v).1;
        let fg = v.f - v.d * v.g / v.a;
        let lam = self.lambda(s);
        let p = self.mu0_delta0(s).unwrap_or(f64::NAN);
        8.0 * v.a * sigma * lam * p / (b.dmu0 * b.dmu0) + 2.0 * v.a * lam * fg / b.dmu0
    }

    fn kap_integrand(&self, s: f64) -> f64 {
        let (v, b) = (self.coeffs.at(s), self.basis.eval(s).unwrap());
        let sigma = crate::characteristic::tau_sigma_values(&v).1;
        let fg = v.f - v.d * v.g / v.a;
        let p = self.mu0_delta0(s).unwrap_or(f64::NAN);
        -4.0 * v.a * sigma * p * p / (b.dmu0 * b.dmu0) - 2.0 * v.a * p * fg / b.dmu0
    }

    /// D(t) and D′(t) for initial value α(0).
    fn denominator(&self, alpha_init: f64, t: f64) -> Result<(f64, f64)> {
        let (a0, d0) = self.basis.origin_coefficients();
        let b = self.basis.eval(t)?;
        let c = alpha_init + d0 / (2.0 * a0);
        Ok((c * b.mu0 + 0.5 * b.mu1, c * b.dmu0 + 0.5 * b.dmu1))
    }

    /// First zero of α(0) + γ₀(t) (equivalently of μ(t)) after the origin.
    pub fn first_caustic(&self, alpha_init: f64) -> Result<Option<f64>> {
        let f = |t: f64| self.denominator(alpha_init, t).map(|d| d.0).unwrap_or(f64::NAN);
        for w in self.basis.mesh().windows(2) {
            let mut lo = w[0];
            let mut flo = f(lo);
            for j in 1..=4 {
                let hi = w[0] + (w[1] - w[0]) * j as f64 / 4.0;
                let fhi = f(hi);
                if fhi == 0.0 || fhi.signum() != flo.signum() {
                    return brent(f, lo, hi, 1e-14).map(Some);
                }
                lo = hi;
                flo = fhi;
            }
        }
        Ok(None)
    }
}

/// Propagates initial phase data along one kernel set.
#[derive(Debug, Clone)]
pub struct PhaseTrajectory {
    kernels: PhaseKernels,
    init: PhaseState,
    g0: f64,
    caustic: Option<f64>,
}

impl PhaseTrajectory {
    pub fn new(kernels: PhaseKernels, init: PhaseState, g0: f64) -> Result<Self> {
        init.validate()?;
        ensure_finite("g0", g0)?;
        if (init.t - kernels.origin()).abs() > 1e-12 * kernels.origin().abs().max(1.0) {
            return Err(Error::Domain(format!(
                "initial data given at t = {} but kernels start at {}",
                init.t,
                kernels.origin()
            )));
        }
        let caustic = kernels.first_caustic(init.alpha)?;
        Ok(Self {
            kernels,
            init,
            g0,
            caustic,
        })
    }

    pub fn kernels(&self) -> &PhaseKernels {
        &self.kernels
    }

    pub fn init(&self) -> &PhaseState {
        &self.init
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn first_caustic(&self) -> Option<f64> {
        self.caustic
    }

    /// Last time at which the state is defined.
    pub fn valid_until(&self) -> f64 {
        let end = self.kernels.valid_until();
        self.caustic.map_or(end, |c| c.min(end))
    }

    /// True when μ keeps the sign opposite to +1 (|μ| is used in amplitudes).
    pub fn negative_branch(&self) -> bool {
        self.init.mu < 0.0
    }

    pub fn state(&self, t: f64) -> Result<PhaseState> {
        let k = &self.kernels;
        k.check(t)?;
        if let Some(tc) = self.caustic {
            if t >= tc {
                return Err(Error::FocalPoint { t: tc });
            }
        }
        let i = &self.init;
        if t == k.origin() {
            return Ok(PhaseState { xi: 0.0, ..*i });
        }
        let v = k.coeffs.at(t);
        let b = k.basis.eval(t)?;
        let (d, dd) = k.denominator(i.alpha, t)?;
        if d == 0.0 {
            return Err(Error::FocalPoint { t });
        }
        let lam = k.lambda(t);
        let (delta0, eps0, kap0) = (k.delta0(t)?, k.epsilon0(t)?, k.kappa0(t)?);
        let shift = i.delta + eps0;
        let gamma = i.gamma - i.beta * i.beta * b.mu0 / (4.0 * d);
        Ok(PhaseState {
            t,
            mu: 2.0 * i.mu * d,
            alpha: dd / (4.0 * v.a * d) - v.d / (2.0 * v.a),
            beta: i.beta * lam / (2.0 * d),
            gamma,
            delta: delta0 + lam * shift / (2.0 * d),
            epsilon: i.epsilon - i.beta * b.mu0 * shift / (2.0 * d),
            kappa: i.kappa + kap0 - b.mu0 * shift * shift / (4.0 * d),
            xi: self.g0 * (i.gamma - gamma),
        })
    }

    /// α, β, γ, μ from the classical kernel expressions (poles at the origin).
    pub fn kernel_forms(&self, t: f64) -> Result<KernelForms> {
        let k = &self.kernels;
        let i = &self.init;
        let (a0, b0, c0) = (k.alpha0(t)?, k.beta0(t)?, k.gamma0(t)?);
        let mu0 = k.basis.eval(t)?.mu0;
        let s = i.alpha + c0;
        if s == 0.0 {
            return Err(Error::FocalPoint { t });
        }
        let mu = 2.0 * i.mu * mu0 * s;
        Ok(KernelForms {
            mu,
            alpha: a0 - b0 * b0 / (4.0 * s),
            beta_kernel: -i.beta * b0 / (2.0 * s),
            beta_ratio: i.beta * i.mu * k.lambda(t) / mu,
            gamma: i.gamma - i.beta * i.beta / (4.0 * s),
        })
    }
}

/// Kernel-form values for cross-checking [`PhaseTrajectory::state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelForms {
    pub mu: f64,
    pub alpha: f64,
    /// −β(0)β₀/(2(α(0)+γ₀)).
    pub beta_kernel: f64,
    /// β(0)μ(0)λ/μ.
    pub beta_ratio: f64,
    pub gamma: f64,
}

/// Convenience wrapper: state at `t` from kernels and initial data.
pub fn propagate(kernels: &PhaseKernels, init: &PhaseState, g0: f64, t: f64) -> Result<PhaseState> {
    PhaseTrajectory::new(kernels.clone(), *init, g0)?.state(t)
}

/// Relative residuals of the phase system
/// α′ + b + 2cα + 4aα² = 0, β′ + (c + 4aα)β = 0, γ′ + aβ² = 0,
/// δ′ + (c + 4aα)δ − f − 2αg = 0, ε′ − (g − 2aδ)β = 0, κ′ − gδ + aδ² = 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RiccatiReport {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub kappa: f64,
}

impl RiccatiReport {
    pub fn max(&self) -> f64 {
        [self.alpha, self.beta, self.gamma, self.delta, self.epsilon, self.kappa]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

type Terms = Vec<[f64; 4]>;

const RICCATI_VARS: [fn(&PhaseState) -> f64; 6] = [
    |s| s.alpha,
    |s| s.beta,
    |s| s.gamma,
    |s| s.delta,
    |s| s.epsilon,
    |s| s.kappa,
];

fn riccati_terms(states: &[PhaseState], coeffs: &QuadraticCoefficients, h: f64) -> [Terms; 6] {
    let der: Vec<Vec<f64>> = RICCATI_VARS
        .iter()
        .map(|f| d1_uniform(&states.iter().map(f).collect::<Vec<_>>(), h))
        .collect();
    let mut out: [Terms; 6] = Default::default();
    for (j, s) in states.iter().enumerate() {
        let v = coeffs.at(s.t);
        let damp = v.c + 4.0 * v.a * s.alpha;
        out[0].push([der[0][j], v.b, 2.0 * v.c * s.alpha, 4.0 * v.a * s.alpha * s.alpha]);
        out[1].push([der[1][j], damp * s.beta, 0.0, 0.0]);
        out[2].push([der[2][j], v.a * s.beta * s.beta, 0.0, 0.0]);
        out[3].push([der[3][j], damp * s.delta, -v.f, -2.0 * s.alpha * v.g]);
        out[4].push([der[4][j], -v.g * s.beta, 2.0 * v.a * s.delta * s.beta, 0.0]);
        out[5].push([der[5][j], -v.g * s.delta, v.a * s.delta * s.delta, 0.0]);
    }
    out
}

/// Residuals of the phase ODEs on a uniformly sampled trajectory.
///
/// Differences below the roundoff floor of the stencil (about 64ε·max|y|/h,
/// with the maximum over all phase variables) are treated as zero. Fails with
/// a diagnostics error if a Richardson estimate of the stencil truncation error exceeds `tol`/2.
pub fn riccati_residuals(
    states: &[PhaseState],
    coeffs: &QuadraticCoefficients,
    tol: f64,
) -> Result<RiccatiReport> {
    if states.len() < 10 {
        return Err(Error::Diagnostics("need at least ten samples".into()));
    }
    let h = states[1].t - states[0].t;
    if !(h > 0.0) || states.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-9 * h) {
        return Err(Error::Diagnostics("trajectory must be sampled uniformly".into()));
    }
    let fine = riccati_terms(states, coeffs, h);
    let coarse_states: Vec<PhaseState> = states.iter().step_by(2).copied().collect();
    let coarse = riccati_terms(&coarse_states, coeffs, 2.0 * h);
    // Phase variables are differences of O(|state|) kernel products, so
    // their roundoff is set by the whole state rather than by each variable.
    let ymax = states
        .iter()
        .flat_map(|s| RICCATI_VARS.iter().map(move |v| v(s).abs()))
        .fold(0.0, f64::max);
    let noise = 64.0 * f64::EPSILON * ymax / h;
    let mut r = [0.0; 6];
    for e in 0..6 {
        let mut res: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for row in &fine[e] {
            res = res.max(row.iter().sum::<f64>().abs() - noise);
            scale = row.iter().fold(scale, |m, x| m.max(x.abs()));
        }
        // An equation whose terms are all at roundoff level carries no signal.
        if scale <= 16.0 * noise {
            continue;
        }
        r[e] = res.max(0.0) / scale;
        let trunc = coarse[e]
            .iter()
            .enumerate()
            .map(|(j, row)| (row[0] - fine[e][2 * j][0]).abs() / 15.0)
            .fold(0.0, f64::max);
        if (trunc - noise) / scale > 0.5 * tol {
            return Err(Error::Diagnostics(format!(
                "sampling too coarse: truncation estimate {:e} exceeds half the tolerance",
                trunc / scale
            )));
        }
    }
    Ok(RiccatiReport {
        alpha: r[0],
        beta: r[1],
        gamma: r[2],
        delta: r[3],
        epsilon: r[4],
        kappa: r[5],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::solve_basis;

    fn free_kernels() -> PhaseKernels {
        let c = QuadraticCoefficients::free_particle();
        base_kernels(Arc::new(solve_basis(&c, 2.0).unwrap()), &c).unwrap()
    }

    #[test]
    fn poles_at_origin() {
        let k = free_kernels();
        assert!(matches!(k.alpha0(0.0), Err(Error::Pole { .. })));
        assert!(matches!(k.beta0(0.0), Err(Error::Pole { .. })));
        assert!(matches!(k.gamma0(0.0), Err(Error::Pole { .. })));
        assert_eq!(k.lambda(0.0), 1.0);
    }

    #[test]
    fn zero_linear_terms_give_zero_kernels() {
        let k = free_kernels();
        for t in [0.0, 0.3, 1.9] {
            assert_eq!(k.delta0(t).unwrap(), 0.0);
            assert_eq!(k.epsilon0(t).unwrap(), 0.0);
            assert_eq!(k.kappa0(t).unwrap(), 0.0);
        }
    }

    #[test]
    fn caustic_reported() {
        let k = free_kernels();
        // μ = μ(0)(1 − 4α(0)t): caustic at 1/(4α(0)).
        let tr = PhaseTrajectory::new(k, PhaseState::quadratic(0.0, 1.0, 0.5, 1.0, 0.0), 1.0).unwrap();
        let tc = tr.first_caustic().unwrap();
        assert!((tc - 0.5).abs() < 1e-12);
        assert!(matches!(tr.state(0.7), Err(Error::FocalPoint { .. })));
    }

    #[test]
    fn state_at_origin_is_initial_data() {
        let init = PhaseState::quadratic(0.0, 2.0, 0.1, 1.0, 0.3).with_linear(0.2, -0.1, 0.05);
        let s = propagate(&free_kernels(), &init, 1.0, 0.0).unwrap();
        assert_eq!(s, init);
    }

    #[test]
    fn rejects_mismatched_origin() {
        let init = PhaseState::quadratic(0.5, 1.0, 0.0, 1.0, 0.0);
        assert!(PhaseTrajectory::new(free_kernels(), init, 1.0).is_err());
    }

    #[test]
    fn constant_trajectory_has_zero_residual() {
        let c = QuadraticCoefficients::custom(
            crate::timefn::TimeFunction::ZERO,
            crate::timefn::TimeFunction::ZERO,
            crate::timefn::TimeFunction::ZERO,
            crate::timefn::TimeFunction::ZERO,
            crate::timefn::TimeFunction::ZERO,
            crate::timefn::TimeFunction::ZERO,
        );
        let states: Vec<PhaseState> = (0..20)
            .map(|i| PhaseState {
                t: i as f64 * 0.1,
                mu: 1.0,
                alpha: 0.3,
                beta: 1.2,
                gamma: -0.4,
                delta: 0.1,
                epsilon: 0.2,
                kappa: 0.7,
                xi: 0.0,
            })
            .collect();
        let r = riccati_residuals(&states, &c, 1e-6).unwrap();
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn coarse_sampling_is_diagnosed() {
        let k = free_kernels();
        let tr = PhaseTrajectory::new(k, PhaseState::quadratic(0.0, 1.0, 0.4, 1.0, 0.0), 0.0).unwrap();
        // Caustic at 0.625: a 12-point grid up to 0.6 cannot resolve the blow-up.
        let states: Vec<PhaseState> = (0..12).map(|i| tr.state(0.05 * i as f64).unwrap()).collect();
        let c = QuadraticCoefficients::free_particle();
        assert!(matches!(riccati_residuals(&states, &c, 1e-6), Err(Error::Diagnostics(_))));
    }
}
