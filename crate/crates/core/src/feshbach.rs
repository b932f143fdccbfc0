//! Matter-wave solitons in a cigar-shaped condensate.
//!
//! The three-dimensional Gross–Pitaevskii equation with transverse frequency
//! ω⊥, axial frequency ω₀(t) and gain η(t) reduces, in units ζ = z/a⊥ and
//! τ = ω⊥t, to
//!
//! ```text
//! iψ_τ = ½(−ψ_ζζ + ω²(τ)ζ²ψ) + κ(τ)|ψ|²ψ,   κ = 2e^Λ a_s/a₀,
//! ```
//!
//! which is the quadratic-Hamiltonian equation with a = ½, b = ω²/2 and
//! h = κ. A soliton needs κ = h₀β(0)²μ(0)²/(2μ); with the Feshbach law
//! a_s(B)/a₀ = a∞(1 + Δ₀/(B₀ − B)) this fixes the magnetic field B(τ).
//!
//! Physical units enter only through [`reduce_gpe`]; everything else works in
//! reduced time τ and in lengths measured in Bohr radii.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assembler::SolitonSolution;
use crate::characteristic::QuadraticCoefficients;
use crate::error::{ensure_finite, Error, Result};
use crate::io::Table;
use crate::numerics::diff::d2;
use crate::numerics::roots::brent;
use crate::timefn::TimeFunction;

/// Resonance parameters of a_s(B)/a₀ = a∞(1 + Δ₀/(B₀ − B)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeshbachParams {
    /// Resonance centre (G).
    pub b0: f64,
    /// Resonance width (G).
    pub delta0: f64,
    /// Off-resonance scattering length in Bohr radii.
    pub a_inf: f64,
    /// Bohr radius in the caller's length unit; bookkeeping only.
    #[serde(default = "bohr_radius_m")]
    pub a0_bohr: f64,
}

fn bohr_radius_m() -> f64 {
    5.291_772_109_03e-11
}

impl FeshbachParams {
    pub fn new(b0: f64, delta0: f64, a_inf: f64) -> Result<Self> {
        let p = Self {
            b0,
            delta0,
            a_inf,
            a0_bohr: bohr_radius_m(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("B0", self.b0), ("Delta0", self.delta0), ("a_inf", self.a_inf)] {
            ensure_finite(name, v)?;
        }
        if self.delta0 == 0.0 || self.a_inf == 0.0 {
            return Err(Error::Domain("Delta0 and a_inf must be nonzero".into()));
        }
        Ok(())
    }
}

/// a_s(B)/a₀.
pub fn scattering_length(b: f64, p: &FeshbachParams) -> Result<f64> {
    ensure_finite("B", b)?;
    if b == p.b0 {
        return Err(Error::Pole {
            what: "scattering length at B = B0",
            t: b,
        });
    }
    Ok(p.a_inf * (1.0 + p.delta0 / (p.b0 - b)))
}

/// Physical parameters of the three-dimensional condensate (SI or any
/// consistent unit system).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpeParams {
    pub hbar: f64,
    pub mass: f64,
    pub omega_perp: f64,
    /// ω₀²(t) in physical time.
    pub omega0_sq: TimeFunction,
    /// Gain (η > 0) or loss rate in physical time.
    #[serde(default = "zero_fn")]
    pub eta: TimeFunction,
}

fn zero_fn() -> TimeFunction {
    TimeFunction::ZERO
}

/// The dimensionless one-dimensional problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    omega_perp: f64,
    a_perp: f64,
    omega_ratio_sq: TimeFunction,
    eta: TimeFunction,
}

/// Reduces the Gross–Pitaevskii parameters to reduced time τ = ω⊥t.
pub fn reduce_gpe(p: &GpeParams) -> Result<ReducedSystem> {
    for (name, v) in [("hbar", p.hbar), ("mass", p.mass), ("omega_perp", p.omega_perp)] {
        ensure_finite(name, v)?;
    }
    if p.omega_perp <= 0.0 {
        return Err(Error::Domain(format!(
            "transverse frequency must be positive, got {}",
            p.omega_perp
        )));
    }
    if p.hbar <= 0.0 || p.mass <= 0.0 {
        return Err(Error::Domain("hbar and mass must be positive".into()));
    }
    p.omega0_sq.validate("omega0_sq")?;
    p.eta.validate("eta")?;
    let w = p.omega_perp;
    Ok(ReducedSystem {
        omega_perp: w,
        a_perp: (p.hbar / (p.mass * w)).sqrt(),
        omega_ratio_sq: p.omega0_sq.time_scaled(1.0 / w)?.scaled(1.0 / (w * w)),
        eta: p.eta.time_scaled(1.0 / w)?.scaled(1.0 / w),
    })
}

impl ReducedSystem {
    /// A system given directly in reduced units (ω⊥ = 1, a⊥ = 1).
    pub fn dimensionless(omega_sq: TimeFunction, eta: TimeFunction) -> Self {
        Self {
            omega_perp: 1.0,
            a_perp: 1.0,
            omega_ratio_sq: omega_sq,
            eta,
        }
    }

    pub fn omega_perp(&self) -> f64 {
        self.omega_perp
    }

    /// Transverse oscillator length √(ħ/mω⊥).
    pub fn a_perp(&self) -> f64 {
        self.a_perp
    }

    /// ω²(τ) = ω₀²/ω⊥².
    pub fn omega_ratio_sq(&self) -> &TimeFunction {
        &self.omega_ratio_sq
    }

    /// Gain rate per unit τ.
    pub fn eta(&self) -> &TimeFunction {
        &self.eta
    }

    /// Λ(τ) = ∫₀^τ η.
    pub fn lambda(&self, tau: f64) -> f64 {
        self.eta.integral(tau)
    }

    /// κ(τ) = 2e^Λ a_s/a₀.
    pub fn kappa(&self, tau: f64, a_s_ratio: f64) -> f64 {
        2.0 * self.lambda(tau).exp() * a_s_ratio
    }

    /// a = ½, b = ω²/2, c = d = f = g = 0.
    pub fn coefficients(&self) -> QuadraticCoefficients {
        QuadraticCoefficients::bec_trap(self.omega_ratio_sq.clone())
    }

    /// Ψ(r, t) from the reduced field ψ(ζ, τ) at ρ² = x² + y², with lengths in
    /// the unit of `a0`.
    pub fn physical_field(&self, psi: Complex64, rho_sq: f64, t: f64, a0: f64) -> Complex64 {
        let tau = self.omega_perp * t;
        let norm = 1.0 / ((2.0 * std::f64::consts::PI * a0).sqrt() * self.a_perp);
        let envelope = (-rho_sq / (2.0 * self.a_perp * self.a_perp) + 0.5 * self.lambda(tau)).exp();
        Complex64::from_polar(norm * envelope, -tau) * psi
    }
}

/// Soliton constants entering the balance condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonConsts {
    pub h0: f64,
    pub beta0: f64,
    pub mu0: f64,
}

impl SolitonConsts {
    pub fn of(sol: &SolitonSolution) -> Self {
        let i = sol.init();
        Self {
            h0: sol.profile().h0(),
            beta0: i.beta,
            mu0: i.mu,
        }
    }

    fn numerator(&self) -> f64 {
        self.h0 * self.beta0 * self.beta0 * self.mu0 * self.mu0
    }

    /// Required a_s/a₀ = h₀β(0)²μ(0)²e^{−Λ}/(4μ).
    pub fn required_scattering_length(&self, mu: f64, lambda: f64) -> f64 {
        self.numerator() * (-lambda).exp() / (4.0 * mu)
    }

    /// Required κ = h₀β(0)²μ(0)²/(2μ).
    pub fn kappa(&self, mu: f64) -> f64 {
        self.numerator() / (2.0 * mu)
    }
}

/// 4a∞e^Λμ − h₀β(0)²μ(0)², the denominator of the tuning field.
pub fn tuning_denominator(mu: f64, lambda: f64, c: &SolitonConsts, p: &FeshbachParams) -> f64 {
    4.0 * p.a_inf * lambda.exp() * mu - c.numerator()
}

/// Magnetic field that realises the soliton balance at time `t`:
/// B = B₀ + 4a∞Δ₀e^Λμ / (4a∞e^Λμ − h₀β(0)²μ(0)²).
pub fn tuning_field(
    mu: &dyn Fn(f64) -> Result<f64>,
    lambda: &dyn Fn(f64) -> f64,
    c: &SolitonConsts,
    p: &FeshbachParams,
    t: f64,
) -> Result<f64> {
    let m = mu(t)?;
    let l = lambda(t);
    let num = 4.0 * p.a_inf * l.exp() * m;
    let den = num - c.numerator();
    if den.abs() <= 1e-14 * (num.abs() + c.numerator().abs()) {
        return Err(Error::Pole {
            what: "tuning field",
            t,
        });
    }
    Ok(p.b0 + num * p.delta0 / den)
}

/// ω²(t) = −μ″/μ from a fourth-order difference of μ.
pub fn trap_frequency_from_mu(mu: &dyn Fn(f64) -> Result<f64>, t: f64) -> Result<f64> {
    let m = mu(t)?;
    if m.abs() < 1e-12 {
        return Err(Error::FocalPoint { t });
    }
    let h = 1e-3;
    for s in [-2.0, -1.0, 1.0, 2.0] {
        mu(t + s * h)?;
    }
    let mpp = d2(|q| mu(q).unwrap_or(f64::NAN), t, h);
    Ok(-mpp / m)
}

/// Field program B(τ) with the synchronisation residual of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProgram {
    pub tau: Vec<f64>,
    pub b: Vec<f64>,
    pub a_s_ratio: Vec<f64>,
    pub kappa: Vec<f64>,
    /// Times where the tuning field has a pole (rows there are omitted).
    pub poles: Vec<f64>,
    /// max |a_s(B) − required a_s| / |required a_s| over the rows.
    pub sync_residual: f64,
}

impl FieldProgram {
    /// Columns `tau B a_s_ratio kappa`.
    pub fn to_table(&self) -> Table {
        let mut tab = Table::new(&["tau", "B", "a_s_ratio", "kappa"], ' ');
        for i in 0..self.tau.len() {
            tab.push(&[self.tau[i], self.b[i], self.a_s_ratio[i], self.kappa[i]]);
        }
        tab
    }
}

/// Samples the tuning field of `sol` on `n + 1` uniform times in [t0, t1].
///
/// Sign changes of the denominator are located by root finding; samples
/// within `1e-9·(t1 − t0)` of a pole are dropped.
pub fn field_program(
    sol: &SolitonSolution,
    system: &ReducedSystem,
    p: &FeshbachParams,
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<FieldProgram> {
    p.validate()?;
    if !(t1 > t0) || n < 1 {
        return Err(Error::Domain("need t1 > t0 and n >= 1".into()));
    }
    let consts = SolitonConsts::of(sol);
    let mu = |t: f64| sol.state(t).map(|s| s.mu);
    let lambda = |t: f64| system.lambda(t);
    let den = |t: f64| mu(t).map(|m| tuning_denominator(m, lambda(t), &consts, p));

    let times: Vec<f64> = (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect();
    let dens = times.iter().map(|&t| den(t)).collect::<Result<Vec<_>>>()?;
    let mut poles = Vec::new();
    for i in 0..n {
        if dens[i] == 0.0 {
            poles.push(times[i]);
        } else if dens[i].signum() * dens[i + 1].signum() < 0.0 {
            let r = brent(|t| den(t).unwrap_or(f64::NAN), times[i], times[i + 1], 1e-15)?;
            poles.push(r);
        }
    }
    if dens[n] == 0.0 {
        poles.push(times[n]);
    }
    let guard = 1e-9 * (t1 - t0);

    let mut prog = FieldProgram {
        tau: Vec::new(),
        b: Vec::new(),
        a_s_ratio: Vec::new(),
        kappa: Vec::new(),
        poles,
        sync_residual: 0.0,
    };
    for &t in &times {
        if prog.poles.iter().any(|q| (q - t).abs() <= guard) {
            continue;
        }
        let b = match tuning_field(&mu, &lambda, &consts, p, t) {
            Ok(b) => b,
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        };
        let m = mu(t)?;
        let a_s = scattering_length(b, p)?;
        let want = consts.required_scattering_length(m, lambda(t));
        prog.sync_residual = prog.sync_residual.max((a_s - want).abs() / want.abs());
        prog.tau.push(t);
        prog.b.push(b);
        prog.a_s_ratio.push(a_s);
        prog.kappa.push(system.kappa(t, a_s));
    }
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonance_law() {
        let p = FeshbachParams::new(155.0, 11.0, -450.0).unwrap();
        assert!((scattering_length(1e12, &p).unwrap() - p.a_inf).abs() < 1e-6);
        assert!((scattering_length(-1e12, &p).unwrap() - p.a_inf).abs() < 1e-6);
        assert_eq!(scattering_length(p.b0 + p.delta0, &p).unwrap(), 0.0);
        assert!((scattering_length(p.b0 - p.delta0, &p).unwrap() - 2.0 * p.a_inf).abs() < 1e-12);
        assert!(matches!(scattering_length(p.b0, &p), Err(Error::Pole { .. })));
        assert!(FeshbachParams::new(1.0, 0.0, 1.0).is_err());
        assert!(FeshbachParams::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn time_rescaling() {
        let p = GpeParams {
            hbar: 1.0,
            mass: 2.0,
            omega_perp: 4.0,
            omega0_sq: TimeFunction::constant(16.0),
            eta: TimeFunction::constant(0.5),
        };
        let r = reduce_gpe(&p).unwrap();
        assert_eq!(r.omega_ratio_sq().value(3.0), 1.0);
        assert!((r.lambda(2.0) - 0.5 * 2.0 / 4.0).abs() < 1e-15);
        assert!((r.a_perp() - (1.0f64 / 8.0).sqrt()).abs() < 1e-15);
        let bad = GpeParams { omega_perp: 0.0, ..p };
        assert!(matches!(reduce_gpe(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn pole_in_tuning_field() {
        let p = FeshbachParams::new(0.0, 1.0, 1.0).unwrap();
        let c = SolitonConsts {
            h0: 4.0,
            beta0: 1.0,
            mu0: 1.0,
        };
        let r = tuning_field(&|_| Ok(1.0), &|_| 0.0, &c, &p, 0.7);
        assert_eq!(r, Err(Error::Pole { what: "tuning field", t: 0.7 }));
    }
}
