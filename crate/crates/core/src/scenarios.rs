//! Named, fully parameterised soliton set-ups with verification plans.
//!
//! A scenario is a TOML document; the built-in catalog is compiled from the
//! files in `scenarios/` and uses exactly the schema accepted from disk:
//!
//! ```toml
//! name = "free-bright"
//! horizon = 2.0          # kernels are built on [0, horizon]
//! y = 0.2                # transverse parameter of z = βx + 2γy + ε
//! phi = 0.0              # constant phase
//!
//! [coefficients]
//! preset = "fiber-optic" # free-particle | fiber-optic | harmonic-trap
//!                        # | bec-trap | plasma-linear | custom
//! a = { kind = "sinusoid", offset = -1.0, amplitude = -0.3, omega = 1.0 }
//! d = { kind = "constant", value = 0.1 }
//!
//! [profile]
//! m = 0                  # 0: elliptic profiles, 1: nonlinear Airy
//! g0 = 1.0
//! h0 = -1.0
//! c0 = 0.0               # first integral (m = 0)
//! # k = 0.5              # Airy amplitude (m = 1)
//!
//! [initial]              # phase data at t = 0; omitted entries are zero
//! mu = 1.0
//! beta = 1.0
//!
//! [grid]                 # residual grid and default sampling window
//! x_min = -20.0
//! x_max = 20.0
//! nx = 512
//! t_min = 0.05
//! t_max = 0.5
//! nt = 200
//!
//! [[checks]]
//! kind = "residual"
//! tol = 1e-6
//! ```
//!
//! Check kinds: `residual`, `gauged-residual`, `propagation`, `riccati`,
//! `first-integral`, `trajectory`, `acceleration`, `autonomous`, `feshbach`.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assembler::{
    autonomous_residual, classical_trajectory, GaugedSolution, SolitonSolution,
};
use crate::characteristic::{solve_basis, QuadraticCoefficients};
use crate::error::{Error, Result};
use crate::feshbach::{field_program, FeshbachParams, FieldProgram, ReducedSystem};
use crate::io::Table;
use crate::kernels::{base_kernels, riccati_residuals, PhaseState};
use crate::par::Execution;
use crate::profile::{build_profile_m0, build_profile_m1, SolitonProfile};
use crate::timefn::TimeFunction;
use crate::verifier::{
    l2_relative_error, pde_residual, split_step_propagate, PeriodicGrid, ResidualOptions,
    SplitStepOptions,
};

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case")]
pub enum CoeffSpec {
    FreeParticle,
    FiberOptic {
        a: TimeFunction,
        d: TimeFunction,
    },
    HarmonicTrap,
    BecTrap {
        omega_sq: TimeFunction,
    },
    PlasmaLinear {
        k: f64,
    },
    Custom {
        a: TimeFunction,
        #[serde(default = "zero")]
        b: TimeFunction,
        #[serde(default = "zero")]
        c: TimeFunction,
        #[serde(default = "zero")]
        d: TimeFunction,
        #[serde(default = "zero")]
        f: TimeFunction,
        #[serde(default = "zero")]
        g: TimeFunction,
    },
}

fn zero() -> TimeFunction {
    TimeFunction::ZERO
}

impl CoeffSpec {
    pub fn build(&self) -> QuadraticCoefficients {
        match self {
            CoeffSpec::FreeParticle => QuadraticCoefficients::free_particle(),
            CoeffSpec::FiberOptic { a, d } => QuadraticCoefficients::fiber_optic(a.clone(), d.clone()),
            CoeffSpec::HarmonicTrap => QuadraticCoefficients::harmonic_trap(),
            CoeffSpec::BecTrap { omega_sq } => QuadraticCoefficients::bec_trap(omega_sq.clone()),
            CoeffSpec::PlasmaLinear { k } => QuadraticCoefficients::plasma_linear(*k),
            CoeffSpec::Custom { a, b, c, d, f, g } => {
                QuadraticCoefficients::custom(a.clone(), b.clone(), c.clone(), d.clone(), f.clone(), g.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub m: u8,
    pub g0: f64,
    pub h0: f64,
    #[serde(default)]
    pub c0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl ProfileSpec {
    pub fn build(&self) -> Result<SolitonProfile> {
        match (self.m, self.k) {
            (0, _) => build_profile_m0(self.g0, self.h0, self.c0),
            (1, Some(k)) => build_profile_m1(self.g0, self.h0, k),
            (1, None) => Err(Error::Config("an m = 1 profile needs `k`".into())),
            (m, _) => Err(Error::Unsupported(format!(
                "m = {m}: only m = 0 and m = 1 admit the soliton reduction"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSpec {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub kappa: f64,
}

impl InitialSpec {
    pub fn state(&self) -> PhaseState {
        PhaseState::quadratic(0.0, self.mu, self.alpha, self.beta, self.gamma).with_linear(
            self.delta,
            self.epsilon,
            self.kappa,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: -20.0,
            x_max: 20.0,
            nx: 512,
            t_min: 0.05,
            t_max: 0.5,
            nt: 200,
        }
    }
}

impl GridSpec {
    pub fn x(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn t(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.nt)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Resonance and gain data for condensate scenarios (reduced units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeshbachSpec {
    pub b0: f64,
    pub delta0: f64,
    pub a_inf: f64,
    #[serde(default = "zero")]
    pub eta: TimeFunction,
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Check {
    /// Relative PDE residual on the scenario grid.
    Residual { tol: f64 },
    /// Residual of the gauged m = 1 field with the linear potential g₀aβ³x.
    GaugedResidual { tol: f64 },
    /// L² error of split-step propagation at `t_end` against the analytic field.
    Propagation {
        tol: f64,
        dt: f64,
        t_end: f64,
        #[serde(default = "default_box")]
        half_width: f64,
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Residuals of the phase ODEs on the scenario time window.
    Riccati {
        tol: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Constancy of the profile first integral on z ∈ [−10, 10].
    FirstIntegral { tol: f64 },
    /// Laws of motion of the wave centre and constancy of z along it.
    Trajectory {
        tol: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default = "default_drift")]
        drift_tol: f64,
    },
    /// t² coefficient of a quadratic fit of the centre path (default a·f at t = 0).
    Acceleration {
        tol: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected: Option<f64>,
    },
    /// Residual of the constant-coefficient equation after autonomization.
    Autonomous {
        tol: f64,
        #[serde(default = "default_xi")]
        xi_half_width: f64,
        #[serde(default = "default_auto_t")]
        t_window: (f64, f64),
        #[serde(default = "default_auto_n")]
        n: usize,
    },
    /// Synchronisation residual of the Feshbach field program.
    Feshbach { tol: f64 },
}

fn default_box() -> f64 {
    20.0
}
fn default_points() -> usize {
    1024
}
fn default_drift() -> f64 {
    1e-8
}
fn default_xi() -> f64 {
    8.0
}
fn default_auto_t() -> (f64, f64) {
    (0.1, 1.0)
}
fn default_auto_n() -> usize {
    64
}

impl Check {
    pub fn tol(&self) -> f64 {
        match self {
            Check::Residual { tol }
            | Check::GaugedResidual { tol }
            | Check::Propagation { tol, .. }
            | Check::Riccati { tol, .. }
            | Check::FirstIntegral { tol }
            | Check::Trajectory { tol, .. }
            | Check::Acceleration { tol, .. }
            | Check::Autonomous { tol, .. }
            | Check::Feshbach { tol } => *tol,
        }
    }

    fn tol_mut(&mut self) -> &mut f64 {
        match self {
            Check::Residual { tol }
            | Check::GaugedResidual { tol }
            | Check::Propagation { tol, .. }
            | Check::Riccati { tol, .. }
            | Check::FirstIntegral { tol }
            | Check::Trajectory { tol, .. }
            | Check::Acceleration { tol, .. }
            | Check::Autonomous { tol, .. }
            | Check::Feshbach { tol } => tol,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Check::Residual { .. } => "residual",
            Check::GaugedResidual { .. } => "gauged-residual",
            Check::Propagation { .. } => "propagation",
            Check::Riccati { .. } => "riccati",
            Check::FirstIntegral { .. } => "first-integral",
            Check::Trajectory { .. } => "trajectory",
            Check::Acceleration { .. } => "acceleration",
            Check::Autonomous { .. } => "autonomous",
            Check::Feshbach { .. } => "feshbach",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Kernels and the validity window are built on [0, horizon].
    pub horizon: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub y: f64,
    pub coefficients: CoeffSpec,
    pub profile: ProfileSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feshbach: Option<FeshbachSpec>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios serialize to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("scenario `{}`: {m}", self.name)));
        if self.name.is_empty() {
            return Err(Error::Config("scenario name is empty".into()));
        }
        if !(self.horizon > 0.0) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        let g = &self.grid;
        if g.nx < 2 || g.nt < 2 || !(g.x_max > g.x_min) || !(g.t_max > g.t_min) {
            return bad("grid needs nx, nt >= 2 and increasing ranges".into());
        }
        if g.t_min < 0.0 || g.t_max > self.horizon {
            return bad(format!("grid times must lie in [0, {}]", self.horizon));
        }
        if self.profile.m > 1 {
            return bad(format!("profile m = {} is not supported", self.profile.m));
        }
        for c in &self.checks {
            if !(c.tol() > 0.0) {
                return bad(format!("check `{}` needs a positive tolerance", c.name()));
            }
            if let Check::Propagation { t_end, half_width, points, dt, .. } = c {
                if !(*t_end > 0.0) || *t_end > self.horizon || !(*dt > 0.0) || !(*half_width > 0.0) {
                    return bad("propagation needs 0 < t_end <= horizon, dt > 0 and half_width > 0".into());
                }
                if *points < 64 || !points.is_power_of_two() {
                    return bad(format!("propagation points must be a power of two >= 64, got {points}"));
                }
            }
        }
        if let Some(f) = &self.feshbach {
            if !matches!(self.coefficients, CoeffSpec::BecTrap { .. }) {
                return bad("a feshbach section requires the bec-trap preset".into());
            }
            FeshbachParams::new(f.b0, f.delta0, f.a_inf)?;
            if !(f.t_max > f.t_min) || f.samples < 1 {
                return bad("feshbach window needs t_max > t_min and samples >= 1".into());
            }
        }
        self.coefficients.build().validate(0.0, self.horizon)?;
        Ok(())
    }

    pub fn coefficients(&self) -> QuadraticCoefficients {
        self.coefficients.build()
    }

    /// Assembles the analytic solution on [0, horizon].
    pub fn build(&self) -> Result<SolitonSolution> {
        let run = || -> Result<SolitonSolution> {
            let c = self.coefficients();
            let basis = Arc::new(solve_basis(&c, self.horizon)?);
            let kernels = base_kernels(basis, &c)?;
            SolitonSolution::new(kernels, self.initial.state(), self.profile.build()?, self.phi, self.y)
        };
        run().map_err(|e| e.in_scenario(&self.name))
    }

    /// The reduced condensate system (bec-trap scenarios only).
    pub fn reduced_system(&self) -> Result<ReducedSystem> {
        match (&self.coefficients, &self.feshbach) {
            (CoeffSpec::BecTrap { omega_sq }, Some(f)) => {
                Ok(ReducedSystem::dimensionless(omega_sq.clone(), f.eta.clone()))
            }
            _ => Err(Error::Config(format!(
                "scenario `{}` has no condensate/feshbach data",
                self.name
            ))),
        }
    }

    pub fn feshbach_params(&self) -> Result<FeshbachParams> {
        let f = self.feshbach.as_ref().ok_or_else(|| {
            Error::Config(format!("scenario `{}` has no feshbach section", self.name))
        })?;
        FeshbachParams::new(f.b0, f.delta0, f.a_inf)
    }

    /// Magnetic-field program over the scenario's feshbach window.
    pub fn field_program(&self, sol: &SolitonSolution) -> Result<FieldProgram> {
        let f = self.feshbach.as_ref().ok_or_else(|| {
            Error::Config(format!("scenario `{}` has no feshbach section", self.name))
        })?;
        field_program(sol, &self.reduced_system()?, &self.feshbach_params()?, f.t_min, f.t_max, f.samples)
            .map_err(|e| e.in_scenario(&self.name))
    }
}

const CATALOG_SOURCES: [&str; 11] = [
    include_str!("../scenarios/free-bright.toml"),
    include_str!("../scenarios/free-dark.toml"),
    include_str!("../scenarios/free-cn.toml"),
    include_str!("../scenarios/free-painleve2.toml"),
    include_str!("../scenarios/fiber-retimed.toml"),
    include_str!("../scenarios/harmonic-bright.toml"),
    include_str!("../scenarios/harmonic-painleve2.toml"),
    include_str!("../scenarios/plasma-accelerating.toml"),
    include_str!("../scenarios/plasma-painleve2.toml"),
    include_str!("../scenarios/bec-feshbach-harmonic.toml"),
    include_str!("../scenarios/bec-feshbach-linear.toml"),
];

/// The built-in scenarios.
pub fn scenario_catalog() -> Vec<Scenario> {
    CATALOG_SOURCES
        .iter()
        .map(|s| Scenario::from_toml(s).expect("catalog scenarios are valid"))
        .collect()
}

pub fn catalog_names() -> Vec<String> {
    scenario_catalog().into_iter().map(|s| s.name).collect()
}

/// Looks a scenario up by name.
pub fn find_scenario(name: &str) -> Result<Scenario> {
    scenario_catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario {
            name: name.to_string(),
            catalog: catalog_names().join(", "),
        })
}

/// A catalog name or the path of a scenario file.
pub fn load_scenario(name_or_path: &str) -> Result<Scenario> {
    let p = Path::new(name_or_path);
    if p.extension().is_some_and(|e| e == "toml") || p.is_file() {
        Scenario::from_file(p)
    } else {
        find_scenario(name_or_path)
    }
}

/// Overrides applied when running a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub exec: Execution,
    /// Multiplies the nonlinearity law (1.0: unperturbed).
    pub h_scale: f64,
    /// Replaces every check tolerance.
    pub tol: Option<f64>,
    /// Propagation box half-width and point count.
    pub box_half_width: Option<f64>,
    pub box_points: Option<usize>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            exec: Execution::default(),
            h_scale: 1.0,
            tol: None,
            box_half_width: None,
            box_points: None,
            dt: None,
            t_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub note: String,
}

impl CheckResult {
    fn new(name: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tol,
            pass: value.is_finite() && value < tol,
            note: String::new(),
        }
    }

    fn note(mut self, note: String) -> Self {
        self.note = note;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub checks: Vec<CheckResult>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Columns `name value tolerance pass`.
    pub fn to_table(&self) -> Table {
        let mut tab = Table::new(&["name", "value", "tolerance", "pass"], ' ');
        for c in &self.checks {
            tab.push_cells(&[
                c.name.clone(),
                crate::io::fmt17(c.value),
                crate::io::fmt17(c.tol),
                c.pass.to_string(),
            ]);
        }
        tab
    }
}

/// Applies the run overrides to a scenario.
pub fn apply_overrides(s: &Scenario, opts: &RunOptions) -> Result<Scenario> {
    let mut s = s.clone();
    if let Some(t) = opts.t_max {
        s.grid.t_max = t;
    }
    for c in &mut s.checks {
        if let Some(tol) = opts.tol {
            *c.tol_mut() = tol;
            if let Check::Trajectory { drift_tol, .. } = c {
                *drift_tol = tol;
            }
        }
        if let Check::Propagation { dt, half_width, points, .. } = c {
            if let Some(v) = opts.dt {
                *dt = v;
            }
            if let Some(v) = opts.box_half_width {
                *half_width = v;
            }
            if let Some(v) = opts.box_points {
                *points = v;
            }
        }
    }
    s.validate()?;
    Ok(s)
}

/// Builds the scenario and runs every check in its plan.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<ScenarioReport> {
    let s = apply_overrides(s, opts)?;
    let sol = s.build()?;
    let mut checks = Vec::new();
    for c in &s.checks {
        let rows = run_check(&s, &sol, c, opts).map_err(|e| e.in_scenario(&s.name))?;
        checks.extend(rows);
    }
    Ok(ScenarioReport {
        scenario: s.name.clone(),
        checks,
    })
}

fn run_check(s: &Scenario, sol: &SolitonSolution, c: &Check, opts: &RunOptions) -> Result<Vec<CheckResult>> {
    let grid = &s.grid;
    let coeffs = sol.coefficients();
    Ok(match c {
        Check::Residual { tol } => {
            let laws = sol.balance_laws().with_h_scale(opts.h_scale);
            let r = pde_residual(sol, coeffs, &laws, &grid.x(), &grid.t(), &residual_options(*tol, opts))?;
            vec![CheckResult::new("residual", r.rel_to_scale, *tol).note(format!(
                "max_abs {:e} at (x, t) = ({}, {}); h_x {:e}, h_t {:e}",
                r.max_abs, r.worst_point.0, r.worst_point.1, r.h_x, r.h_t
            ))]
        }
        Check::GaugedResidual { tol } => {
            let g = GaugedSolution::new(sol.clone())?;
            let laws = g.laws().with_h_scale(opts.h_scale);
            let r = pde_residual(&g, coeffs, &laws, &grid.x(), &grid.t(), &residual_options(*tol, opts))?;
            vec![CheckResult::new("gauged-residual", r.rel_to_scale, *tol)]
        }
        Check::Propagation { tol, dt, t_end, half_width, points } => {
            let (err, box_grid) = propagation_error(sol, *t_end, *dt, *half_width, *points, opts)?;
            vec![CheckResult::new("propagation", err, *tol).note(format!(
                "L = {}, N = {}, dt = {dt}",
                box_grid.half_width(),
                box_grid.len()
            ))]
        }
        Check::Riccati { tol, samples } => {
            let ts = linspace(grid.t_min, grid.t_max, (*samples).max(10));
            let states = ts.iter().map(|&t| sol.state(t)).collect::<Result<Vec<_>>>()?;
            let r = riccati_residuals(&states, coeffs, *tol)?;
            vec![CheckResult::new("riccati", r.max(), *tol)]
        }
        Check::FirstIntegral { tol } => {
            let p = sol.profile();
            let mut dev = 0.0_f64;
            for z in linspace(-10.0, 10.0, 2001) {
                dev = dev.max((p.first_integral(z)? - p.c0()).abs());
            }
            vec![CheckResult::new("first-integral", dev, *tol)]
        }
        Check::Trajectory { tol, x0, drift_tol } => {
            let tr = classical_trajectory(sol, *x0, grid.t_max, 200)?;
            vec![
                CheckResult::new("trajectory-drift", tr.z_drift, *drift_tol),
                CheckResult::new("trajectory-velocity", tr.velocity_residual, *tol),
                CheckResult::new("trajectory-motion", tr.motion_residual, *tol),
            ]
        }
        Check::Acceleration { tol, x0, expected } => {
            let tr = classical_trajectory(sol, *x0, grid.t_max, 200)?;
            let [_, _, c2] = quadratic_fit(&tr.t, &tr.x)?;
            let v = coeffs.at(0.0);
            let want = expected.unwrap_or(v.a * v.f);
            vec![CheckResult::new("acceleration", (c2 - want).abs(), *tol)
                .note(format!("fitted t^2 coefficient {c2}, expected {want}"))]
        }
        Check::Autonomous { tol, xi_half_width, t_window, n } => {
            let r = autonomous_residual(sol, (-xi_half_width, *xi_half_width), *t_window, *n, opts.exec)?;
            vec![CheckResult::new("autonomous", r.max_abs, *tol)]
        }
        Check::Feshbach { tol } => {
            let prog = s.field_program(sol)?;
            let note = if prog.poles.is_empty() {
                String::new()
            } else {
                format!("poles at tau = {:?}", prog.poles)
            };
            vec![CheckResult::new("feshbach", prog.sync_residual, *tol).note(note)]
        }
    })
}

fn residual_options(tol: f64, opts: &RunOptions) -> ResidualOptions {
    ResidualOptions {
        tol,
        exec: opts.exec,
        ..ResidualOptions::default()
    }
}

/// Largest edge value relative to the maximum of ψ(·, t) on the box.
fn edge_ratio(sol: &SolitonSolution, grid: &PeriodicGrid, t: f64) -> Result<f64> {
    let s = sol.state(t)?;
    let x = grid.x();
    let mut max = 0.0_f64;
    for &xx in &x {
        max = max.max(sol.psi_at(xx, &s)?.norm());
    }
    let l = grid.half_width();
    let edge = sol.psi_at(-l, &s)?.norm().max(sol.psi_at(l, &s)?.norm());
    Ok(if max > 0.0 { edge / max } else { 0.0 })
}

/// Doubles the box (keeping dx) until the field is negligible at its edges at
/// both ends of the run.
pub fn fit_box(sol: &SolitonSolution, t_end: f64, half_width: f64, points: usize) -> Result<PeriodicGrid> {
    let mut grid = PeriodicGrid::new(half_width, points)?;
    for _ in 0..8 {
        let t0 = sol.origin();
        if edge_ratio(sol, &grid, t0)? < 1e-8 && edge_ratio(sol, &grid, t_end)? < 1e-8 {
            return Ok(grid);
        }
        grid = PeriodicGrid::new(2.0 * grid.half_width(), 2 * grid.len())?;
    }
    Err(Error::Resolution(
        "field does not decay inside any periodic box up to 256x the requested size".into(),
    ))
}

fn propagation_error(
    sol: &SolitonSolution,
    t_end: f64,
    dt: f64,
    half_width: f64,
    points: usize,
    opts: &RunOptions,
) -> Result<(f64, PeriodicGrid)> {
    let grid = fit_box(sol, t_end, half_width, points)?;
    let x = grid.x();
    let t0 = sol.origin();
    let s0 = sol.state(t0)?;
    let psi0 = x.iter().map(|&xx| sol.psi_at(xx, &s0)).collect::<Result<Vec<_>>>()?;
    let mut so = SplitStepOptions::new(dt);
    so.exec = opts.exec;
    let laws = sol.balance_laws().with_h_scale(opts.h_scale);
    let out = split_step_propagate(&psi0, &grid, sol.coefficients(), &laws, t0, t_end, &so)?;
    let s1 = sol.state(t_end)?;
    let exact: Vec<Complex64> = x.iter().map(|&xx| sol.psi_at(xx, &s1)).collect::<Result<_>>()?;
    let err = l2_relative_error(out.row(out.t().len() - 1), &exact)?;
    Ok((err, grid))
}

/// Least-squares coefficients [c0, c1, c2] of c0 + c1 t + c2 t².
pub fn quadratic_fit(t: &[f64], x: &[f64]) -> Result<[f64; 3]> {
    if t.len() != x.len() || t.len() < 3 {
        return Err(Error::Domain("quadratic fit needs at least three points".into()));
    }
    // Centre and scale t for conditioning.
    let (lo, hi) = (t[0], t[t.len() - 1]);
    let (c, w) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (&ti, &xi) in t.iter().zip(x) {
        let s = (ti - c) / w;
        let p = [1.0, s, s * s];
        for i in 0..3 {
            r[i] += p[i] * xi;
            for j in 0..3 {
                m[i][j] += p[i] * p[j];
            }
        }
    }
    let q = solve3(m, r)?;
    // Back to powers of t: x = q0 + q1 (t − c)/w + q2 (t − c)²/w².
    let (a1, a2) = (q[1] / w, q[2] / (w * w));
    Ok([q[0] - a1 * c + a2 * c * c, a1 - 2.0 * a2 * c, a2])
}

fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Result<[f64; 3]> {
    for k in 0..3 {
        let p = (k..3)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap_or(k);
        if m[p][k] == 0.0 {
            return Err(Error::NumericalFailure("singular normal equations".into()));
        }
        m.swap(k, p);
        r.swap(k, p);
        for i in k + 1..3 {
            let f = m[i][k] / m[k][k];
            let pivot = m[k];
            for (mij, pj) in m[i][k..].iter_mut().zip(&pivot[k..]) {
                *mij -= f * pj;
            }
            r[i] -= f * r[k];
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|j| m[k][j] * x[j]).sum();
        x[k] = (r[k] - s) / m[k][k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_fit_is_exact_on_parabolas() {
        let t = linspace(0.0, 1.2, 50);
        let x: Vec<f64> = t.iter().map(|t| 0.3 - 1.1 * t + 0.8 * t * t).collect();
        let c = quadratic_fit(&t, &x).unwrap();
        assert!((c[0] - 0.3).abs() < 1e-13 && (c[1] + 1.1).abs() < 1e-13 && (c[2] - 0.8).abs() < 1e-13);
    }

    #[test]
    fn catalog_names_are_unique() {
        let mut names = catalog_names();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn toml_round_trip() {
        for s in scenario_catalog() {
            assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
        }
    }
}
