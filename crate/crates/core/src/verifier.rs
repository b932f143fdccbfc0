//! Independent checks of assembled solutions.
//!
//! [`pde_residual`] substitutes a sampled field into the PDE with fourth-order
//! stencils, refining the stencil until its truncation error is negligible.
//! [`split_step_propagate`] evolves initial data with a Strang-split Fourier
//! scheme that knows nothing about the analytic construction.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::assembler::{BalanceLaws, GaugedSolution, SolitonSolution};
use crate::characteristic::QuadraticCoefficients;
use crate::error::{ensure_finite, Error, Result};
use crate::io::{read_numeric, Table};
use crate::par::{for_each_indexed, try_map_range, Execution};

/// A complex field that can be sampled on a row of x at fixed t.
pub trait Field: Sync {
    fn row(&self, xs: &[f64], t: f64) -> Result<Vec<Complex64>>;
}

impl Field for SolitonSolution {
    fn row(&self, xs: &[f64], t: f64) -> Result<Vec<Complex64>> {
        let s = self.state(t)?;
        xs.iter().map(|&x| self.psi_at(x, &s)).collect()
    }
}

impl Field for GaugedSolution {
    fn row(&self, xs: &[f64], t: f64) -> Result<Vec<Complex64>> {
        let sol = self.solution();
        let s = sol.state(t)?;
        let gauge = Complex64::from_polar(1.0, self.theta(t)?);
        xs.iter().map(|&x| Ok(sol.psi_at(x, &s)? * gauge)).collect()
    }
}

/// Adapts a pointwise closure ψ(x, t) to [`Field`].
pub struct FnField<F>(pub F);

impl<F> Field for FnField<F>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    fn row(&self, xs: &[f64], t: f64) -> Result<Vec<Complex64>> {
        xs.iter().map(|&x| (self.0)(x, t)).collect()
    }
}

/// Uniform periodic grid on [−L, L) with N points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    half_width: f64,
    n: usize,
}

impl PeriodicGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        ensure_finite("L", half_width)?;
        if half_width <= 0.0 {
            return Err(Error::Domain(format!("L must be positive, got {half_width}")));
        }
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "N must be a power of two and at least 64, got {n}"
            )));
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn x(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| -self.half_width + self.dx() * i as f64)
            .collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as i64;
        let dk = std::f64::consts::PI / self.half_width;
        (0..n)
            .map(|i| if i < n / 2 { i } else { i - n } as f64 * dk)
            .collect()
    }

    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }
}

/// Sampled complex field, time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    x: Vec<f64>,
    t: Vec<f64>,
    values: Vec<Complex64>,
}

impl FieldGrid {
    pub fn new(x: Vec<f64>, t: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != x.len() * t.len() {
            return Err(Error::Domain(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                t.len(),
                x.len()
            )));
        }
        Ok(Self { x, t, values })
    }

    /// Samples `field` on the tensor grid `x` × `t`.
    pub fn sample(field: &dyn Field, x: Vec<f64>, t: Vec<f64>, exec: Execution) -> Result<Self> {
        let rows = try_map_range(exec, t.len(), |j| field.row(&x, t[j]))?;
        let values = rows.into_iter().flatten().collect();
        Self::new(x, t, values)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The field at time index `j`.
    pub fn row(&self, j: usize) -> &[Complex64] {
        let n = self.x.len();
        &self.values[j * n..(j + 1) * n]
    }

    /// Largest |ψ| at the two ends of each row relative to the row maximum.
    pub fn edge_ratio(&self) -> f64 {
        (0..self.t.len())
            .map(|j| {
                let r = self.row(j);
                let max = r.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
                let edge = r[0].norm().max(r[r.len() - 1].norm());
                if max > 0.0 {
                    edge / max
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    /// Columns `t x re im abs2`, rows sorted by (t, x).
    pub fn to_table(&self) -> Table {
        let mut tab = Table::new(&["t", "x", "re", "im", "abs2"], ' ');
        for (j, &t) in self.t.iter().enumerate() {
            for (&x, v) in self.x.iter().zip(self.row(j)) {
                tab.push(&[t, x, v.re, v.im, v.norm_sqr()]);
            }
        }
        tab
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_table().write(path)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (header, rows) = read_numeric(text)?;
        if header != ["t", "x", "re", "im", "abs2"] {
            return Err(Error::Io(format!("unexpected field header {header:?}")));
        }
        let mut t: Vec<f64> = Vec::new();
        let mut x: Vec<f64> = Vec::new();
        let mut values = Vec::with_capacity(rows.len());
        for r in &rows {
            if t.last() != Some(&r[0]) {
                t.push(r[0]);
            }
            if t.len() == 1 {
                x.push(r[1]);
            }
            values.push(Complex64::new(r[2], r[3]));
        }
        Self::new(x, t, values)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

/// ‖a − b‖₂ / ‖b‖₂.
pub fn l2_relative_error(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let den: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::DegenerateNorm);
    }
    let num: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy)]
pub struct ResidualOptions {
    /// Target relative residual; the stencil is refined until its truncation
    /// error is below a tenth of this.
    pub tol: f64,
    pub max_levels: usize,
    pub exec: Execution,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_levels: 8,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// max_abs over the largest single PDE term on the grid.
    pub rel_to_scale: f64,
    pub scale: f64,
    pub worst_point: (f64, f64),
    pub x_order: u32,
    pub t_order: u32,
    pub h_x: f64,
    pub h_t: f64,
    /// Estimated stencil truncation error in max_abs.
    pub truncation: f64,
}

struct Level {
    r: Vec<Complex64>,
    scale: f64,
}

#[allow(clippy::too_many_arguments)]
fn residual_level(
    field: &dyn Field,
    coeffs: &QuadraticCoefficients,
    laws: &BalanceLaws,
    xs: &[f64],
    ts: &[f64],
    hx: f64,
    ht: f64,
    exec: Execution,
) -> Result<Level> {
    let rows = try_map_range(exec, ts.len(), |j| -> Result<(Vec<Complex64>, f64)> {
        let t = ts[j];
        let shifted = |s: f64| xs.iter().map(|x| x + s * hx).collect::<Vec<_>>();
        let xm2 = field.row(&shifted(-2.0), t)?;
        let xm1 = field.row(&shifted(-1.0), t)?;
        let c0 = field.row(xs, t)?;
        let xp1 = field.row(&shifted(1.0), t)?;
        let xp2 = field.row(&shifted(2.0), t)?;
        let tm2 = field.row(xs, t - 2.0 * ht)?;
        let tm1 = field.row(xs, t - ht)?;
        let tp1 = field.row(xs, t + ht)?;
        let tp2 = field.row(xs, t + 2.0 * ht)?;
        let v = coeffs.at(t);
        let law = laws.at(t)?;
        let i = Complex64::i();
        let mut out = Vec::with_capacity(xs.len());
        let mut scale = 0.0_f64;
        for (k, &x) in xs.iter().enumerate() {
            let psi = c0[k];
            let psi_x = ((xm2[k] - xp2[k]) + (xp1[k] - xm1[k]) * 8.0) / (12.0 * hx);
            let psi_xx = ((xm1[k] + xp1[k]) * 16.0 - (xm2[k] + xp2[k]) - psi * 30.0) / (12.0 * hx * hx);
            let psi_t = ((tm2[k] - tp2[k]) + (tp1[k] - tm1[k]) * 8.0) / (12.0 * ht);
            let terms = [
                i * psi_t,
                psi_xx * v.a,
                psi * (-v.b * x * x),
                i * psi_x * (v.c * x),
                i * psi * v.d,
                psi * (v.f * x),
                -i * psi_x * v.g,
                -psi * law.forcing(x),
                -psi * (law.h * psi.norm_sqr()),
            ];
            let r: Complex64 = terms.iter().sum();
            scale = terms.iter().fold(scale, |m, z| m.max(z.norm()));
            out.push(r);
        }
        Ok((out, scale))
    })?;
    let scale = rows.iter().fold(0.0_f64, |m, r| m.max(r.1));
    Ok(Level {
        r: rows.into_iter().flat_map(|r| r.0).collect(),
        scale,
    })
}

/// Residual of
/// iψ_t + aψ_xx − bx²ψ + icxψ_x + idψ + fxψ − igψ_x − Gψ − h|ψ|²ψ
/// on the tensor grid `xs` × `ts`.
///
/// The stencil steps start at the grid spacing and are halved until two
/// successive levels agree to within the truncation target.
pub fn pde_residual(
    field: &dyn Field,
    coeffs: &QuadraticCoefficients,
    laws: &BalanceLaws,
    xs: &[f64],
    ts: &[f64],
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    if xs.len() < 2 || ts.len() < 2 {
        return Err(Error::Domain("residual grid needs at least 2x2 points".into()));
    }
    let spacing = |v: &[f64]| (v[v.len() - 1] - v[0]).abs() / (v.len() - 1) as f64;
    let mut hx = spacing(xs).min(0.1);
    let mut ht = spacing(ts).min(0.05);
    let mut prev: Option<Level> = None;
    for _ in 0..=opts.max_levels {
        let cur = residual_level(field, coeffs, laws, xs, ts, hx, ht, opts.exec)?;
        if let Some(p) = &prev {
            let diff = p
                .r
                .iter()
                .zip(&cur.r)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
            // Fourth order: the error of the finer level is diff / 15.
            let truncation = diff / 15.0;
            if truncation <= 0.1 * opts.tol * cur.scale {
                return Ok(report(&cur, xs, ts, hx, ht, truncation));
            }
        }
        if cur.scale == 0.0 {
            return Ok(report(&cur, xs, ts, hx, ht, 0.0));
        }
        prev = Some(cur);
        hx *= 0.5;
        ht *= 0.5;
    }
    Err(Error::Diagnostics(format!(
        "stencil refinement did not reach the truncation target after {} levels",
        opts.max_levels
    )))
}

fn report(level: &Level, xs: &[f64], ts: &[f64], hx: f64, ht: f64, truncation: f64) -> ResidualReport {
    let (mut max_abs, mut worst) = (0.0_f64, 0);
    for (idx, r) in level.r.iter().enumerate() {
        if r.norm() > max_abs {
            max_abs = r.norm();
            worst = idx;
        }
    }
    let nx = xs.len();
    ResidualReport {
        max_abs,
        rel_to_scale: if level.scale > 0.0 { max_abs / level.scale } else { 0.0 },
        scale: level.scale,
        worst_point: (xs[worst % nx], ts[worst / nx]),
        x_order: 4,
        t_order: 4,
        h_x: hx,
        h_t: ht,
        truncation,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SplitStepOptions {
    pub dt: f64,
    /// Record a frame every this many steps (0: only the endpoints).
    pub record_every: usize,
    /// Largest allowed fraction of spectral energy in the top third of |k|.
    pub alias_tol: f64,
    pub exec: Execution,
}

impl SplitStepOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            record_every: 0,
            alias_tol: 1e-6,
            exec: Execution::default(),
        }
    }
}

struct Spectral {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            fwd,
            inv,
            scratch: vec![Complex64::default(); len],
        }
    }

    fn forward(&mut self, v: &mut [Complex64]) {
        self.fwd.process_with_scratch(v, &mut self.scratch);
    }

    fn inverse(&mut self, v: &mut [Complex64]) {
        self.inv.process_with_scratch(v, &mut self.scratch);
        let s = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|z| *z *= s);
    }
}

/// Fraction of spectral energy with |k| above two thirds of k_max.
fn top_third_energy(spec: &[Complex64], k: &[f64], k_max: f64) -> f64 {
    let (mut hi, mut all) = (0.0, 0.0);
    for (z, &kk) in spec.iter().zip(k) {
        let e = z.norm_sqr();
        all += e;
        if kk.abs() > 2.0 / 3.0 * k_max {
            hi += e;
        }
    }
    if all > 0.0 {
        hi / all
    } else {
        0.0
    }
}

/// Evolves `psi0` from `t0` to `t_end` with Strang splitting.
///
/// The damping term −idψ is removed by the gauge ψ = χe^{−Λ}, Λ = ∫d, which
/// turns the nonlinearity into h e^{−2Λ}|χ|²χ. Each step applies half of the
/// potential and nonlinear phase, the exact propagator of
/// iχ_t = −aχ_xx + igχ_x in Fourier space, and the second half, with all
/// coefficients frozen at the step midpoint.
pub fn split_step_propagate(
    psi0: &[Complex64],
    grid: &PeriodicGrid,
    coeffs: &QuadraticCoefficients,
    laws: &BalanceLaws,
    t0: f64,
    t_end: f64,
    opts: &SplitStepOptions,
) -> Result<FieldGrid> {
    if psi0.len() != grid.len() {
        return Err(Error::Domain(format!(
            "initial field has {} points, grid has {}",
            psi0.len(),
            grid.len()
        )));
    }
    if !coeffs.c.is_zero() {
        return Err(Error::Unsupported(
            "the split-step propagator does not handle the dilation term c".into(),
        ));
    }
    ensure_finite("t_end", t_end)?;
    if !(opts.dt > 0.0) || !(t_end > t0) {
        return Err(Error::Domain("need dt > 0 and t_end > t0".into()));
    }
    let steps = ((t_end - t0) / opts.dt - 1e-9).ceil().max(1.0) as usize;
    let dt = (t_end - t0) / steps as f64;

    let k = grid.wavenumbers();
    let k_max = grid.k_max();
    let a_max = (0..=1000)
        .map(|i| coeffs.a.value(t0 + (t_end - t0) * i as f64 / 1000.0).abs())
        .fold(0.0, f64::max);
    if dt * a_max * k_max * k_max >= std::f64::consts::PI {
        return Err(Error::Resolution(format!(
            "dt * max|a| * k_max^2 = {} exceeds pi; reduce dt or N",
            dt * a_max * k_max * k_max
        )));
    }

    let x = grid.x();
    let n = grid.len();
    let exec = opts.exec;
    let lambda = |t: f64| coeffs.d.integral(t) - coeffs.d.integral(t0);
    let mut spectral = Spectral::new(n);
    let mut chi = psi0.to_vec();
    let mut spec_buf = vec![Complex64::default(); n];

    let mut times = vec![t0];
    let mut frames = psi0.to_vec();
    let mut check_alias = |chi: &[Complex64], spectral: &mut Spectral, t: f64| -> Result<()> {
        spec_buf.copy_from_slice(chi);
        spectral.forward(&mut spec_buf);
        let frac = top_third_energy(&spec_buf, &k, k_max);
        if frac > opts.alias_tol {
            return Err(Error::Resolution(format!(
                "aliasing at t = {t}: top-third spectral energy fraction {frac:e}"
            )));
        }
        Ok(())
    };
    check_alias(&chi, &mut spectral, t0)?;

    for step in 0..steps {
        let t = t0 + dt * step as f64;
        let tm = t + 0.5 * dt;
        let v = coeffs.at(tm);
        let law = laws.at(tm)?;
        let hh = law.h * (-2.0 * lambda(tm)).exp();
        let potential: Vec<f64> = x
            .iter()
            .map(|&xx| v.b * xx * xx - v.f * xx + law.forcing(xx))
            .collect();
        let half_kick = |chi: &mut [Complex64]| {
            for_each_indexed(exec, chi, |i, z| {
                let ph = -0.5 * dt * (potential[i] + hh * z.norm_sqr());
                *z *= Complex64::from_polar(1.0, ph);
            });
        };
        half_kick(&mut chi);
        spectral.forward(&mut chi);
        for_each_indexed(exec, &mut chi, |i, z| {
            *z *= Complex64::from_polar(1.0, -dt * (v.a * k[i] * k[i] - v.g * k[i]));
        });
        spectral.inverse(&mut chi);
        half_kick(&mut chi);

        let done = step + 1 == steps;
        if done || (opts.record_every > 0 && (step + 1) % opts.record_every == 0) {
            let t_now = if done { t_end } else { t + dt };
            check_alias(&chi, &mut spectral, t_now)?;
            let damp = (-lambda(t_now)).exp();
            times.push(t_now);
            frames.extend(chi.iter().map(|z| z * damp));
        }
        if chi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "split-step field became non-finite at t = {}",
                t + dt
            )));
        }
    }
    FieldGrid::new(x, times, frames)
}

/// Smooth window equal to 1 on the inner 90% of [−L, L] and falling to 0 at ±L.
pub fn edge_taper(x: f64, half_width: f64) -> f64 {
    let inner = 0.9 * half_width;
    let a = x.abs();
    if a <= inner {
        1.0
    } else if a >= half_width {
        0.0
    } else {
        let s = (a - inner) / (half_width - inner);
        (0.5 * std::f64::consts::PI * s).cos().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rules() {
        assert!(PeriodicGrid::new(10.0, 100).is_err());
        assert!(PeriodicGrid::new(10.0, 32).is_err());
        assert!(PeriodicGrid::new(-1.0, 64).is_err());
        let g = PeriodicGrid::new(10.0, 64).unwrap();
        let x = g.x();
        assert_eq!(x[0], -10.0);
        assert!((x[63] + g.dx() - 10.0).abs() < 1e-14);
        let k = g.wavenumbers();
        assert_eq!(k[1], std::f64::consts::PI / 10.0);
        assert!(k[63] < 0.0);
    }

    #[test]
    fn l2_errors() {
        let b: Vec<Complex64> = (0..10).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let a2: Vec<Complex64> = b.iter().map(|z| z * 2.0).collect();
        assert_eq!(l2_relative_error(&b, &b).unwrap(), 0.0);
        assert!((l2_relative_error(&a2, &b).unwrap() - 1.0).abs() < 1e-15);
        let zero = vec![Complex64::default(); 10];
        assert_eq!(l2_relative_error(&b, &zero), Err(Error::DegenerateNorm));
        assert!(l2_relative_error(&b[..3], &b).is_err());
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let f = FnField(|_: f64, _: f64| Ok(Complex64::default()));
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let ts = vec![0.5, 0.6, 0.7];
        let r = pde_residual(
            &f,
            &QuadraticCoefficients::harmonic_trap(),
            &BalanceLaws::linear(),
            &xs,
            &ts,
            &ResidualOptions::default(),
        )
        .unwrap();
        assert_eq!(r.max_abs, 0.0);
        assert_eq!(r.rel_to_scale, 0.0);
    }

    #[test]
    fn field_csv_round_trip() {
        let g = FieldGrid::new(
            vec![-1.0, 0.0, 1.0],
            vec![0.0, 0.5],
            (0..6).map(|i| Complex64::new(i as f64 / 7.0, -(i as f64))).collect(),
        )
        .unwrap();
        let text = g.to_table().render();
        assert!(text.starts_with("t x re im abs2\n"));
        assert_eq!(FieldGrid::from_text(&text).unwrap(), g);
    }

    #[test]
    fn taper_shape() {
        assert_eq!(edge_taper(0.0, 10.0), 1.0);
        assert_eq!(edge_taper(8.9, 10.0), 1.0);
        assert_eq!(edge_taper(10.0, 10.0), 0.0);
        let m = edge_taper(9.5, 10.0);
        assert!(m > 0.4 && m < 0.6);
    }
}
