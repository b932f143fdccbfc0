use std::sync::Arc;

use num_complex::Complex64;
use soliton_forge::assembler::{BalanceLaws, SolitonSolution};
use soliton_forge::characteristic::{solve_basis, QuadraticCoefficients};
use soliton_forge::kernels::{base_kernels, PhaseState};
use soliton_forge::profile::{build_profile_m0, SolitonProfile};
use soliton_forge::timefn::TimeFunction;
use soliton_forge::verifier::{
    l2_relative_error, pde_residual, split_step_propagate, FieldGrid, PeriodicGrid,
    ResidualOptions, SplitStepOptions,
};
use soliton_forge::{Error, Execution};

fn solution(
    c: &QuadraticCoefficients,
    t_end: f64,
    init: PhaseState,
    profile: SolitonProfile,
    y: f64,
) -> SolitonSolution {
    let k = base_kernels(Arc::new(solve_basis(c, t_end).unwrap()), c).unwrap();
    SolitonSolution::new(k, init, profile, 0.3, y).unwrap()
}

fn bright() -> SolitonProfile {
    build_profile_m0(1.0, -1.0, 0.0).unwrap()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn free_bright() -> SolitonSolution {
    solution(
        &QuadraticCoefficients::free_particle(),
        2.0,
        PhaseState::quadratic(0.0, 1.0, 0.0, 1.0, 0.0),
        bright(),
        0.2,
    )
}

fn residual(sol: &SolitonSolution, laws: &BalanceLaws) -> soliton_forge::verifier::ResidualReport {
    pde_residual(
        sol,
        sol.coefficients(),
        laws,
        &linspace(-20.0, 20.0, 512),
        &linspace(0.05, 0.5, 200),
        &ResidualOptions::default(),
    )
    .unwrap()
}

/// Propagates the analytic initial data to `t_end` and returns the L² error there.
fn propagation_error(sol: &SolitonSolution, grid: &PeriodicGrid, t_end: f64, dt: f64) -> f64 {
    let x = grid.x();
    let psi0: Vec<Complex64> = x.iter().map(|&x| sol.psi(x, 0.0).unwrap()).collect();
    let out = split_step_propagate(
        &psi0,
        grid,
        sol.coefficients(),
        &sol.balance_laws(),
        0.0,
        t_end,
        &SplitStepOptions::new(dt),
    )
    .unwrap();
    let last = out.t().len() - 1;
    assert_eq!(out.t()[last], t_end);
    let exact: Vec<Complex64> = x.iter().map(|&x| sol.psi(x, t_end).unwrap()).collect();
    l2_relative_error(out.row(last), &exact).unwrap()
}

#[test]
fn free_bright_residual() {
    let sol = free_bright();
    let r = residual(&sol, &sol.balance_laws());
    assert!(r.rel_to_scale < 1e-6, "{r:?}");
    assert!(r.truncation < 1e-7 * r.scale);
}

#[test]
fn chirped_plasma_dark_residual() {
    let sol = solution(
        &QuadraticCoefficients::plasma_linear(0.4),
        1.0,
        PhaseState::quadratic(0.0, 1.0, 0.1, 0.7, 0.3).with_linear(0.2, -0.5, 0.0),
        build_profile_m0(-1.0, 1.0, 0.5).unwrap(),
        0.6,
    );
    let r = residual(&sol, &sol.balance_laws());
    assert!(r.rel_to_scale < 1e-5, "{r:?}");
}

#[test]
fn perturbed_nonlinearity_is_detected() {
    let sol = free_bright();
    let r = residual(&sol, &sol.balance_laws().with_h_scale(1.01));
    assert!(r.rel_to_scale > 1e-3, "{r:?}");
}

#[test]
fn caustic_inside_the_grid_is_reported() {
    // cos t + 2α₀ sin t = 0 at t = π/2 for α₀ = 0.
    let sol = solution(
        &QuadraticCoefficients::harmonic_trap(),
        2.0,
        PhaseState::quadratic(0.0, 1.0, 0.0, 1.0, 0.0),
        bright(),
        0.0,
    );
    let r = pde_residual(
        &sol,
        sol.coefficients(),
        &sol.balance_laws(),
        &linspace(-5.0, 5.0, 64),
        &linspace(1.0, 1.9, 10),
        &ResidualOptions::default(),
    );
    assert!(matches!(r, Err(Error::FocalPoint { .. })), "{r:?}");
}

#[test]
fn free_bright_propagation() {
    let grid = PeriodicGrid::new(20.0, 1024).unwrap();
    let err = propagation_error(&free_bright(), &grid, 1.0, 1e-4);
    assert!(err < 1e-4, "{err:e}");
}

#[test]
fn harmonic_bright_propagation() {
    let sol = solution(
        &QuadraticCoefficients::harmonic_trap(),
        1.5,
        PhaseState::quadratic(0.0, 1.0, 0.0, 1.0, 0.0),
        bright(),
        0.2,
    );
    let grid = PeriodicGrid::new(20.0, 1024).unwrap();
    let err = propagation_error(&sol, &grid, 1.0, 1e-4);
    assert!(err < 1e-3, "{err:e}");
}

#[test]
fn gained_fiber_propagation() {
    // d ≠ 0 exercises the Λ gauge; a varies in time.
    let c = QuadraticCoefficients::fiber_optic(
        TimeFunction::linear(-1.0, 0.2),
        TimeFunction::constant(0.15),
    );
    let sol = solution(&c, 1.5, PhaseState::quadratic(0.0, 1.0, 0.0, 1.0, 0.0), bright(), 0.1);
    let grid = PeriodicGrid::new(20.0, 512).unwrap();
    let err = propagation_error(&sol, &grid, 1.0, 5e-4);
    assert!(err < 1e-4, "{err:e}");
}

#[test]
fn gaussian_free_dispersion() {
    let c = QuadraticCoefficients::free_particle();
    let grid = PeriodicGrid::new(40.0, 1024).unwrap();
    let sigma = 1.0;
    let exact = |x: f64, t: f64| {
        // ψ̂ ∝ exp(−(σ + i a t) k²) with a = −1.
        let s = Complex64::new(sigma, -t);
        (Complex64::from(sigma) / s).sqrt() * (-x * x / (s * 4.0)).exp()
    };
    let x = grid.x();
    let psi0: Vec<Complex64> = x.iter().map(|&x| exact(x, 0.0)).collect();
    let mut opts = SplitStepOptions::new(1e-3);
    opts.record_every = 250;
    let out = split_step_propagate(&psi0, &grid, &c, &BalanceLaws::linear(), 0.0, 1.0, &opts).unwrap();
    assert_eq!(out.t().len(), 5);
    for (j, &t) in out.t().iter().enumerate() {
        let want: Vec<Complex64> = x.iter().map(|&x| exact(x, t)).collect();
        let e = l2_relative_error(out.row(j), &want).unwrap();
        assert!(e < 1e-10, "t = {t}: {e:e}");
    }
}

#[test]
fn second_order_in_dt() {
    let sol = free_bright();
    let grid = PeriodicGrid::new(20.0, 128).unwrap();
    let x = grid.x();
    let psi0: Vec<Complex64> = x.iter().map(|&x| sol.psi(x, 0.0).unwrap()).collect();
    let run = |dt: f64| {
        let out = split_step_propagate(
            &psi0,
            &grid,
            sol.coefficients(),
            &sol.balance_laws(),
            0.0,
            1.0,
            &SplitStepOptions::new(dt),
        )
        .unwrap();
        out.row(out.t().len() - 1).to_vec()
    };
    let (dt, coarse) = (0.02, run(0.02));
    let fine = run(dt / 2.0);
    let reference = run(dt / 16.0);
    let ratio = l2_relative_error(&coarse, &reference).unwrap() / l2_relative_error(&fine, &reference).unwrap();
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn norm_is_conserved() {
    let grid = PeriodicGrid::new(20.0, 256).unwrap();
    let x = grid.x();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // Non-soliton data under soliton laws: only the norm law applies.
    let psi0: Vec<Complex64> = x
        .iter()
        .map(|&x| Complex64::from_polar(1.5 / (0.8 * x).cosh(), 0.3 * x))
        .collect();
    for d in [0.0, 0.2] {
        let c = QuadraticCoefficients::fiber_optic(TimeFunction::constant(-1.0), TimeFunction::constant(d));
        let sol = solution(&c, 2.5, PhaseState::quadratic(0.0, 1.0, 0.0, 1.0, 0.0), bright(), 0.0);
        let mut opts = SplitStepOptions::new(2e-3);
        opts.record_every = 100;
        let out = split_step_propagate(&psi0, &grid, &c, &sol.balance_laws(), 0.0, 2.0, &opts).unwrap();
        let n0 = norm(&psi0);
        for (j, &t) in out.t().iter().enumerate() {
            let gauged = (d * t).exp() * norm(out.row(j));
            assert!((gauged / n0 - 1.0).abs() < 1e-10 * t.max(1.0), "d = {d}, t = {t}");
        }
    }
}

#[test]
fn dilation_is_rejected() {
    let c = QuadraticCoefficients::custom(
        TimeFunction::constant(-1.0),
        TimeFunction::ZERO,
        TimeFunction::constant(0.1),
        TimeFunction::ZERO,
        TimeFunction::ZERO,
        TimeFunction::ZERO,
    );
    let grid = PeriodicGrid::new(10.0, 64).unwrap();
    let psi0 = vec![Complex64::default(); 64];
    let r = split_step_propagate(&psi0, &grid, &c, &BalanceLaws::linear(), 0.0, 1.0, &SplitStepOptions::new(1e-3));
    assert!(matches!(r, Err(Error::Unsupported(_))));
}

#[test]
fn under_resolved_data_is_rejected() {
    let grid = PeriodicGrid::new(20.0, 64).unwrap();
    let psi0: Vec<Complex64> = grid.x().iter().map(|&x| Complex64::from(1.0 / (4.0 * x).cosh())).collect();
    let r = split_step_propagate(
        &psi0,
        &grid,
        &QuadraticCoefficients::free_particle(),
        &BalanceLaws::linear(),
        0.0,
        0.1,
        &SplitStepOptions::new(1e-3),
    );
    assert!(matches!(r, Err(Error::Resolution(_))), "{r:?}");
}

#[test]
fn unstable_step_is_rejected() {
    let grid = PeriodicGrid::new(20.0, 1024).unwrap();
    let psi0 = vec![Complex64::from(0.0); 1024];
    let r = split_step_propagate(
        &psi0,
        &grid,
        &QuadraticCoefficients::free_particle(),
        &BalanceLaws::linear(),
        0.0,
        1.0,
        &SplitStepOptions::new(0.1),
    );
    assert!(matches!(r, Err(Error::Resolution(_))));
}

#[test]
fn analytic_samples_round_trip_through_text() {
    let sol = free_bright();
    let g = FieldGrid::sample(&sol, linspace(-10.0, 10.0, 64), vec![0.0, 0.25, 0.5], Execution::default()).unwrap();
    assert!(g.edge_ratio() < 1e-3);
    let back = FieldGrid::from_text(&g.to_table().render()).unwrap();
    assert_eq!(back, g);
    let seq = FieldGrid::sample(&sol, linspace(-10.0, 10.0, 64), vec![0.0, 0.25, 0.5], Execution::Sequential).unwrap();
    assert_eq!(seq, g);
}
