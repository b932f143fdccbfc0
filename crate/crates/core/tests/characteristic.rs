use soliton_forge::characteristic::{
    integrate_characteristic, solve_basis, tau_sigma, wronskian_expected, QuadraticCoefficients,
};
use soliton_forge::timefn::TimeFunction;

fn bec_slow_modulation() -> QuadraticCoefficients {
    // ω(τ) = 1 + 0.1 sin τ, so ω² = 1.005 + 0.2 sin τ − 0.005 cos 2τ.
    QuadraticCoefficients::bec_trap(TimeFunction::Sum {
        terms: vec![
            TimeFunction::constant(1.005),
            TimeFunction::Sinusoid {
                offset: 0.0,
                amplitude: 0.2,
                omega: 1.0,
                phase: 0.0,
            },
            TimeFunction::Sinusoid {
                offset: 0.0,
                amplitude: -0.005,
                omega: 2.0,
                phase: std::f64::consts::FRAC_PI_2,
            },
        ],
    })
}

fn everything_varies() -> QuadraticCoefficients {
    let s = |offset, amplitude, omega, phase| TimeFunction::Sinusoid {
        offset,
        amplitude,
        omega,
        phase,
    };
    QuadraticCoefficients::custom(
        s(0.8, 0.2, 1.3, 0.1),
        s(0.4, 0.1, 0.7, 0.0),
        s(0.05, 0.1, 1.1, 0.3),
        s(-0.1, 0.05, 0.9, 0.2),
        s(0.3, 0.2, 1.7, 0.0),
        s(0.2, -0.1, 0.5, 0.4),
    )
}

#[test]
fn bec_frequency_law_enters_sigma() {
    let c = bec_slow_modulation();
    for t in [0.0, 1.3, 4.0] {
        let (tau, sigma) = tau_sigma(&c, t).unwrap();
        let w = 1.0 + 0.1 * f64::sin(t);
        assert_eq!(tau, 0.0);
        assert!((sigma - w * w / 4.0).abs() < 1e-14);
    }
}

#[test]
fn free_particle_basis() {
    let b = solve_basis(&QuadraticCoefficients::free_particle(), 10.0).unwrap();
    for i in 0..=100 {
        let t = 0.1 * i as f64;
        let v = b.eval(t).unwrap();
        assert!((v.mu0 + 2.0 * t).abs() < 1e-12);
        assert!((v.mu1 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn harmonic_basis_is_sine_and_cosine() {
    let b = solve_basis(&QuadraticCoefficients::harmonic_trap(), 10.0).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=1000 {
        let t = 0.01 * i as f64;
        let v = b.eval(t).unwrap();
        worst = worst
            .max((v.mu0 - t.sin()).abs())
            .max((v.mu1 - t.cos()).abs())
            .max((v.dmu0 - t.cos()).abs())
            .max((v.dmu1 + t.sin()).abs());
    }
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn closed_forms_agree_with_integration() {
    for c in [
        QuadraticCoefficients::free_particle(),
        QuadraticCoefficients::harmonic_trap(),
        QuadraticCoefficients::plasma_linear(0.3),
        QuadraticCoefficients::bec_trap(TimeFunction::constant(2.25)),
    ] {
        let b = solve_basis(&c, 10.0).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=500 {
            let t = 0.02 * i as f64;
            let (n, e) = (b.eval(t).unwrap(), b.eval_closed(t).unwrap());
            worst = worst.max((n.mu0 - e.mu0).abs()).max((n.mu1 - e.mu1).abs());
        }
        assert!(worst < 1e-9, "{:?}: {worst:e}", c.preset);
    }
}

#[test]
fn wronskian_identity() {
    for c in [bec_slow_modulation(), everything_varies()] {
        let b = solve_basis(&c, 20.0).unwrap();
        for i in 0..=400 {
            let t = 0.05 * i as f64;
            let w = b.wronskian(t).unwrap();
            let e = wronskian_expected(&c, 0.0, t);
            assert!((w - e).abs() <= 1e-8 * e.abs().max(1.0), "t={t}: {w} vs {e}");
        }
    }
}

#[test]
fn integration_is_reversible() {
    let c = everything_varies();
    let b = solve_basis(&c, 10.0).unwrap();
    let end = b.eval(10.0).unwrap();
    let back = integrate_characteristic(&c, 10.0, [end.mu0, end.dmu0], 0.0).unwrap();
    let a0 = c.a.value(0.0);
    assert!(back[0].abs() < 1e-7);
    assert!((back[1] - 2.0 * a0).abs() < 1e-7);
    let back1 = integrate_characteristic(&c, 10.0, [end.mu1, end.dmu1], 0.0).unwrap();
    assert!((back1[0] - 1.0).abs() < 1e-7 && back1[1].abs() < 1e-7);
}
