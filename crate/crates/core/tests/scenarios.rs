use num_complex::Complex64;
use soliton_forge::assembler::{GaugedSolution, SolitonSolution};
use soliton_forge::scenarios::{
    find_scenario, load_scenario, quadratic_fit, run_scenario, scenario_catalog, Check, RunOptions,
    Scenario,
};
use soliton_forge::verifier::{pde_residual, ResidualOptions};
use soliton_forge::Error;

const TOL: f64 = 1e-9;

fn times() -> impl Iterator<Item = f64> {
    (0..=44).map(|i| 0.1 + 1.1 * i as f64 / 44.0)
}

fn xs() -> impl Iterator<Item = f64> {
    (0..=40).map(|i| -6.0 + 0.3 * i as f64)
}

/// The catalog entry with chirped, shifted initial data.
fn variant(name: &str, f: impl FnOnce(&mut Scenario)) -> SolitonSolution {
    let mut s = find_scenario(name).unwrap();
    s.initial.mu = 1.2;
    s.initial.alpha = 0.1;
    s.initial.beta = 0.9;
    s.initial.gamma = 0.2;
    s.horizon = s.horizon.max(1.3);
    f(&mut s);
    s.build().unwrap()
}

fn close(got: f64, want: f64, what: &str, t: f64) {
    assert!((got - want).abs() < TOL * want.abs().max(1.0), "{what} at t = {t}: {got} vs {want}");
}

#[test]
fn catalog_is_complete() {
    let cat = scenario_catalog();
    assert!(cat.len() >= 11);
    for s in &cat {
        assert!(!s.description.is_empty(), "{}", s.name);
        assert!(!s.checks.is_empty(), "{}", s.name);
    }
}

#[test]
fn plans_contain_their_signature_checks() {
    let has = |name: &str, kind: &str| find_scenario(name).unwrap().checks.iter().any(|c| c.name() == kind);
    assert!(has("plasma-accelerating", "acceleration"));
    assert!(has("plasma-painleve2", "gauged-residual"));
    assert!(has("bec-feshbach-harmonic", "feshbach"));
    assert!(has("free-bright", "propagation"));
}

#[test]
fn unknown_scenario_lists_the_catalog() {
    match find_scenario("free-brigth") {
        Err(Error::UnknownScenario { name, catalog }) => {
            assert_eq!(name, "free-brigth");
            assert!(catalog.contains("free-bright") && catalog.contains("bec-feshbach-linear"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn toml_round_trip_and_file_loading() {
    let s = find_scenario("fiber-retimed").unwrap();
    let back = Scenario::from_toml(&s.to_toml()).unwrap();
    assert_eq!(back, s);
    let dir = std::env::temp_dir().join(format!("sf-scenario-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("custom.toml");
    std::fs::write(&path, s.to_toml()).unwrap();
    assert_eq!(load_scenario(path.to_str().unwrap()).unwrap(), s);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn malformed_scenarios_are_config_errors() {
    let good = find_scenario("free-bright").unwrap().to_toml();
    let cases = [
        good.replace("horizon = 2.0", "horizon = -1.0"),
        good.replace("[profile]", "[profile]\nextra = 1"),
        good.replace("preset = \"free-particle\"", "preset = \"vacuum\""),
        good.replace("m = 0", "m = 3"),
        good.replace("tol = 0.000001", "tol = 0.0"),
    ];
    for text in cases {
        assert_ne!(text, good);
        assert!(matches!(Scenario::from_toml(&text), Err(Error::Config(_))), "{text}");
    }
}

#[test]
fn free_bright_passes_its_plan() {
    let r = run_scenario(&find_scenario("free-bright").unwrap(), &RunOptions::default()).unwrap();
    assert!(r.passed(), "{r:#?}");
    let table = r.to_table().render();
    assert!(table.starts_with("name value tolerance pass\n"));
    assert_eq!(table.lines().count(), r.checks.len() + 1);
}

#[test]
fn perturbed_nonlinearity_fails_the_plan() {
    let s = find_scenario("free-dark").unwrap();
    let opts = RunOptions {
        h_scale: 1.01,
        ..RunOptions::default()
    };
    let r = run_scenario(&s, &opts).unwrap();
    let res = r.get("residual").unwrap();
    assert!(!res.pass && res.value > 1e-3, "{res:?}");
}

#[test]
fn harmonic_caustic_is_reported_with_its_time() {
    let mut s = find_scenario("harmonic-bright").unwrap();
    s.horizon = 2.0;
    s.grid.t_max = 1.9;
    s.checks = vec![Check::Residual { tol: 1e-6 }];
    let err = run_scenario(&s, &RunOptions::default()).unwrap_err();
    // cos t + 2α₀ sin t = 0 with α₀ = 0.1.
    let t_c = std::f64::consts::PI - 5.0f64.atan();
    match err.root() {
        Error::FocalPoint { t } => assert!((t - t_c).abs() < 1e-6, "{t} vs {t_c}"),
        e => panic!("{e:?}"),
    }
    assert!(err.to_string().contains("harmonic-bright"));
}

#[test]
fn free_phase_laws_match_closed_forms() {
    let sol = variant("free-bright", |_| {});
    let laws = sol.balance_laws();
    let (mu0, a0, b0, c0) = (1.2, 0.1, 0.9, 0.2);
    let (g0, h0, y) = (1.0, -1.0, 0.2);
    for t in times() {
        let s = sol.state(t).unwrap();
        let d = 1.0 - 4.0 * a0 * t;
        close(s.alpha, a0 / d, "alpha", t);
        close(s.beta, b0 / d, "beta", t);
        close(s.gamma, c0 + b0 * b0 * t / d, "gamma", t);
        close(s.mu, mu0 * d, "mu", t);
        let l = laws.at(t).unwrap();
        close(l.g_coef, -g0 * b0 * b0 / (d * d), "forcing", t);
        close(l.h, -h0 * mu0 * b0 * b0 / d, "h", t);
        for x in xs() {
            let z = (b0 * x + 2.0 * (c0 + (b0 * b0 - 4.0 * a0 * c0) * t) * y) / d;
            close(sol.travelling_argument(x, &s), z, "z", t);
        }
    }
}

#[test]
fn free_airy_forcing_matches_closed_form() {
    let sol = variant("free-painleve2", |_| {});
    let laws = sol.balance_laws();
    let (a0, b0, c0, g0, y) = (0.1, 0.9, 0.2, 1.0, 0.1);
    for t in times() {
        let d = 1.0 - 4.0 * a0 * t;
        let l = laws.at(t).unwrap();
        for x in xs() {
            let z = (b0 * x + 2.0 * (c0 + (b0 * b0 - 4.0 * a0 * c0) * t) * y) / d;
            close(l.forcing(x), -g0 * b0 * b0 / (d * d) * z, "forcing", t);
        }
    }
}

#[test]
fn harmonic_soliton_matches_closed_form() {
    let sol = variant("harmonic-bright", |_| {});
    let (mu0, a0, b0, c0, g0, y) = (1.2, 0.1, 0.9, 0.2, 1.0, 0.2);
    let p = sol.profile();
    for t in times() {
        let (c, s) = (t.cos(), t.sin());
        let d = c + 2.0 * a0 * s;
        let gy = 2.0 * c0 * c - (b0 * b0 - 4.0 * a0 * c0) * s;
        for x in xs() {
            let z = (b0 * x + gy * y) / d;
            let phase = (2.0 * a0 * c - s) / (2.0 * d) * x * x
                + b0 * x * y / d
                + gy / (2.0 * d) * y * y
                + g0 * b0 * b0 * s / (2.0 * d);
            let want = Complex64::from_polar(p.eval(z).unwrap().0 / (mu0 * d).sqrt(), phase);
            let got = sol.psi(x, t).unwrap();
            assert!((got - want).norm() < TOL, "t = {t}, x = {x}: {got} vs {want}");
        }
    }
}

#[test]
fn plasma_phase_laws_match_closed_forms() {
    let sol = variant("plasma-accelerating", |s| {
        s.initial.epsilon = -0.3;
        s.initial.kappa = 0.1;
    });
    let k = 0.4;
    let (mu0, a0, b0, c0, d0, e0, k0, y) = (1.2, 0.1, 0.9, 0.2, 0.2, -0.3, 0.1, 0.3);
    for t in times() {
        let s = sol.state(t).unwrap();
        let d = 1.0 + 4.0 * a0 * t;
        close(s.mu, mu0 * d, "mu", t);
        close(s.alpha, a0 / d, "alpha", t);
        close(s.beta, b0 / d, "beta", t);
        close(s.gamma, c0 - b0 * b0 * t / d, "gamma", t);
        close(s.delta, k * t + (d0 + k * t) / d, "delta", t);
        close(s.epsilon, e0 - 2.0 * b0 * t * (d0 + k * t) / d, "epsilon", t);
        close(s.kappa, k0 - k * k * t.powi(3) / 3.0 - t * (d0 + k * t).powi(2) / d, "kappa", t);
        for x in xs() {
            let z = b0 * (x - 2.0 * t * (b0 * y + d0 + k * t)) / d + 2.0 * y * c0 + e0;
            close(sol.travelling_argument(x, &s), z, "z", t);
        }
    }
}

#[test]
fn gauged_airy_soliton_matches_closed_form() {
    // Uniform motion needs α₀ = 0; g₀ ≠ 1 exercises the profile scaling.
    let sol = variant("plasma-painleve2", |s| {
        s.initial.alpha = 0.0;
        s.profile.g0 = 1.5;
    });
    let g = GaugedSolution::new(sol).unwrap();
    let (mu0, b0, c0, g0, h0, y): (f64, f64, f64, f64, f64, f64) = (1.2, 0.9, 0.2, 1.5, 2.0, 0.3);
    let w = g.solution().profile().painleve().unwrap();
    let c13 = g0.cbrt();
    for t in times() {
        for x in xs() {
            let gt = c0 - b0 * b0 * t;
            let z = b0 * x + 2.0 * gt * y;
            let amp = c13 * (2.0 / h0).sqrt() * w.eval(c13 * z).unwrap().0 / mu0.sqrt();
            let phase = b0 * x * y + gt * y * y + g0 * b0 * b0 * t * (2.0 * c0 - b0 * b0 * t) * y;
            let want = Complex64::from_polar(amp, phase);
            let got = g.chi(x, t).unwrap();
            assert!((got - want).norm() < TOL, "t = {t}, x = {x}: {got} vs {want}");
        }
    }
}

#[test]
fn gauged_field_solves_the_linear_potential_equation() {
    let s = find_scenario("plasma-painleve2").unwrap();
    let g = GaugedSolution::new(s.build().unwrap()).unwrap();
    let xs: Vec<f64> = (0..256).map(|i| -15.0 + 25.0 * i as f64 / 255.0).collect();
    let ts: Vec<f64> = (0..50).map(|i| 0.05 + 1.0 * i as f64 / 49.0).collect();
    let opts = ResidualOptions::default();
    let c = g.solution().coefficients();
    let ok = pde_residual(&g, c, &g.laws(), &xs, &ts, &opts).unwrap();
    assert!(ok.rel_to_scale < 1e-5, "{ok:?}");
    // The ungauged laws do not describe χ.
    let bad = pde_residual(&g, c, &g.solution().balance_laws(), &xs, &ts, &opts).unwrap();
    assert!(bad.rel_to_scale > 1e-3, "{bad:?}");
}

#[test]
fn fiber_is_a_retimed_free_soliton() {
    let fiber = find_scenario("fiber-retimed").unwrap();
    let mut free = fiber.clone();
    free.coefficients = find_scenario("free-bright").unwrap().coefficients;
    free.horizon = 3.0;
    let (f, g) = (fiber.build().unwrap(), free.build().unwrap());
    // a = −(1 + 0.3 sin t), d = 0.1 cos 2t.
    let tau = |t: f64| t + 0.3 * (1.0 - t.cos());
    let lambda = |t: f64| 0.05 * (2.0 * t).sin();
    for t in times() {
        let (sf, sg) = (f.state(t).unwrap(), g.state(tau(t)).unwrap());
        close(sf.mu, (2.0 * lambda(t)).exp() * sg.mu, "mu", t);
        for x in xs() {
            let want = g.psi_at(x, &sg).unwrap() * (-lambda(t)).exp();
            let got = f.psi_at(x, &sf).unwrap();
            assert!((got - want).norm() < TOL, "t = {t}, x = {x}: {got} vs {want}");
        }
    }
}

#[test]
fn accelerating_centre_follows_a_parabola() {
    let s = find_scenario("plasma-accelerating").unwrap();
    let sol = s.build().unwrap();
    let tr = soliton_forge::assembler::classical_trajectory(&sol, 0.0, 1.2, 240).unwrap();
    let [c0, c1, c2] = quadratic_fit(&tr.t, &tr.x).unwrap();
    // x = 2t(β₀y + δ₀ + kt) for α₀ = 0.
    assert!(c0.abs() < 1e-12);
    assert!((c1 - 2.0 * (0.3 + 0.2)).abs() < 1e-10);
    assert!((c2 - 2.0 * 0.4).abs() < 1e-8);
}

#[test]
fn feshbach_scenario_programs_the_field() {
    let s = find_scenario("bec-feshbach-harmonic").unwrap();
    let sol = s.build().unwrap();
    let prog = s.field_program(&sol).unwrap();
    assert_eq!(prog.tau.len(), 111);
    assert!(prog.poles.is_empty());
    assert!(prog.sync_residual < 1e-10);
    assert!(find_scenario("free-bright").unwrap().field_program(&sol).is_err());
}

#[test]
fn overrides_replace_tolerances_and_grids() {
    let s = find_scenario("free-bright").unwrap();
    let opts = RunOptions {
        tol: Some(1e-7),
        ..RunOptions::default()
    };
    let r = run_scenario(&s, &opts).unwrap();
    assert!(r.checks.iter().all(|c| c.tol == 1e-7));
    assert!(r.passed(), "{r:#?}");
    let opts = RunOptions {
        box_points: Some(100),
        ..RunOptions::default()
    };
    assert!(matches!(run_scenario(&s, &opts), Err(Error::Config(_))));
}
