use std::fs;
use std::path::Path;

use serde::Serialize;
use soliton_forge::io::{fmt17, Table};
use soliton_forge::scenarios::{
    apply_overrides, fit_box, load_scenario, run_scenario, scenario_catalog, Check, RunOptions,
    Scenario,
};
use soliton_forge::verifier::{l2_relative_error, split_step_propagate, FieldGrid, SplitStepOptions};
use soliton_forge::{Complex64, Error, Execution, Result};

use crate::{ProfileArgs, RunArgs};

/// Resolved sampling parameters recorded in every manifest.
#[derive(Serialize, Default)]
struct RunRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    x_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nx: Option<usize>,
    /// True when x excludes the right end point (periodic box).
    #[serde(skip_serializing_if = "Option::is_none")]
    periodic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nt: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    record_every: Option<usize>,
    h_scale: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    outputs: Vec<String>,
    run: RunRecord,
    scenario: &'a Scenario,
}

fn write_manifest(out: &Path, command: &'static str, outputs: &[&str], run: RunRecord, s: &Scenario) -> Result<()> {
    let m = Manifest {
        tool: "soliton-forge",
        version: env!("CARGO_PKG_VERSION"),
        command,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        run,
        scenario: s,
    };
    let text = toml::to_string(&m).map_err(|e| Error::Io(format!("manifest: {e}")))?;
    write(out, "manifest.toml", &text)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))
}

fn run_options(a: &RunArgs) -> Result<RunOptions> {
    if let Some(tol) = a.tol {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("--tol must be positive, got {tol}")));
        }
    }
    Ok(RunOptions {
        exec: Execution::default(),
        h_scale: 1.0 + a.perturb_h0.unwrap_or(0.0),
        tol: a.tol,
        box_half_width: a.grid_l,
        box_points: a.grid_n,
        dt: a.dt,
        t_max: a.t_max,
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn solve(a: &RunArgs) -> Result<u8> {
    let opts = run_options(a)?;
    let s = apply_overrides(&load_scenario(&a.scenario)?, &RunOptions { t_max: a.t_max, ..RunOptions::default() })?;
    let sol = s.build()?;
    let g = &s.grid;
    let mut run = RunRecord {
        h_scale: opts.h_scale,
        t_min: Some(g.t_min),
        t_max: Some(g.t_max),
        nt: Some(a.nt.unwrap_or(g.nt)),
        ..RunRecord::default()
    };
    let x = if a.grid_l.is_some() || a.grid_n.is_some() {
        let l = a.grid_l.unwrap_or(0.5 * (g.x_max - g.x_min));
        let n = a.grid_n.unwrap_or(g.nx);
        if !(l > 0.0) || n < 2 {
            return Err(Error::Config("--grid-L must be positive and --grid-N at least 2".into()));
        }
        (run.x_min, run.x_max, run.nx, run.periodic) = (Some(-l), Some(l), Some(n), Some(true));
        (0..n).map(|i| -l + 2.0 * l * i as f64 / n as f64).collect()
    } else {
        (run.x_min, run.x_max, run.nx, run.periodic) = (Some(g.x_min), Some(g.x_max), Some(g.nx), Some(false));
        g.x()
    };
    let nt = a.nt.unwrap_or(g.nt);
    if nt < 1 {
        return Err(Error::Config("--nt must be at least 1".into()));
    }
    let t = linspace(g.t_min, g.t_max, nt);

    prepare_out(&a.out)?;
    let field = FieldGrid::sample(&sol, x, t.clone(), opts.exec).map_err(|e| e.in_scenario(&s.name))?;
    field.write_csv(a.out.join("field.csv"))?;
    let mut phase = Table::new(&["t", "mu", "alpha", "beta", "gamma", "delta", "epsilon", "kappa", "xi"], ' ');
    for &tt in &t {
        phase.push(&sol.state(tt).map_err(|e| e.in_scenario(&s.name))?.as_array());
    }
    phase.write(a.out.join("phase.csv"))?;
    write_manifest(&a.out, "solve", &["field.csv", "phase.csv"], run, &s)?;
    println!(
        "{}: wrote field.csv ({} x {}), phase.csv and manifest.toml to {}",
        s.name,
        field.t().len(),
        field.x().len(),
        a.out.display()
    );
    Ok(0)
}

pub fn verify(a: &RunArgs) -> Result<u8> {
    let opts = run_options(a)?;
    let s = load_scenario(&a.scenario)?;
    let effective = apply_overrides(&s, &opts)?;
    let report = run_scenario(&effective, &RunOptions { h_scale: opts.h_scale, ..RunOptions::default() })?;
    prepare_out(&a.out)?;
    let table = report.to_table();
    table.write(a.out.join("verify.csv"))?;
    let run = RunRecord {
        h_scale: opts.h_scale,
        ..RunRecord::default()
    };
    write_manifest(&a.out, "verify", &["verify.csv"], run, &effective)?;
    print!("{}", table.render());
    for c in report.checks.iter().filter(|c| !c.note.is_empty()) {
        println!("# {}: {}", c.name, c.note);
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        println!("{}: {} checks passed", report.scenario, report.checks.len());
        Ok(0)
    } else {
        println!("{}: {failed} of {} checks failed", report.scenario, report.checks.len());
        Ok(1)
    }
}

pub fn propagate(a: &RunArgs) -> Result<u8> {
    let opts = run_options(a)?;
    let s = load_scenario(&a.scenario)?;
    let sol = s.build()?;
    let plan = s.checks.iter().find_map(|c| match c {
        Check::Propagation { dt, t_end, half_width, points, .. } => Some((*dt, *t_end, *half_width, *points)),
        _ => None,
    });
    let (dt0, t_end0, l0, n0) = plan.unwrap_or((1e-4, s.grid.t_max, 20.0, 1024));
    let t_end = a.t_max.unwrap_or(t_end0);
    let dt = a.dt.unwrap_or(dt0);
    let t0 = sol.origin();
    if !(t_end > t0) || t_end > s.horizon {
        return Err(Error::Config(format!("--t-max must lie in ({t0}, {}]", s.horizon)));
    }
    let grid = match (a.grid_l, a.grid_n) {
        (None, None) => fit_box(&sol, t_end, l0, n0),
        (l, n) => soliton_forge::verifier::PeriodicGrid::new(l.unwrap_or(l0), n.unwrap_or(n0)),
    }
    .map_err(|e| e.in_scenario(&s.name))?;

    let x = grid.x();
    let state0 = sol.state(t0)?;
    let psi0 = x.iter().map(|&xx| sol.psi_at(xx, &state0)).collect::<Result<Vec<_>>>()?;
    let mut so = SplitStepOptions::new(dt);
    so.record_every = a.record_every;
    let laws = sol.balance_laws().with_h_scale(opts.h_scale);
    let out = split_step_propagate(&psi0, &grid, sol.coefficients(), &laws, t0, t_end, &so)
        .map_err(|e| e.in_scenario(&s.name))?;
    let state1 = sol.state(t_end)?;
    let exact: Vec<Complex64> = x.iter().map(|&xx| sol.psi_at(xx, &state1)).collect::<Result<_>>()?;
    let err = l2_relative_error(out.row(out.t().len() - 1), &exact)?;

    prepare_out(&a.out)?;
    out.write_csv(a.out.join("propagate.csv"))?;
    let run = RunRecord {
        x_min: Some(-grid.half_width()),
        x_max: Some(grid.half_width()),
        nx: Some(grid.len()),
        periodic: Some(true),
        t_min: Some(t0),
        t_max: Some(t_end),
        dt: Some(dt),
        record_every: Some(a.record_every),
        h_scale: opts.h_scale,
        ..RunRecord::default()
    };
    write_manifest(&a.out, "propagate", &["propagate.csv"], run, &s)?;
    println!(
        "{}: propagated to t = {t_end} on L = {}, N = {}, dt = {dt}; L2 relative error vs analytic {}",
        s.name,
        grid.half_width(),
        grid.len(),
        fmt17(err)
    );
    Ok(0)
}

pub fn profile(a: &ProfileArgs) -> Result<u8> {
    let s = load_scenario(&a.scenario)?;
    if !(a.z_max > a.z_min) || a.samples < 2 {
        return Err(Error::Config("need --z-max > --z-min and --samples >= 2".into()));
    }
    let p = s.profile.build().map_err(|e| e.in_scenario(&s.name))?;
    let mut tab = Table::new(&["z", "F", "dF"], ' ');
    for z in linspace(a.z_min, a.z_max, a.samples) {
        let (f, df) = p.eval(z).map_err(|e| e.in_scenario(&s.name))?;
        tab.push(&[z, f, df]);
    }
    prepare_out(&a.out)?;
    tab.write(a.out.join("profile.csv"))?;
    let run = RunRecord {
        x_min: Some(a.z_min),
        x_max: Some(a.z_max),
        nx: Some(a.samples),
        periodic: Some(false),
        h_scale: 1.0,
        ..RunRecord::default()
    };
    write_manifest(&a.out, "profile", &["profile.csv"], run, &s)?;
    println!("{}: wrote profile.csv ({} samples, kind {:?})", s.name, a.samples, p.kind());
    Ok(0)
}

#[derive(Serialize)]
struct FeshbachReport {
    scenario: String,
    sync_residual: f64,
    rows: usize,
    poles: Vec<f64>,
}

pub fn feshbach(a: &RunArgs) -> Result<u8> {
    let mut s = load_scenario(&a.scenario)?;
    if let (Some(f), Some(t)) = (s.feshbach.as_mut(), a.t_max) {
        f.t_max = t;
    }
    if let (Some(f), Some(n)) = (s.feshbach.as_mut(), a.nt) {
        f.samples = n;
    }
    s.validate()?;
    let sol = s.build()?;
    let prog = s.field_program(&sol)?;
    prepare_out(&a.out)?;
    prog.to_table().write(a.out.join("bfield.csv"))?;
    let report = FeshbachReport {
        scenario: s.name.clone(),
        sync_residual: prog.sync_residual,
        rows: prog.tau.len(),
        poles: prog.poles.clone(),
    };
    let text = toml::to_string(&report).map_err(|e| Error::Io(format!("report: {e}")))?;
    write(&a.out, "feshbach_report.toml", &text)?;
    let f = s.feshbach.as_ref().expect("validated above");
    let run = RunRecord {
        t_min: Some(f.t_min),
        t_max: Some(f.t_max),
        nt: Some(f.samples),
        h_scale: 1.0,
        ..RunRecord::default()
    };
    write_manifest(&a.out, "feshbach", &["bfield.csv", "feshbach_report.toml"], run, &s)?;
    print!("{text}");
    Ok(0)
}

pub fn catalog(show: Option<&str>) -> Result<u8> {
    if let Some(name) = show {
        print!("{}", soliton_forge::scenarios::find_scenario(name)?.to_toml());
        return Ok(0);
    }
    let cat = scenario_catalog();
    let width = cat.iter().map(|s| s.name.len()).max().unwrap_or(0);
    for s in cat {
        let checks: Vec<&str> = s.checks.iter().map(Check::name).collect();
        println!("{:width$}  {} [{}]", s.name, s.description, checks.join(", "));
    }
    Ok(0)
}
