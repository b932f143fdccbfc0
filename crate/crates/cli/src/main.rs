//! `soliton-forge`: run, verify and export the built-in soliton scenarios.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! configuration error, 3 numerical failure.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "soliton-forge", version, about = "Exact nonautonomous NLS solitons and their numerical verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the analytic field and phase trajectory of a scenario.
    Solve(RunArgs),
    /// Run the scenario's verification plan and write verify.csv.
    Verify(RunArgs),
    /// Propagate the analytic initial data with the split-step solver.
    Propagate(RunArgs),
    /// Tabulate the stationary profile F(z) and F'(z).
    Profile(ProfileArgs),
    /// Write the Feshbach magnetic-field program for a condensate scenario.
    Feshbach(RunArgs),
    /// List the built-in scenarios.
    Catalog {
        /// Print the full TOML of one scenario instead of the list.
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Catalog name or path to a scenario TOML file.
    #[arg(long)]
    pub scenario: String,
    /// Half-width L of the periodic box [-L, L).
    #[arg(long = "grid-L")]
    pub grid_l: Option<f64>,
    /// Number of grid points (a power of two for propagation).
    #[arg(long = "grid-N")]
    pub grid_n: Option<usize>,
    /// Last sampled or propagated time.
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of time samples for `solve`.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Split-step time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Tolerance replacing every check tolerance in the plan.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative perturbation of the nonlinearity law (0.01 = +1%).
    #[arg(long = "perturb-h0", allow_hyphen_values = true)]
    pub perturb_h0: Option<f64>,
    /// Steps between recorded frames for `propagate` (0: endpoints only).
    #[arg(long, default_value_t = 0)]
    pub record_every: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: std::path::PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    /// Catalog name or path to a scenario TOML file
    #[arg(long)]
    pub scenario: String,
    /// First sample of the travelling coordinate z
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub z_min: f64,
    /// Last sample of z
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub z_max: f64,
    /// Number of equally spaced samples
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: std::path::PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Propagate(a) => commands::propagate(&a),
        Command::Profile(a) => commands::profile(&a),
        Command::Feshbach(a) => commands::feshbach(&a),
        Command::Catalog { show } => commands::catalog(show.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

/// Sizes the global rayon pool from SOLITON_FORGE_THREADS.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SOLITON_FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SOLITON_FORGE_THREADS must be a positive integer, got `{v}`"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}
