use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dicke_battery::dynamics::Method;
use dicke_battery::harness::{
    parse_config_with_overrides, run_evolution, run_max_scan, run_spectrum_scan, run_trace_sweep, Reduction, RunConfig,
};
use dicke_battery::Result;

#[derive(Parser)]
#[command(
    name = "dicke-battery",
    version,
    about = "Charging dynamics of a Dicke-Ising quantum battery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time evolution of the ion-chain observables (one trace, or one per
    /// point of a `sweep_reduction = "trace"` sweep).
    Evolve(Common),
    /// Maxima of charging energy and ergotropy over a window, per sweep point.
    Maxscan(Common),
    /// Spectrum and ground-state magnetization of the ion Hamiltonian versus J.
    Spectrum(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Krylov,
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Krylov error tolerance per unit time.
    #[arg(long)]
    tol: Option<f64>,
    /// Concurrent sweep points.
    #[arg(long)]
    workers: Option<usize>,
    /// Override a configuration key, e.g. `--set lambda=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path)?,
            None => String::new(),
        };
        let mut overrides = self.overrides.clone();
        if let Some(m) = self.method {
            let name = match m {
                MethodArg::Auto => "auto",
                MethodArg::Dense => "dense",
                MethodArg::Krylov => "krylov",
            };
            overrides.push(format!("method=\"{name}\""));
        }
        if let Some(tol) = self.tol {
            overrides.push(format!("tol={tol:?}"));
        }
        if let Some(w) = self.workers {
            overrides.push(format!("workers={w}"));
        }
        if let Some(out) = &self.out {
            overrides.push(format!("out_dir={:?}", out.display().to_string()));
        }
        parse_config_with_overrides(&text, &overrides)
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::DenseEig => "dense",
        Method::Krylov => "krylov",
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(common) => {
            let config = common.load()?;
            if config.sweep.as_ref().is_some_and(|s| s.reduction == Reduction::Trace) {
                let points = run_trace_sweep(&config)?;
                for p in &points {
                    println!(
                        "{} = {}: E_c = {:.6}, E_e = {:.6}, S = {:.6} at t = {} ({})",
                        config.sweep.as_ref().map_or("", |s| s.param.key()),
                        p.value,
                        p.final_charging,
                        p.final_ergotropy,
                        p.final_entropy,
                        config.t_max,
                        p.file
                    );
                }
            } else {
                let trace = run_evolution(&config)?;
                let s = &trace.summary;
                let (max_ec, _) = trace.max_over(0.0, config.t_max, |r| r.charging).expect("samples");
                let (max_ee, _) = trace.max_over(0.0, config.t_max, |r| r.ergotropy).expect("samples");
                println!(
                    "{} samples, dim {}, {} path; max E_c = {max_ec:.6}, max E_e = {max_ee:.6}",
                    trace.records.len(),
                    s.dim,
                    method_name(s.method)
                );
                println!(
                    "norm error {:.2e}, energy drift {:.2e}, leakage {:.2e}{}",
                    s.max_norm_error,
                    s.max_energy_drift,
                    s.max_leakage,
                    if s.leakage_warning { " (above threshold)" } else { "" }
                );
            }
            println!("wrote {}", config.out_dir.display());
        }
        Command::Maxscan(common) => {
            let config = common.load()?;
            let scan = run_max_scan(&config)?;
            for r in &scan.rows {
                println!(
                    "{} = {}: max E_c = {:.6} (t = {}), max E_e = {:.6} (t = {})",
                    scan.param.key(),
                    r.value,
                    r.max_charging,
                    r.t_max_charging,
                    r.max_ergotropy,
                    r.t_max_ergotropy
                );
            }
            println!("argmax of max E_e: {} = {}", scan.param.key(), scan.argmax_ergotropy());
            println!("wrote {}", config.out_dir.join("maxscan.csv").display());
        }
        Command::Spectrum(common) => {
            let config = common.load()?;
            for scan in run_spectrum_scan(&config)? {
                println!(
                    "{:?}: {} J values, M_z in [{:.4}, {:.4}]",
                    scan.hopping_mode,
                    scan.j_grid.len(),
                    scan.m_z.iter().copied().fold(f64::INFINITY, f64::min),
                    scan.m_z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                );
            }
            println!("wrote {}", config.out_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
