use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use netflux_cli::config::{Coupling, Preset, Scheme};
use netflux_cli::{resolve, run_preset, CliError, ConfigLayer};

#[derive(Parser)]
#[command(
    name = "netflux",
    version,
    about = "Relaxation schemes for conservation laws on networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one preset and write snapshots and diagnostics.
    Run(RunArgs),
    /// Burgers grid convergence study.
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// TOML file with configuration values; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cells per edge.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Fixed time step instead of a CFL number.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<Scheme>,
    #[arg(long, value_enum)]
    coupling: Option<Coupling>,
    /// Right-of-way parameter of flow maximization.
    #[arg(long)]
    beta: Option<f64>,
    /// Relaxation speed on every edge.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Comma-separated output times.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    #[arg(long)]
    eps_reg: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyPreset {
    Burgers,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long, value_enum, default_value = "burgers")]
    preset: StudyPreset,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Only the two coarsest resolutions.
    #[arg(long)]
    fast: bool,
    /// Comma-separated table resolutions (cells covering (-1, 1)).
    #[arg(long, value_delimiter = ',', conflicts_with = "fast")]
    resolutions: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn file_layer(path: Option<&PathBuf>) -> Result<ConfigLayer, CliError> {
    path.map_or_else(|| Ok(ConfigLayer::default()), |p| ConfigLayer::from_file(p))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(a) => {
            let flags = ConfigLayer {
                preset: a.preset,
                scheme: a.scheme,
                coupling: a.coupling,
                m: a.m,
                t_end: a.t_end,
                snapshot_times: a.snapshots,
                cfl: a.cfl,
                dt: a.dt,
                beta: a.beta,
                eps_reg: a.eps_reg,
                out: a.out,
                lambda: a.lambda,
                ..Default::default()
            };
            let cfg = resolve(file_layer(a.config.as_ref())?, flags)?;
            if let Some(s) = run_preset(&cfg)? {
                log::info!(
                    "{} steps, max node residual {:e}",
                    s.steps,
                    s.max_node_residual
                );
            }
            println!("wrote {}", cfg.out.display());
        }
        Command::Convergence(a) => {
            let StudyPreset::Burgers = a.preset;
            let flags = ConfigLayer {
                preset: Some(Preset::BurgersConvergence),
                resolutions: if a.fast {
                    Some(vec![100, 200])
                } else {
                    a.resolutions
                },
                out: a.out,
                ..Default::default()
            };
            let cfg = resolve(file_layer(a.config.as_ref())?, flags)?;
            for r in netflux_cli::run_convergence(&cfg)? {
                for row in &r.rows {
                    println!(
                        "{:<18} {:>5}  L1 {:.3e} {:>5}  Linf {:.3e} {:>5}",
                        r.scheme,
                        row.inv_dx,
                        row.l1,
                        row.eoc_l1.map_or(String::new(), |e| format!("{e:.2}")),
                        row.linf,
                        row.eoc_linf.map_or(String::new(), |e| format!("{e:.2}")),
                    );
                }
            }
            println!("wrote {}", cfg.out.join("table.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
